//! Exact tools for rainbow matching parameterized by grouped color deletion.

pub mod conflict;
pub mod gadgets;
pub mod graph;
pub mod recognition;
pub mod kappa;
pub mod rm;
pub mod lasserre;
