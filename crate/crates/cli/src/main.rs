use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use rainbow_core::conflict::{block_cut_tree, build_conflict, build_gamma, ColorSet};
use rainbow_core::gadgets::{
    gen_bichromatic_cycle, gen_bounded_block, gen_rainbow_cycle, gen_random, parse_vc, vc_reduce, VcInstance,
};
use rainbow_core::graph::{emit_ecg, parse_ecg, EdgeColoredGraph, WeightVector};
use rainbow_core::kappa::{kappa_bruteforce, kappa_dp_verified, kappa_fpt_hitting, MAX_DP_BLOCK};
use rainbow_core::lasserre::{build_krm, lasserre_optimize, run_suite, Suite};
use rainbow_core::recognition::{parse_obstructions, ClassOracle};
use rainbow_core::rm::{solve_rm_given_f, SolveOptions};

const SCHEMA_VERSION: u64 = 1;
const SIGNIFICANT_DIGITS: usize = 10;

#[derive(Parser)]
#[command(name = "rainbow", version, about = "Exact rainbow matching via grouped color deletion")]
struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Conflict graph, color-intersection graph and block-cut tree.
    Build {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Minimum number of color classes to delete to reach a target class.
    Kappa {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        target: Target,
        /// Obstruction family file, required with `--target family`.
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "dp")]
        method: Method,
        /// Largest deletion set tried by `brute` and `fpt`.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = MAX_DP_BLOCK)]
        block_bound: usize,
    },
    /// Maximum weight rainbow matching given a deletion set.
    #[command(group(ArgGroup::new("deletion").required(true).args(["delete_colors", "auto"])))]
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        delete_colors: Option<Vec<usize>>,
        /// Compute a chordal deletion set first.
        #[arg(long)]
        auto: bool,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Level-t Lasserre relaxation of the rainbow matching LP.
    Lasserre {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Hardness gadgets.
    Gadget {
        #[command(subcommand)]
        kind: GadgetKind,
    },
    /// Instance generators; output is ECG text.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
        #[arg(long, default_value_t = 0, global = true)]
        seed: u64,
    },
    /// Randomized checking suites for the relaxation.
    Check {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum GadgetKind {
    /// Vertex cover to color deletion reduction.
    Vc {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum GenFamily {
    RainbowCycle {
        #[arg(long)]
        n: usize,
    },
    BichromaticCycle {
        #[arg(long)]
        n: usize,
    },
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
    },
    BoundedBlock {
        #[arg(long)]
        b: usize,
        #[arg(long)]
        blocks: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Chordal,
    Bipartite,
    Cluster,
    Family,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Dp,
    Fpt,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    RankClosure,
    Scaling,
    Exactness,
    Gap,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{flag}: cannot read {path}: {message}")]
    Io { flag: &'static str, path: String, message: String },
    #[error("{flag}: {message}")]
    Input { flag: &'static str, message: String },
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Input { .. } => "input",
            CliError::Domain(_) => "domain",
        }
    }
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

fn read(flag: &'static str, path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { flag, path: path.display().to_string(), message: e.to_string() })
}

fn load_graph(path: &Path) -> Result<EdgeColoredGraph, CliError> {
    parse_ecg(&read("--in", path)?).map_err(|e| CliError::Input { flag: "--in", message: e.to_string() })
}

fn load_weights(path: Option<&PathBuf>, m: usize) -> Result<WeightVector, CliError> {
    match path {
        None => Ok(WeightVector::unit(m)),
        Some(p) => WeightVector::parse(&read("--weights", p)?, m)
            .map_err(|e| CliError::Input { flag: "--weights", message: e.to_string() }),
    }
}

/// Rounds every float to ten significant digits.
fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float");
            *v = json!(rounded);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

enum Output {
    Json(Value),
    Text(String),
}

fn usage_error(kind: ErrorKind, message: &str) -> ! {
    Cli::command().error(kind, message).exit()
}

fn run(command: Command) -> Result<Output, CliError> {
    match command {
        Command::Build { input } => {
            let g = load_graph(&input)?;
            let h = build_conflict(&g);
            let gamma = build_gamma(&g);
            let bct = block_cut_tree(&gamma);
            Ok(Output::Json(json!({
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "colors": g.color_count(),
                "conflict": {
                    "adjacency": (0..h.vertex_count()).map(|v| h.graph.neighbors(v).to_vec()).collect::<Vec<_>>(),
                    "color_of": h.color_of,
                },
                "gamma": {
                    "adjacency": (0..gamma.graph.n()).map(|v| gamma.graph.neighbors(v).to_vec()).collect::<Vec<_>>(),
                },
                "block_cut_tree": bct,
            })))
        }
        Command::Kappa { input, target, family, method, budget, block_bound } => {
            let g = load_graph(&input)?;
            let oracle = match target {
                Target::Chordal => ClassOracle::chordal(),
                Target::Bipartite => ClassOracle::bipartite(),
                Target::Cluster => ClassOracle::cluster(),
                Target::Family => {
                    let Some(path) = family.as_ref() else {
                        usage_error(ErrorKind::MissingRequiredArgument, "--target family requires --family <FILE>")
                    };
                    let obstructions = parse_obstructions(&read("--family", path)?)
                        .map_err(|e| CliError::Input { flag: "--family", message: e.to_string() })?;
                    ClassOracle::finite_family(obstructions)
                        .map_err(|e| CliError::Input { flag: "--family", message: e.to_string() })?
                }
            };
            let cap = budget.unwrap_or(g.color_count());
            let mut out = match method {
                Method::Brute => json!(kappa_bruteforce(&g, &oracle, cap).map_err(domain)?),
                Method::Dp => json!(kappa_dp_verified(&g, &oracle, block_bound).map_err(domain)?),
                Method::Fpt => {
                    if !matches!(target, Target::Family) {
                        usage_error(ErrorKind::ArgumentConflict, "--method fpt requires --target family");
                    }
                    let result = kappa_fpt_hitting(&g, oracle.family(), cap).map_err(domain)?;
                    let Some(cert) = result.certificate else {
                        return Err(CliError::Domain(format!("no hitting set of at most {cap} colors (--budget)")));
                    };
                    let mut v = json!(cert);
                    v["search"] = json!(result.stats);
                    v
                }
            };
            out["target"] = json!(oracle.class().name());
            Ok(Output::Json(out))
        }
        Command::Solve { input, delete_colors, auto, weights } => {
            let g = load_graph(&input)?;
            let w = load_weights(weights.as_ref(), g.edge_count())?;
            let f = if auto {
                ColorSet::new(kappa_dp_verified(&g, &ClassOracle::chordal(), MAX_DP_BLOCK).map_err(domain)?.colors)
            } else {
                let colors = delete_colors.unwrap_or_default();
                if let Some(&c) = colors.iter().find(|&&c| c >= g.color_count()) {
                    return Err(CliError::Input {
                        flag: "--delete-colors",
                        message: format!("color {c} out of range for {} colors", g.color_count()),
                    });
                }
                ColorSet::new(colors)
            };
            let sol = solve_rm_given_f(&g, &f, &w, SolveOptions::default()).map_err(domain)?;
            Ok(Output::Json(json!({
                "value": sol.matching.value_f64(),
                "value_exact": sol.matching.value.to_string(),
                "edges": sol.matching.edges,
                "deleted_colors": f.as_slice(),
                "branches_explored": sol.stats.branches_explored,
                "branches_rejected": sol.stats.rejected,
                "branches_pruned": sol.stats.pruned,
                "residual_solver": sol.solver,
            })))
        }
        Command::Lasserre { input, level, weights } => {
            let g = load_graph(&input)?;
            let w = load_weights(weights.as_ref(), g.edge_count())?;
            let sol = lasserre_optimize(&build_krm(&g), level, &w).map_err(domain)?;
            Ok(Output::Json(json!({
                "level": sol.level,
                "value": sol.value,
                "psd_min_eigs": sol.psd.iter().map(|r| json!({
                    "matrix": r.matrix,
                    "min_eigenvalue": r.min_eigenvalue,
                    "pass": r.pass,
                })).collect::<Vec<_>>(),
                "psd_pass": sol.psd_passed(),
                "singleton_projection": sol.y.singletons(),
                "iterations": sol.iterations,
            })))
        }
        Command::Gadget { kind: GadgetKind::Vc { input, k } } => {
            let graph = parse_vc(&read("--in", &input)?)
                .map_err(|e| CliError::Input { flag: "--in", message: e.to_string() })?;
            let (g, _) = vc_reduce(&VcInstance { graph, budget: k });
            Ok(Output::Text(emit_ecg(&g)))
        }
        Command::Gen { family, seed } => {
            let g = match family {
                GenFamily::RainbowCycle { n } => gen_rainbow_cycle(n),
                GenFamily::BichromaticCycle { n } => gen_bichromatic_cycle(n),
                GenFamily::Random { n, m, k } => gen_random(n, m, k, seed),
                GenFamily::BoundedBlock { b, blocks } => gen_bounded_block(b, blocks, seed),
            }
            .map_err(|e| CliError::Input { flag: "gen", message: e.to_string() })?;
            Ok(Output::Text(emit_ecg(&g)))
        }
        Command::Check { suite, seed } => {
            let suite = match suite {
                SuiteArg::RankClosure => Suite::RankClosure,
                SuiteArg::Scaling => Suite::Scaling,
                SuiteArg::Exactness => Suite::Exactness,
                SuiteArg::Gap => Suite::Gap,
            };
            let report = run_suite(suite, seed).map_err(domain)?;
            if !report.pass {
                return Err(CliError::Domain(format!(
                    "suite {} failed: {}",
                    suite.name(),
                    report.failures.join("; ")
                )));
            }
            Ok(Output::Json(json!(report)))
        }
    }
}

fn render(mut v: Value) -> String {
    if let Value::Object(map) = &mut v {
        map.insert("version".into(), json!(SCHEMA_VERSION));
    }
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("serializable value");
    s.push('\n');
    s
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("--out: cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, code) = match run(cli.command) {
        Ok(Output::Json(v)) => (render(v), ExitCode::SUCCESS),
        Ok(Output::Text(t)) => (t, ExitCode::SUCCESS),
        Err(e) => (render(json!({ "error": { "kind": e.kind(), "message": e.to_string() } })), ExitCode::from(1)),
    };
    if let Err(message) = emit(cli.out.as_ref(), &text) {
        eprintln!("{message}");
        return ExitCode::from(1);
    }
    code
}
