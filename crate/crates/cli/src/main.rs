//! `cylindra`: batch front end to the workbench.
//!
//! Every command prints one JSON report (to stdout, or to `--out` with a
//! summary line on stdout). Exit codes:
//!
//! * 0: success; ∃ wins; the checked property holds
//! * 1: bad arguments or input, or a violated precondition
//! * 2: ∀ wins; the checked property fails; no representation within bounds
//! * 3: a budget ran out before an answer
//!
//! Nothing is written to `--out` unless the exit code is 0 or 2.

mod commands;
mod input;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::manifest::{write_atomically, Config, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "cylindra", version, about = "Finite cylindric algebra workbench")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Cap on memo entries, atoms or search nodes (module defaults otherwise)
    #[arg(long, global = true, env = "WORKBENCH_BUDGET")]
    pub budget_states: Option<usize>,
    /// Worker threads; 0 uses every core
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Construct an atom structure or relation algebra file
    #[command(subcommand)]
    Build(Build),
    /// Decide an atomic game
    Solve(Solve),
    /// Check an axiom system or structural property
    #[command(subcommand)]
    Check(Check),
    /// Clique-guarded evaluation of a formula in a representation
    Eval(Eval),
    /// Split a generalized set algebra into its square factors
    Decompose(Decompose),
    /// Search for a small representation
    Repsearch(Represent),
}

#[derive(Subcommand, Debug)]
pub enum Build {
    /// The B_f preset with its atom structure
    RainbowBf {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Number of tinted greens (default n(n-1)/2 + 2)
        #[arg(long)]
        tints: Option<usize>,
    },
    /// The order-preserving rainbow on Z and N truncated at m
    RainbowCzn {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        m: u32,
        /// Also enumerate the atoms
        #[arg(long)]
        with_atoms: bool,
    },
    /// The relation algebra E_k(2,3)
    Maddux {
        #[arg(long)]
        k: usize,
    },
    /// Blow up and blur a relation algebra
    Blur(BlurArgs),
    /// The CA_n atom structure of the basic matrices of a relation algebra
    BasisCa {
        #[command(flatten)]
        ra: RaArgs,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct RaArgs {
    /// Relation algebra file
    #[arg(long)]
    pub ra: Option<PathBuf>,
    /// Use E_k(2,3) instead of a file
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct BlurArgs {
    #[command(flatten)]
    pub ra: RaArgs,
    /// `whole`, `singletons`, or a blur file with `J`, `E_preset` and `L`
    #[arg(long, default_value = "whole")]
    pub j: String,
    #[arg(long, default_value_t = 3)]
    pub rows: usize,
    #[arg(long, value_enum, default_value_t = Preset::Distinct)]
    pub preset: Preset,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Distinct,
    All,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameKind {
    #[value(name = "G")]
    G,
    #[value(name = "Gmk")]
    Gmk,
    #[value(name = "boldG")]
    BoldG,
    #[value(name = "Hk")]
    Hk,
}

#[derive(Args, Debug)]
pub struct Solve {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = GameKind::G)]
    pub game: GameKind,
    /// Node bound for Gmk and boldG
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub rounds: usize,
    /// Longest short hyperedge in Hk
    #[arg(long)]
    pub hyper_len: Option<usize>,
    /// Verify ∀'s cone script with these tints (comma separated) first
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub cone: Option<Vec<i64>>,
}

#[derive(Subcommand, Debug)]
pub enum Check {
    /// CA_n axioms on the complex algebra
    Ca { file: PathBuf },
    /// TCA_n axioms on the complex algebra
    Tca { file: PathBuf },
    /// Conditions (J1)-(J5) for a blur
    Nblur {
        #[command(flatten)]
        ra: RaArgs,
        /// `whole`, `singletons`, or a blur file
        #[arg(long, default_value = "whole")]
        j: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Whether Mat_n is a cylindric basis
    Basis {
        #[command(flatten)]
        ra: RaArgs,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// m-squareness of a representation
    Msquare {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Representation search with bounds
    Represent(Represent),
}

#[derive(Args, Debug, Clone)]
pub struct Represent {
    /// Atom structure file (positional or `--algebra`)
    #[arg(required_unless_present = "algebra")]
    pub file: Option<PathBuf>,
    #[arg(long, conflicts_with = "file")]
    pub algebra: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub max_base: usize,
    /// square, g (locally square) or d (diagonizable)
    #[arg(long, default_value = "square")]
    pub unit: String,
    /// Also search topologies and check the interior operators
    #[arg(long)]
    pub topological: bool,
}

#[derive(Args, Debug)]
pub struct Eval {
    #[arg(long)]
    pub algebra: PathBuf,
    #[arg(long)]
    pub rep: PathBuf,
    #[arg(long)]
    pub m: usize,
    pub formula: String,
}

#[derive(Args, Debug)]
pub struct Decompose {
    /// Topology file; the discrete topology on `--base` points otherwise
    #[arg(long)]
    pub topology: Option<PathBuf>,
    #[arg(long)]
    pub base: Option<usize>,
    /// Parts of the base as point indices, e.g. `0,1;2`
    #[arg(long)]
    pub parts: String,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
}

/// What a command produced: the report body, its exit code and a summary.
pub struct Outcome {
    pub body: serde_json::Value,
    pub code: u8,
    pub summary: String,
    /// Large artifacts (built structures) are written without indentation.
    pub compact: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.exit_code() == 0 => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let g = cli.global.clone();
    if g.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(g.jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let start = Instant::now();
    let (name, params) = commands::describe(&cli.command);
    let mut manifest =
        RunManifest::new(&name, Config { budget_states: g.budget_states, seed: g.seed, params });
    let outcome = match commands::run(&cli.command, &g, &mut manifest) {
        Ok(o) => o,
        Err(e) => {
            let budget = e.downcast_ref::<cylindra::Error>().is_some_and(|e| matches!(e, cylindra::Error::Budget(_)));
            eprintln!("error: {e:#}");
            return ExitCode::from(if budget { 3 } else { 1 });
        }
    };
    manifest.wall_time_ms = start.elapsed().as_millis() as u64;
    let mut report = serde_json::Map::new();
    report.insert("manifest".into(), serde_json::to_value(&manifest).expect("manifest serializes"));
    match outcome.body {
        serde_json::Value::Object(fields) => report.extend(fields),
        other => {
            report.insert("result".into(), other);
        }
    }
    let text = if outcome.compact {
        serde_json::to_string(&report)
    } else {
        serde_json::to_string_pretty(&report)
    }
    .expect("report serializes")
        + "\n";
    if outcome.code == 0 || outcome.code == 2 {
        match &g.out {
            Some(path) => {
                if let Err(e) = write_atomically(path, &text) {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(1);
                }
                println!("{}", outcome.summary);
            }
            None => {
                print!("{text}");
                eprintln!("{}", outcome.summary);
            }
        }
    } else {
        eprintln!("{}", outcome.summary);
    }
    ExitCode::from(outcome.code)
}
