mod commands;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use run::Format;

/// Algebroid functions and curves: exact algebra, continuation, and
/// numerical Nevanlinna functionals.
#[derive(Parser)]
#[command(name = "algebroid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Problem file (JSON).
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Targets file: a JSON list of target strings, or an object with a `targets` list.
    #[arg(long)]
    pub targets: Option<PathBuf>,
    /// Smallest radius of the log-spaced grid.
    #[arg(long)]
    pub rmin: Option<f64>,
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Tolerance of the command's check (FMT deviation, SMT margin, comparison slack).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write outputs and a manifest here instead of printing them.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical defining polynomials, discriminants and the critical set.
    Define {
        #[command(flatten)]
        common: Common,
    },
    /// The fiber over a point, one line per sheet.
    Fiber {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Continue every sheet along a path of lines and arcs.
    Track {
        #[command(flatten)]
        common: Common,
        /// Path file: a list of `{"type":"line","to":[re,im]}` and
        /// `{"type":"arc","center":[re,im],"angle":θ}` segments, or an object
        /// with `start`, `segments` and `min_clearance`.
        #[arg(long)]
        path: PathBuf,
        /// Start point when the path file has none.
        #[arg(long, allow_hyphen_values = true)]
        from: Option<String>,
    },
    /// Sheet permutation of a counterclockwise circle.
    Monodromy {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        around: String,
        #[arg(long)]
        radius: f64,
    },
    /// Truncated Puiseux expansions of every sheet cycle at a point.
    Puiseux {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, default_value_t = 3)]
        terms: usize,
    },
    /// Covering model of the problem disk, branch divisor and the J_k comparison.
    Branch {
        #[command(flatten)]
        common: Common,
    },
    /// T, m, N, N̄ and N_bran on the radius grid.
    Nevanlinna {
        #[command(flatten)]
        common: Common,
    },
    /// First Main Theorem residual T - m - N for one target.
    Fmt {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        target: Option<String>,
    },
    /// Second Main Theorem slack for targets in general position.
    Smt {
        #[command(flatten)]
        common: Common,
    },
    /// Curvature comparison models.
    Curvature {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        op: commands::CurvatureOp,
        /// Profile file: `{"kappa": …}` for jacobi and kfactor, `{"volume": …}` for hfactor.
        #[arg(long)]
        profile: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Define { common } => commands::define(&common),
        Command::Fiber { common, at } => commands::fiber(&common, &at),
        Command::Track { common, path, from } => commands::track(&common, &path, from.as_deref()),
        Command::Monodromy { common, around, radius } => commands::monodromy(&common, &around, radius),
        Command::Puiseux { common, at, terms } => commands::puiseux(&common, &at, terms),
        Command::Branch { common } => commands::branch(&common),
        Command::Nevanlinna { common } => commands::nevanlinna(&common),
        Command::Fmt { common, target } => commands::fmt(&common, target.as_deref()),
        Command::Smt { common } => commands::smt(&common),
        Command::Curvature { common, op, profile } => commands::curvature(&common, op, &profile),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            match e.downcast_ref::<algebroid::Error>() {
                Some(core) => eprintln!("error: {}: {core}", core.name()),
                None => eprintln!("error: {e:#}"),
            }
            ExitCode::from(1)
        }
    }
}
