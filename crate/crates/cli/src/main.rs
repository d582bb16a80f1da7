//! `suris-lab`: file-based front end for the Suris map library.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "suris-lab", version, about = "Suris integrable standard map laboratory")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    /// Potential document (JSON with optional "suris", "trig" and "constant" keys).
    #[arg(long, global = true)]
    pub potential: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Quadrature nodes for inner products.
    #[arg(long, global = true, default_value_t = 2048)]
    pub grid: usize,
    /// Solver tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Worker threads; falls back to SURIS_LAB_THREADS.
    #[arg(long, global = true, env = "SURIS_LAB_THREADS")]
    pub threads: Option<usize>,
    /// Print the output columns of the subcommand and exit.
    #[arg(long, global = true)]
    pub schema: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Orbits from a column of initial conditions.
    PhasePortrait {
        #[arg(long, default_value_t = 24)]
        orbits: usize,
        #[arg(long, default_value_t = 400)]
        steps: usize,
        /// Random initial conditions from this seed instead of a regular column.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// A (p, q)-periodic orbit, free or pinned.
    Orbit {
        #[arg(long, allow_hyphen_values = true)]
        p: Option<i64>,
        #[arg(long)]
        q: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        pin: Option<f64>,
    },
    /// Invariant graph with a prescribed rotation number.
    Curve {
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sigma: i8,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, default_value_t = 512)]
        samples: usize,
    },
    /// Angle chart on the curve of rotation number rho.
    Chart {
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 512)]
        samples: usize,
    },
    /// Coefficients <W, f_q> in the deformed basis.
    Coeffs {
        /// Perturbation W as a potential document.
        #[arg(long)]
        w: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        qmax: i64,
    },
    /// Mather beta at p/q.
    Beta {
        #[arg(long, allow_hyphen_values = true)]
        p: Option<i64>,
        #[arg(long)]
        q: Option<i64>,
    },
    /// Free-minimizer actions for rationals in [1/6, 1/3].
    Spectrum {
        #[arg(long, default_value_t = 12)]
        qmax: i64,
    },
    /// Run a verification experiment; exit code 2 when its threshold fails.
    Rigidity(RigidityArgs),
    /// Iterated projection of V_S + W back onto the Suris family.
    Project {
        #[arg(long)]
        w: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        iterations: usize,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct RigidityArgs {
    #[arg(value_enum)]
    pub experiment: Experiment,
    /// Eccentricity of the base parameters when no Suris potential is given.
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 32)]
    pub qmax: i64,
    #[arg(long, default_value_t = 4)]
    pub halvings: usize,
    /// Size of the Suris parameter increment.
    #[arg(long, default_value_t = 1e-2)]
    pub delta: f64,
    /// Perturbation for tail-bound and beta-consistency; seeded random when omitted.
    #[arg(long)]
    pub w: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub r: i64,
    #[arg(long, default_value_t = 2)]
    pub k: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    CoefficientBound,
    TailBound,
    Orthogonality,
    Projection,
    Deviation,
    Constancy,
    Convexity,
    Obstruction,
    BetaConsistency,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(commands::Status::Ok) => ExitCode::SUCCESS,
        Ok(commands::Status::ThresholdFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
