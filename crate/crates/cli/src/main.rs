//! `phasekit`: reports, identity checks and matrix dumps for the Hermitian
//! phase operator.
//!
//! Exit codes: 0 success, 1 a failed check or computation, 2 a bad
//! configuration or argument. Output is produced only once a command has
//! finished, so a failing run never leaves a partial report behind.

mod commands;
mod config;
mod parse;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use phasekit::phase_operators::PhaseLabeling;
use phasekit::PhaseError;

use config::{Format, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "phasekit", version, about = "Hermitian phase operator toolkit")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Highest retained number state (even, >= 8).
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// Gauss–Legendre nodes for phase-state sums.
    #[arg(long, global = true)]
    quad: Option<usize>,
    /// Rows excluded at the truncation edge in interior comparisons.
    #[arg(long, global = true)]
    margin: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Labeling {
    /// Minus branch carries φ − π.
    Eigenvalue,
    /// Minus branch carries φ + π.
    Angular,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suite; exits 1 if any check fails.
    Verify,
    /// Number-state moments <n|cos^2k φ|n>.
    Moments {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        /// Print values as reduced fractions.
        #[arg(long)]
        exact: bool,
    },
    /// Coherent-state expectations against their classical limits.
    Coherent {
        /// Comma-separated |α| values.
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
        alpha: Vec<f64>,
        /// Phase of α; accepts forms like `pi/6`.
        #[arg(long, default_value = "pi/6", allow_hyphen_values = true)]
        phase: String,
    },
    /// Phase density of a state on the quadrature grid.
    PhaseDist {
        /// `fock:<n>` or `coherent:<|alpha|>,<phi>`.
        state: String,
    },
    /// Write an operator matrix at a Heisenberg time.
    Dump {
        /// One of phi, cos2phi, cos_sq, sin_sq, cos_phi, sin_phi, tan_phi, sg_c, sg_s.
        operator: String,
        /// Evolution time; multiples of pi/2 are applied exactly.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        time: String,
        /// Binary format instead of CSV.
        #[arg(long)]
        binary: bool,
        /// Angle assigned to the minus branch when dumping phi.
        #[arg(long, value_enum, default_value = "eigenvalue")]
        labeling: Labeling,
    },
    /// Susskind–Glogower defects and the Pegg–Barnett divergence.
    Legacy {
        /// Pegg–Barnett space dimension minus one.
        #[arg(long, default_value_t = 100)]
        s: usize,
    },
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: error.into() }
}

fn classify(error: anyhow::Error) -> Failure {
    let code = match error.downcast_ref::<PhaseError>() {
        Some(PhaseError::InvalidConfig(_) | PhaseError::Parse(_) | PhaseError::UnknownOperator(_)) => 2,
        _ => 1,
    };
    Failure { code, error }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("PHASEKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return Err(usage(anyhow::anyhow!("PHASEKIT_THREADS must be a positive integer, got '{raw}'"))),
    };
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(usage)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    init_threads()?;
    let g = cli.global;
    let cfg = RunConfig::resolve(&Overrides {
        config: g.config,
        n_max: g.n_max,
        quad: g.quad,
        margin: g.margin,
        format: g.format,
        out: g.out,
    })
    .map_err(usage)?;

    let output = match cli.command {
        Command::Verify => commands::verify(&cfg),
        Command::Moments { n, k, exact } => commands::moments(&cfg, &n, &k, exact),
        Command::Coherent { alpha, phase } => {
            let phase = parse::parse_angle(&phase).map_err(usage)?;
            commands::coherent(&cfg, &alpha, phase)
        }
        Command::PhaseDist { state } => {
            let state = parse::parse_state(&state).map_err(usage)?;
            commands::phase_dist(&cfg, state)
        }
        Command::Dump { operator, time, binary, labeling } => {
            let time = parse::parse_time(&time).map_err(usage)?;
            let labeling = match labeling {
                Labeling::Eigenvalue => PhaseLabeling::Eigenvalue,
                Labeling::Angular => PhaseLabeling::Angular,
            };
            commands::dump(&cfg, &operator, time, binary, labeling)
        }
        Command::Legacy { s } => commands::legacy(&cfg, s),
    }
    .map_err(classify)?;

    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &output.bytes),
        None => std::io::stdout().lock().write_all(&output.bytes),
    };
    written.map_err(|e| Failure { code: 1, error: e.into() })?;
    Ok(!output.failed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
