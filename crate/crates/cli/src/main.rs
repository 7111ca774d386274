//! `abel-center`: JSON in, JSON certificate out.
//!
//! Exit status: 0 when a verdict was computed (negative verdicts included),
//! 1 for bad input, 2 when an internal invariant check fails.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Failure;

#[derive(Parser, Debug)]
#[command(name = "abel-center", version, about = "Center certificates for polynomial Abel equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct IntervalArg {
    /// Endpoints as integers or `num/den`.
    #[arg(long, num_args = 2, value_names = ["X0", "X1"], allow_hyphen_values = true)]
    pub interval: Option<Vec<String>>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Return-map coefficients c_1..c_N, cross-checked against the first-integral series.
    Coeffs {
        #[arg(long)]
        eq: PathBuf,
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
    /// Search species words for a nonzero iterated integral.
    Universal {
        #[arg(long)]
        eq: PathBuf,
        #[arg(short = 'L', default_value_t = 4)]
        max_length: usize,
        /// Only words with index sum at most this.
        #[arg(long)]
        max_weight: Option<usize>,
    },
    /// Common closing right factor of two polynomials.
    Decompose {
        #[arg(long = "P")]
        p: PathBuf,
        #[arg(long = "Q")]
        q: PathBuf,
        #[command(flatten)]
        interval: IntervalArg,
    },
    /// Moments m_k = ∫ q A^k with the composition certificate.
    Moments {
        #[arg(long)]
        q: PathBuf,
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(short = 'k')]
        kmax: Option<usize>,
        #[command(flatten)]
        interval: IntervalArg,
    },
    /// First or second bifurcation function as a series in 1/h.
    Melnikov {
        #[arg(long)]
        sys: PathBuf,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(short = 'k', default_value_t = 20)]
        kmax: usize,
        /// Expand the second order even when the first order is not certified zero.
        #[arg(long)]
        force: bool,
        /// Sign of the q1*P1 cross term.
        #[arg(long, value_enum, default_value_t = commands::Cross::Negative)]
        cross: commands::Cross,
    },
    /// Exact check that a Darboux product is a first integral of a foliation.
    VerifyIntegral {
        #[arg(long)]
        fol: PathBuf,
        #[arg(long = "H")]
        h: PathBuf,
    },
    /// Member k of the master Liénard family, pulled back by r (default r = x).
    GenerateMaster {
        #[arg(short = 'k')]
        k: u32,
        #[arg(long)]
        r: Option<PathBuf>,
    },
    /// Non-universal center certificate derived from the k = 2 master system.
    Ggs {
        #[arg(long, default_value_t = 10)]
        order: usize,
        #[arg(short = 'L', default_value_t = 3)]
        max_length: usize,
        #[arg(long, default_value_t = 1e-3, allow_hyphen_values = true)]
        y0: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Numeric transport y(x0) -> y(x1); the result is approximate.
    Transport {
        #[arg(long)]
        eq: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        y0: f64,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Iterated integral of a word of polynomial one-forms.
    Iterint {
        /// JSON array of polynomials, leftmost outermost.
        #[arg(long)]
        word: String,
        #[command(flatten)]
        interval: IntervalArg,
    },
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("ABEL_CENTER_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("ABEL_CENTER_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Internal(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = configure_threads().and_then(|()| commands::run(&cli.command));
    match outcome {
        Ok(cert) => {
            eprintln!("{}: {}", cert.command, cert.verdict);
            println!("{}", serde_json::to_string_pretty(&cert).expect("certificate serializes"));
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
