//! `anosovq`: quantum Lyapunov exponents and Anosov certificates for
//! classically driven quadratic systems.
//!
//! ```text
//! anosovq <lyapunov|scan|anosov|catmap> --config <path> [--out <path>] [--threads N] [--seed S]
//! ```
//!
//! Exit codes: 0 ok, 2 config error, 3 verification failure, 4 precondition
//! failure (no exponential dichotomy where one is required).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod config;
mod output;
mod runs;

use config::RunConfig;
use runs::{run_anosov, run_catmap, run_lyapunov, run_scan, EXIT_CONFIG};

#[derive(Parser)]
#[command(
    name = "anosovq",
    about = "Quantum Lyapunov exponents and Anosov relations via classical symplectic cocycles"
)]
struct Cli {
    #[command(subcommand)]
    mode: Mode,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output path (defaults to the config's `out`, then stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for scans (falls back to ANOSOVQ_THREADS, then the
    /// config, then 1).
    #[arg(long)]
    threads: Option<usize>,
    /// Seed recorded in reports; reruns with the same config and seed are
    /// byte-identical.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Mode {
    /// Classical exponent, direction profile, and upper quantum exponent.
    Lyapunov(CommonArgs),
    /// Sweep the spectral parameter E and emit one CSV row per grid point.
    Scan(CommonArgs),
    /// Construct direction fields and certify the Anosov relations.
    Anosov(CommonArgs),
    /// Exact cat-map directions, residuals, and derivation classes.
    Catmap(CommonArgs),
}

fn env_threads() -> Option<usize> {
    std::env::var("ANOSOVQ_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
}

fn run(mode: &Mode) -> Result<i32, String> {
    let args = match mode {
        Mode::Lyapunov(a) | Mode::Scan(a) | Mode::Anosov(a) | Mode::Catmap(a) => a,
    };
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = args.out.clone().or_else(|| cfg.out.clone());
    let out = out.as_deref();
    match mode {
        Mode::Lyapunov(_) => run_lyapunov(&cfg, out),
        Mode::Scan(_) => {
            let threads = args
                .threads
                .or_else(env_threads)
                .or(cfg.threads)
                .unwrap_or(1);
            run_scan(&cfg, out, threads)
        }
        Mode::Anosov(_) => run_anosov(&cfg, out),
        Mode::Catmap(_) => run_catmap(&cfg, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.mode) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
