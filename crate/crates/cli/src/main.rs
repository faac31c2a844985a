use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fracvar_cli::{run, thread_count, Command, ExperimentConfig, Overrides, EXIT_INVALID};

/// Numerical experiments with fractional variational operators.
#[derive(Debug, Parser)]
#[command(name = "fracvar", version)]
struct Args {
    command: Command,
    /// JSON config; every field is optional.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output; the metadata goes to `<out>.meta.json`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    preset: Option<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match prepare(&args) {
        Ok(cfg) => run(args.command, &cfg, &args.out),
        Err(e) => {
            eprintln!("fracvar {}: {e}", args.command);
            EXIT_INVALID
        }
    };
    ExitCode::from(code as u8)
}

fn prepare(args: &Args) -> Result<ExperimentConfig, fracvar_cli::ValidationError> {
    let threads = thread_count(std::env::var("FRACVAR_THREADS").ok().as_deref())?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| fracvar_cli::ValidationError(e.to_string()))?;
    }
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(&Overrides { n: args.n, alpha: args.alpha, preset: args.preset.clone() });
    Ok(cfg)
}
