use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use tqw_cli::{run, validate, CliError, ExperimentConfig, Kind, RunOptions};
use tqw_core::Execution;

#[derive(Parser)]
#[command(name = "tqw", version, about = "Twisted quantum walk experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a Gaussian packet and record moments, entropy and density.
    Simulate(Opts),
    /// Effective spectrum over the Brillouin zone and the doubling scan.
    Spectrum(Opts),
    /// Check the continuum-limit constraints and residual sequences.
    Constraints(Opts),
    /// Walk against exact continuum evolution over a sequence of epsilons.
    Converge(Opts),
    /// Asymptotic entanglement over initial spinors on the Bloch sphere.
    EntropyScan(Opts),
    /// Report every problem with a config without running it.
    Validate(Opts),
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    config: PathBuf,
    /// Output directory [default: the config's output_dir, else out/<kind>]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Treat warnings, including possible lattice wrap-around, as errors.
    #[arg(long)]
    strict: bool,
    /// Worker threads; 1 runs everything on the calling thread.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<CliError>().map_or(1, CliError::exit_code);
            ExitCode::from(code)
        }
    }
}

fn real_main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let (want, opts) = match cli.command {
        Command::Simulate(o) => (Some(Kind::Simulate), o),
        Command::Spectrum(o) => (Some(Kind::Spectrum), o),
        Command::Constraints(o) => (Some(Kind::Constraints), o),
        Command::Converge(o) => (Some(Kind::Converge), o),
        Command::EntropyScan(o) => (Some(Kind::EntropyScan), o),
        Command::Validate(o) => (None, o),
    };
    let cfg = ExperimentConfig::load(&opts.config)?;

    let Some(want) = want else {
        let diags = validate(&cfg);
        for d in &diags {
            println!("{d}");
        }
        let code = if diags.iter().any(|d| d.is_schema()) {
            2
        } else if diags.iter().any(|d| d.is_error() || opts.strict) {
            3
        } else {
            println!("ok");
            0
        };
        return Ok(ExitCode::from(code));
    };
    if cfg.kind != want {
        return Err(CliError::Schema(format!(
            "config kind is {} but the {} command was used",
            cfg.kind.name(),
            want.name()
        ))
        .into());
    }

    let exec = configure_threads(opts.threads)?;
    let out_dir = opts
        .out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(want.name()));
    let manifest = run(&cfg, &RunOptions { out_dir: out_dir.clone(), strict: opts.strict, exec })
        .with_context(|| format!("{} run from {}", want.name(), opts.config.display()))?;
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {} files to {}", manifest.outputs.len() + 1, out_dir.display());
    Ok(ExitCode::SUCCESS)
}

fn configure_threads(threads: Option<usize>) -> anyhow::Result<Execution> {
    match threads {
        Some(0) => bail!("--threads must be at least 1"),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("configuring the thread pool")?;
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => {
            eprintln!("warning: built without the parallel feature, running on one thread");
            Ok(Execution::Sequential)
        }
        None => Ok(Execution::Parallel),
    }
}
