//! `spinlink`: optimum tables, amplitude traces, asymptotics and a
//! self-check for single-excitation transfer through spin graphs.

mod commands;
mod table;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{error::ErrorKind, Args, Parser, Subcommand};
use spinlink::verify::{run_suite, VerifyOptions};

use commands::{Format, Opts};

/// Environment variable fixing the worker thread count.
const THREADS_VAR: &str = "SPINLINK_THREADS";

#[derive(Parser)]
#[command(name = "spinlink", version, about = "State transfer through unmodulated Heisenberg spin graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal readout time and channel quality per length
    Sweep(Opts),
    /// Transition amplitude as a function of time
    Evolve(Opts),
    /// Ring optima, compared against the open line of the same half size
    Ring(Opts),
    /// Large-N readout time and entanglement
    Asymptotic(Opts),
    /// Cross-check the reduced dynamics against the full many-body evolution
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest graph simulated in the full Hilbert space
    #[arg(long, default_value_t = 8)]
    max_n: usize,
    /// Seed for the random cases
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    seed: u64,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().with_context(|| format!("{THREADS_VAR}={v} is not a thread count"))?;
    anyhow::ensure!(n > 0, "{THREADS_VAR} must be positive");
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn emit(opts: &Opts, table: &table::Table) -> Result<()> {
    let text = match opts.format {
        Format::Csv => table.to_csv(),
        Format::Json => serde_json::to_string_pretty(&table.to_json())? + "\n",
        Format::Svg => table.to_svg(),
    };
    match &opts.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn verify(args: &VerifyArgs) -> Result<bool> {
    anyhow::ensure!((2..=spinlink::oracle::MAX_SITES).contains(&args.max_n), "--max-n must lie in 2..=12");
    let opts = VerifyOptions { max_n: args.max_n, inject_fault: args.inject_fault, seed: args.seed };
    let outcomes = run_suite(&opts);
    for o in &outcomes {
        println!("{} {:<22} {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} checks passed", outcomes.len() - failed, outcomes.len());
    Ok(failed == 0)
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    let (opts, table) = match &cli.command {
        Command::Sweep(o) => (o, commands::sweep(o)?),
        Command::Evolve(o) => (o, commands::evolve(o)?),
        Command::Ring(o) => (o, commands::ring(o)?),
        Command::Asymptotic(o) => (o, commands::asymptotic(o)?),
        Command::Verify(v) => return verify(v),
    };
    emit(opts, &table)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
