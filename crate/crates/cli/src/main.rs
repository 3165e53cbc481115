use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fockscope::{exit_code, experiments, resolve_out, run_experiment, Overrides, RunError, Status, OUT_ENV};

#[derive(Parser)]
#[command(name = "fockscope", version, about = "Numerical checks for free scalar quantum fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write results.csv, summary.json, provenance.json.
    Run {
        experiment: String,
        /// Configuration file; every key has a default, so this may be omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (overridden by FOCKSCOPE_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the experiments and what each one checks.
    List,
}

fn run(experiment: &str, config: Option<PathBuf>, out: Option<PathBuf>, ov: Overrides) -> Result<Status, RunError> {
    let out = resolve_out(out, std::env::var_os(OUT_ENV))?;
    let text = match &config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| RunError::Config(format!("cannot read {}: {e}", p.display())))?,
        None => String::new(),
    };
    let (status, outcome) = run_experiment(experiment, &text, &out, &ov)?;
    match status {
        Status::Pass => eprintln!("{experiment}: pass ({} checks) -> {}", outcome.checks(), out.display()),
        Status::Violations(n) => {
            eprintln!("{experiment}: {n} of {} checks violated -> {}", outcome.checks(), out.display());
            for r in outcome.violations().iter().take(10) {
                eprintln!("  {}/{} = {:e} [{}]", r.case, r.quantity, r.value, r.check);
            }
        }
    }
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for e in experiments::ALL {
                println!("{:<16} {}", e.name, e.about);
            }
            ExitCode::SUCCESS
        }
        Command::Run { experiment, config, out, seed, threads } => {
            let result = run(&experiment, config, out, Overrides { seed, threads });
            if let Err(e) = &result {
                eprintln!("error: {e}");
            }
            ExitCode::from(exit_code(&result))
        }
    }
}
