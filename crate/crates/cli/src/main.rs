use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use duffing_qsd::{run, SimConfig, Subcommand};

/// Quantum and classical dissipative chaos in the driven Duffing oscillator.
#[derive(Parser)]
#[command(name = "duffing-qsd", version)]
struct Args {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// JSON config, or a previous run's meta.json.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config field, e.g. `--set hbar=0.1`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = SimConfig::load(args.config.as_deref(), &args.overrides).and_then(|c| run(args.subcommand, &c, &args.out));
    match result {
        Ok(report) => {
            for p in &report.outputs {
                println!("{}", p.display());
            }
            println!("{}", report.meta.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
