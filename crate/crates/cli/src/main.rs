use clap::Parser;

use seiprd_cli::cli::{Cli, Command};
use seiprd_cli::commands;

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Calibrate(args) => commands::run_calibrate(args),
        Command::Forecast(args) => commands::run_forecast(args),
        Command::Score(args) => commands::run_score(args),
        Command::Sweep(common) => commands::run_sweep_cmd(common),
    };
    if let Err(err) = result {
        eprintln!("error: {err} (category: {})", err.category());
        std::process::exit(err.exit_code());
    }
}
