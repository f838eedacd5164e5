//! `mezzo` — European call pricing under a Brownian log-price model and a
//! mean-reverting alternative, with simulation, calibration and kernel
//! diagnostics.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.

mod commands;
mod config;
mod failure;
mod output;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "mezzo",
    version,
    about = "Option pricing under Brownian and mean-reverting log-price models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price a European call (closed form, quadrature or Monte Carlo)
    Price(commands::PriceArgs),
    /// Tabulate ln c_ou - ln c_bs against log-moneyness into a CSV
    Compare(commands::CompareArgs),
    /// Simulate log-price paths into a CSV
    Simulate(commands::SimulateArgs),
    /// Estimate mean-reversion speed and volatility from a log-price series
    Calibrate(commands::CalibrateArgs),
    /// Kernel diagnostics: fixed point, semigroup, transition-density match
    Tactic(commands::TacticArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Price(args) => commands::price(args),
        Command::Compare(args) => commands::compare(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Calibrate(args) => commands::calibrate(args),
        Command::Tactic(args) => commands::tactic(args),
    };
    if let Err(failure) = result {
        eprintln!("error: {}", failure.message());
        std::process::exit(failure.code());
    }
}
