//! Command-line front end: reads HMD death rates, runs the models from
//! `mortality-core` and writes CSV, JSON and SVG artifacts.

pub mod args;
pub mod chart;
mod commands;
pub mod data;
pub mod error;
mod output;

pub use chart::{render_line_chart, LineChart, Series};
pub use error::CliError;

use args::{Cli, Command};

/// Version of the `summary.json` layout.
pub const SCHEMA_VERSION: u32 = 1;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Fit(a) => commands::fit(a),
        Command::Forecast(a) => commands::forecast(a),
        Command::Backtest(a) => commands::backtest(a),
        Command::Lifetable(a) => commands::lifetable(a),
        Command::Compare(a) => commands::compare(a),
    }
}
