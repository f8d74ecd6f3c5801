use clap::{Parser, Subcommand};

use blackjack_harness::ops;

/// Deterministic blackjack laboratory: train and backtest tabular agents,
/// sweep deck sizes and counting systems, and run the bankrolled table
/// simulator. Every run writes plot-ready CSVs plus a manifest that
/// reproduces it byte for byte.
#[derive(Parser)]
#[command(name = "blackjack-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a Q-learning agent and back-test it.
    Train(ops::TrainArgs),
    /// Back-test a previously trained Q-table.
    Backtest(ops::BacktestArgs),
    /// Run the multi-agent bankrolled table simulator.
    Tablesim(ops::TablesimArgs),
    /// Train/backtest across a deck-size x counting-system grid.
    Sweep(ops::SweepArgs),
    /// Emit an encoded basic-strategy chart, or compare two chart files.
    Chart(ops::ChartArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(args) => ops::cmd_train(args),
        Command::Backtest(args) => ops::cmd_backtest(args),
        Command::Tablesim(args) => ops::cmd_tablesim(args),
        Command::Sweep(args) => ops::cmd_sweep(args),
        Command::Chart(args) => ops::cmd_chart(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
