//! Experiment harness: configuration resolution, CSV emission, sweep
//! orchestration and the operations behind the `blackjack-lab` CLI.

pub mod config;
pub mod emit;
pub mod ops;
pub mod sweep;

pub use config::KvConfig;
