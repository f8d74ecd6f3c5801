//! Deterministic blackjack laboratory: rules engine, card counting systems,
//! basic-strategy charts, tabular learners and a multi-agent table simulator.
//!
//! Everything is seeded: two runs with the same configuration produce
//! bit-identical results.

pub mod basic_strategy;
pub mod counting;
pub mod learn;
pub mod rules;
pub mod shoe;
pub mod tablesim;

pub use rules::{Action, ActionSet, HandValue, RoundOutcome, RoundResult, RulesConfig};
pub use shoe::{Card, Rank, Shoe};

use thiserror::Error;

/// Currency is tracked in integer minor units to keep ledgers exact.
pub type Currency = i64;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("shoe exhausted")]
    ShoeExhausted,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid bet: {0}")]
    InvalidBet(Currency),
    #[error("illegal action: {0:?}")]
    IllegalAction(Action),
    #[error("invalid episode index {episode} for {total} total episodes")]
    InvalidIndex { episode: u64, total: u64 },
    #[error("invalid comparison: {0}")]
    InvalidComparison(String),
    #[error("bankroll arithmetic overflow")]
    BankrollOverflow,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Derives an independent sub-stream seed from a root seed and a stream index.
///
/// SplitMix64 finalizer; used so sweeps and per-simulation RNG streams are
/// reproducible cell-by-cell regardless of execution order.
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    let mut z = root ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
