//! Deck-size x counting-system sweep: train then backtest each cell.
//! Cells run in parallel up to a worker limit; every cell derives its own
//! seed from the root seed, so results are reproducible cell-by-cell and
//! output order never depends on scheduling.

use rayon::prelude::*;

use blackjack_core::counting::CountingSystem;
use blackjack_core::derive_seed;
use blackjack_core::learn::{backtest, train_q_ext, EpsilonSchedule, Hyperparams};
use blackjack_core::rules::RulesConfig;
use blackjack_core::{Currency, Error};

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub decks: Vec<u32>,
    pub systems: Vec<CountingSystem>,
    pub hp: Hyperparams,
    pub dealer_hits_soft17: bool,
    pub bet_unit: Currency,
    pub workers: usize,
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub decks: u32,
    pub system: CountingSystem,
    pub winning_odds_pct: f64,
    pub avg_payoff: f64,
    pub seed: u64,
}

/// The error from an aborted sweep, carrying the cells that did finish so
/// callers can preserve a partial table.
#[derive(Debug)]
pub struct SweepAbort {
    pub completed: Vec<SweepRow>,
    pub error: Error,
}

fn run_cell(
    spec: &SweepSpec,
    decks: u32,
    system: CountingSystem,
    cell_seed: u64,
) -> Result<SweepRow, Error> {
    let rules = RulesConfig {
        num_decks: decks,
        dealer_hits_soft17: spec.dealer_hits_soft17,
        ..RulesConfig::default()
    };
    let hp = Hyperparams {
        seed: cell_seed,
        ..spec.hp
    };
    let schedule = EpsilonSchedule::default();
    let (q, _) = train_q_ext(&rules, system, &hp, &schedule)?;
    let metrics = backtest(
        &q,
        &rules,
        system,
        hp.backtest_episodes,
        spec.bet_unit,
        cell_seed,
    )?;
    Ok(SweepRow {
        decks,
        system,
        winning_odds_pct: metrics.winning_odds_pct,
        avg_payoff: metrics.average_payoff,
        seed: cell_seed,
    })
}

/// Runs every (deck, system) cell, returning rows ordered (deck, system).
/// On any cell failure the completed rows are returned inside the abort so
/// a partial, marked CSV can be preserved.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, Box<SweepAbort>> {
    let cells: Vec<(usize, u32, CountingSystem)> = spec
        .decks
        .iter()
        .flat_map(|&d| spec.systems.iter().map(move |&s| (d, s)))
        .enumerate()
        .map(|(i, (d, s))| (i, d, s))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers.max(1))
        .build()
        .map_err(|e| {
            Box::new(SweepAbort {
                completed: Vec::new(),
                error: Error::InvalidConfig(format!("worker pool: {e}")),
            })
        })?;

    let results: Vec<Result<SweepRow, Error>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(idx, decks, system)| {
                run_cell(spec, decks, system, derive_seed(spec.hp.seed, idx as u64))
            })
            .collect()
    });

    let mut rows = Vec::with_capacity(results.len());
    let mut first_error = None;
    for result in results {
        match result {
            Ok(row) => rows.push(row),
            Err(e) => {
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    match first_error {
        None => Ok(rows),
        Some(error) => Err(Box::new(SweepAbort {
            completed: rows,
            error,
        })),
    }
}
