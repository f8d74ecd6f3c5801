//! Plot-ready CSV emission. All files use stable headers (golden-tested)
//! and deterministic formatting, so reruns are byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use blackjack_core::learn::LearnMetrics;
use blackjack_core::tablesim::SimReport;
use blackjack_core::Error;

use crate::sweep::SweepRow;

pub const CURVE_HEADER: &str = "episode,cumulative_payoff,epsilon";
pub const METRICS_HEADER: &str =
    "episodes,average_payoff,final_cumulative_payoff,winning_odds_pct,draws_pct,loss_pct,wins,draws,losses";
pub const SWEEP_HEADER: &str = "decks,system,winning_odds_pct,avg_payoff,seed";
pub const TABLESIM_HEADER: &str = "agent,wins,draws,losses,win_pct,draw_pct,loss_pct,own_win_pct,own_draw_pct,own_loss_pct,initial_bankroll,final_bankroll";

/// The per-episode learning curve: cumulative payoff and the epsilon used.
pub fn learning_curve_csv(metrics: &LearnMetrics) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for (i, (cum, eps)) in metrics
        .cumulative_payoff_curve
        .iter()
        .zip(&metrics.epsilon_curve)
        .enumerate()
    {
        let _ = writeln!(out, "{i},{cum},{eps}");
    }
    out
}

pub fn emit_learning_curve(metrics: &LearnMetrics, path: &Path) -> Result<(), Error> {
    std::fs::write(path, learning_curve_csv(metrics))?;
    Ok(())
}

/// One-row summary of a run's metrics.
pub fn metrics_csv(metrics: &LearnMetrics) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{}",
        metrics.episodes,
        metrics.average_payoff,
        metrics.final_cumulative_payoff(),
        metrics.winning_odds_pct,
        metrics.draws_pct,
        metrics.loss_pct,
        metrics.wins,
        metrics.draws,
        metrics.losses
    );
    out
}

/// Sweep rows, ordered (decks, system); a trailing `# aborted` marker is
/// appended by the caller when a cell failed.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.decks,
            row.system.name(),
            row.winning_odds_pct,
            row.avg_payoff,
            row.seed
        );
    }
    out
}

/// Table-simulator report: one row per agent plus the dealer, with both the
/// pooled-share and per-own-round percentages.
pub fn tablesim_csv(report: &SimReport) -> String {
    let mut out = String::from(TABLESIM_HEADER);
    out.push('\n');
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            row.label,
            row.wins,
            row.draws,
            row.losses,
            row.win_pct,
            row.draw_pct,
            row.loss_pct,
            row.own_win_pct,
            row.own_draw_pct,
            row.own_loss_pct,
            row.initial_bankroll,
            row.final_bankroll
        );
    }
    let _ = writeln!(out, "# rounds_played={}", report.rounds_played);
    let _ = writeln!(
        out,
        "# simulations_completed={}",
        report.simulations_completed
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_includes_every_episode() {
        let metrics = LearnMetrics {
            cumulative_payoff_curve: vec![1.0, 0.0, -1.0],
            epsilon_curve: vec![1.0, 0.5, 0.0],
            ..LearnMetrics::default()
        };
        let csv = learning_curve_csv(&metrics);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], CURVE_HEADER);
        assert_eq!(lines[2], "1,0,0.5");
    }
}
