//! Tabular learners: one-step Q-learning with a decaying epsilon schedule on
//! the base (hit/stand, infinite deck) and extended (finite shoe, all
//! actions, shaped rewards) environments, plus first-visit Monte Carlo
//! control and strategy extraction.

mod base;
mod ext;
mod mc;

pub use base::{
    base_backtest, base_random_run, base_state_index, extract_strategy_base, train_q_base,
    BaseState, BASE_ACTIONS, BASE_NUM_STATES,
};
pub use ext::{
    backtest, ext_state_index, ext_state_of, extract_strategy_ext, surrender_argmax_cells,
    tc_bucket, train_q_ext, ExtState, HandKind, EXT_ACTIONS, EXT_NUM_STATES, RESHUFFLE_BELOW,
};
pub use mc::{mc_off_policy, mc_off_policy_with_eps, mc_on_policy};

use rand::Rng;

use crate::rules::Action;
use crate::Error;

/// The decaying exploration schedule: epsilon starts at 1, reaches 0.9 of
/// its initial value after the first 30% of training, 0.2 after the next
/// 40%, and 0 at the end of the final 30%. Linear within each segment.
#[derive(Clone, Copy, Debug)]
pub struct EpsilonSchedule {
    pub initial: f64,
    pub fractions: [f64; 3],
    pub targets: [f64; 3],
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        EpsilonSchedule {
            initial: 1.0,
            fractions: [0.30, 0.40, 0.30],
            targets: [0.9, 0.2, 0.0],
        }
    }
}

impl EpsilonSchedule {
    /// Epsilon for `episode` out of `total` training episodes.
    pub fn epsilon_at(&self, episode: u64, total: u64) -> Result<f64, Error> {
        if episode >= total {
            return Err(Error::InvalidIndex { episode, total });
        }
        if total == 1 {
            return Ok(self.initial);
        }
        if episode == total - 1 {
            return Ok(self.targets[2]);
        }
        let e = episode as f64;
        let t = total as f64;
        let b1 = self.fractions[0] * t;
        let b2 = (self.fractions[0] + self.fractions[1]) * t;
        let end = (total - 1) as f64;
        let eps = if e < b1 {
            self.initial + (self.targets[0] - self.initial) * (e / b1)
        } else if e < b2 {
            self.targets[0] + (self.targets[1] - self.targets[0]) * ((e - b1) / (b2 - b1))
        } else if end > b2 {
            self.targets[1] + (self.targets[2] - self.targets[1]) * ((e - b2) / (end - b2))
        } else {
            self.targets[2]
        };
        Ok(eps)
    }
}

/// Learning hyperparameters; defaults follow the base experiment
/// (alpha 0.05, gamma 0.1).
#[derive(Clone, Copy, Debug)]
pub struct Hyperparams {
    pub alpha: f64,
    pub gamma: f64,
    pub train_episodes: u64,
    pub backtest_episodes: u64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            alpha: 0.05,
            gamma: 0.1,
            train_episodes: 50_000,
            backtest_episodes: 10_000,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!("alpha {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidConfig(format!("gamma {}", self.gamma)));
        }
        Ok(())
    }
}

/// Dense state-action value table with visit counts. Terminal states live
/// outside the table: the max over a terminal next state is 0.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    num_states: usize,
    num_actions: usize,
    values: Vec<f64>,
    visits: Vec<u64>,
}

impl QTable {
    /// All-zero initialization; the terminal convention is then automatic.
    pub fn new(num_states: usize, num_actions: usize) -> Self {
        QTable {
            num_states,
            num_actions,
            values: vec![0.0; num_states * num_actions],
            visits: vec![0; num_states * num_actions],
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn idx(&self, state: usize, action: usize) -> usize {
        debug_assert!(state < self.num_states && action < self.num_actions);
        state * self.num_actions + action
    }

    pub fn q(&self, state: usize, action: usize) -> f64 {
        self.values[self.idx(state, action)]
    }

    pub fn set_q(&mut self, state: usize, action: usize, value: f64) {
        let i = self.idx(state, action);
        self.values[i] = value;
    }

    pub fn visits(&self, state: usize, action: usize) -> u64 {
        self.visits[self.idx(state, action)]
    }

    pub fn add_visit(&mut self, state: usize, action: usize) {
        let i = self.idx(state, action);
        self.visits[i] += 1;
    }

    pub fn set_visits(&mut self, state: usize, action: usize, visits: u64) {
        let i = self.idx(state, action);
        self.visits[i] = visits;
    }

    pub fn state_visits(&self, state: usize) -> u64 {
        (0..self.num_actions).map(|a| self.visits(state, a)).sum()
    }

    /// Max of Q(state, a) over the given actions; 0 for an empty set.
    pub fn max_q(&self, state: usize, actions: &[usize]) -> f64 {
        if actions.is_empty() {
            return 0.0;
        }
        actions
            .iter()
            .map(|&a| self.q(state, a))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// One-step Q-learning update:
    /// `Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a))`.
    ///
    /// `next` carries the successor state and the actions available there;
    /// `None` marks a terminal successor, whose max is 0.
    pub fn q_update(
        &mut self,
        state: usize,
        action: usize,
        reward: f64,
        next: Option<(usize, &[usize])>,
        alpha: f64,
        gamma: f64,
    ) {
        let max_next = match next {
            Some((s_next, actions)) if !actions.is_empty() => self.max_q(s_next, actions),
            _ => 0.0,
        };
        let i = self.idx(state, action);
        self.values[i] += alpha * (reward + gamma * max_next - self.values[i]);
        self.visits[i] += 1;
    }

    /// Greedy action over `legal` (canonical order), first-listed wins ties.
    pub fn greedy(&self, state: usize, legal: &[usize]) -> Result<usize, Error> {
        let mut best: Option<(usize, f64)> = None;
        for &a in legal {
            let q = self.q(state, a);
            match best {
                Some((_, bq)) if q <= bq => {}
                _ => best = Some((a, q)),
            }
        }
        best.map(|(a, _)| a)
            .ok_or_else(|| Error::InvalidState("greedy over empty action set".into()))
    }
}

/// Epsilon-greedy selection over the legal actions (canonical order): with
/// probability `eps` a uniform legal action, otherwise the greedy one with
/// ties broken by the fixed action order.
pub fn select_action<R: Rng>(
    q: &QTable,
    state: usize,
    legal: &[usize],
    eps: f64,
    rng: &mut R,
) -> Result<usize, Error> {
    if legal.is_empty() {
        return Err(Error::InvalidState("empty legal action set".into()));
    }
    if eps > 0.0 && rng.gen::<f64>() < eps {
        Ok(legal[rng.gen_range(0..legal.len())])
    } else {
        q.greedy(state, legal)
    }
}

/// Per-run learning metrics: the cumulative payoff curve, the epsilon used
/// each episode, and win/draw/loss accounting over all episodes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LearnMetrics {
    pub cumulative_payoff_curve: Vec<f64>,
    pub epsilon_curve: Vec<f64>,
    pub average_payoff: f64,
    pub winning_odds_pct: f64,
    pub draws_pct: f64,
    pub loss_pct: f64,
    pub episodes: u64,
    pub wins: u64,
    pub draws: u64,
    pub losses: u64,
}

impl LearnMetrics {
    pub fn final_cumulative_payoff(&self) -> f64 {
        self.cumulative_payoff_curve.last().copied().unwrap_or(0.0)
    }
}

/// Which environment a Q-table belongs to; decides its CSV state columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvKind {
    Base,
    Ext,
}

const BASE_HEADER: &str = "player_total,dealer_up,usable_ace,action,q_value,visits";
const EXT_HEADER: &str = "total_key,dealer_up,hand_kind,tc_bucket,action,q_value,visits";

/// Serializes a Q-table as CSV (`state_fields..., action, q_value, visits`),
/// one row per touched state-action pair in index order.
pub fn qtable_to_csv(q: &QTable, env: EnvKind) -> String {
    let mut out = String::new();
    match env {
        EnvKind::Base => {
            out.push_str(BASE_HEADER);
            out.push('\n');
            for idx in 0..q.num_states() {
                let s = base::base_state_of_index(idx);
                for (a, action) in BASE_ACTIONS.iter().enumerate() {
                    if q.visits(idx, a) == 0 && q.q(idx, a) == 0.0 {
                        continue;
                    }
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        s.player_total,
                        s.dealer_up,
                        s.usable_ace,
                        action.name(),
                        q.q(idx, a),
                        q.visits(idx, a)
                    ));
                }
            }
        }
        EnvKind::Ext => {
            out.push_str(EXT_HEADER);
            out.push('\n');
            for idx in 0..q.num_states() {
                let s = ext::ext_state_of_index(idx);
                for (a, action) in EXT_ACTIONS.iter().enumerate() {
                    if q.visits(idx, a) == 0 && q.q(idx, a) == 0.0 {
                        continue;
                    }
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        s.total_key,
                        s.dealer_up,
                        s.kind.name(),
                        s.tc_bucket,
                        action.name(),
                        q.q(idx, a),
                        q.visits(idx, a)
                    ));
                }
            }
        }
    }
    out
}

/// Parses a Q-table CSV, inferring the environment from the header.
pub fn qtable_from_csv(text: &str) -> Result<(QTable, EnvKind), Error> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty qtable csv".into()))?
        .trim();
    let env = if header == BASE_HEADER {
        EnvKind::Base
    } else if header == EXT_HEADER {
        EnvKind::Ext
    } else {
        return Err(Error::Parse(format!("unknown qtable header `{header}`")));
    };
    let mut q = match env {
        EnvKind::Base => QTable::new(BASE_NUM_STATES, BASE_ACTIONS.len()),
        EnvKind::Ext => QTable::new(EXT_NUM_STATES, EXT_ACTIONS.len()),
    };
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let bad = |what: &str| Error::Parse(format!("qtable line {}: {what}", lineno + 2));
        let (state, action) = match env {
            EnvKind::Base => {
                if fields.len() != 6 {
                    return Err(bad("expected 6 fields"));
                }
                let s = BaseState {
                    player_total: fields[0].parse().map_err(|_| bad("player_total"))?,
                    dealer_up: fields[1].parse().map_err(|_| bad("dealer_up"))?,
                    usable_ace: fields[2].parse().map_err(|_| bad("usable_ace"))?,
                };
                let action = Action::parse(fields[3])?;
                if action.index() > 1 {
                    return Err(bad("action not available in the base environment"));
                }
                (base_state_index(s), action.index())
            }
            EnvKind::Ext => {
                if fields.len() != 7 {
                    return Err(bad("expected 7 fields"));
                }
                let s = ExtState {
                    total_key: fields[0].parse().map_err(|_| bad("total_key"))?,
                    dealer_up: fields[1].parse().map_err(|_| bad("dealer_up"))?,
                    kind: HandKind::parse(fields[2])?,
                    tc_bucket: fields[3].parse().map_err(|_| bad("tc_bucket"))?,
                };
                (ext_state_index(s), Action::parse(fields[4])?.index())
            }
        };
        let (value, visits): (f64, u64) = match env {
            EnvKind::Base => (
                fields[4].parse().map_err(|_| bad("q_value"))?,
                fields[5].parse().map_err(|_| bad("visits"))?,
            ),
            EnvKind::Ext => (
                fields[5].parse().map_err(|_| bad("q_value"))?,
                fields[6].parse().map_err(|_| bad("visits"))?,
            ),
        };
        q.set_q(state, action, value);
        q.set_visits(state, action, visits);
    }
    Ok((q, env))
}

#[derive(Default)]
pub(crate) struct MetricsBuilder {
    curve: Vec<f64>,
    eps: Vec<f64>,
    cumulative: f64,
    wins: u64,
    draws: u64,
    losses: u64,
}

impl MetricsBuilder {
    pub(crate) fn with_capacity(n: usize) -> Self {
        MetricsBuilder {
            curve: Vec::with_capacity(n),
            eps: Vec::with_capacity(n),
            ..MetricsBuilder::default()
        }
    }

    pub(crate) fn record(&mut self, payoff: f64, eps: f64) {
        self.cumulative += payoff;
        self.curve.push(self.cumulative);
        self.eps.push(eps);
        if payoff > 0.0 {
            self.wins += 1;
        } else if payoff < 0.0 {
            self.losses += 1;
        } else {
            self.draws += 1;
        }
    }

    pub(crate) fn finish(self) -> LearnMetrics {
        let episodes = self.curve.len() as u64;
        let pct = |n: u64| {
            if episodes == 0 {
                0.0
            } else {
                100.0 * n as f64 / episodes as f64
            }
        };
        LearnMetrics {
            average_payoff: if episodes == 0 {
                0.0
            } else {
                self.cumulative / episodes as f64
            },
            winning_odds_pct: pct(self.wins),
            draws_pct: pct(self.draws),
            loss_pct: pct(self.losses),
            episodes,
            wins: self.wins,
            draws: self.draws,
            losses: self.losses,
            cumulative_payoff_curve: self.curve,
            epsilon_curve: self.eps,
        }
    }
}
