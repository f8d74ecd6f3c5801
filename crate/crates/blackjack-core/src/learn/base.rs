//! The base learning environment: hit/stand only, dealt with an infinite
//! deck (draws with replacement), rewards +1/-1/0 for win/loss/draw, dealer
//! stands on all 17s. The state is the player total, the dealer up card and
//! whether the player holds a usable ace.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basic_strategy::{Cell, ChartVariant, StrategyChart, TableKind};
use crate::derive_seed;
use crate::learn::{
    select_action, EpsilonSchedule, Hyperparams, LearnMetrics, MetricsBuilder, QTable,
};
use crate::rules::Action;
use crate::shoe::ALL_RANKS;
use crate::Error;

/// Stand and hit, in canonical tie-break order.
pub const BASE_ACTIONS: [Action; 2] = [Action::Stand, Action::Hit];
const STAND: usize = 0;
const HIT: usize = 1;
const BOTH: [usize; 2] = [STAND, HIT];

/// Player totals 4..=21, dealer up 2..=11, usable-ace flag.
pub const BASE_NUM_STATES: usize = 18 * 10 * 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaseState {
    pub player_total: u32,
    pub dealer_up: u32,
    pub usable_ace: bool,
}

pub fn base_state_index(s: BaseState) -> usize {
    debug_assert!((4..=21).contains(&s.player_total));
    debug_assert!((2..=11).contains(&s.dealer_up));
    ((s.player_total - 4) as usize) * 20 + ((s.dealer_up - 2) as usize) * 2 + s.usable_ace as usize
}

pub(crate) fn base_state_of_index(idx: usize) -> BaseState {
    BaseState {
        player_total: 4 + (idx / 20) as u32,
        dealer_up: 2 + ((idx / 2) % 10) as u32,
        usable_ace: idx % 2 == 1,
    }
}

/// A running total with at most one ace counted as 11.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Total {
    pub total: u32,
    pub usable: bool,
}

impl Total {
    pub fn add(&mut self, card_value: u32) {
        if card_value == 1 && self.total + 11 <= 21 {
            self.total += 11;
            self.usable = true;
        } else {
            self.total += card_value;
        }
        if self.total > 21 && self.usable {
            self.total -= 10;
            self.usable = false;
        }
    }

    pub fn is_bust(&self) -> bool {
        self.total > 21
    }
}

/// Uniform rank draw with replacement; ten-values come up 4/13.
pub(crate) fn draw_value<R: Rng>(rng: &mut R) -> u32 {
    ALL_RANKS[rng.gen_range(0..ALL_RANKS.len())].value()
}

/// Dealer draws until 17 or more, counting a usable ace as 11 (stands on
/// soft 17).
pub(crate) fn base_dealer_final<R: Rng>(up_value: u32, rng: &mut R) -> Total {
    let mut dealer = Total::default();
    dealer.add(up_value);
    dealer.add(draw_value(rng));
    while dealer.total < 17 {
        dealer.add(draw_value(rng));
    }
    dealer
}

fn compare_reward(player: u32, dealer: Total) -> f64 {
    if dealer.is_bust() || player > dealer.total {
        1.0
    } else if player < dealer.total {
        -1.0
    } else {
        0.0
    }
}

enum BasePolicy<'a> {
    /// Uniform random over hit/stand, no learning.
    Random,
    /// Epsilon-greedy on a table, updating it when `alpha` is set.
    Table {
        q: &'a mut QTable,
        eps: f64,
        learn: Option<(f64, f64)>, // (alpha, gamma)
    },
}

/// Plays one episode, returning its terminal reward.
fn base_episode<R: Rng>(policy: &mut BasePolicy, rng: &mut R) -> Result<f64, Error> {
    let mut player = Total::default();
    player.add(draw_value(rng));
    player.add(draw_value(rng));
    let up_card = draw_value(rng);
    let dealer_up = if up_card == 1 { 11 } else { up_card };

    loop {
        let state = base_state_index(BaseState {
            player_total: player.total,
            dealer_up,
            usable_ace: player.usable,
        });
        let action = match policy {
            BasePolicy::Random => {
                if rng.gen::<bool>() {
                    HIT
                } else {
                    STAND
                }
            }
            BasePolicy::Table { q, eps, .. } => select_action(q, state, &BOTH, *eps, rng)?,
        };
        if action == STAND {
            let dealer = base_dealer_final(up_card, rng);
            let reward = compare_reward(player.total, dealer);
            if let BasePolicy::Table {
                q,
                learn: Some((alpha, gamma)),
                ..
            } = policy
            {
                q.q_update(state, STAND, reward, None, *alpha, *gamma);
            }
            return Ok(reward);
        }
        player.add(draw_value(rng));
        if player.is_bust() {
            if let BasePolicy::Table {
                q,
                learn: Some((alpha, gamma)),
                ..
            } = policy
            {
                q.q_update(state, HIT, -1.0, None, *alpha, *gamma);
            }
            return Ok(-1.0);
        }
        let next = base_state_index(BaseState {
            player_total: player.total,
            dealer_up,
            usable_ace: player.usable,
        });
        if let BasePolicy::Table {
            q,
            learn: Some((alpha, gamma)),
            ..
        } = policy
        {
            q.q_update(state, HIT, 0.0, Some((next, &BOTH)), *alpha, *gamma);
        }
    }
}

/// The random baseline: uniform hit/stand with no learning.
pub fn base_random_run(episodes: u64, seed: u64) -> Result<LearnMetrics, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x6261_7365));
    let mut metrics = MetricsBuilder::with_capacity(episodes as usize);
    let mut policy = BasePolicy::Random;
    for _ in 0..episodes {
        let r = base_episode(&mut policy, &mut rng)?;
        metrics.record(r, 1.0);
    }
    Ok(metrics.finish())
}

/// Trains a fresh table for `hp.train_episodes` episodes with the decaying
/// epsilon schedule, returning the table and the training-phase metrics
/// (cumulative payoff curve plus the epsilon used each episode).
pub fn train_q_base(
    hp: &Hyperparams,
    schedule: &EpsilonSchedule,
) -> Result<(QTable, LearnMetrics), Error> {
    hp.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(hp.seed, 0x6261_7365));
    let mut q = QTable::new(BASE_NUM_STATES, BASE_ACTIONS.len());
    let mut metrics = MetricsBuilder::with_capacity(hp.train_episodes as usize);
    for episode in 0..hp.train_episodes {
        let eps = schedule.epsilon_at(episode, hp.train_episodes)?;
        let mut policy = BasePolicy::Table {
            q: &mut q,
            eps,
            learn: Some((hp.alpha, hp.gamma)),
        };
        let r = base_episode(&mut policy, &mut rng)?;
        metrics.record(r, eps);
    }
    Ok((q, metrics.finish()))
}

/// Greedy evaluation of a trained table (epsilon 0, no updates).
pub fn base_backtest(q: &QTable, episodes: u64, seed: u64) -> Result<LearnMetrics, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x6576_616c));
    let mut metrics = MetricsBuilder::with_capacity(episodes as usize);
    let mut table = q.clone();
    for _ in 0..episodes {
        let mut policy = BasePolicy::Table {
            q: &mut table,
            eps: 0.0,
            learn: None,
        };
        let r = base_episode(&mut policy, &mut rng)?;
        metrics.record(r, 0.0);
    }
    debug_assert_eq!(table, *q);
    Ok(metrics.finish())
}

/// Extracts the greedy policy as a strategy chart: hard rows from no-ace
/// states, soft rows from usable-ace states, unvisited states left
/// undefined.
pub fn extract_strategy_base(q: &QTable) -> StrategyChart {
    let mut chart = StrategyChart::new_empty(ChartVariant::S17);
    for idx in 0..BASE_NUM_STATES {
        if q.state_visits(idx) == 0 {
            continue;
        }
        let s = base_state_of_index(idx);
        let action = match q.greedy(idx, &BOTH) {
            Ok(STAND) => Action::Stand,
            _ => Action::Hit,
        };
        let (kind, row) = if s.usable_ace {
            (TableKind::Soft, s.player_total)
        } else {
            (TableKind::Hard, s.player_total)
        };
        if row < 12 && s.usable_ace {
            continue; // unreachable by the usable-ace invariant
        }
        let _ = chart.set_cell(
            kind,
            row,
            s.dealer_up,
            Cell {
                primary: action,
                fallback: None,
            },
        );
    }
    chart
}
