//! The extended learning environment: a finite multi-deck shoe that
//! persists across episodes (reshuffled when fewer than 30 cards remain),
//! the full action set, and a state carrying the hand total, hand kind,
//! dealer up card and a quantized true-count bucket.
//!
//! Training uses shaped in-episode rewards: a settled hand is worth its
//! monetary result in betting units shifted up by one, so standing yields
//! 0/1/2 for loss/draw/win and doubling -1/1/3; a split's reward is the
//! shifted sum of both hands' settlements. Surrender is the exception and
//! trains at its raw, unshifted -0.5. Backtests always use real monetary
//! settlement.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basic_strategy::{Cell, ChartVariant, StrategyChart, TableKind};
use crate::counting::{bet_size, CountState, CountingSystem};
use crate::derive_seed;
use crate::learn::{
    select_action, EpsilonSchedule, Hyperparams, LearnMetrics, MetricsBuilder, QTable,
};
use crate::rules::{
    dealer_play, hand_value, legal_actions, settle, Action, RulesConfig, ALL_ACTIONS,
};
use crate::shoe::{Card, Shoe};
use crate::{Currency, Error};

pub const EXT_ACTIONS: [Action; 5] = ALL_ACTIONS;

/// Total keys 2..=21 (pairs are keyed by twice the low card value, so a
/// pair of aces sits at 2), dealer up 2..=11, three hand kinds, five
/// true-count buckets.
pub const EXT_NUM_STATES: usize = 20 * 10 * 3 * 5;

/// Reshuffle threshold: a new pack is presented when fewer than 30 cards
/// remain.
pub const RESHUFFLE_BELOW: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HandKind {
    Hard,
    Soft,
    Pair,
}

impl HandKind {
    pub fn name(self) -> &'static str {
        match self {
            HandKind::Hard => "hard",
            HandKind::Soft => "soft",
            HandKind::Pair => "pair",
        }
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "hard" => Ok(HandKind::Hard),
            "soft" => Ok(HandKind::Soft),
            "pair" => Ok(HandKind::Pair),
            other => Err(Error::Parse(format!("unknown hand kind `{other}`"))),
        }
    }

    fn index(self) -> usize {
        match self {
            HandKind::Hard => 0,
            HandKind::Soft => 1,
            HandKind::Pair => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtState {
    pub total_key: u32,
    pub dealer_up: u32,
    pub kind: HandKind,
    /// True count quantized to {<=-2, -1, 0, +1, >=+2}.
    pub tc_bucket: i32,
}

pub fn tc_bucket(tc: f64) -> i32 {
    (tc.round() as i64).clamp(-2, 2) as i32
}

pub fn ext_state_of(cards: &[Card], dealer_up: Card, tc: f64) -> Result<ExtState, Error> {
    let hv = hand_value(cards)?;
    let (kind, total_key) = if hv.is_pair {
        (HandKind::Pair, 2 * cards[0].value())
    } else if hv.is_soft {
        (HandKind::Soft, hv.total)
    } else {
        (HandKind::Hard, hv.total)
    };
    let up = if dealer_up.is_ace() {
        11
    } else {
        dealer_up.value()
    };
    Ok(ExtState {
        total_key,
        dealer_up: up,
        kind,
        tc_bucket: tc_bucket(tc),
    })
}

pub fn ext_state_index(s: ExtState) -> usize {
    debug_assert!((2..=21).contains(&s.total_key));
    debug_assert!((2..=11).contains(&s.dealer_up));
    debug_assert!((-2..=2).contains(&s.tc_bucket));
    ((s.total_key - 2) as usize) * 150
        + ((s.dealer_up - 2) as usize) * 15
        + s.kind.index() * 5
        + (s.tc_bucket + 2) as usize
}

pub(crate) fn ext_state_of_index(idx: usize) -> ExtState {
    let total_key = 2 + (idx / 150) as u32;
    let dealer_up = 2 + ((idx / 15) % 10) as u32;
    let kind = match (idx / 5) % 3 {
        0 => HandKind::Hard,
        1 => HandKind::Soft,
        _ => HandKind::Pair,
    };
    ExtState {
        total_key,
        dealer_up,
        kind,
        tc_bucket: (idx % 5) as i32 - 2,
    }
}

#[derive(Clone, Copy)]
enum ExtMode {
    Train { eps: f64, alpha: f64, gamma: f64 },
    Greedy,
}

struct HandPlan {
    cards: Vec<Card>,
    terminal: Option<(usize, usize)>,
    surrendered: bool,
    doubled: bool,
    from_split: bool,
}

/// A completed hand, or the (state, action) of a chosen split.
type HandOrSplit = (Option<HandPlan>, Option<(usize, usize)>);

impl HandPlan {
    fn live(&self) -> Result<bool, Error> {
        if self.surrendered {
            return Ok(false);
        }
        Ok(!hand_value(&self.cards)?.is_bust)
    }
}

/// Plays one hand to completion (or until a split is chosen on the original
/// hand), performing intermediate hit-chain updates in training mode.
#[allow(clippy::too_many_arguments)]
fn play_ext_hand<R: Rng>(
    q: &mut QTable,
    shoe: &mut Shoe,
    count: &mut CountState,
    rules: &RulesConfig,
    up: Card,
    mode: ExtMode,
    rng: &mut R,
    mut cards: Vec<Card>,
    already_split: bool,
) -> Result<HandOrSplit, Error> {
    let mut first = true;
    let mut pending: Option<(usize, usize)> = None;
    loop {
        let hv = hand_value(&cards)?;
        if hv.is_bust {
            // The busting hit is this hand's terminal transition.
            return Ok((
                Some(HandPlan {
                    cards,
                    terminal: pending,
                    surrendered: false,
                    doubled: false,
                    from_split: already_split,
                }),
                None,
            ));
        }
        let tc = count.true_count(shoe);
        let state = ext_state_index(ext_state_of(&cards, up, tc)?);
        let legal = legal_actions(&cards, rules, already_split, first)?;
        let legal_idx: Vec<usize> = legal.iter().map(Action::index).collect();
        if let ExtMode::Train { alpha, gamma, .. } = mode {
            if let Some((ps, pa)) = pending.take() {
                q.q_update(ps, pa, 0.0, Some((state, &legal_idx)), alpha, gamma);
            }
        }
        let action_idx = match mode {
            ExtMode::Train { eps, .. } => select_action(q, state, &legal_idx, eps, rng)?,
            ExtMode::Greedy => q.greedy(state, &legal_idx)?,
        };
        match EXT_ACTIONS[action_idx] {
            Action::Stand => {
                return Ok((
                    Some(HandPlan {
                        cards,
                        terminal: Some((state, action_idx)),
                        surrendered: false,
                        doubled: false,
                        from_split: already_split,
                    }),
                    None,
                ));
            }
            Action::Hit => {
                let c = shoe.draw()?;
                count.observe(c);
                cards.push(c);
                first = false;
                pending = Some((state, action_idx));
            }
            Action::Double => {
                let c = shoe.draw()?;
                count.observe(c);
                cards.push(c);
                return Ok((
                    Some(HandPlan {
                        cards,
                        terminal: Some((state, action_idx)),
                        surrendered: false,
                        doubled: true,
                        from_split: already_split,
                    }),
                    None,
                ));
            }
            Action::Surrender => {
                return Ok((
                    Some(HandPlan {
                        cards,
                        terminal: Some((state, action_idx)),
                        surrendered: true,
                        doubled: false,
                        from_split: already_split,
                    }),
                    None,
                ));
            }
            Action::Split => {
                return Ok((None, Some((state, action_idx))));
            }
        }
    }
}

/// Plays one full round, returning the net monetary payoff at the given
/// bet. In training mode all Q updates for the round are applied.
fn ext_round<R: Rng>(
    q: &mut QTable,
    shoe: &mut Shoe,
    count: &mut CountState,
    rules: &RulesConfig,
    bet: Currency,
    mode: ExtMode,
    rng: &mut R,
) -> Result<Currency, Error> {
    let p1 = shoe.draw()?;
    count.observe(p1);
    let p2 = shoe.draw()?;
    count.observe(p2);
    let up = shoe.draw()?;
    count.observe(up);
    let hole = shoe.draw()?;

    let player_hv = hand_value(&[p1, p2])?;
    let dealer_start = hand_value(&[up, hole])?;
    if player_hv.is_natural || dealer_start.is_natural {
        // Either natural ends the round before any decision is made.
        count.observe(hole);
        let outcome = settle(player_hv, dealer_start, bet, false, false, rules)?;
        return Ok(outcome.net_payoff);
    }

    let mut hands: Vec<HandPlan> = Vec::with_capacity(2);
    let mut split_transition: Option<(usize, usize)> = None;
    let (plan, split) = play_ext_hand(q, shoe, count, rules, up, mode, rng, vec![p1, p2], false)?;
    if let Some(split_sa) = split {
        split_transition = Some(split_sa);
        for starter in [p1, p2] {
            let next = shoe.draw()?;
            count.observe(next);
            let (hand, resplit) = play_ext_hand(
                q,
                shoe,
                count,
                rules,
                up,
                mode,
                rng,
                vec![starter, next],
                true,
            )?;
            debug_assert!(resplit.is_none());
            hands.push(hand.expect("split hands always complete"));
        }
    } else {
        hands.push(plan.expect("unsplit hand always completes"));
    }

    let mut any_live = false;
    for hand in &hands {
        any_live = any_live || hand.live()?;
    }
    count.observe(hole);
    let mut dealer_cards = vec![up, hole];
    let dealer_hv = if any_live {
        let hv = dealer_play(shoe, &mut dealer_cards, rules)?;
        for &c in &dealer_cards[2..] {
            count.observe(c);
        }
        hv
    } else {
        hand_value(&dealer_cards)?
    };

    let mut net: Currency = 0;
    let mut per_unit_sum = 0.0;
    for hand in &hands {
        let mut hv = hand_value(&hand.cards)?;
        if hand.from_split {
            hv.is_natural = false;
        }
        let outcome = settle(hv, dealer_hv, bet, hand.surrendered, hand.doubled, rules)?;
        net += outcome.net_payoff;
        let per_unit = outcome.net_payoff as f64 / bet as f64;
        per_unit_sum += per_unit;
        if let ExtMode::Train { alpha, gamma, .. } = mode {
            if let Some((s, a)) = hand.terminal {
                let reward = if hand.surrendered {
                    -0.5
                } else {
                    per_unit + 1.0
                };
                q.q_update(s, a, reward, None, alpha, gamma);
            }
        }
    }
    if let ExtMode::Train { alpha, gamma, .. } = mode {
        if let Some((s, a)) = split_transition {
            q.q_update(s, a, 1.0 + per_unit_sum, None, alpha, gamma);
        }
    }
    Ok(net)
}

fn reshuffle_if_needed(shoe: &mut Shoe, count: &mut CountState) {
    if shoe.remaining() < RESHUFFLE_BELOW {
        shoe.reshuffle();
        count.reset();
    }
}

/// Trains on the finite-shoe environment. The shoe persists across
/// episodes and is reshuffled below 30 cards; training bets are one unit
/// and rewards are the shaped values described at module level. Metrics
/// report the monetary per-unit payoff of each training episode.
pub fn train_q_ext(
    rules: &RulesConfig,
    system: CountingSystem,
    hp: &Hyperparams,
    schedule: &EpsilonSchedule,
) -> Result<(QTable, LearnMetrics), Error> {
    hp.validate()?;
    if rules.num_decks == 0 {
        return Err(Error::InvalidConfig("num_decks must be >= 1".into()));
    }
    let mut shoe = Shoe::new(rules.num_decks, derive_seed(hp.seed, 0x7368_6f65))?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(hp.seed, 0x6578_7431));
    let mut count = CountState::new(system);
    let mut q = QTable::new(EXT_NUM_STATES, EXT_ACTIONS.len());
    let mut metrics = MetricsBuilder::with_capacity(hp.train_episodes as usize);
    // Bets of two units keep half-bet surrender exact in integer currency.
    let train_bet: Currency = 2;
    for episode in 0..hp.train_episodes {
        reshuffle_if_needed(&mut shoe, &mut count);
        let eps = schedule.epsilon_at(episode, hp.train_episodes)?;
        let mode = ExtMode::Train {
            eps,
            alpha: hp.alpha,
            gamma: hp.gamma,
        };
        let net = ext_round(
            &mut q, &mut shoe, &mut count, rules, train_bet, mode, &mut rng,
        )?;
        metrics.record(net as f64 / train_bet as f64, eps);
    }
    Ok((q, metrics.finish()))
}

/// Greedy backtest with count-driven bet sizing and real settlement.
pub fn backtest(
    q: &QTable,
    rules: &RulesConfig,
    system: CountingSystem,
    episodes: u64,
    unit: Currency,
    seed: u64,
) -> Result<LearnMetrics, Error> {
    if unit <= 0 {
        return Err(Error::InvalidBet(unit));
    }
    let mut shoe = Shoe::new(rules.num_decks, derive_seed(seed, 0x6274_7368))?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x6274_7267));
    let mut count = CountState::new(system);
    let mut table = q.clone();
    let mut metrics = MetricsBuilder::with_capacity(episodes as usize);
    let mut bankroll: Currency = 0;
    for _ in 0..episodes {
        reshuffle_if_needed(&mut shoe, &mut count);
        let tc = count.true_count(&shoe);
        let bet = bet_size(bankroll, unit, tc, rules);
        let net = ext_round(
            &mut table,
            &mut shoe,
            &mut count,
            rules,
            bet,
            ExtMode::Greedy,
            &mut rng,
        )?;
        bankroll = bankroll.checked_add(net).ok_or(Error::BankrollOverflow)?;
        metrics.record(net as f64, 0.0);
    }
    debug_assert_eq!(table, *q);
    let metrics = metrics.finish();
    debug_assert_eq!(metrics.wins + metrics.draws + metrics.losses, episodes);
    Ok(metrics)
}

/// Collapses the count dimension by visit weight and extracts the greedy
/// policy as a strategy chart; states never visited stay undefined.
pub fn extract_strategy_ext(q: &QTable, variant: ChartVariant) -> StrategyChart {
    let mut chart = StrategyChart::new_empty(variant);
    for total_key in 2..=21u32 {
        for up in 2..=11u32 {
            for kind in [HandKind::Hard, HandKind::Soft, HandKind::Pair] {
                let mut weighted = [0.0f64; 5];
                let mut visits = [0u64; 5];
                for bucket in -2..=2i32 {
                    let s = ext_state_index(ExtState {
                        total_key,
                        dealer_up: up,
                        kind,
                        tc_bucket: bucket,
                    });
                    for (a, (w, n)) in weighted.iter_mut().zip(visits.iter_mut()).enumerate() {
                        let v = q.visits(s, a);
                        *n += v;
                        *w += v as f64 * q.q(s, a);
                    }
                }
                if visits.iter().all(|&v| v == 0) {
                    continue;
                }
                let mut best = 0usize;
                let mut best_q = f64::NEG_INFINITY;
                for (a, (&w, &n)) in weighted.iter().zip(visits.iter()).enumerate() {
                    let mean = if n > 0 { w / n as f64 } else { 0.0 };
                    if mean > best_q {
                        best_q = mean;
                        best = a;
                    }
                }
                let (table_kind, row) = match kind {
                    HandKind::Hard => (TableKind::Hard, total_key),
                    HandKind::Soft => (TableKind::Soft, total_key),
                    HandKind::Pair => (TableKind::Pair, total_key / 2),
                };
                if (table_kind == TableKind::Hard && !(4..=21).contains(&row))
                    || (table_kind == TableKind::Soft && !(12..=21).contains(&row))
                    || (table_kind == TableKind::Pair && !(1..=10).contains(&row))
                {
                    continue;
                }
                let _ = chart.set_cell(
                    table_kind,
                    row,
                    up,
                    Cell {
                        primary: EXT_ACTIONS[best],
                        fallback: None,
                    },
                );
            }
        }
    }
    chart
}

/// Counts chart cells whose extracted primary action is surrender.
pub fn surrender_argmax_cells(chart: &StrategyChart) -> usize {
    chart
        .cells()
        .filter(|(_, _, _, cell)| cell.primary == Action::Surrender)
        .count()
}
