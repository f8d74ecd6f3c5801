//! Multi-agent, multi-round bankrolled table simulator: one card counter
//! playing perfect basic strategy with Hi-Lo bet sizing against random
//! agents and the dealer.
//!
//! A simulation deals rounds from a fresh shoe until 25 or fewer cards
//! remain (or a round cannot be completed, in which case it is voided and
//! the simulation ends). The ledger is exactly zero-sum per round in
//! integer currency; balances may go negative, the house always pays.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basic_strategy::{chart, ChartVariant, StrategyChart};
use crate::counting::{bet_size, CountState, CountingSystem};
use crate::derive_seed;
use crate::rules::{
    dealer_play, hand_value, legal_actions, settle, Action, ActionSet, RulesConfig,
};
use crate::shoe::{Card, Shoe};
use crate::{Currency, Error};

/// A simulation ends once the shoe is down to this many cards or fewer.
pub const SIM_END_AT_OR_BELOW: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AgentKind {
    CardCounter,
    RandomAgent,
}

impl AgentKind {
    pub fn name(self) -> &'static str {
        match self {
            AgentKind::CardCounter => "card_counter",
            AgentKind::RandomAgent => "random_agent",
        }
    }
}

/// Table configuration. Seat 0 is the card counter; the remaining seats are
/// random agents.
#[derive(Clone, Debug)]
pub struct TableConfig {
    pub num_players: u32,
    pub num_decks: u32,
    pub dealer_hits_soft17: bool,
    pub num_simulations: u32,
    pub player_bankroll: Currency,
    /// Dealer starts with `player_bankroll * dealer_bankroll_ratio`.
    pub dealer_bankroll_ratio: f64,
    pub betting_unit: Currency,
    /// Random agents bet a uniform fraction of their (non-negative)
    /// bankroll from this range, clamped to the table limits.
    pub random_bet_fraction: (f64, f64),
    pub table_min_bet: Currency,
    pub table_max_bet: Currency,
    pub seed: u64,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig {
            num_players: 4,
            num_decks: 6,
            dealer_hits_soft17: false,
            num_simulations: 1000,
            player_bankroll: 10_000,
            dealer_bankroll_ratio: 200.0,
            betting_unit: 1_000,
            random_bet_fraction: (0.01, 0.05),
            table_min_bet: 1,
            table_max_bet: 10_000,
            seed: 0,
        }
    }
}

impl TableConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(1..=7).contains(&self.num_players) {
            return Err(Error::InvalidConfig(format!(
                "num_players {} (a table seats 1 to 7)",
                self.num_players
            )));
        }
        if self.num_decks == 0 {
            return Err(Error::InvalidConfig("num_decks must be >= 1".into()));
        }
        if self.num_simulations == 0 {
            return Err(Error::InvalidConfig("num_simulations must be >= 1".into()));
        }
        if self.betting_unit <= 0 || self.table_min_bet <= 0 {
            return Err(Error::InvalidConfig("bets must be positive".into()));
        }
        if self.random_bet_fraction.0 > self.random_bet_fraction.1
            || self.random_bet_fraction.0 < 0.0
        {
            return Err(Error::InvalidConfig("bad random bet fraction range".into()));
        }
        Ok(())
    }

    pub fn rules(&self) -> RulesConfig {
        RulesConfig {
            num_decks: self.num_decks,
            dealer_hits_soft17: self.dealer_hits_soft17,
            table_min_bet: self.table_min_bet,
            table_max_bet: self.table_max_bet,
            ..RulesConfig::default()
        }
    }

    pub fn dealer_bankroll(&self) -> Currency {
        (self.player_bankroll as f64 * self.dealer_bankroll_ratio) as Currency
    }
}

/// The hit-budget random agent: splits once when its pair total is in
/// [4, 18), then hits a fixed number of times (3 when the hand started
/// under 6, else 2) and stands, stopping early only by busting.
#[derive(Clone, Copy, Debug)]
pub struct RandomAgentState {
    budget: u32,
    hits_taken: u32,
}

impl RandomAgentState {
    /// `initial_total` is the hand's two-card total at the start of play.
    pub fn begin_hand(initial_total: u32) -> Self {
        RandomAgentState {
            budget: if initial_total < 6 { 3 } else { 2 },
            hits_taken: 0,
        }
    }

    pub fn decide(&mut self, hand: &[Card], legal: ActionSet) -> Action {
        let hv = hand_value(hand).expect("live hand");
        if legal.contains(Action::Split) && (4..18).contains(&hv.total) {
            return Action::Split;
        }
        if self.hits_taken < self.budget && legal.contains(Action::Hit) {
            self.hits_taken += 1;
            return Action::Hit;
        }
        Action::Stand
    }
}

/// Uniform-fraction bet from a non-negative bankroll view, clamped to the
/// table limits. Broke agents keep playing at the table minimum.
pub fn random_agent_bet<R: Rng>(
    bankroll: Currency,
    rng: &mut R,
    rules: &RulesConfig,
    fraction_range: (f64, f64),
) -> Currency {
    let (lo, hi) = fraction_range;
    let frac = if hi > lo { rng.gen_range(lo..hi) } else { lo };
    let raw = (frac * bankroll.max(0) as f64) as Currency;
    raw.clamp(rules.table_min_bet, rules.table_max_bet)
}

/// The card counter's decision policy: perfect basic strategy from the
/// chart matching the dealer rule. Bets come from the Hi-Lo true count.
pub struct CounterPolicy {
    chart: &'static StrategyChart,
    pub system: CountingSystem,
    pub unit: Currency,
}

impl CounterPolicy {
    pub fn new(dealer_hits_soft17: bool, unit: Currency) -> Self {
        CounterPolicy {
            chart: chart(ChartVariant::for_rules(dealer_hits_soft17)),
            system: CountingSystem::HiLo,
            unit,
        }
    }

    pub fn bet(&self, bankroll: Currency, tc: f64, rules: &RulesConfig) -> Currency {
        bet_size(bankroll, self.unit, tc, rules)
    }

    pub fn decide(
        &self,
        hand: &[Card],
        dealer_up: Card,
        legal: ActionSet,
    ) -> Result<Action, Error> {
        let hv = hand_value(hand)?;
        let pair_rank = (hv.is_pair).then(|| hand[0].rank());
        self.chart.lookup(hv, pair_rank, dealer_up, legal)
    }
}

/// Outcome ledger row for one agent (or the dealer).
#[derive(Clone, Debug)]
pub struct AgentRow {
    pub label: String,
    pub wins: u64,
    pub draws: u64,
    pub losses: u64,
    /// Share of all player-round outcomes across the run (the pooled
    /// denominator: rounds x players).
    pub win_pct: f64,
    pub draw_pct: f64,
    pub loss_pct: f64,
    /// Rate over the agent's own rounds.
    pub own_win_pct: f64,
    pub own_draw_pct: f64,
    pub own_loss_pct: f64,
    pub initial_bankroll: Currency,
    pub final_bankroll: Currency,
}

/// Aggregated simulation report: one row per seat plus the dealer.
///
/// The dealer's outcome counters mirror the card counter's (a dealer win
/// against the counter is the counter's loss); the dealer's bankroll is its
/// true zero-sum balance against the whole table.
#[derive(Clone, Debug)]
pub struct SimReport {
    pub rows: Vec<AgentRow>,
    pub rounds_played: u64,
    pub simulations_completed: u32,
}

impl SimReport {
    pub fn counter(&self) -> &AgentRow {
        &self.rows[0]
    }

    pub fn dealer(&self) -> &AgentRow {
        self.rows.last().expect("dealer row")
    }

    pub fn random_agents(&self) -> &[AgentRow] {
        &self.rows[1..self.rows.len() - 1]
    }
}

struct SeatHand {
    cards: Vec<Card>,
    surrendered: bool,
    doubled: bool,
    from_split: bool,
}

struct Seat {
    kind: AgentKind,
    balance: Currency,
    wins: u64,
    draws: u64,
    losses: u64,
    rounds: u64,
}

/// Runs the configured number of simulations, aggregating a report.
/// Fully deterministic given the seed.
pub fn run_table(cfg: &TableConfig) -> Result<SimReport, Error> {
    cfg.validate()?;
    let rules = cfg.rules();
    let counter = CounterPolicy::new(cfg.dealer_hits_soft17, cfg.betting_unit);
    let mut seats: Vec<Seat> = (0..cfg.num_players)
        .map(|i| Seat {
            kind: if i == 0 {
                AgentKind::CardCounter
            } else {
                AgentKind::RandomAgent
            },
            balance: cfg.player_bankroll,
            wins: 0,
            draws: 0,
            losses: 0,
            rounds: 0,
        })
        .collect();
    let mut dealer_balance = cfg.dealer_bankroll();
    let mut dealer_mirror = (0u64, 0u64, 0u64); // (wins, draws, losses) vs the counter
    let mut rounds_played = 0u64;

    for sim in 0..cfg.num_simulations {
        let mut shoe = Shoe::new(cfg.num_decks, derive_seed(cfg.seed, 2 * sim as u64))?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 2 * sim as u64 + 1));
        let mut count = CountState::new(CountingSystem::HiLo);
        loop {
            if shoe.remaining() <= SIM_END_AT_OR_BELOW {
                break;
            }
            match play_table_round(
                &mut shoe, &mut rng, &mut count, &counter, &rules, cfg, &mut seats,
            ) {
                Ok(nets) => {
                    let mut dealer_delta: Currency = 0;
                    for (seat, net) in seats.iter_mut().zip(nets.iter()) {
                        seat.balance = seat
                            .balance
                            .checked_add(*net)
                            .ok_or(Error::BankrollOverflow)?;
                        dealer_delta = dealer_delta
                            .checked_sub(*net)
                            .ok_or(Error::BankrollOverflow)?;
                        seat.rounds += 1;
                        match net.cmp(&0) {
                            std::cmp::Ordering::Greater => seat.wins += 1,
                            std::cmp::Ordering::Less => seat.losses += 1,
                            std::cmp::Ordering::Equal => seat.draws += 1,
                        }
                    }
                    // Exact conservation: the dealer absorbs the negation
                    // of all player deltas.
                    debug_assert_eq!(nets.iter().sum::<Currency>(), -dealer_delta);
                    dealer_balance = dealer_balance
                        .checked_add(dealer_delta)
                        .ok_or(Error::BankrollOverflow)?;
                    match nets[0].cmp(&0) {
                        std::cmp::Ordering::Greater => dealer_mirror.2 += 1,
                        std::cmp::Ordering::Less => dealer_mirror.0 += 1,
                        std::cmp::Ordering::Equal => dealer_mirror.1 += 1,
                    }
                    rounds_played += 1;
                }
                Err(Error::ShoeExhausted) => {
                    // Not enough cards to complete the round: void it and
                    // end the simulation. No money moved.
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    }

    let pooled: u64 = seats.iter().map(|s| s.rounds).sum();
    let pct = |n: u64, d: u64| {
        if d == 0 {
            0.0
        } else {
            100.0 * n as f64 / d as f64
        }
    };
    let mut rows = Vec::with_capacity(seats.len() + 1);
    let mut random_idx = 0;
    for seat in &seats {
        let label = match seat.kind {
            AgentKind::CardCounter => "card_counter".to_string(),
            AgentKind::RandomAgent => {
                random_idx += 1;
                format!("random_agent_{random_idx}")
            }
        };
        rows.push(AgentRow {
            label,
            wins: seat.wins,
            draws: seat.draws,
            losses: seat.losses,
            win_pct: pct(seat.wins, pooled),
            draw_pct: pct(seat.draws, pooled),
            loss_pct: pct(seat.losses, pooled),
            own_win_pct: pct(seat.wins, seat.rounds),
            own_draw_pct: pct(seat.draws, seat.rounds),
            own_loss_pct: pct(seat.losses, seat.rounds),
            initial_bankroll: cfg.player_bankroll,
            final_bankroll: seat.balance,
        });
    }
    let counter_rounds = seats[0].rounds;
    rows.push(AgentRow {
        label: "dealer".to_string(),
        wins: dealer_mirror.0,
        draws: dealer_mirror.1,
        losses: dealer_mirror.2,
        win_pct: pct(dealer_mirror.0, pooled),
        draw_pct: pct(dealer_mirror.1, pooled),
        loss_pct: pct(dealer_mirror.2, pooled),
        own_win_pct: pct(dealer_mirror.0, counter_rounds),
        own_draw_pct: pct(dealer_mirror.1, counter_rounds),
        own_loss_pct: pct(dealer_mirror.2, counter_rounds),
        initial_bankroll: cfg.dealer_bankroll(),
        final_bankroll: dealer_balance,
    });
    Ok(SimReport {
        rows,
        rounds_played,
        simulations_completed: cfg.num_simulations,
    })
}

/// Plays one table round and returns each seat's net. Any draw from an
/// exhausted shoe aborts with `ShoeExhausted` before money moves.
#[allow(clippy::too_many_arguments)]
fn play_table_round(
    shoe: &mut Shoe,
    rng: &mut ChaCha8Rng,
    count: &mut CountState,
    counter: &CounterPolicy,
    rules: &RulesConfig,
    cfg: &TableConfig,
    seats: &mut [Seat],
) -> Result<Vec<Currency>, Error> {
    let num = seats.len();
    // Bets are sized before any card is dealt.
    let mut bets = Vec::with_capacity(num);
    for seat in seats.iter() {
        let bet = match seat.kind {
            AgentKind::CardCounter => counter.bet(seat.balance, count.true_count(shoe), rules),
            AgentKind::RandomAgent => {
                random_agent_bet(seat.balance, rng, rules, cfg.random_bet_fraction)
            }
        };
        bets.push(bet);
    }

    // Deal in seat order: one card each, dealer up card, second card each,
    // then the hole card (observed only at the reveal).
    let mut firsts = Vec::with_capacity(num);
    for _ in 0..num {
        let c = shoe.draw()?;
        count.observe(c);
        firsts.push(c);
    }
    let up = shoe.draw()?;
    count.observe(up);
    let mut hands: Vec<Vec<Card>> = Vec::with_capacity(num);
    for &first in &firsts {
        let c = shoe.draw()?;
        count.observe(c);
        hands.push(vec![first, c]);
    }
    let hole = shoe.draw()?;

    // A dealer natural settles every seat before any decisions: naturals
    // push, everything else loses its original bet.
    let dealer_start = hand_value(&[up, hole])?;
    if dealer_start.is_natural {
        count.observe(hole);
        let mut nets = Vec::with_capacity(num);
        for (cards, &bet) in hands.iter().zip(&bets) {
            let hv = hand_value(cards)?;
            let outcome = settle(hv, dealer_start, bet, false, false, rules)?;
            nets.push(outcome.net_payoff);
        }
        return Ok(nets);
    }

    // Player decisions in seat order.
    let mut finished: Vec<Vec<SeatHand>> = Vec::with_capacity(num);
    for (seat_idx, cards) in hands.into_iter().enumerate() {
        let kind = seats[seat_idx].kind;
        let hv = hand_value(&cards)?;
        if hv.is_natural {
            finished.push(vec![SeatHand {
                cards,
                surrendered: false,
                doubled: false,
                from_split: false,
            }]);
            continue;
        }
        let (hand, split_card) =
            play_seat_hand(shoe, count, counter, rules, kind, up, cards, false)?;
        if let Some(second) = split_card {
            let first = hand.cards[0];
            let mut seat_hands = Vec::with_capacity(2);
            for starter in [first, second] {
                let next = shoe.draw()?;
                count.observe(next);
                let (h, resplit) = play_seat_hand(
                    shoe,
                    count,
                    counter,
                    rules,
                    kind,
                    up,
                    vec![starter, next],
                    true,
                )?;
                debug_assert!(resplit.is_none());
                seat_hands.push(h);
            }
            finished.push(seat_hands);
        } else {
            finished.push(vec![hand]);
        }
    }

    // Dealer plays only if some hand is live.
    let mut any_live = false;
    for seat_hands in &finished {
        for h in seat_hands {
            if !h.surrendered && !hand_value(&h.cards)?.is_bust {
                any_live = true;
            }
        }
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

    // Settle each seat.
    let mut nets = Vec::with_capacity(num);
    for (seat_idx, seat_hands) in finished.iter().enumerate() {
        let mut net: Currency = 0;
        for h in seat_hands {
            let mut hv = hand_value(&h.cards)?;
            if h.from_split {
                hv.is_natural = false;
            }
            let outcome = settle(
                hv,
                dealer_hv,
                bets[seat_idx],
                h.surrendered,
                h.doubled,
                rules,
            )?;
            net += outcome.net_payoff;
        }
        nets.push(net);
    }
    Ok(nets)
}

#[allow(clippy::too_many_arguments)]
fn play_seat_hand(
    shoe: &mut Shoe,
    count: &mut CountState,
    counter: &CounterPolicy,
    rules: &RulesConfig,
    kind: AgentKind,
    up: Card,
    mut cards: Vec<Card>,
    already_split: bool,
) -> Result<(SeatHand, Option<Card>), Error> {
    let initial_total = hand_value(&cards)?.total;
    let mut random_state = RandomAgentState::begin_hand(initial_total);
    let mut first = true;
    let mut surrendered = false;
    let mut doubled = false;
    loop {
        let hv = hand_value(&cards)?;
        if hv.is_bust {
            break;
        }
        let legal = legal_actions(&cards, rules, already_split, first)?;
        let action = match kind {
            AgentKind::CardCounter => counter.decide(&cards, up, legal)?,
            AgentKind::RandomAgent => random_state.decide(&cards, legal),
        };
        if !legal.contains(action) {
            return Err(Error::IllegalAction(action));
        }
        match action {
            Action::Stand => break,
            Action::Hit => {
                let c = shoe.draw()?;
                count.observe(c);
                cards.push(c);
                first = false;
            }
            Action::Double => {
                let c = shoe.draw()?;
                count.observe(c);
                cards.push(c);
                doubled = true;
                break;
            }
            Action::Surrender => {
                surrendered = true;
                break;
            }
            Action::Split => {
                let split_card = cards[1];
                return Ok((
                    SeatHand {
                        cards,
                        surrendered: false,
                        doubled: false,
                        from_split: false,
                    },
                    Some(split_card),
                ));
            }
        }
    }
    Ok((
        SeatHand {
            cards,
            surrendered,
            doubled,
            from_split: already_split,
        },
        None,
    ))
}
