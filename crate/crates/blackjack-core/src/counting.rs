//! Card-counting systems: Ten Count, Hi-Lo, Zen and Uston APC, plus
//! running/true count maintenance and count-driven bet sizing.
//!
//! Zen as published lists only 10 and ace at -2; we apply -2 to every
//! ten-valued rank (J, Q, K are ten-valued), and likewise Uston APC's -3.
//! That leaves Zen unbalanced at -4 per deck, which we keep verbatim.

use crate::rules::RulesConfig;
use crate::shoe::{Card, Rank, Shoe};
use crate::{Currency, Error};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountingSystem {
    TenCount,
    HiLo,
    Zen,
    UstonApc,
    None,
}

pub const ALL_SYSTEMS: [CountingSystem; 5] = [
    CountingSystem::TenCount,
    CountingSystem::HiLo,
    CountingSystem::Zen,
    CountingSystem::UstonApc,
    CountingSystem::None,
];

impl CountingSystem {
    /// The system's index for a card's rank.
    pub fn card_weight(self, card: Card) -> i64 {
        let rank = card.rank();
        match self {
            CountingSystem::TenCount => {
                if rank.is_ten_value() {
                    -9
                } else {
                    4
                }
            }
            CountingSystem::HiLo => match rank {
                Rank::Two | Rank::Three | Rank::Four | Rank::Five | Rank::Six => 1,
                Rank::Seven | Rank::Eight | Rank::Nine => 0,
                _ => -1,
            },
            CountingSystem::Zen => match rank {
                Rank::Two | Rank::Three | Rank::Seven => 1,
                Rank::Four | Rank::Five | Rank::Six => 2,
                Rank::Eight | Rank::Nine => 0,
                _ => -2,
            },
            CountingSystem::UstonApc => match rank {
                Rank::Two | Rank::Eight => 1,
                Rank::Three | Rank::Four | Rank::Six | Rank::Seven => 2,
                Rank::Five => 3,
                Rank::Nine => -1,
                Rank::Ace => 0,
                _ => -3,
            },
            CountingSystem::None => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CountingSystem::TenCount => "ten_count",
            CountingSystem::HiLo => "hi_lo",
            CountingSystem::Zen => "zen",
            CountingSystem::UstonApc => "uston_apc",
            CountingSystem::None => "none",
        }
    }

    pub fn parse(name: &str) -> Result<Self, Error> {
        match name {
            "ten_count" => Ok(CountingSystem::TenCount),
            "hi_lo" => Ok(CountingSystem::HiLo),
            "zen" => Ok(CountingSystem::Zen),
            "uston_apc" => Ok(CountingSystem::UstonApc),
            "none" => Ok(CountingSystem::None),
            other => Err(Error::Parse(format!("unknown counting system `{other}`"))),
        }
    }
}

/// Running count plus cards-seen bookkeeping for one shoe.
#[derive(Clone, Copy, Debug)]
pub struct CountState {
    pub running_count: i64,
    pub cards_seen: u64,
    pub system: CountingSystem,
}

impl CountState {
    pub fn new(system: CountingSystem) -> Self {
        CountState {
            running_count: 0,
            cards_seen: 0,
            system,
        }
    }

    /// Adds one revealed card to the count.
    pub fn observe(&mut self, card: Card) {
        self.running_count += self.system.card_weight(card);
        self.cards_seen += 1;
    }

    pub fn observe_all(&mut self, cards: &[Card]) {
        for &c in cards {
            self.observe(c);
        }
    }

    /// Resets for a fresh shoe.
    pub fn reset(&mut self) {
        self.running_count = 0;
        self.cards_seen = 0;
    }

    /// Running count divided by decks remaining.
    pub fn true_count(&self, shoe: &Shoe) -> f64 {
        self.running_count as f64 / shoe.decks_remaining()
    }
}

/// Count-driven bet ramp: one betting unit per point of positive true count,
/// never below one unit, clamped to the table limits. A bet is always
/// placed. The bankroll does not enter the ramp; ledgers may go negative.
pub fn bet_size(_bankroll: Currency, unit: Currency, tc: f64, rules: &RulesConfig) -> Currency {
    let multiplier = (tc.floor() as i64).max(1);
    (unit * multiplier)
        .clamp(rules.table_min_bet, rules.table_max_bet)
        .max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shoe::{Shoe, ALL_RANKS};

    #[test]
    fn card_weight_examples() {
        let hi_lo = CountingSystem::HiLo;
        assert_eq!(hi_lo.card_weight(Card::new(Rank::Five)), 1);
        assert_eq!(hi_lo.card_weight(Card::new(Rank::King)), -1);
        assert_eq!(hi_lo.card_weight(Card::new(Rank::Eight)), 0);
        assert_eq!(
            CountingSystem::UstonApc.card_weight(Card::new(Rank::Five)),
            3
        );
        assert_eq!(
            CountingSystem::TenCount.card_weight(Card::new(Rank::Queen)),
            -9
        );
        assert_eq!(CountingSystem::Zen.card_weight(Card::new(Rank::Ace)), -2);
        assert_eq!(CountingSystem::Zen.card_weight(Card::new(Rank::Jack)), -2);
    }

    /// Per-deck sum from an independent enumeration of the 52 rank weights.
    fn per_deck_sum(system: CountingSystem) -> i64 {
        ALL_RANKS
            .iter()
            .map(|&r| 4 * system.card_weight(Card::new(r)))
            .sum()
    }

    #[test]
    fn full_shoe_balance() {
        for decks in [1u32, 4, 6, 8] {
            for system in ALL_SYSTEMS {
                let mut shoe = Shoe::new(decks, 17).unwrap();
                let mut count = CountState::new(system);
                while shoe.remaining() > 0 {
                    count.observe(shoe.draw().unwrap());
                }
                assert_eq!(
                    count.running_count,
                    decks as i64 * per_deck_sum(system),
                    "{} over {decks} decks",
                    system.name()
                );
                assert_eq!(count.cards_seen, 52 * decks as u64);
            }
        }
        // Balanced systems sum to zero; Zen as transcribed here is -4 per deck.
        assert_eq!(per_deck_sum(CountingSystem::TenCount), 0);
        assert_eq!(per_deck_sum(CountingSystem::HiLo), 0);
        assert_eq!(per_deck_sum(CountingSystem::UstonApc), 0);
        assert_eq!(per_deck_sum(CountingSystem::Zen), -4);
    }

    #[test]
    fn observe_pairs_cancel() {
        let mut count = CountState::new(CountingSystem::HiLo);
        count.observe(Card::new(Rank::Two));
        count.observe(Card::new(Rank::King));
        assert_eq!(count.running_count, 0);
        assert_eq!(count.cards_seen, 2);
    }

    #[test]
    fn hi_lo_antisymmetry() {
        // 20 cards at +1 and 20 at -1 per deck.
        let mut plus = 0;
        let mut minus = 0;
        for r in ALL_RANKS {
            match CountingSystem::HiLo.card_weight(Card::new(r)) {
                1 => plus += 4,
                -1 => minus += 4,
                _ => {}
            }
        }
        assert_eq!((plus, minus), (20, 20));
    }

    #[test]
    fn true_count_arithmetic() {
        let mut shoe = Shoe::new(6, 3).unwrap();
        for _ in 0..156 {
            shoe.draw().unwrap();
        }
        assert_eq!(shoe.decks_remaining(), 3.0);
        let mut count = CountState::new(CountingSystem::HiLo);
        count.running_count = 6;
        assert_eq!(count.true_count(&shoe), 2.0);
        count.running_count = 0;
        assert_eq!(count.true_count(&shoe), 0.0);
        count.running_count = -4;
        let mut shoe2 = Shoe::new(6, 3).unwrap();
        for _ in 0..208 {
            shoe2.draw().unwrap();
        }
        assert_eq!(shoe2.decks_remaining(), 2.0);
        assert_eq!(count.true_count(&shoe2), -2.0);
    }

    #[test]
    fn true_count_is_odd_in_running_count() {
        let mut shoe = Shoe::new(4, 5).unwrap();
        for _ in 0..100 {
            shoe.draw().unwrap();
        }
        let mut a = CountState::new(CountingSystem::Zen);
        let mut b = CountState::new(CountingSystem::Zen);
        for r in [3i64, 7, 12, 25] {
            a.running_count = r;
            b.running_count = -r;
            assert_eq!(a.true_count(&shoe), -b.true_count(&shoe));
        }
    }

    #[test]
    fn bet_ramp() {
        let rules = RulesConfig {
            table_min_bet: 100,
            table_max_bet: 1000,
            ..RulesConfig::default()
        };
        assert_eq!(bet_size(10_000, 100, 3.7, &rules), 300);
        assert_eq!(bet_size(10_000, 100, -2.0, &rules), 100);
        assert_eq!(bet_size(10_000, 100, 50.0, &rules), 1000);
        assert_eq!(bet_size(-500, 100, 0.0, &rules), 100);
    }

    #[test]
    fn bet_ramp_monotone_and_clamped() {
        let rules = RulesConfig {
            table_min_bet: 50,
            table_max_bet: 2000,
            ..RulesConfig::default()
        };
        let mut last = 0;
        let mut tc = -5.0;
        while tc < 30.0 {
            let bet = bet_size(0, 100, tc, &rules);
            assert!(bet >= rules.table_min_bet && bet <= rules.table_max_bet);
            assert!(bet >= last);
            last = bet;
            tc += 0.25;
        }
    }

    #[test]
    fn parse_round_trips() {
        for system in ALL_SYSTEMS {
            assert_eq!(CountingSystem::parse(system.name()).unwrap(), system);
        }
        assert!(CountingSystem::parse("knock_out").is_err());
    }
}
