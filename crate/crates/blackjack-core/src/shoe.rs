//! Finite multi-deck card source with seeded shuffling and reshuffle
//! bookkeeping. Parallel experiments run independent shoes with independent
//! seeds; a shoe is never shared mutably.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::Error;

pub const CARDS_PER_DECK: usize = 52;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rank {
    Ace,
    Two,
    Three,
    Four,
    Five,
    Six,
    Seven,
    Eight,
    Nine,
    Ten,
    Jack,
    Queen,
    King,
}

pub const ALL_RANKS: [Rank; 13] = [
    Rank::Ace,
    Rank::Two,
    Rank::Three,
    Rank::Four,
    Rank::Five,
    Rank::Six,
    Rank::Seven,
    Rank::Eight,
    Rank::Nine,
    Rank::Ten,
    Rank::Jack,
    Rank::Queen,
    Rank::King,
];

impl Rank {
    /// Base blackjack value: face cards count 10, the ace counts 1 here and
    /// is promoted to 11 by hand valuation when that does not bust the hand.
    pub fn value(self) -> u32 {
        match self {
            Rank::Ace => 1,
            Rank::Two => 2,
            Rank::Three => 3,
            Rank::Four => 4,
            Rank::Five => 5,
            Rank::Six => 6,
            Rank::Seven => 7,
            Rank::Eight => 8,
            Rank::Nine => 9,
            Rank::Ten | Rank::Jack | Rank::Queen | Rank::King => 10,
        }
    }

    pub fn is_ten_value(self) -> bool {
        self.value() == 10
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rank::Ace => "A",
            Rank::Two => "2",
            Rank::Three => "3",
            Rank::Four => "4",
            Rank::Five => "5",
            Rank::Six => "6",
            Rank::Seven => "7",
            Rank::Eight => "8",
            Rank::Nine => "9",
            Rank::Ten => "10",
            Rank::Jack => "J",
            Rank::Queen => "Q",
            Rank::King => "K",
        }
    }
}

/// A playing card. Suits are irrelevant to blackjack play, valuation and
/// counting, so a card is its rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Card {
    rank: Rank,
}

impl Card {
    pub fn new(rank: Rank) -> Self {
        Card { rank }
    }

    pub fn rank(self) -> Rank {
        self.rank
    }

    pub fn value(self) -> u32 {
        self.rank.value()
    }

    pub fn is_ace(self) -> bool {
        self.rank == Rank::Ace
    }

    pub fn is_ten_value(self) -> bool {
        self.rank.is_ten_value()
    }
}

impl From<Rank> for Card {
    fn from(rank: Rank) -> Self {
        Card::new(rank)
    }
}

/// A shuffled multi-deck dealing shoe.
///
/// Reshuffle thresholds are owned by callers: the learners present a fresh
/// pack when fewer than 30 cards remain, the table simulator ends a
/// simulation at 25 or fewer. No cut card is modeled.
#[derive(Clone, Debug)]
pub struct Shoe {
    cards: Vec<Card>,
    dealt: usize,
    num_decks: u32,
    rng: ChaCha8Rng,
}

impl Shoe {
    /// Builds a freshly shuffled shoe of `52 * num_decks` cards.
    pub fn new(num_decks: u32, seed: u64) -> Result<Self, Error> {
        if num_decks == 0 {
            return Err(Error::InvalidConfig(
                "shoe requires at least one deck".into(),
            ));
        }
        let mut shoe = Shoe {
            cards: Vec::with_capacity(num_decks as usize * CARDS_PER_DECK),
            dealt: 0,
            num_decks,
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        shoe.reshuffle();
        Ok(shoe)
    }

    /// Rebuilds the full pack and shuffles it, continuing this shoe's RNG
    /// stream. Deterministic given the original seed and call history.
    pub fn reshuffle(&mut self) {
        self.cards.clear();
        for _ in 0..self.num_decks {
            for _ in 0..4 {
                self.cards.extend(ALL_RANKS.iter().map(|&r| Card::new(r)));
            }
        }
        self.shuffle_in_place();
    }

    // Fisher-Yates: every ordering equiprobable under a uniform RNG.
    fn shuffle_in_place(&mut self) {
        for i in (1..self.cards.len()).rev() {
            let j = self.rng.gen_range(0..=i);
            self.cards.swap(i, j);
        }
        self.dealt = 0;
    }

    /// Builds a shuffled shoe with one copy of each card in `removed` taken
    /// out, for dealing continuations of a known partial deal. Removal
    /// happens before the shuffle so the remaining cards stay exchangeable.
    pub fn with_removed(num_decks: u32, removed: &[Card], seed: u64) -> Result<Self, Error> {
        if num_decks == 0 {
            return Err(Error::InvalidConfig(
                "shoe requires at least one deck".into(),
            ));
        }
        let mut cards = Vec::with_capacity(num_decks as usize * CARDS_PER_DECK);
        for _ in 0..num_decks {
            for _ in 0..4 {
                cards.extend(ALL_RANKS.iter().map(|&r| Card::new(r)));
            }
        }
        for &card in removed {
            let pos = cards.iter().position(|c| *c == card).ok_or_else(|| {
                Error::InvalidInput(format!("cannot remove {:?}: none left", card.rank()))
            })?;
            cards.swap_remove(pos);
        }
        let mut shoe = Shoe {
            cards,
            dealt: 0,
            num_decks,
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        shoe.shuffle_in_place();
        Ok(shoe)
    }

    /// Deals the next card.
    pub fn draw(&mut self) -> Result<Card, Error> {
        if self.dealt >= self.cards.len() {
            return Err(Error::ShoeExhausted);
        }
        let card = self.cards[self.dealt];
        self.dealt += 1;
        Ok(card)
    }

    pub fn remaining(&self) -> usize {
        self.cards.len() - self.dealt
    }

    pub fn dealt_count(&self) -> usize {
        self.dealt
    }

    pub fn num_decks(&self) -> u32 {
        self.num_decks
    }

    /// Remaining cards expressed in decks, floored at 0.5 so true-count
    /// division stays bounded near the end of the shoe.
    pub fn decks_remaining(&self) -> f64 {
        (self.remaining() as f64 / CARDS_PER_DECK as f64).max(0.5)
    }
}
