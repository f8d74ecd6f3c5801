//! Independent oracles for the integration tests. Everything here is
//! derived from first principles (exhaustive enumeration over an infinite
//! deck) and never calls into the engine's play path.

use std::collections::HashMap;

/// Rank draw probabilities for an infinite deck: values 1..=9 at 1/13 each,
/// ten-values at 4/13.
pub const VALUE_PROBS: [(u32, f64); 10] = [
    (1, 1.0 / 13.0),
    (2, 1.0 / 13.0),
    (3, 1.0 / 13.0),
    (4, 1.0 / 13.0),
    (5, 1.0 / 13.0),
    (6, 1.0 / 13.0),
    (7, 1.0 / 13.0),
    (8, 1.0 / 13.0),
    (9, 1.0 / 13.0),
    (10, 4.0 / 13.0),
];

/// Dealer outcome distribution: probabilities of finishing on 17..=21 and
/// of busting, indexed [17, 18, 19, 20, 21, bust].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DealerDist {
    pub finals: [f64; 5],
    pub bust: f64,
}

impl DealerDist {
    pub fn p_final(&self, total: u32) -> f64 {
        if (17..=21).contains(&total) {
            self.finals[(total - 17) as usize]
        } else {
            0.0
        }
    }
}

fn dealer_recurse(
    total: u32,
    soft: bool,
    hits_soft17: bool,
    memo: &mut HashMap<(u32, bool), DealerDist>,
) -> DealerDist {
    if total > 21 {
        if soft {
            return dealer_recurse(total - 10, false, hits_soft17, memo);
        }
        return DealerDist {
            finals: [0.0; 5],
            bust: 1.0,
        };
    }
    let must_draw = total < 17 || (total == 17 && soft && hits_soft17);
    if !must_draw {
        let mut d = DealerDist::default();
        d.finals[(total - 17) as usize] = 1.0;
        return d;
    }
    if let Some(d) = memo.get(&(total, soft)) {
        return *d;
    }
    let mut out = DealerDist::default();
    for (v, p) in VALUE_PROBS {
        let sub = if v == 1 && total + 11 <= 21 {
            dealer_recurse(total + 11, true, hits_soft17, memo)
        } else {
            dealer_recurse(total + v, soft, hits_soft17, memo)
        };
        for i in 0..5 {
            out.finals[i] += p * sub.finals[i];
        }
        out.bust += p * sub.bust;
    }
    memo.insert((total, soft), out);
    out
}

/// Exact dealer distribution from an up card, hole card included.
///
/// With `exclude_natural` the hole cards completing a natural are removed
/// and the remainder renormalized, matching play that only continues after
/// the dealer has checked for blackjack.
pub fn dealer_dist(up_value: u32, hits_soft17: bool, exclude_natural: bool) -> DealerDist {
    let mut memo = HashMap::new();
    let mut out = DealerDist::default();
    let mut mass = 0.0;
    for (hole, p) in VALUE_PROBS {
        if exclude_natural && ((up_value == 1 && hole == 10) || (up_value == 10 && hole == 1)) {
            continue;
        }
        let (total, soft) = if up_value == 1 || hole == 1 {
            (up_value + hole + 10, true)
        } else {
            (up_value + hole, false)
        };
        let sub = dealer_recurse(total, soft, hits_soft17, &mut memo);
        for i in 0..5 {
            out.finals[i] += p * sub.finals[i];
        }
        out.bust += p * sub.bust;
        mass += p;
    }
    if exclude_natural && mass > 0.0 {
        for i in 0..5 {
            out.finals[i] /= mass;
        }
        out.bust /= mass;
    }
    out
}

/// Expected value of standing on `total` against the dealer distribution.
pub fn ev_stand(total: u32, dist: &DealerDist) -> f64 {
    let mut ev = dist.bust;
    for final_total in 17..=21 {
        let p = dist.p_final(final_total);
        if final_total < total {
            ev += p;
        } else if final_total > total {
            ev -= p;
        }
    }
    ev
}

/// Expected value of hitting once and then playing optimally (hit or
/// stand), infinite deck.
pub fn ev_hit_optimal(
    total: u32,
    soft: bool,
    dist: &DealerDist,
    memo: &mut HashMap<HandKeyPub, f64>,
) -> f64 {
    let mut ev = 0.0;
    for (v, p) in VALUE_PROBS {
        let (mut t, mut s) = if v == 1 && total + 11 <= 21 {
            (total + 11, true)
        } else {
            (total + v, soft)
        };
        if t > 21 && s {
            t -= 10;
            s = false;
        }
        if t > 21 {
            ev -= p;
        } else {
            ev += p * ev_optimal_hit_stand(t, s, dist, memo);
        }
    }
    ev
}

pub type HandKeyPub = (u32, bool);

/// Optimal hit-or-stand value of a hand, infinite deck.
pub fn ev_optimal_hit_stand(
    total: u32,
    soft: bool,
    dist: &DealerDist,
    memo: &mut HashMap<HandKeyPub, f64>,
) -> f64 {
    if let Some(&v) = memo.get(&(total, soft)) {
        return v;
    }
    let stand = ev_stand(total, dist);
    let hit = if total >= 21 {
        -1.0
    } else {
        ev_hit_optimal(total, soft, dist, memo)
    };
    let best = stand.max(hit);
    memo.insert((total, soft), best);
    best
}

/// Expected value of doubling: exactly one card, twice the stake.
pub fn ev_double(total: u32, soft: bool, dist: &DealerDist) -> f64 {
    let mut ev = 0.0;
    for (v, p) in VALUE_PROBS {
        let (mut t, mut s) = if v == 1 && total + 11 <= 21 {
            (total + 11, true)
        } else {
            (total + v, soft)
        };
        if t > 21 && s {
            t -= 10;
            s = false;
        }
        let _ = s;
        if t > 21 {
            ev -= p;
        } else {
            ev += p * ev_stand(t, dist);
        }
    }
    2.0 * ev
}

/// Brute-force hand value: tries every assignment of 1 or 11 to each ace
/// and keeps the largest total not exceeding 21, else the smallest.
pub fn brute_force_hand_total(values: &[u32]) -> (u32, bool) {
    let aces = values.iter().filter(|&&v| v == 1).count();
    let base: u32 = values.iter().sum();
    let mut best: Option<(u32, bool)> = None; // (total, an ace counted as 11)
    let mut min_total = u32::MAX;
    for elevens in 0..=aces as u32 {
        let total = base + 10 * elevens;
        min_total = min_total.min(total);
        if total <= 21 {
            match best {
                Some((t, _)) if t >= total => {}
                _ => best = Some((total, elevens > 0)),
            }
        }
    }
    best.unwrap_or((min_total, false))
}
