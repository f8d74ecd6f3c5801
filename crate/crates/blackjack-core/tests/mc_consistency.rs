//! Cross-method consistency: the greedy policies learned by Monte Carlo
//! control and Q-learning agree on almost every mutually visited state.

use blackjack_core::learn::{
    base_state_index, mc_off_policy, mc_on_policy, train_q_base, BaseState, EpsilonSchedule,
    Hyperparams, QTable,
};

fn greedy_agreement(a: &QTable, b: &QTable) -> (usize, usize) {
    let mut total = 0;
    let mut matched = 0;
    for player_total in 4..=21u32 {
        for dealer_up in 2..=11u32 {
            for usable_ace in [false, true] {
                let s = base_state_index(BaseState {
                    player_total,
                    dealer_up,
                    usable_ace,
                });
                if a.state_visits(s) == 0 || b.state_visits(s) == 0 {
                    continue;
                }
                total += 1;
                if a.greedy(s, &[0, 1]).unwrap() == b.greedy(s, &[0, 1]).unwrap() {
                    matched += 1;
                }
            }
        }
    }
    (matched, total)
}

#[test]
fn mc_policies_agree_with_q_learning() {
    let hp_mc = Hyperparams {
        train_episodes: 1_000_000,
        gamma: 1.0,
        seed: 99,
        ..Hyperparams::default()
    };
    let (_, q_on) = mc_on_policy(&hp_mc).unwrap();
    let (_, q_off) = mc_off_policy(&hp_mc).unwrap();
    let hp_q = Hyperparams {
        alpha: 0.01,
        gamma: 1.0,
        train_episodes: 1_000_000,
        backtest_episodes: 0,
        seed: 7,
    };
    let (q_base, _) = train_q_base(&hp_q, &EpsilonSchedule::default()).unwrap();

    let (matched, total) = greedy_agreement(&q_on, &q_base);
    let pct = 100.0 * matched as f64 / total as f64;
    assert!(total > 250, "only {total} mutually visited states");
    assert!(pct >= 90.0, "mc-on vs q-learning agreement {pct:.1}%");

    let (matched, total) = greedy_agreement(&q_on, &q_off);
    let pct = 100.0 * matched as f64 / total as f64;
    assert!(pct >= 85.0, "mc-on vs mc-off agreement {pct:.1}%");
}
