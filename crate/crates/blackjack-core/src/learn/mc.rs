//! First-visit Monte Carlo control on the base environment: on-policy with
//! exploring starts, and off-policy with weighted importance sampling.
//! Returns are undiscounted, so the terminal reward is the return.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basic_strategy::StrategyChart;
use crate::derive_seed;
use crate::learn::base::{
    base_dealer_final, base_state_index, base_state_of_index, draw_value, extract_strategy_base,
    BaseState, Total, BASE_NUM_STATES,
};
use crate::learn::{Hyperparams, QTable};
use crate::Error;

const STAND: usize = 0;
const HIT: usize = 1;

/// Fixed exploration of the off-policy behavior policy.
const BEHAVIOR_EPS: f64 = 0.1;

/// Reachable base states: a usable ace implies a total of at least 12.
fn reachable_states() -> Vec<usize> {
    (0..BASE_NUM_STATES)
        .filter(|&idx| {
            let s = base_state_of_index(idx);
            !s.usable_ace || s.player_total >= 12
        })
        .collect()
}

struct Step {
    state: usize,
    action: usize,
}

/// Generates one episode from the given start, following the supplied
/// action chooser after the first (possibly forced) action. Returns the
/// step list and the terminal reward.
fn generate_episode<R: Rng>(
    start: BaseState,
    first_action: usize,
    mut choose: impl FnMut(usize, &mut R) -> usize,
    rng: &mut R,
) -> (Vec<Step>, f64) {
    let mut player = Total {
        total: start.player_total,
        usable: start.usable_ace,
    };
    let up_value = if start.dealer_up == 11 {
        1
    } else {
        start.dealer_up
    };
    let mut steps = Vec::with_capacity(4);
    let mut action = first_action;
    loop {
        let state = base_state_index(BaseState {
            player_total: player.total,
            dealer_up: start.dealer_up,
            usable_ace: player.usable,
        });
        steps.push(Step { state, action });
        if action == STAND {
            let dealer = base_dealer_final(up_value, rng);
            let reward = if dealer.is_bust() || player.total > dealer.total {
                1.0
            } else if player.total < dealer.total {
                -1.0
            } else {
                0.0
            };
            return (steps, reward);
        }
        player.add(draw_value(rng));
        if player.is_bust() {
            return (steps, -1.0);
        }
        let next_state = base_state_index(BaseState {
            player_total: player.total,
            dealer_up: start.dealer_up,
            usable_ace: player.usable,
        });
        action = choose(next_state, rng);
    }
}

/// Applies the first-visit rule: returns the indices of steps that are the
/// first occurrence of their (state, action) pair.
fn first_visit_indices(steps: &[Step]) -> Vec<usize> {
    let mut out = Vec::with_capacity(steps.len());
    for (i, step) in steps.iter().enumerate() {
        let seen = steps[..i]
            .iter()
            .any(|p| p.state == step.state && p.action == step.action);
        if !seen {
            out.push(i);
        }
    }
    out
}

/// On-policy first-visit Monte Carlo control with exploring starts: each
/// episode begins at a uniformly random reachable state and action, then
/// follows the policy that is greedy with respect to the current averaged
/// returns. Exploring starts guarantee every pair keeps being sampled, so
/// the continuation itself can stay greedy.
pub fn mc_on_policy(hp: &Hyperparams) -> Result<(StrategyChart, QTable), Error> {
    hp.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(hp.seed, 0x6d63_6f6e));
    let mut q = QTable::new(BASE_NUM_STATES, 2);
    let states = reachable_states();
    for _ in 0..hp.train_episodes {
        let start = base_state_of_index(states[rng.gen_range(0..states.len())]);
        let first_action = rng.gen_range(0..2);
        let (steps, g) = {
            let q_ref = &q;
            generate_episode(
                start,
                first_action,
                |s, _rng| q_ref.greedy(s, &[STAND, HIT]).expect("two actions"),
                &mut rng,
            )
        };
        for i in first_visit_indices(&steps) {
            let Step { state, action } = steps[i];
            q.add_visit(state, action);
            let n = q.visits(state, action) as f64;
            let old = q.q(state, action);
            q.set_q(state, action, old + (g - old) / n);
        }
    }
    Ok((extract_strategy_base(&q), q))
}

/// Off-policy first-visit Monte Carlo control with weighted importance
/// sampling. The behavior policy is epsilon-soft around the evolving greedy
/// target; episodes are processed backward and cut at the first
/// off-target action, per the weighted-IS control algorithm.
pub fn mc_off_policy(hp: &Hyperparams) -> Result<(StrategyChart, QTable), Error> {
    let (chart, q, _) = mc_off_policy_with_eps(hp, BEHAVIOR_EPS)?;
    Ok((chart, q))
}

/// Off-policy control with an explicit behavior epsilon; also returns the
/// per-pair cumulative importance weights. With epsilon 0 the behavior is
/// the target itself and every importance ratio is 1.
pub fn mc_off_policy_with_eps(
    hp: &Hyperparams,
    behavior_eps: f64,
) -> Result<(StrategyChart, QTable, Vec<f64>), Error> {
    hp.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(hp.seed, 0x6d63_6f66));
    let mut q = QTable::new(BASE_NUM_STATES, 2);
    let mut cume_weight = vec![0.0f64; BASE_NUM_STATES * 2];
    let states = reachable_states();
    for _ in 0..hp.train_episodes {
        let start = base_state_of_index(states[rng.gen_range(0..states.len())]);
        let behavior_first = {
            let greedy = q.greedy(base_state_index(start), &[STAND, HIT])?;
            if behavior_eps > 0.0 && rng.gen::<f64>() < behavior_eps {
                rng.gen_range(0..2)
            } else {
                greedy
            }
        };
        let (steps, g) = {
            let q_ref = &q;
            generate_episode(
                start,
                behavior_first,
                |s, rng| {
                    let greedy = q_ref.greedy(s, &[STAND, HIT]).expect("two actions");
                    if behavior_eps > 0.0 && rng.gen::<f64>() < behavior_eps {
                        rng.gen_range(0..2)
                    } else {
                        greedy
                    }
                },
                &mut rng,
            )
        };
        let mut w = 1.0f64;
        for step in steps.iter().rev() {
            let idx = step.state * 2 + step.action;
            cume_weight[idx] += w;
            q.add_visit(step.state, step.action);
            let old = q.q(step.state, step.action);
            q.set_q(
                step.state,
                step.action,
                old + (w / cume_weight[idx]) * (g - old),
            );
            let greedy = q.greedy(step.state, &[STAND, HIT])?;
            if step.action != greedy {
                break;
            }
            // b(a|s) for the greedy action under the epsilon-soft behavior.
            let b = (1.0 - behavior_eps) + behavior_eps / 2.0;
            w /= b;
        }
    }
    Ok((extract_strategy_base(&q), q, cume_weight))
}
