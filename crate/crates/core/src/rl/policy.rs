use rand::Rng;

use super::network::{backward_and_step, QNetwork, Sample};
use super::replay::ReplayMemory;
use super::{State, Transition};
use crate::error::{Error, Result};

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Greedy action with probability `1 - epsilon`, uniform otherwise.
pub fn epsilon_greedy<R: Rng>(qvals: &[f64], epsilon: f64, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    if u < epsilon {
        rng.gen_range(0..qvals.len())
    } else {
        argmax(qvals)
    }
}

/// `sum_k lambda^k r_k`, accumulated backwards so that every suffix obeys
/// `G_t = r_t + lambda G_{t+1}`.
pub fn discounted_return(rewards: &[f64], lambda: f64) -> f64 {
    discounted_returns(rewards, lambda).first().copied().unwrap_or(0.0)
}

/// Return from every position of a truncated reward sequence.
pub fn discounted_returns(rewards: &[f64], lambda: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut g = 0.0;
    for (i, r) in rewards.iter().enumerate().rev() {
        g = r + lambda * g;
        out[i] = g;
    }
    out
}

/// `r + lambda * max_a' Q(s', a'; target)`; just `r` at a terminal step.
pub fn td_target(reward: f64, next_state: &State, terminal: bool, target: &QNetwork, lambda: f64) -> f64 {
    if terminal {
        return reward;
    }
    let q = target.forward(&next_state.0);
    reward + lambda * q.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Mean halved squared TD error of `batch` under the predicted network.
pub fn minibatch_loss(batch: &[&Transition], pred: &QNetwork, target: &QNetwork, lambda: f64) -> f64 {
    if batch.is_empty() {
        return 0.0;
    }
    let sq: f64 = batch
        .iter()
        .map(|t| {
            let y = td_target(t.reward, &t.next_state, t.terminal, target, lambda);
            let e = pred.forward(&t.state.0)[t.action] - y;
            e * e
        })
        .sum();
    sq / (2.0 * batch.len() as f64)
}

/// One gradient step of the predicted network on `batch`. Targets come from
/// the frozen target network. Returns the loss before the step.
pub fn train_step(batch: &[&Transition], pred: &mut QNetwork, target: &QNetwork, lambda: f64, eta: f64) -> f64 {
    let targets: Vec<f64> =
        batch.iter().map(|t| td_target(t.reward, &t.next_state, t.terminal, target, lambda)).collect();
    let samples: Vec<Sample<'_>> = batch
        .iter()
        .zip(&targets)
        .map(|(t, &y)| Sample { input: &t.state.0, action: t.action, target: y })
        .collect();
    backward_and_step(pred, &samples, eta)
}

/// The two branches of the replay-derived selection probability for action
/// `a`: `((1 - eps) |D_a| / |D|, eps / kappa)`.
pub fn policy_branches(mem: &ReplayMemory, action: usize, epsilon: f64, kappa: usize) -> Result<(f64, f64)> {
    if mem.is_empty() {
        return Err(Error::EmptyMemory);
    }
    let count = mem.iter().filter(|t| t.action == action).count();
    Ok(((1.0 - epsilon) * count as f64 / mem.len() as f64, epsilon / kappa as f64))
}

/// Probability of selecting `action`: the mixture of the replay frequency
/// and the uniform exploration branch.
pub fn empirical_policy_prob(mem: &ReplayMemory, action: usize, epsilon: f64, kappa: usize) -> Result<f64> {
    let (greedy, explore) = policy_branches(mem, action, epsilon, kappa)?;
    Ok(greedy + explore)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rl::network::Role;
    use crate::rng::{stream, Stream};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn greedy_choices() {
        let mut rng = stream(1, Stream::Exploration);
        for _ in 0..100 {
            assert_eq!(epsilon_greedy(&[1.0, 5.0, 2.0], 0.0, &mut rng), 1);
            assert_eq!(epsilon_greedy(&[7.0, 7.0, 1.0], 0.0, &mut rng), 0);
        }
    }

    #[test]
    fn full_exploration_is_uniform() {
        // chi-square against uniform over 5 actions, 1e5 draws
        let mut rng = stream(2, Stream::Exploration);
        let k = 5;
        let n = 100_000;
        let mut counts = vec![0usize; k];
        for _ in 0..n {
            counts[epsilon_greedy(&[0.0, 9.0, 0.0, 0.0, 0.0], 1.0, &mut rng)] += 1;
        }
        let expected = n as f64 / k as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 4 degrees of freedom, 99.9th percentile
        assert!(chi2 < 18.47, "chi2 = {chi2}, counts {counts:?}");
        let sigma = (n as f64 * 0.2 * 0.8).sqrt();
        for c in counts {
            assert!((c as f64 - expected).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn returns() {
        assert_eq!(discounted_return(&[0.0; 5], 0.9), 0.0);
        assert_relative_eq!(discounted_return(&[1.0, 1.0, 1.0], 0.9), 2.71, max_relative = 1e-12);
        assert_eq!(discounted_return(&[], 0.9), 0.0);
    }

    #[test]
    fn td_targets() {
        let zero = QNetwork::zeros(&[2, 4, 3], Role::Target).unwrap();
        let s = State([0.5, 0.5]);
        assert_eq!(td_target(1.5, &s, false, &zero, 0.9), 1.5);
        let mut two = QNetwork::zeros(&[2, 3], Role::Target).unwrap();
        two.layers_mut()[0].bias = vec![0.5, 2.0, -1.0];
        assert_relative_eq!(td_target(1.0, &s, false, &two, 0.9), 2.8, max_relative = 1e-12);
        assert_eq!(td_target(1.0, &s, false, &two, 0.0), 1.0);
        assert_eq!(td_target(1.0, &s, true, &two, 0.9), 1.0);
    }

    fn mem_with(actions: &[usize]) -> ReplayMemory {
        let mut m = ReplayMemory::new(100);
        for &a in actions {
            m.push(Transition { state: State([0.0; 2]), action: a, reward: 0.0, next_state: State([0.0; 2]), terminal: false });
        }
        m
    }

    #[test]
    fn policy_probabilities() {
        let m = mem_with(&[0, 1, 2, 2]);
        for a in 0..4 {
            assert_relative_eq!(empirical_policy_prob(&m, a, 1.0, 4).unwrap(), 0.25);
        }
        let all2 = mem_with(&[2; 7]);
        for a in 0..5 {
            let p = empirical_policy_prob(&all2, a, 0.0, 5).unwrap();
            assert_eq!(p, if a == 2 { 1.0 } else { 0.0 });
        }
        let m = mem_with(&[3, 3, 0, 1, 4]);
        assert_relative_eq!(empirical_policy_prob(&m, 3, 0.1, 5).unwrap(), 0.38, max_relative = 1e-12);
        let (g, e) = policy_branches(&m, 3, 0.1, 5).unwrap();
        assert_relative_eq!(g, 0.36, max_relative = 1e-12);
        assert_relative_eq!(e, 0.02, max_relative = 1e-12);
        assert!(matches!(empirical_policy_prob(&ReplayMemory::new(3), 0, 0.1, 5), Err(Error::EmptyMemory)));
    }

    proptest! {
        #[test]
        fn return_recursion_is_exact(rs in prop::collection::vec(-100f64..100.0, 1..40), lambda in 0.01f64..1.0) {
            let g = discounted_returns(&rs, lambda);
            for t in 0..rs.len() - 1 {
                prop_assert_eq!(g[t] - (rs[t] + lambda * g[t + 1]), 0.0);
            }
            prop_assert_eq!(g[rs.len() - 1], rs[rs.len() - 1]);
        }

        #[test]
        fn policy_sums_to_one(actions in prop::collection::vec(0usize..6, 1..80), eps in 0f64..=1.0) {
            let m = mem_with(&actions);
            let total: f64 = (0..6).map(|a| empirical_policy_prob(&m, a, eps, 6).unwrap()).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }

        #[test]
        fn argmax_scale_invariant(q in prop::collection::vec(-50f64..50.0, 1..10), k in 0.01f64..100.0) {
            let scaled: Vec<f64> = q.iter().map(|v| v * k).collect();
            prop_assert_eq!(argmax(&q), argmax(&scaled));
        }
    }
}
