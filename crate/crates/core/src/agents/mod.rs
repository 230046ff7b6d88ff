//! Power-management policies and the joint-action search they share.
//!
//! Every episode the active sites each pick a power level, the joint choice
//! is evaluated with all sites' powers in place, and the best feasible joint
//! choice over `N` iterations is applied. A joint choice is feasible when
//! the summed rate change against the all-`P_max` reference,
//! `sum_b (C_max_b - C_b)`, is non-negative.

mod dqn;
mod oracle;
mod qlearning;
mod sleep;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::radio;
use crate::rl::{policy, Action, Normalizer, State};
use crate::scenario::{Evaluation, Network};

pub use dqn::DqnAgent;
pub use oracle::{exhaustive_oracle, OracleResult, ORACLE_LIMIT};
pub use qlearning::QLearningAgent;
pub use sleep::{sleep_episode, SleepAgent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgentKind {
    Dqn,
    QLearning,
    Sleep,
}

impl AgentKind {
    pub const ALL: [AgentKind; 3] = [AgentKind::Dqn, AgentKind::QLearning, AgentKind::Sleep];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Dqn => "dqn",
            AgentKind::QLearning => "qlearning",
            AgentKind::Sleep => "sleep",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dqn" => Ok(AgentKind::Dqn),
            "qlearning" | "q-learning" | "q_learning" => Ok(AgentKind::QLearning),
            "sleep" => Ok(AgentKind::Sleep),
            other => Err(format!("unknown agent `{other}` (expected dqn, qlearning or sleep)")),
        }
    }
}

/// One inner iteration of the joint search.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based iteration index.
    pub n: usize,
    /// Chosen level per active site, in ascending site order.
    pub actions: Vec<Action>,
    /// Per active site `R + lambda max_a' Q(s', a')`.
    pub q_values: Vec<f64>,
    /// Network energy efficiency of this joint choice.
    pub reward: f64,
    pub delta_c_sum: f64,
    pub feasible: bool,
    pub next_states: Vec<State>,
}

impl IterationRecord {
    pub fn score(&self) -> f64 {
        self.q_values.iter().sum()
    }
}

/// What an agent decided for one time-step.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeOutcome {
    /// Active sites, ascending.
    pub active: Vec<usize>,
    /// Applied level index per site; sleeping sites hold the max level.
    pub levels: Vec<usize>,
    /// Network energy efficiency of the applied choice; `None` when every
    /// site sleeps.
    pub reward: Option<f64>,
    pub zeta: Option<bool>,
    /// Accepted iteration; `None` when nothing was accepted.
    pub n_star: Option<usize>,
    /// False for policies without an inner search.
    pub searched: bool,
    pub delta_c_sum: f64,
    pub states: Vec<State>,
    pub eval: Evaluation,
    pub reference: Evaluation,
    pub iterations: Vec<IterationRecord>,
}

impl EpisodeOutcome {
    pub fn all_sleep(&self) -> bool {
        self.active.is_empty()
    }

    /// Actions of the active sites as applied.
    pub fn joint_action(&self) -> Vec<Action> {
        self.active.iter().map(|&b| self.levels[b]).collect()
    }
}

/// A power-management policy stepping through the time-steps of one run.
pub trait Agent: Send {
    fn kind(&self) -> AgentKind;

    /// Decides this step's powers on `env`'s current state and learns from
    /// the result. `terminal` marks the last step of the run.
    fn step(&mut self, env: &Network, terminal: bool) -> Result<EpisodeOutcome>;
}

/// Action-value source used to score candidate joint choices.
pub trait ActionValues {
    fn q_values(&self, s: &State) -> Vec<f64>;

    /// `max_a Q(s, a)` under the bootstrap estimator.
    fn best_next(&self, s: &State) -> f64;
}

/// Per-site levels with `actions` placed on `active` and the max level elsewhere.
pub fn joint_levels(env: &Network, active: &[usize], actions: &[Action]) -> Vec<usize> {
    let mut levels = vec![env.topology().max_level(); env.topology().num_bs()];
    for (&b, &a) in active.iter().zip(actions) {
        levels[b] = a;
    }
    levels
}

/// `sum_b (C_max_b - C_b)` over the active sites.
pub fn delta_c_sum(active: &[usize], eval: &Evaluation, reference: &Evaluation) -> f64 {
    active.iter().map(|&b| reference.bs_rate[b] - eval.bs_rate[b]).sum()
}

/// Link energy efficiency per site (zero while asleep).
pub fn per_bs_ee(env: &Network, levels: &[usize], eval: &Evaluation) -> Result<Vec<f64>> {
    let topo = env.topology();
    let phi = &env.state().phi;
    (0..topo.num_bs())
        .map(|b| if phi[b] { radio::link_ee(eval.bs_rate[b], topo.level(levels[b])) } else { Ok(0.0) })
        .collect()
}

/// Network energy efficiency over the active sites.
pub fn network_reward(env: &Network, levels: &[usize], eval: &Evaluation) -> Result<f64> {
    let ee = per_bs_ee(env, levels, eval)?;
    let per: Vec<(bool, f64)> = env.state().phi.iter().copied().zip(ee).collect();
    radio::network_ee(&per)
}

/// Observation of site `b` before acting.
pub fn observe(env: &Network, norm: &Normalizer, b: usize) -> State {
    let (v, y) = env.bs_observation(b);
    norm.normalize(v, y)
}

/// Runs the `n_iter`-iteration joint search with epsilon-greedy proposals.
///
/// Each candidate is scored by `sum_b [R + lambda max_a' Q(s'_b, a')]`
/// (bootstrap dropped at `terminal`). The accepted candidate is the
/// highest-scoring feasible one, the earliest on ties. Without a feasible
/// candidate every active site falls back to `P_max` and `zeta = 0`.
#[allow(clippy::too_many_arguments)]
pub fn joint_search<Q: ActionValues, R: Rng>(
    env: &Network,
    norm: &Normalizer,
    values: &Q,
    n_iter: usize,
    epsilon: f64,
    lambda: f64,
    terminal: bool,
    rng: &mut R,
) -> Result<EpisodeOutcome> {
    let active = env.active_bs();
    let reference = env.evaluate_reference();
    let max_levels = vec![env.topology().max_level(); env.topology().num_bs()];
    if active.is_empty() {
        return Ok(EpisodeOutcome {
            active,
            levels: max_levels,
            reward: None,
            zeta: None,
            n_star: None,
            searched: true,
            delta_c_sum: 0.0,
            states: Vec::new(),
            eval: reference.clone(),
            reference,
            iterations: Vec::new(),
        });
    }
    let states: Vec<State> = active.iter().map(|&b| observe(env, norm, b)).collect();
    let qs: Vec<Vec<f64>> = states.iter().map(|s| values.q_values(s)).collect();

    let mut iterations: Vec<IterationRecord> = Vec::with_capacity(n_iter);
    let mut best: Option<usize> = None;
    for n in 1..=n_iter {
        let actions: Vec<Action> = qs.iter().map(|q| policy::epsilon_greedy(q, epsilon, rng)).collect();
        let levels = joint_levels(env, &active, &actions);
        let eval = env.evaluate(&levels);
        let reward = network_reward(env, &levels, &eval)?;
        let dc = delta_c_sum(&active, &eval, &reference);
        let next_states: Vec<State> = active
            .iter()
            .map(|&b| {
                let (v, y) = env.bs_next_observation(b, &eval);
                norm.normalize(v, y)
            })
            .collect();
        let q_values = next_states
            .iter()
            .map(|s| if terminal { reward } else { reward + lambda * values.best_next(s) })
            .collect();
        let rec = IterationRecord { n, actions, q_values, reward, delta_c_sum: dc, feasible: dc >= 0.0, next_states };
        if rec.feasible && best.is_none_or(|i| rec.score() > iterations[i].score()) {
            best = Some(iterations.len());
        }
        iterations.push(rec);
    }

    let (levels, zeta, n_star) = match best {
        Some(i) => (joint_levels(env, &active, &iterations[i].actions), true, Some(iterations[i].n)),
        None => (max_levels, false, None),
    };
    let eval = env.evaluate(&levels);
    let reward = network_reward(env, &levels, &eval)?;
    let dc = delta_c_sum(&active, &eval, &reference);
    Ok(EpisodeOutcome {
        active,
        levels,
        reward: Some(reward),
        zeta: Some(zeta),
        n_star,
        searched: true,
        delta_c_sum: dc,
        states,
        eval,
        reference,
        iterations,
    })
}

/// The accepted record of a search outcome, if any.
pub fn accepted(out: &EpisodeOutcome) -> Option<&IterationRecord> {
    out.n_star.and_then(|n| out.iterations.get(n.checked_sub(1)?))
}

/// Fails loudly when an accepted choice breaks the rate constraint.
pub fn check_feasibility(out: &EpisodeOutcome) -> Result<()> {
    if out.zeta == Some(true) && !(out.delta_c_sum >= 0.0) {
        return Err(Error::InvariantViolation(format!(
            "accepted joint action {:?} has summed rate change {} < 0",
            out.joint_action(),
            out.delta_c_sum
        )));
    }
    Ok(())
}
