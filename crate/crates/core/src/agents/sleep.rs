use super::{delta_c_sum, network_reward, Agent, AgentKind, EpisodeOutcome};
use crate::error::Result;
use crate::scenario::Network;

/// Loaded sites transmit at `P_max`, idle sites sleep. No inner search:
/// `n*` is recorded as 0 and `searched` is false.
pub fn sleep_episode(env: &Network) -> Result<EpisodeOutcome> {
    let active = env.active_bs();
    let reference = env.evaluate_reference();
    let levels = vec![env.topology().max_level(); env.topology().num_bs()];
    let asleep = active.is_empty();
    let reward = if asleep { None } else { Some(network_reward(env, &levels, &reference)?) };
    Ok(EpisodeOutcome {
        delta_c_sum: delta_c_sum(&active, &reference, &reference),
        active,
        levels,
        reward,
        zeta: (!asleep).then_some(true),
        n_star: (!asleep).then_some(0),
        searched: false,
        states: Vec::new(),
        eval: reference.clone(),
        reference,
        iterations: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SleepAgent;

impl Agent for SleepAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::Sleep
    }

    fn step(&mut self, env: &Network, _terminal: bool) -> Result<EpisodeOutcome> {
        sleep_episode(env)
    }
}
