use super::{delta_c_sum, joint_levels, network_reward};
use crate::error::{Error, Result};
use crate::rl::Action;
use crate::scenario::Network;

/// Largest joint action space the oracle will enumerate.
pub const ORACLE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Level per active site, ascending site order.
    pub actions: Vec<Action>,
    /// Level per site.
    pub levels: Vec<usize>,
    pub ee: f64,
    /// Number of feasible joint actions seen.
    pub feasible: usize,
}

/// Enumerates every joint power assignment of the active sites and returns
/// the feasible one with the highest network energy efficiency. Ties go to
/// the lexicographically smallest action vector.
pub fn exhaustive_oracle(env: &Network) -> Result<OracleResult> {
    let active = env.active_bs();
    if active.is_empty() {
        return Err(Error::NoActiveBs);
    }
    let kappa = env.topology().kappa();
    let space = (kappa as u128).checked_pow(active.len() as u32).unwrap_or(u128::MAX);
    if space > ORACLE_LIMIT {
        return Err(Error::SearchSpaceTooLarge(space));
    }
    let reference = env.evaluate_reference();
    let mut actions = vec![0; active.len()];
    let mut best: Option<OracleResult> = None;
    let mut feasible = 0;
    loop {
        let levels = joint_levels(env, &active, &actions);
        let eval = env.evaluate(&levels);
        if delta_c_sum(&active, &eval, &reference) >= 0.0 {
            feasible += 1;
            let ee = network_reward(env, &levels, &eval)?;
            if best.as_ref().is_none_or(|b| ee > b.ee) {
                best = Some(OracleResult { actions: actions.clone(), levels, ee, feasible: 0 });
            }
        }
        // odometer increment, last site fastest
        let mut i = actions.len();
        loop {
            if i == 0 {
                let mut out = best.ok_or_else(|| Error::InvariantViolation("reference action infeasible".into()))?;
                out.feasible = feasible;
                return Ok(out);
            }
            i -= 1;
            actions[i] += 1;
            if actions[i] < kappa {
                break;
            }
            actions[i] = 0;
        }
    }
}
