use rand_chacha::ChaCha8Rng;

use super::{accepted, check_feasibility, joint_search, ActionValues, Agent, AgentKind, EpisodeOutcome};
use crate::error::Result;
use crate::rl::{Hyperparams, Normalizer, QTable, State};
use crate::rng::{self, Stream};
use crate::scenario::Network;

/// Tabular Q-learning over binned per-site states, sharing the joint search
/// of the DQN agent.
#[derive(Debug, Clone)]
pub struct QLearningAgent {
    table: QTable,
    hyper: Hyperparams,
    norm: Normalizer,
    n_iter: usize,
    explore_rng: ChaCha8Rng,
}

impl ActionValues for QTable {
    fn q_values(&self, s: &State) -> Vec<f64> {
        self.row(self.bin_of(s)).to_vec()
    }

    fn best_next(&self, s: &State) -> f64 {
        self.max_value(self.bin_of(s))
    }
}

impl QLearningAgent {
    pub fn new(kappa: usize, hyper: Hyperparams, n_iter: usize, norm: Normalizer, seed: u64) -> Result<Self> {
        hyper.validate()?;
        Ok(Self {
            table: QTable::new(hyper.bins, kappa),
            hyper,
            norm,
            n_iter: n_iter.max(1),
            explore_rng: rng::stream(seed, Stream::Exploration),
        })
    }

    pub fn table(&self) -> &QTable {
        &self.table
    }

    pub fn set_epsilon(&mut self, epsilon: f64) {
        self.hyper.epsilon = epsilon;
    }
}

impl Agent for QLearningAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::QLearning
    }

    fn step(&mut self, env: &Network, terminal: bool) -> Result<EpisodeOutcome> {
        let out = joint_search(
            env,
            &self.norm,
            &self.table,
            self.n_iter,
            self.hyper.epsilon,
            self.hyper.lambda,
            terminal,
            &mut self.explore_rng,
        )?;
        check_feasibility(&out)?;
        if let (Some(rec), Some(reward)) = (accepted(&out), out.reward) {
            for (i, &a) in rec.actions.iter().enumerate() {
                let bin = self.table.bin_of(&out.states[i]);
                let next = (!terminal).then(|| self.table.bin_of(&rec.next_states[i]));
                self.table.update(bin, a, reward, next, self.hyper.lambda, self.hyper.alpha);
            }
        }
        Ok(out)
    }
}
