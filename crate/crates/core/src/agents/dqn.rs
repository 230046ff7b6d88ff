use rand_chacha::ChaCha8Rng;

use super::{accepted, check_feasibility, joint_search, ActionValues, Agent, AgentKind, EpisodeOutcome};
use crate::error::Result;
use crate::rl::{policy, sync_target, Hyperparams, Normalizer, QNetwork, ReplayMemory, Role, State, Transition};
use crate::rng::{self, Stream};
use crate::scenario::Network;

/// Deep Q-network power manager with replay memory and a target network.
///
/// One network is shared by all sites; each site feeds its own local state.
#[derive(Debug, Clone)]
pub struct DqnAgent {
    pred: QNetwork,
    target: QNetwork,
    memory: ReplayMemory,
    hyper: Hyperparams,
    norm: Normalizer,
    n_iter: usize,
    explore_rng: ChaCha8Rng,
    replay_rng: ChaCha8Rng,
    episodes: usize,
    rounds: usize,
    last_loss: Option<f64>,
}

struct Nets<'a> {
    pred: &'a QNetwork,
    target: &'a QNetwork,
}

impl ActionValues for Nets<'_> {
    fn q_values(&self, s: &State) -> Vec<f64> {
        self.pred.forward(&s.0)
    }

    fn best_next(&self, s: &State) -> f64 {
        self.target.forward(&s.0).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl DqnAgent {
    pub fn new(kappa: usize, hyper: Hyperparams, n_iter: usize, norm: Normalizer, seed: u64) -> Result<Self> {
        hyper.validate()?;
        let mut sizes = vec![2];
        sizes.extend(&hyper.hidden);
        sizes.push(kappa);
        let pred = QNetwork::random(&sizes, Role::Predicted, &mut rng::stream(seed, Stream::Init))?;
        let mut target = QNetwork::zeros(&sizes, Role::Target)?;
        sync_target(&pred, &mut target)?;
        Ok(Self {
            pred,
            target,
            memory: ReplayMemory::new(hyper.memory_capacity),
            hyper,
            norm,
            n_iter: n_iter.max(1),
            explore_rng: rng::stream(seed, Stream::Exploration),
            replay_rng: rng::stream(seed, Stream::Replay),
            episodes: 0,
            rounds: 0,
            last_loss: None,
        })
    }

    /// Replaces both networks with `net` (e.g. loaded from a checkpoint).
    pub fn load_weights(&mut self, net: &QNetwork) -> Result<()> {
        sync_target(net, &mut self.pred)?;
        sync_target(net, &mut self.target)
    }

    pub fn predicted(&self) -> &QNetwork {
        &self.pred
    }

    pub fn target(&self) -> &QNetwork {
        &self.target
    }

    pub fn memory(&self) -> &ReplayMemory {
        &self.memory
    }

    pub fn hyper(&self) -> &Hyperparams {
        &self.hyper
    }

    pub fn set_epsilon(&mut self, epsilon: f64) {
        self.hyper.epsilon = epsilon;
    }

    pub fn training_rounds(&self) -> usize {
        self.rounds
    }

    pub fn last_loss(&self) -> Option<f64> {
        self.last_loss
    }

    fn train(&mut self) -> Result<()> {
        let batch = self.memory.sample_minibatch(self.hyper.batch_size, &mut self.replay_rng)?;
        self.last_loss = Some(policy::train_step(&batch, &mut self.pred, &self.target, self.hyper.lambda, self.hyper.eta));
        self.rounds += 1;
        if self.rounds.is_multiple_of(self.hyper.sync_interval) {
            sync_target(&self.pred, &mut self.target)?;
        }
        Ok(())
    }
}

impl Agent for DqnAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::Dqn
    }

    fn step(&mut self, env: &Network, terminal: bool) -> Result<EpisodeOutcome> {
        let nets = Nets { pred: &self.pred, target: &self.target };
        let out = joint_search(
            env,
            &self.norm,
            &nets,
            self.n_iter,
            self.hyper.epsilon,
            self.hyper.lambda,
            terminal,
            &mut self.explore_rng,
        )?;
        check_feasibility(&out)?;
        if let (Some(rec), Some(reward)) = (accepted(&out), out.reward) {
            for (i, &a) in rec.actions.iter().enumerate() {
                self.memory.push(Transition {
                    state: out.states[i],
                    action: a,
                    reward,
                    next_state: rec.next_states[i],
                    terminal,
                });
            }
        }
        self.episodes += 1;
        if self.memory.len() > self.hyper.batch_size && self.episodes.is_multiple_of(self.hyper.train_interval) {
            self.train()?;
        }
        Ok(out)
    }
}
