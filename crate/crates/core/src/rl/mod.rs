//! Reinforcement-learning substrate: state encoding, replay memory, the
//! Q-network, policies and the tabular baseline.

pub mod network;
pub mod policy;
pub mod replay;
pub mod tabular;

use crate::error::{Error, Result};

pub use network::{backward_and_step, sync_target, Dense, QNetwork, Role, Sample};
pub use policy::{
    argmax, discounted_return, discounted_returns, empirical_policy_prob, epsilon_greedy, minibatch_loss,
    policy_branches, td_target, train_step,
};
pub use replay::ReplayMemory;
pub use tabular::QTable;

/// Normalized per-site features: residual volume and serving RSRP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State(pub [f64; 2]);

/// Index into the power-level set.
pub type Action = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: State,
    pub action: Action,
    pub reward: f64,
    pub next_state: State,
    pub terminal: bool,
}

/// Affine maps from raw observations to network inputs.
///
/// Volume is divided by `volume_scale`; RSRP in dBW is shifted by
/// `-rsrp_floor_dbw` and divided by `rsrp_span_db`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalizer {
    pub volume_scale: f64,
    pub rsrp_floor_dbw: f64,
    pub rsrp_span_db: f64,
}

impl Normalizer {
    pub fn new(volume_scale: f64) -> Self {
        Self { volume_scale, rsrp_floor_dbw: -125.0, rsrp_span_db: 125.0 }
    }

    pub fn normalize(&self, volume_bits: f64, rsrp_dbw: f64) -> State {
        State([volume_bits / self.volume_scale, (rsrp_dbw - self.rsrp_floor_dbw) / self.rsrp_span_db])
    }

    pub fn denormalize(&self, s: &State) -> (f64, f64) {
        (s.0[0] * self.volume_scale, s.0[1] * self.rsrp_span_db + self.rsrp_floor_dbw)
    }
}

/// Learning hyper-parameters shared by the DQN and tabular agents.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    /// Discount factor.
    pub lambda: f64,
    pub epsilon: f64,
    /// Gradient-descent step size.
    pub eta: f64,
    pub batch_size: usize,
    /// Train every `train_interval` episodes.
    pub train_interval: usize,
    /// Copy predicted weights to the target every `sync_interval` training rounds.
    pub sync_interval: usize,
    pub memory_capacity: usize,
    pub hidden: Vec<usize>,
    /// Tabular learning rate.
    pub alpha: f64,
    pub bins: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            lambda: 0.9,
            epsilon: 0.1,
            eta: 1e-3,
            batch_size: 1000,
            train_interval: 500,
            sync_interval: 10,
            memory_capacity: 5000,
            hidden: vec![64, 64],
            alpha: 0.1,
            bins: 16,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: String| Err(Error::Validation { key: key.into(), message });
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return bad("lambda", format!("{} not in (0, 1]", self.lambda));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return bad("epsilon", format!("{} not in [0, 1]", self.epsilon));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad("eta", format!("{} must be positive", self.eta));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha", format!("{} not in (0, 1]", self.alpha));
        }
        if self.batch_size == 0 {
            return bad("batch_size", "must be at least 1".into());
        }
        if self.memory_capacity <= self.batch_size {
            return bad("memory_capacity", format!("must exceed batch_size {}", self.batch_size));
        }
        if self.train_interval == 0 {
            return bad("train_interval", "must be at least 1".into());
        }
        if self.sync_interval == 0 {
            return bad("sync_interval", "must be at least 1".into());
        }
        if self.bins == 0 {
            return bad("bins", "must be at least 1".into());
        }
        if self.hidden.contains(&0) {
            return bad("hidden", "layer widths must be positive".into());
        }
        Ok(())
    }
}
