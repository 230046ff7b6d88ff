//! Collaborative multi-BS downlink power management for a dense radio access
//! network.
//!
//! The crate bundles a deterministic system-level simulator (hexagonal
//! three-sector sites, max-RSRP association, stochastic traffic, SINR and
//! Shannon-rate link model), a from-scratch deep Q-network with replay memory
//! and target network, a tabular Q-learning baseline, a sleep-scheme baseline,
//! an exhaustive joint-action oracle, and the energy-efficiency / throughput /
//! power / decline / complexity statistics used to compare them.

pub mod agents;
pub mod config;
pub mod error;
pub mod metrics;
pub mod radio;
pub mod rl;
pub mod rng;
pub mod runner;
pub mod scenario;

pub use error::{Error, Result};
