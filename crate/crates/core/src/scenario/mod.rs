//! Dense-RAN scenario: hexagonal three-sector topology, user drop,
//! max-RSRP association, stochastic traffic and per-slot state updates.

pub mod fixture;
mod network;
mod topology;
mod traffic;

pub use network::{EpisodeState, Evaluation, Network, SLOT_S};
pub use topology::{
    associate_max_rsrp, build_topology, drop_users, Association, PowerConfig, RadioConfig, Topology,
    MIN_DROP_RADIUS_M, SECTORS_PER_BS,
};
pub use traffic::{generate_traffic, ArrivalConfig, TrafficRequest};
