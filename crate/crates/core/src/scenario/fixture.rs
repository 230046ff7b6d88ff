//! Small frozen scenarios for checks against exhaustive search and hand
//! calculations.

use super::network::Network;
use super::topology::{PowerConfig, RadioConfig, Topology};
use super::traffic::ArrivalConfig;
use crate::error::Result;
use crate::radio::Position;

/// Height of fixture antennas.
pub const FIXTURE_BS_HEIGHT_M: f64 = 25.0;
pub const FIXTURE_UE_HEIGHT_M: f64 = 1.5;

/// Distance from each fixture site to its user, metres.
pub const FIXTURE_USER_DISTANCES_M: [f64; 3] = [80.0, 120.0, 160.0];

/// Every user requests at step 0 and is never drained.
pub fn backlogged() -> ArrivalConfig {
    ArrivalConfig { base_prob: 1.0, volume_lo: 1e15, volume_hi: 1e15, period: 0 }
}

/// Three sites on an equilateral triangle of side 500 m (the origin site
/// plus two manual ones), one static user per site on the boresight
/// pointing at the triangle's centre.
pub fn three_site_sites() -> (Vec<Position>, Vec<Position>) {
    let h = FIXTURE_BS_HEIGHT_M;
    let sites = vec![
        Position::new(0.0, 0.0, h),
        Position::new(500.0, 0.0, h),
        Position::new(250.0, 250.0 * 3f64.sqrt(), h),
    ];
    let bearings = [30f64, 150.0, 270.0];
    let users = sites
        .iter()
        .zip(bearings)
        .zip(FIXTURE_USER_DISTANCES_M)
        .map(|((s, deg), d)| {
            let th = deg.to_radians();
            Position::new(s.x + d * th.cos(), s.y + d * th.sin(), FIXTURE_UE_HEIGHT_M)
        })
        .collect();
    (sites, users)
}

/// The three-site fixture network with default radio parameters.
pub fn three_site(power: &PowerConfig, arrivals: ArrivalConfig, seed: u64) -> Result<Network> {
    let (sites, users) = three_site_sites();
    let topo = Topology::with_sites(sites, 500.0, power, RadioConfig::default())?;
    Network::new(topo, users, arrivals, seed)
}
