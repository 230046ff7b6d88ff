use rand::Rng;

use crate::error::{Error, Result};
use crate::radio::{self, ChannelGain, Position, PowerDbw};

pub const SECTORS_PER_BS: usize = 3;

/// Closest a dropped user may be to its site.
pub const MIN_DROP_RADIUS_M: f64 = 10.0;

/// Power budget: `levels` evenly spaced dBW values spanning
/// `[p_max - delta_p_max, p_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    pub p_max_dbw: f64,
    pub delta_p_max_db: f64,
    pub levels: usize,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self { p_max_dbw: 15.2, delta_p_max_db: 2.0, levels: 5 }
    }
}

/// Antenna, carrier and receiver constants shared by every link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    pub fc_hz: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    /// Gain of a sector towards users outside its 120 degree arc, in dB (negative).
    pub backlobe_db: f64,
    pub path_loss_exponent: f64,
    pub bandwidth_hz: f64,
    pub noise_dbw: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            fc_hz: 2.6e9,
            tx_gain_dbi: 17.0,
            rx_gain_dbi: 0.0,
            backlobe_db: -25.0,
            path_loss_exponent: 1.0,
            bandwidth_hz: 10e6,
            noise_dbw: -125.0,
        }
    }
}

impl RadioConfig {
    pub fn noise_watts(&self) -> f64 {
        radio::dbw_to_watts(self.noise_dbw)
    }
}

/// Serving (site, sector) of a user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Association {
    pub bs: usize,
    pub sector: usize,
}

/// Immutable site layout with three-sector antennas and the power-level set.
#[derive(Debug, Clone)]
pub struct Topology {
    pub sites: Vec<Position>,
    pub boresights_deg: [f64; SECTORS_PER_BS],
    pub isd: f64,
    pub power_levels: Vec<PowerDbw>,
    pub radio: RadioConfig,
}

fn power_levels(cfg: &PowerConfig) -> Result<Vec<PowerDbw>> {
    if cfg.levels < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 power levels, got {}", cfg.levels)));
    }
    if !(cfg.delta_p_max_db > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "power span must be positive, got {} dB",
            cfg.delta_p_max_db
        )));
    }
    let steps = (cfg.levels - 1) as f64;
    (0..cfg.levels)
        .map(|i| {
            let below = (cfg.levels - 1 - i) as f64;
            PowerDbw::new(cfg.p_max_dbw - cfg.delta_p_max_db * below / steps)
        })
        .collect()
}

/// Axial hex coordinates of every site up to `rings`, center first, then
/// ring by ring.
fn hex_axial(rings: usize) -> Vec<(i64, i64)> {
    const DIRS: [(i64, i64); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];
    let mut out = vec![(0, 0)];
    for k in 1..=rings as i64 {
        // start at the south-west corner of ring k and walk its six edges
        let (mut q, mut r) = (-k, k);
        for (dq, dr) in DIRS {
            for _ in 0..k {
                out.push((q, r));
                q += dq;
                r += dr;
            }
        }
    }
    out
}

/// Hexagonal grid with `1 + 3 rings (rings + 1)` sites at inter-site
/// distance `isd`, antennas at `bs_height`.
pub fn build_topology(
    rings: usize,
    isd: f64,
    bs_height: f64,
    power: &PowerConfig,
    radio: RadioConfig,
) -> Result<Topology> {
    let sites = hex_axial(rings)
        .into_iter()
        .map(|(q, r)| {
            let (q, r) = (q as f64, r as f64);
            Position::new(isd * (q + r / 2.0), isd * (3f64.sqrt() / 2.0) * r, bs_height)
        })
        .collect();
    Topology::with_sites(sites, isd, power, radio)
}

impl Topology {
    /// Topology from explicit site positions.
    pub fn with_sites(
        sites: Vec<Position>,
        isd: f64,
        power: &PowerConfig,
        radio: RadioConfig,
    ) -> Result<Self> {
        if !(isd > 0.0) {
            return Err(Error::InvalidConfig(format!("inter-site distance must be positive, got {isd}")));
        }
        if sites.is_empty() {
            return Err(Error::InvalidConfig("topology needs at least one site".into()));
        }
        if let Some(bad) = sites.iter().find(|s| !s.is_valid()) {
            return Err(Error::InvalidConfig(format!("invalid site position {bad:?}")));
        }
        if !(radio.fc_hz > 0.0) || !(radio.bandwidth_hz > 0.0) || !(radio.path_loss_exponent > 0.0) {
            return Err(Error::InvalidConfig("carrier, bandwidth and path-loss exponent must be positive".into()));
        }
        Ok(Self {
            sites,
            boresights_deg: [30.0, 150.0, 270.0],
            isd,
            power_levels: power_levels(power)?,
            radio,
        })
    }

    pub fn num_bs(&self) -> usize {
        self.sites.len()
    }

    pub fn kappa(&self) -> usize {
        self.power_levels.len()
    }

    pub fn p_max(&self) -> PowerDbw {
        *self.power_levels.last().expect("at least two levels")
    }

    pub fn level(&self, index: usize) -> PowerDbw {
        self.power_levels[index]
    }

    /// Index of the max-power level.
    pub fn max_level(&self) -> usize {
        self.power_levels.len() - 1
    }

    /// Sector of `bs` whose 120 degree arc contains `pos`; ties go to the
    /// lower sector index.
    pub fn sector_of(&self, bs: usize, pos: &Position) -> usize {
        let az = self.sites[bs].azimuth_to(pos);
        let mut best = 0;
        let mut best_off = f64::INFINITY;
        for (s, bore) in self.boresights_deg.iter().enumerate() {
            let off = angular_offset(az, *bore);
            if off < best_off {
                best_off = off;
                best = s;
            }
        }
        best
    }

    /// Gain from sector `sector` of `bs` towards `pos`. Users inside the
    /// sector's arc get the full antenna gain, others the back-lobe level.
    /// Distances are clamped to [`radio::MIN_DISTANCE_M`].
    pub fn sector_gain(&self, bs: usize, sector: usize, pos: &Position) -> ChannelGain {
        let r = &self.radio;
        let mut tx_db = r.tx_gain_dbi;
        if self.sector_of(bs, pos) != sector {
            tx_db += r.backlobe_db;
        }
        let d = radio::distance(&self.sites[bs], pos).max(radio::MIN_DISTANCE_M);
        radio::channel_gain(
            radio::db_to_linear(tx_db),
            radio::db_to_linear(r.rx_gain_dbi),
            r.fc_hz,
            d,
            r.path_loss_exponent,
        )
        .expect("distance clamped and constants validated")
    }
}

fn angular_offset(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Drops `per_sector` users uniformly (by area) in every sector's annulus
/// `[10 m, isd / 2]` around its site, at height `ue_height`.
pub fn drop_users<R: Rng>(
    topo: &Topology,
    per_sector: usize,
    ue_height: f64,
    rng: &mut R,
) -> Vec<Position> {
    let r_min = MIN_DROP_RADIUS_M;
    let r_max = (topo.isd / 2.0).max(r_min);
    let mut users = Vec::with_capacity(topo.num_bs() * SECTORS_PER_BS * per_sector);
    for site in &topo.sites {
        for bore in topo.boresights_deg {
            for _ in 0..per_sector {
                let r = rng.gen_range(r_min * r_min..=r_max * r_max).sqrt();
                let theta = (bore + rng.gen_range(-60.0..60.0f64)).to_radians();
                users.push(Position::new(site.x + r * theta.cos(), site.y + r * theta.sin(), ue_height));
            }
        }
    }
    users
}

/// Maps each user to the (site, sector) with the largest reference-power
/// RSRP. Ties go to the lowest site id, then the lowest sector.
pub fn associate_max_rsrp(topo: &Topology, users: &[Position]) -> Vec<Association> {
    let p_ref = topo.p_max().watts();
    users
        .iter()
        .map(|u| {
            let mut best = Association { bs: 0, sector: 0 };
            let mut best_rsrp = f64::NEG_INFINITY;
            for bs in 0..topo.num_bs() {
                for sector in 0..SECTORS_PER_BS {
                    let rsrp = p_ref * topo.sector_gain(bs, sector, u).value();
                    if rsrp > best_rsrp {
                        best_rsrp = rsrp;
                        best = Association { bs, sector };
                    }
                }
            }
            best
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};
    use approx::assert_relative_eq;

    fn topo(rings: usize) -> Topology {
        build_topology(rings, 500.0, 25.0, &PowerConfig::default(), RadioConfig::default()).unwrap()
    }

    #[test]
    fn hex_site_counts() {
        assert_eq!(topo(0).num_bs(), 1);
        assert_eq!(topo(0).sites[0], Position::new(0.0, 0.0, 25.0));
        assert_eq!(topo(1).num_bs(), 7);
        assert_eq!(topo(2).num_bs(), 19);
        assert_eq!(topo(3).num_bs(), 37);
    }

    #[test]
    fn hex_sites_are_distinct_and_spaced() {
        let t = topo(2);
        for i in 0..t.num_bs() {
            for j in 0..i {
                let d = radio::distance(&t.sites[i], &t.sites[j]);
                assert!(d > 499.999, "sites {i} and {j} only {d} m apart");
            }
        }
        // first ring sits exactly one isd from the center
        for s in &t.sites[1..7] {
            assert_relative_eq!(radio::distance(s, &t.sites[0]), 500.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn power_levels_even_spacing() {
        let t = topo(0);
        let v: Vec<f64> = t.power_levels.iter().map(|p| p.value()).collect();
        let want = [13.2, 13.7, 14.2, 14.7, 15.2];
        for (a, b) in v.iter().zip(want) {
            assert_relative_eq!(*a, b, max_relative = 1e-12);
        }
        assert_eq!(t.p_max().value(), 15.2);
    }

    #[test]
    fn invalid_configs() {
        let radio = RadioConfig::default();
        assert!(build_topology(1, 0.0, 25.0, &PowerConfig::default(), radio).is_err());
        assert!(build_topology(1, -5.0, 25.0, &PowerConfig::default(), radio).is_err());
        let one_level = PowerConfig { levels: 1, ..PowerConfig::default() };
        assert!(matches!(build_topology(1, 500.0, 25.0, &one_level, radio), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn user_drop_counts_and_radius() {
        let t = topo(2);
        let mut rng = stream(3, Stream::Topology);
        let users = drop_users(&t, 1, 1.5, &mut rng);
        assert_eq!(users.len(), 57);
        for (i, u) in users.iter().enumerate() {
            let site = &t.sites[i / SECTORS_PER_BS];
            let planar = ((u.x - site.x).powi(2) + (u.y - site.y).powi(2)).sqrt();
            assert!(planar >= 10.0 - 1e-9 && planar <= 250.0 + 1e-9);
            assert_eq!(t.sector_of(i / 3, u), i % 3);
        }
        let again = drop_users(&t, 1, 1.5, &mut stream(3, Stream::Topology));
        assert_eq!(users, again);
    }

    #[test]
    fn single_site_takes_everyone() {
        let t = topo(0);
        let users = drop_users(&t, 4, 1.5, &mut stream(1, Stream::Topology));
        let assoc = associate_max_rsrp(&t, &users);
        assert!(assoc.iter().all(|a| a.bs == 0));
        for (u, a) in users.iter().zip(&assoc) {
            assert_eq!(a.sector, t.sector_of(0, u));
        }
    }

    #[test]
    fn nearest_site_wins_and_ties_go_low() {
        let sites = vec![
            Position::new(0.0, 0.0, 25.0),
            Position::new(0.0, 0.0, 25.0),
            Position::new(1000.0, 0.0, 25.0),
        ];
        let t = Topology::with_sites(sites, 500.0, &PowerConfig::default(), RadioConfig::default()).unwrap();
        // co-located sites 0 and 1 are equally good: lower id wins
        let u = Position::new(50.0, 10.0, 1.5);
        assert_eq!(associate_max_rsrp(&t, &[u])[0].bs, 0);
        // 50 m from site 2 and 950 m from site 0
        let v = Position::new(950.0, 0.0, 1.5);
        assert_eq!(associate_max_rsrp(&t, &[v])[0].bs, 2);
        // idempotent
        assert_eq!(associate_max_rsrp(&t, &[u, v]), associate_max_rsrp(&t, &[u, v]));
    }

    #[test]
    fn equidistant_sites_tie_break() {
        // sites 2 and 5 mirror each other about the user
        let mut sites: Vec<Position> = (0..6).map(|i| Position::new(5000.0 * i as f64, 9000.0, 25.0)).collect();
        sites[2] = Position::new(-300.0, 0.0, 25.0);
        sites[5] = Position::new(300.0, 0.0, 25.0);
        let t = Topology::with_sites(sites, 500.0, &PowerConfig::default(), RadioConfig::default()).unwrap();
        // azimuth 60 deg from site 2 and 120 deg from site 5: both in a front lobe
        let u = Position::new(0.0, 300.0 * 3f64.sqrt(), 1.5);
        let g2 = t.sector_gain(2, t.sector_of(2, &u), &u).value();
        let g5 = t.sector_gain(5, t.sector_of(5, &u), &u).value();
        assert_relative_eq!(g2, g5, max_relative = 1e-12);
        assert_eq!(associate_max_rsrp(&t, &[u])[0].bs, 2);
    }

    #[test]
    fn backlobe_attenuates() {
        let t = topo(0);
        let u = Position::new(100.0, 60.0, 1.5); // azimuth ~31 deg, sector 0
        assert_eq!(t.sector_of(0, &u), 0);
        let front = t.sector_gain(0, 0, &u).value();
        let back = t.sector_gain(0, 1, &u).value();
        assert_relative_eq!(back / front, 10f64.powf(-2.5), max_relative = 1e-12);
    }
}
