use crate::agents::{per_bs_ee, EpisodeOutcome};
use crate::error::Result;
use crate::radio::{dbw_to_watts, watts_to_dbw};
use crate::scenario::Network;

/// Everything the statistics need from one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub t: usize,
    pub phi: Vec<bool>,
    /// Link energy efficiency per site in Mbps/dBW; zero while asleep.
    pub ee: Vec<f64>,
    /// Served rate per site in bit/s.
    pub rate: Vec<f64>,
    /// Applied power per site; `None` while asleep.
    pub power_dbw: Vec<Option<f64>>,
    pub p_max_dbw: f64,
    /// Network energy efficiency over active sites.
    pub reward: Option<f64>,
    pub zeta: Option<bool>,
    pub n_star: Option<usize>,
    /// Whether the policy ran an inner search (iteration counts apply).
    pub searched: bool,
}

impl MetricsRow {
    pub fn from_outcome(t: usize, env: &Network, out: &EpisodeOutcome) -> Result<Self> {
        let topo = env.topology();
        let phi = env.state().phi.clone();
        let power_dbw = (0..topo.num_bs()).map(|b| phi[b].then(|| topo.level(out.levels[b]).value())).collect();
        Ok(Self {
            t,
            ee: per_bs_ee(env, &out.levels, &out.eval)?,
            rate: out.eval.bs_rate.clone(),
            phi,
            power_dbw,
            p_max_dbw: topo.p_max().value(),
            reward: out.reward,
            zeta: out.zeta,
            n_star: out.n_star,
            searched: out.searched,
        })
    }

    pub fn num_bs(&self) -> usize {
        self.phi.len()
    }

    /// Mean link EE over all sites, sleepers counted as zero.
    pub fn ee_avg_all(&self) -> f64 {
        self.ee.iter().sum::<f64>() / self.num_bs() as f64
    }

    /// Mean served rate over all sites.
    pub fn throughput_avg(&self) -> f64 {
        self.rate.iter().sum::<f64>() / self.num_bs() as f64
    }

    fn watts(&self, b: usize) -> f64 {
        self.power_dbw[b].map_or(0.0, dbw_to_watts)
    }

    /// Site-average transmit power, averaged in watts and reported in dBW.
    /// Sleeping sites radiate nothing; undefined when every site sleeps.
    ///
    /// Evaluated relative to the strongest site so that identical levels
    /// come back bit-exact.
    pub fn power_avg_dbw(&self) -> Option<f64> {
        let p_ref = self.power_dbw.iter().flatten().copied().reduce(f64::max)?;
        let rel = self.power_dbw.iter().map(|p| p.map_or(0.0, |p| dbw_to_watts(p - p_ref))).sum::<f64>();
        Some(p_ref + watts_to_dbw(rel / self.num_bs() as f64).ok()?)
    }

    /// Linear-watt gap below `P_max` of site `b`, zero while asleep.
    fn gap(&self, b: usize) -> f64 {
        if self.phi[b] {
            dbw_to_watts(self.p_max_dbw) - self.watts(b)
        } else {
            0.0
        }
    }

    /// Average serving-power decline in dBW; undefined at zero gap.
    pub fn rsrp_decline_dbw(&self) -> Option<f64> {
        let n = self.num_bs();
        let mean = (0..n).map(|b| self.gap(b)).sum::<f64>() / n as f64;
        watts_to_dbw(mean).ok()
    }

    /// Average interference decline in dBW: per site, the gaps of every
    /// other site summed, then averaged over sites.
    pub fn itf_decline_dbw(&self) -> Option<f64> {
        let n = self.num_bs();
        let total: f64 = (0..n).map(|b| (0..n).filter(|&o| o != b).map(|o| self.gap(o)).sum::<f64>()).sum();
        watts_to_dbw(total / n as f64).ok()
    }

    pub fn decline_gap_dbw(&self) -> Option<f64> {
        Some(self.itf_decline_dbw()? - self.rsrp_decline_dbw()?)
    }

    pub fn zeta_sample(&self) -> Option<f64> {
        self.zeta.map(|z| if z { 1.0 } else { 0.0 })
    }

    /// Accepted iteration as a sample for the iteration average.
    pub fn iteration_sample(&self) -> Option<f64> {
        if self.searched {
            self.n_star.map(|n| n as f64)
        } else {
            None
        }
    }
}
