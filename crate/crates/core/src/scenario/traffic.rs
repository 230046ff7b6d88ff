use rand::Rng;

use crate::error::{Error, Result};

/// Stochastic request arrivals.
///
/// Each idle user starts a request with probability
/// `p0 (1 + 0.5 sin(2 pi t / period))` per time-step; `period = 0`
/// disables the modulation. Volumes are uniform in `[volume_lo, volume_hi]`
/// bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalConfig {
    pub base_prob: f64,
    pub volume_lo: f64,
    pub volume_hi: f64,
    pub period: usize,
}

impl Default for ArrivalConfig {
    fn default() -> Self {
        Self { base_prob: 0.02, volume_lo: 1e5, volume_hi: 1e6, period: 2000 }
    }
}

impl ArrivalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.base_prob) {
            return Err(Error::InvalidConfig(format!("arrival probability {} outside [0, 1]", self.base_prob)));
        }
        if !(self.volume_lo > 0.0) || !(self.volume_hi >= self.volume_lo) || !self.volume_hi.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "volume range [{}, {}] must be positive and ordered",
                self.volume_lo, self.volume_hi
            )));
        }
        Ok(())
    }

    /// Arrival probability at time-step `t`, clamped to [0, 1].
    pub fn probability(&self, t: usize) -> f64 {
        let m = if self.period == 0 {
            1.0
        } else {
            1.0 + 0.5 * (2.0 * std::f64::consts::PI * t as f64 / self.period as f64).sin()
        };
        (self.base_prob * m).clamp(0.0, 1.0)
    }
}

/// A download request of `volume` bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficRequest {
    pub user: usize,
    pub volume: f64,
    pub arrival_step: usize,
}

/// Requests arriving at step `t` among users flagged idle.
///
/// Two uniforms are drawn for every user whether idle or not, so the
/// stream position depends only on `t` and the user count.
pub fn generate_traffic<R: Rng>(
    t: usize,
    rng: &mut R,
    cfg: &ArrivalConfig,
    idle: &[bool],
) -> Vec<TrafficRequest> {
    let p = cfg.probability(t);
    let mut out = Vec::new();
    for (user, &is_idle) in idle.iter().enumerate() {
        let coin: f64 = rng.gen();
        let frac: f64 = rng.gen();
        if is_idle && coin < p {
            out.push(TrafficRequest {
                user,
                volume: cfg.volume_lo + frac * (cfg.volume_hi - cfg.volume_lo),
                arrival_step: t,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    #[test]
    fn zero_probability_never_requests() {
        let cfg = ArrivalConfig { base_prob: 0.0, ..Default::default() };
        let mut rng = stream(1, Stream::Traffic);
        for t in 0..200 {
            assert!(generate_traffic(t, &mut rng, &cfg, &[true; 10]).is_empty());
        }
    }

    #[test]
    fn certain_arrivals_hit_every_idle_user() {
        let cfg = ArrivalConfig { base_prob: 1.0, period: 0, ..Default::default() };
        let mut rng = stream(1, Stream::Traffic);
        let idle = [true, false, true, true];
        for t in 0..20 {
            let reqs = generate_traffic(t, &mut rng, &cfg, &idle);
            let users: Vec<usize> = reqs.iter().map(|r| r.user).collect();
            assert_eq!(users, vec![0, 2, 3]);
            for r in reqs {
                assert!(r.volume >= cfg.volume_lo && r.volume <= cfg.volume_hi);
                assert_eq!(r.arrival_step, t);
            }
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let cfg = ArrivalConfig { base_prob: 0.3, ..Default::default() };
        let run = || {
            let mut rng = stream(9, Stream::Traffic);
            (0..100).flat_map(|t| generate_traffic(t, &mut rng, &cfg, &[true; 6])).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn modulation_bounds() {
        let cfg = ArrivalConfig { base_prob: 0.2, period: 100, ..Default::default() };
        assert!((cfg.probability(25) - 0.3).abs() < 1e-12);
        assert!((cfg.probability(75) - 0.1).abs() < 1e-12);
        let hot = ArrivalConfig { base_prob: 0.9, period: 100, ..Default::default() };
        assert_eq!(hot.probability(25), 1.0);
    }

    #[test]
    fn validation() {
        assert!(ArrivalConfig { base_prob: 1.5, ..Default::default() }.validate().is_err());
        assert!(ArrivalConfig { volume_lo: 0.0, ..Default::default() }.validate().is_err());
        assert!(ArrivalConfig { volume_lo: 5.0, volume_hi: 1.0, ..Default::default() }.validate().is_err());
        assert!(ArrivalConfig::default().validate().is_ok());
    }
}
