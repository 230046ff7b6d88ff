//! Link-level radio model: geometry, channel gain, link budget, SINR,
//! Shannon rate, power/rate deltas, energy efficiency and dB conversions.
//!
//! All sums (serving power, interference, noise) are carried in linear
//! watts. Decibel-watts only appear as the energy-efficiency denominator
//! and in reporting.

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Smallest distance accepted by [`channel_gain`]; the free-space factor is
/// singular at zero.
pub const MIN_DISTANCE_M: f64 = 1.0;

/// Lowest transmit power accepted as an energy-efficiency denominator.
pub const MIN_POWER_GUARD_DBW: f64 = 1.0;

/// A point in the deployment area. `z` is the antenna height above ground.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_valid(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.z >= 0.0
    }

    /// Azimuth of `other` seen from `self`, degrees in [0, 360).
    pub fn azimuth_to(&self, other: &Position) -> f64 {
        let deg = (other.y - self.y).atan2(other.x - self.x).to_degrees();
        if deg < 0.0 {
            deg + 360.0
        } else {
            deg
        }
    }
}

/// Transmit power in decibel-watts.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerDbw(f64);

impl PowerDbw {
    /// Transmit power; must be finite and at least [`MIN_POWER_GUARD_DBW`].
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < MIN_POWER_GUARD_DBW {
            return Err(Error::PowerGuardViolation {
                value,
                guard: MIN_POWER_GUARD_DBW,
            });
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn watts(self) -> f64 {
        dbw_to_watts(self.0)
    }
}

/// Dimensionless linear channel gain (antenna gains times path gain).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ChannelGain(f64);

impl ChannelGain {
    pub fn new(value: f64) -> Option<Self> {
        (value.is_finite() && value > 0.0).then_some(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Received powers at one user, all in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub serving_rsrp: f64,
    pub interference: f64,
    pub noise: f64,
}

/// One interfering base station as seen from a user.
#[derive(Debug, Clone, Copy)]
pub struct Interferer {
    pub active: bool,
    pub power: PowerDbw,
    pub gain: ChannelGain,
}

/// Euclidean 3-D distance.
pub fn distance(a: &Position, b: &Position) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dz = a.z - b.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Free-space style gain `H_TX * (c / (4 pi fc d))^exponent * H_RX`.
///
/// With `exponent = 1` the free-space factor enters unsquared; pass 2 for
/// the conventional Friis power law.
pub fn channel_gain(
    tx_gain: f64,
    rx_gain: f64,
    fc_hz: f64,
    distance_m: f64,
    exponent: f64,
) -> Result<ChannelGain> {
    if !(distance_m >= MIN_DISTANCE_M) {
        return Err(Error::DistanceTooSmall {
            distance: distance_m,
            min: MIN_DISTANCE_M,
        });
    }
    let path = (SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * fc_hz * distance_m)).powf(exponent);
    ChannelGain::new(tx_gain * path * rx_gain).ok_or_else(|| {
        Error::InvalidConfig(format!(
            "channel gain not positive (tx {tx_gain}, rx {rx_gain}, fc {fc_hz})"
        ))
    })
}

/// Serving and interference received powers at a user.
///
/// Interferers with `active == false` are sleeping and contribute nothing.
pub fn link_budget(
    serving_power: PowerDbw,
    serving_gain: ChannelGain,
    interferers: &[Interferer],
    noise_w: f64,
) -> LinkBudget {
    link_budget_watts(
        serving_power.watts(),
        serving_gain.value(),
        interferers.iter().map(|i| (i.active, i.power.watts(), i.gain.value())),
        noise_w,
    )
}

/// [`link_budget`] on raw linear values: powers in watts, gains linear,
/// interferers as `(active, watts, gain)`.
pub fn link_budget_watts<I>(serving_w: f64, serving_gain: f64, interferers: I, noise_w: f64) -> LinkBudget
where
    I: IntoIterator<Item = (bool, f64, f64)>,
{
    let interference = interferers
        .into_iter()
        .filter(|(active, _, _)| *active)
        .map(|(_, w, h)| w * h)
        .sum();
    LinkBudget {
        serving_rsrp: serving_w * serving_gain,
        interference,
        noise: noise_w,
    }
}

pub fn sinr(lb: &LinkBudget) -> f64 {
    lb.serving_rsrp / (lb.interference + lb.noise)
}

/// Shannon rate `W log2(1 + sinr)` in bit/s.
pub fn data_rate(bandwidth_hz: f64, sinr: f64) -> f64 {
    bandwidth_hz * (1.0 + sinr).log2()
}

/// Power reduction and rate loss against the all-`p_max` reference.
///
/// Returns `(dP, dC)`; both are zero for a sleeping station. A positive `dC`
/// is a rate loss.
pub fn power_and_rate_delta(
    active: bool,
    p_max: PowerDbw,
    p_now: PowerDbw,
    c_now: f64,
    c_max: f64,
) -> (f64, f64) {
    if active {
        (p_max.value() - p_now.value(), c_max - c_now)
    } else {
        (0.0, 0.0)
    }
}

/// Link energy efficiency in Mbps per dBW (the denominator stays in dBW).
pub fn link_ee(rate_bps: f64, power: PowerDbw) -> Result<f64> {
    if power.value() < MIN_POWER_GUARD_DBW {
        return Err(Error::PowerGuardViolation {
            value: power.value(),
            guard: MIN_POWER_GUARD_DBW,
        });
    }
    Ok(rate_bps / 1e6 / power.value())
}

/// Network energy efficiency: mean link EE over active stations only.
pub fn network_ee(per_bs: &[(bool, f64)]) -> Result<f64> {
    let (count, sum) = per_bs
        .iter()
        .filter(|(active, _)| *active)
        .fold((0usize, 0.0), |(n, s), (_, ee)| (n + 1, s + ee));
    if count == 0 {
        return Err(Error::NoActiveBs);
    }
    Ok(sum / count as f64)
}

pub fn dbw_to_watts(dbw: f64) -> f64 {
    10f64.powf(dbw / 10.0)
}

pub fn watts_to_dbw(watts: f64) -> Result<f64> {
    if !(watts > 0.0) {
        return Err(Error::NonPositivePower(watts));
    }
    Ok(10.0 * watts.log10())
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(v: f64) -> PowerDbw {
        PowerDbw::new(v).unwrap()
    }

    fn g(v: f64) -> ChannelGain {
        ChannelGain::new(v).unwrap()
    }

    #[test]
    fn distance_examples() {
        let o = Position::new(0.0, 0.0, 0.0);
        assert_eq!(distance(&o, &o), 0.0);
        assert_eq!(distance(&o, &Position::new(3.0, 4.0, 0.0)), 5.0);
        let d = distance(&Position::new(0.0, 0.0, 25.0), &Position::new(100.0, 0.0, 1.5));
        // sqrt(100^2 + 23.5^2)
        assert_relative_eq!(d, 102.724_145_165_584_12, max_relative = 1e-12);
    }

    #[test]
    fn gain_at_one_metre_one_gigahertz() {
        let h = channel_gain(1.0, 1.0, 1e9, 1.0, 1.0).unwrap();
        assert_relative_eq!(h.value(), SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * 1e9), max_relative = 1e-15);
        assert_relative_eq!(h.value(), 0.023_856_725_796_184_71, max_relative = 1e-12);
    }

    #[test]
    fn gain_scaling() {
        let h1 = channel_gain(1.0, 1.0, 1e9, 1.0, 1.0).unwrap().value();
        let h2 = channel_gain(1.0, 1.0, 1e9, 2.0, 1.0).unwrap().value();
        assert_relative_eq!(h2, h1 / 2.0, max_relative = 1e-15);
        let h6 = channel_gain(2.0, 3.0, 1e9, 1.0, 1.0).unwrap().value();
        assert_relative_eq!(h6, 6.0 * h1, max_relative = 1e-15);
        let sq = channel_gain(1.0, 1.0, 1e9, 1.0, 2.0).unwrap().value();
        assert_relative_eq!(sq, h1 * h1, max_relative = 1e-12);
    }

    #[test]
    fn gain_rejects_tiny_distance() {
        assert!(matches!(
            channel_gain(1.0, 1.0, 1e9, 0.5, 1.0),
            Err(Error::DistanceTooSmall { .. })
        ));
        assert!(channel_gain(1.0, 1.0, 1e9, 0.0, 1.0).is_err());
    }

    #[test]
    fn link_budget_examples() {
        let noise = 10f64.powf(-12.5);
        let lb = link_budget(p(10.0), g(1e-10), &[], noise);
        assert_relative_eq!(lb.serving_rsrp, 1e-9, max_relative = 1e-12);
        assert_eq!(lb.interference, 0.0);

        let sleeping = Interferer { active: false, power: p(10.0), gain: g(1e-10) };
        let lb0 = link_budget(p(10.0), g(1e-10), &[sleeping], noise);
        assert_eq!(lb0, lb);

        let awake = Interferer { active: true, ..sleeping };
        let one = link_budget(p(10.0), g(1e-10), &[awake], noise);
        let two = link_budget(p(10.0), g(1e-10), &[awake, awake], noise);
        assert_relative_eq!(two.interference, 2.0 * one.interference, max_relative = 1e-15);
    }

    #[test]
    fn sinr_and_rate_examples() {
        let noise = 10f64.powf(-12.5);
        let lb = LinkBudget { serving_rsrp: 1e-9, interference: 0.0, noise };
        let s = sinr(&lb);
        assert_relative_eq!(s, 3162.277_660_168_379_5, max_relative = 1e-12);
        assert_eq!(sinr(&LinkBudget { serving_rsrp: noise, interference: 0.0, noise }), 1.0);

        assert_eq!(data_rate(10e6, 0.0), 0.0);
        assert_eq!(data_rate(10e6, 1.0), 10e6);
        assert_relative_eq!(data_rate(10e6, s), 116_272_044.802_160_44, max_relative = 1e-12);
    }

    #[test]
    fn sinr_vanishes_under_heavy_interference() {
        let mut last = f64::INFINITY;
        for k in 0..12 {
            let s = sinr(&LinkBudget { serving_rsrp: 1e-9, interference: 10f64.powi(k - 12), noise: 1e-13 });
            assert!(s < last);
            last = s;
        }
        assert!(last < 1e-8);
    }

    #[test]
    fn deltas() {
        assert_eq!(power_and_rate_delta(false, p(15.2), p(13.2), 1.0, 5.0), (0.0, 0.0));
        assert_eq!(power_and_rate_delta(true, p(15.2), p(15.2), 5.0, 5.0).0, 0.0);
        let (dp, dc) = power_and_rate_delta(true, p(15.2), p(13.2), 4.0, 5.0);
        assert_relative_eq!(dp, 2.0, max_relative = 1e-12);
        assert_eq!(dc, 1.0);
    }

    #[test]
    fn ee_examples() {
        assert_relative_eq!(link_ee(116.27e6, p(10.0)).unwrap(), 11.627, max_relative = 1e-12);
        assert_eq!(link_ee(0.0, p(10.0)).unwrap(), 0.0);
        let full = link_ee(50e6, p(12.0)).unwrap();
        assert_relative_eq!(link_ee(25e6, p(12.0)).unwrap(), full / 2.0);
        assert!(PowerDbw::new(0.5).is_err());

        assert_eq!(network_ee(&[(true, 4.0)]).unwrap(), 4.0);
        assert_eq!(network_ee(&[(true, 4.0), (true, 6.0)]).unwrap(), 5.0);
        assert_eq!(network_ee(&[(true, 4.0), (false, 6.0)]).unwrap(), 4.0);
        assert!(matches!(network_ee(&[(false, 4.0)]), Err(Error::NoActiveBs)));
        assert!(matches!(network_ee(&[]), Err(Error::NoActiveBs)));
    }

    #[test]
    fn unit_conversions() {
        assert_eq!(dbw_to_watts(0.0), 1.0);
        assert_relative_eq!(watts_to_dbw(10.0).unwrap(), 10.0, max_relative = 1e-15);
        assert_relative_eq!(dbw_to_watts(15.2), 33.113, max_relative = 1e-4);
        assert!(matches!(watts_to_dbw(0.0), Err(Error::NonPositivePower(_))));
        assert!(watts_to_dbw(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn dbw_round_trip(p in -200.0f64..200.0) {
            let back = watts_to_dbw(dbw_to_watts(p)).unwrap();
            prop_assert!((back - p).abs() <= 1e-12 * p.abs().max(1.0));
        }

        #[test]
        fn distance_is_symmetric(ax in -1e3f64..1e3, ay in -1e3f64..1e3, az in 0f64..50.0,
                                 bx in -1e3f64..1e3, by in -1e3f64..1e3, bz in 0f64..50.0) {
            let a = Position::new(ax, ay, az);
            let b = Position::new(bx, by, bz);
            prop_assert_eq!(distance(&a, &b), distance(&b, &a));
            prop_assert!(distance(&a, &b) >= 0.0);
        }

        #[test]
        fn gain_times_distance_is_constant(d in 1.0f64..5e3) {
            let h = channel_gain(3.0, 1.0, 2.6e9, d, 1.0).unwrap().value();
            let h1 = channel_gain(3.0, 1.0, 2.6e9, 1.0, 1.0).unwrap().value();
            prop_assert!((h * d - h1).abs() <= 1e-12 * h1);
        }

        #[test]
        fn sinr_monotone(s in 1e-12f64..1e-3, i in 0f64..1e-3, k in 1.001f64..10.0) {
            let base = LinkBudget { serving_rsrp: s, interference: i, noise: 1e-13 };
            let more_signal = LinkBudget { serving_rsrp: s * k, ..base };
            let more_itf = LinkBudget { interference: i * k + 1e-12, ..base };
            prop_assert!(sinr(&more_signal) > sinr(&base));
            prop_assert!(sinr(&more_itf) < sinr(&base));
        }

        #[test]
        fn rate_concave(x in 0f64..1e4, h in 1e-3f64..10.0) {
            let w = 10e6;
            let second = data_rate(w, x + 2.0 * h) - 2.0 * data_rate(w, x + h) + data_rate(w, x);
            prop_assert!(data_rate(w, x + h) > data_rate(w, x));
            prop_assert!(second <= 1e-6);
        }

        #[test]
        fn network_ee_permutation_invariant(mut v in prop::collection::vec((any::<bool>(), 0f64..50.0), 1..12)) {
            v[0].0 = true;
            let a = network_ee(&v).unwrap();
            v.reverse();
            let b = network_ee(&v).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn power_reduction_non_negative(level in 1.0f64..15.2) {
            let (dp, _) = power_and_rate_delta(true, p(15.2), p(level), 0.0, 0.0);
            prop_assert!(dp >= 0.0);
        }
    }
}
