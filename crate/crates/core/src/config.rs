//! Run configuration: a flat `key = value` TOML document.
//!
//! Every key is optional; omitted keys keep their defaults. Unknown keys
//! and out-of-range values are rejected with the offending key named.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::agents::AgentKind;
use crate::error::{Error, Result};
use crate::radio::MIN_POWER_GUARD_DBW;
use crate::rl::Hyperparams;
use crate::scenario::{ArrivalConfig, PowerConfig, RadioConfig};

/// Site layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Hexagonal grid of `rings` rings with dropped users.
    Hex,
    /// The frozen three-site, three-user fixture.
    ThreeSite,
}

impl FromStr for Layout {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "hex" => Ok(Layout::Hex),
            "three_site" => Ok(Layout::ThreeSite),
            other => Err(format!("unknown layout `{other}` (expected hex or three_site)")),
        }
    }
}

impl Display for Layout {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Layout::Hex => "hex",
            Layout::ThreeSite => "three_site",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub layout: Layout,
    pub rings: usize,
    pub isd_m: f64,
    pub bs_height_m: f64,
    pub ue_height_m: f64,
    pub users_per_sector: usize,
    pub radio: RadioConfig,
    pub power: PowerConfig,
    pub arrivals: ArrivalConfig,
    pub mobility_speed_mps: f64,
    pub agent: AgentKind,
    pub episodes: usize,
    pub iterations: usize,
    pub hyper: Hyperparams,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub load_weights: Option<PathBuf>,
    pub save_weights: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            layout: Layout::Hex,
            rings: 2,
            isd_m: 500.0,
            bs_height_m: 25.0,
            ue_height_m: 1.5,
            users_per_sector: 1,
            radio: RadioConfig::default(),
            power: PowerConfig::default(),
            arrivals: ArrivalConfig::default(),
            mobility_speed_mps: 0.0,
            agent: AgentKind::Dqn,
            episodes: 20_000,
            iterations: 100,
            hyper: Hyperparams::default(),
            seed: 1,
            out_dir: PathBuf::from("out"),
            load_weights: None,
            save_weights: None,
        }
    }
}

/// Every accepted key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("layout", "hex | three_site"),
    ("rings", "hexagonal rings around the centre site (2 gives 19 sites)"),
    ("isd_m", "inter-site distance, m"),
    ("bs_height_m", "antenna height, m"),
    ("ue_height_m", "user height, m"),
    ("users_per_sector", "users dropped per sector"),
    ("carrier_hz", "carrier frequency, Hz"),
    ("tx_gain_dbi", "transmit antenna gain, dBi"),
    ("rx_gain_dbi", "receive antenna gain, dBi"),
    ("backlobe_db", "gain of a sector towards users outside its arc, dB"),
    ("path_loss_exponent", "exponent of the free-space term"),
    ("bandwidth_hz", "channel bandwidth, Hz"),
    ("noise_dbw", "noise power, dBW"),
    ("p_max_dbw", "maximum transmit power, dBW"),
    ("delta_p_max_db", "span of the power-level set below p_max, dB"),
    ("power_levels", "number of power levels"),
    ("arrival_prob", "base per-step request probability of an idle user"),
    ("volume_lo_bits", "smallest request volume, bits"),
    ("volume_hi_bits", "largest request volume, bits"),
    ("arrival_period", "period of the arrival-rate modulation, steps (0 disables)"),
    ("mobility_speed_mps", "random-waypoint speed, m/s (0 keeps users static)"),
    ("agent", "dqn | qlearning | sleep"),
    ("episodes", "time-steps per run"),
    ("iterations", "inner search iterations per episode"),
    ("lambda", "discount factor"),
    ("epsilon", "exploration probability"),
    ("eta", "gradient-descent step size"),
    ("batch_size", "mini-batch size"),
    ("train_interval", "episodes between training rounds"),
    ("memory_capacity", "replay memory capacity"),
    ("sync_interval", "training rounds between target-network copies"),
    ("hidden", "hidden layer widths, e.g. \"64,64\""),
    ("alpha", "tabular learning rate"),
    ("bins", "tabular bins per state feature"),
    ("seed", "master random seed"),
    ("out_dir", "output directory"),
    ("load_weights", "DQN checkpoint to start from"),
    ("save_weights", "where to write the trained DQN checkpoint"),
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: Display,
{
    value.trim().parse().map_err(|e: T::Err| Error::Validation { key: key.into(), message: format!("`{value}`: {e}") })
}

fn fmt_list(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "layout" => self.layout = parse(key, value)?,
            "rings" => self.rings = parse(key, value)?,
            "isd_m" => self.isd_m = parse(key, value)?,
            "bs_height_m" => self.bs_height_m = parse(key, value)?,
            "ue_height_m" => self.ue_height_m = parse(key, value)?,
            "users_per_sector" => self.users_per_sector = parse(key, value)?,
            "carrier_hz" => self.radio.fc_hz = parse(key, value)?,
            "tx_gain_dbi" => self.radio.tx_gain_dbi = parse(key, value)?,
            "rx_gain_dbi" => self.radio.rx_gain_dbi = parse(key, value)?,
            "backlobe_db" => self.radio.backlobe_db = parse(key, value)?,
            "path_loss_exponent" => self.radio.path_loss_exponent = parse(key, value)?,
            "bandwidth_hz" => self.radio.bandwidth_hz = parse(key, value)?,
            "noise_dbw" => self.radio.noise_dbw = parse(key, value)?,
            "p_max_dbw" => self.power.p_max_dbw = parse(key, value)?,
            "delta_p_max_db" => self.power.delta_p_max_db = parse(key, value)?,
            "power_levels" => self.power.levels = parse(key, value)?,
            "arrival_prob" => self.arrivals.base_prob = parse(key, value)?,
            "volume_lo_bits" => self.arrivals.volume_lo = parse(key, value)?,
            "volume_hi_bits" => self.arrivals.volume_hi = parse(key, value)?,
            "arrival_period" => self.arrivals.period = parse(key, value)?,
            "mobility_speed_mps" => self.mobility_speed_mps = parse(key, value)?,
            "agent" => self.agent = parse(key, value)?,
            "episodes" => self.episodes = parse(key, value)?,
            "iterations" => self.iterations = parse(key, value)?,
            "lambda" => self.hyper.lambda = parse(key, value)?,
            "epsilon" => self.hyper.epsilon = parse(key, value)?,
            "eta" => self.hyper.eta = parse(key, value)?,
            "batch_size" => self.hyper.batch_size = parse(key, value)?,
            "train_interval" => self.hyper.train_interval = parse(key, value)?,
            "memory_capacity" => self.hyper.memory_capacity = parse(key, value)?,
            "sync_interval" => self.hyper.sync_interval = parse(key, value)?,
            "hidden" => {
                self.hyper.hidden = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse(key, s))
                    .collect::<Result<_>>()?
            }
            "alpha" => self.hyper.alpha = parse(key, value)?,
            "bins" => self.hyper.bins = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "load_weights" => self.load_weights = (!value.is_empty()).then(|| PathBuf::from(value)),
            "save_weights" => self.save_weights = (!value.is_empty()).then(|| PathBuf::from(value)),
            _ => return Err(Error::Validation { key: key.into(), message: "unknown key".into() }),
        }
        Ok(())
    }

    /// Current value of every key as text, in [`KEYS`] order.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let opt = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let vals: Vec<String> = vec![
            self.layout.to_string(),
            self.rings.to_string(),
            self.isd_m.to_string(),
            self.bs_height_m.to_string(),
            self.ue_height_m.to_string(),
            self.users_per_sector.to_string(),
            self.radio.fc_hz.to_string(),
            self.radio.tx_gain_dbi.to_string(),
            self.radio.rx_gain_dbi.to_string(),
            self.radio.backlobe_db.to_string(),
            self.radio.path_loss_exponent.to_string(),
            self.radio.bandwidth_hz.to_string(),
            self.radio.noise_dbw.to_string(),
            self.power.p_max_dbw.to_string(),
            self.power.delta_p_max_db.to_string(),
            self.power.levels.to_string(),
            self.arrivals.base_prob.to_string(),
            self.arrivals.volume_lo.to_string(),
            self.arrivals.volume_hi.to_string(),
            self.arrivals.period.to_string(),
            self.mobility_speed_mps.to_string(),
            self.agent.to_string(),
            self.episodes.to_string(),
            self.iterations.to_string(),
            self.hyper.lambda.to_string(),
            self.hyper.epsilon.to_string(),
            self.hyper.eta.to_string(),
            self.hyper.batch_size.to_string(),
            self.hyper.train_interval.to_string(),
            self.hyper.memory_capacity.to_string(),
            self.hyper.sync_interval.to_string(),
            fmt_list(&self.hyper.hidden),
            self.hyper.alpha.to_string(),
            self.hyper.bins.to_string(),
            self.seed.to_string(),
            self.out_dir.display().to_string(),
            opt(&self.load_weights),
            opt(&self.save_weights),
        ];
        KEYS.iter().zip(vals).map(|((k, _), v)| (k.to_string(), v)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: String| Err(Error::Validation { key: key.into(), message });
        let positive = [
            ("isd_m", self.isd_m),
            ("carrier_hz", self.radio.fc_hz),
            ("path_loss_exponent", self.radio.path_loss_exponent),
            ("bandwidth_hz", self.radio.bandwidth_hz),
            ("delta_p_max_db", self.power.delta_p_max_db),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(key, format!("{v} must be positive and finite"));
            }
        }
        let finite = [
            ("bs_height_m", self.bs_height_m),
            ("ue_height_m", self.ue_height_m),
            ("tx_gain_dbi", self.radio.tx_gain_dbi),
            ("rx_gain_dbi", self.radio.rx_gain_dbi),
            ("backlobe_db", self.radio.backlobe_db),
            ("noise_dbw", self.radio.noise_dbw),
            ("p_max_dbw", self.power.p_max_dbw),
            ("mobility_speed_mps", self.mobility_speed_mps),
        ];
        for (key, v) in finite {
            if !v.is_finite() {
                return bad(key, format!("{v} is not finite"));
            }
        }
        if self.bs_height_m < 0.0 {
            return bad("bs_height_m", "must be non-negative".into());
        }
        if self.ue_height_m < 0.0 {
            return bad("ue_height_m", "must be non-negative".into());
        }
        if self.mobility_speed_mps < 0.0 {
            return bad("mobility_speed_mps", "must be non-negative".into());
        }
        if self.rings > 20 {
            return bad("rings", format!("{} rings is beyond the supported 20", self.rings));
        }
        if self.users_per_sector == 0 {
            return bad("users_per_sector", "must be at least 1".into());
        }
        if self.power.levels < 2 {
            return bad("power_levels", format!("need at least 2, got {}", self.power.levels));
        }
        if self.power.p_max_dbw - self.power.delta_p_max_db < MIN_POWER_GUARD_DBW {
            return bad(
                "delta_p_max_db",
                format!("lowest level {} dBW falls below the {MIN_POWER_GUARD_DBW} dBW guard", self.power.p_max_dbw - self.power.delta_p_max_db),
            );
        }
        if !(0.0..=1.0).contains(&self.arrivals.base_prob) {
            return bad("arrival_prob", format!("{} not in [0, 1]", self.arrivals.base_prob));
        }
        if !(self.arrivals.volume_lo > 0.0 && self.arrivals.volume_lo.is_finite()) {
            return bad("volume_lo_bits", "must be positive".into());
        }
        if !(self.arrivals.volume_hi >= self.arrivals.volume_lo && self.arrivals.volume_hi.is_finite()) {
            return bad("volume_hi_bits", "must be finite and at least volume_lo_bits".into());
        }
        if self.episodes == 0 {
            return bad("episodes", "must be at least 1".into());
        }
        if self.iterations == 0 {
            return bad("iterations", "must be at least 1".into());
        }
        self.hyper.validate()
    }

    /// Parses a configuration document and validates it.
    pub fn from_toml(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
            line: e.span().map_or(0, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        let mut cfg = Self::default();
        for (key, value) in &table {
            let text_value = match value {
                toml::Value::String(s) => s.clone(),
                toml::Value::Integer(i) => i.to_string(),
                toml::Value::Float(f) => f.to_string(),
                toml::Value::Boolean(b) => b.to_string(),
                toml::Value::Array(items) => items
                    .iter()
                    .map(|v| match v {
                        toml::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect::<Vec<_>>()
                    .join(","),
                _ => {
                    let line = text.lines().position(|l| l.contains(key.as_str())).map_or(0, |i| i + 1);
                    return Err(Error::Parse { line, message: format!("`{key}` must be a plain value, not a table") });
                }
            };
            cfg.set(key, &text_value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|b| *b == b'\n').count() + 1
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    RunConfig::from_toml(&std::fs::read_to_string(path)?)
}
