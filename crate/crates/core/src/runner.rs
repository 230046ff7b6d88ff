//! Experiment orchestration: single runs, agent comparisons, parameter
//! sweeps and the small-instance oracle check.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::agents::{
    check_feasibility, exhaustive_oracle, Agent, AgentKind, DqnAgent, EpisodeOutcome, QLearningAgent, SleepAgent,
};
use crate::config::{Layout, RunConfig};
use crate::error::{Error, Result};
use crate::metrics::{Accumulator, CsvRecord, MetricsRow, MetricsWriter, Overall};
use crate::rl::{Normalizer, QNetwork, Role};
use crate::rng::{self, Stream};
use crate::scenario::{build_topology, drop_users, fixture, Network};

/// Builds the environment described by `cfg`.
pub fn build_network(cfg: &RunConfig) -> Result<Network> {
    let net = match cfg.layout {
        Layout::Hex => {
            let topo = build_topology(cfg.rings, cfg.isd_m, cfg.bs_height_m, &cfg.power, cfg.radio)?;
            let users = drop_users(&topo, cfg.users_per_sector, cfg.ue_height_m, &mut rng::stream(cfg.seed, Stream::Topology));
            Network::new(topo, users, cfg.arrivals, cfg.seed)?
        }
        Layout::ThreeSite => {
            let (sites, users) = fixture::three_site_sites();
            let topo = crate::scenario::Topology::with_sites(sites, cfg.isd_m, &cfg.power, cfg.radio)?;
            Network::new(topo, users, cfg.arrivals, cfg.seed)?
        }
    };
    Ok(net.with_mobility(cfg.mobility_speed_mps, cfg.seed))
}

/// State normalizer matching `cfg`'s traffic volumes.
pub fn normalizer(cfg: &RunConfig) -> Normalizer {
    Normalizer::new(cfg.arrivals.volume_hi)
}

/// Any of the three policies.
#[derive(Debug, Clone)]
pub enum AnyAgent {
    Dqn(DqnAgent),
    QLearning(QLearningAgent),
    Sleep(SleepAgent),
}

impl Agent for AnyAgent {
    fn kind(&self) -> AgentKind {
        match self {
            AnyAgent::Dqn(a) => a.kind(),
            AnyAgent::QLearning(a) => a.kind(),
            AnyAgent::Sleep(a) => a.kind(),
        }
    }

    fn step(&mut self, env: &Network, terminal: bool) -> Result<EpisodeOutcome> {
        match self {
            AnyAgent::Dqn(a) => a.step(env, terminal),
            AnyAgent::QLearning(a) => a.step(env, terminal),
            AnyAgent::Sleep(a) => a.step(env, terminal),
        }
    }
}

/// Instantiates `kind` with `cfg`'s hyper-parameters, loading DQN weights
/// when configured.
pub fn build_agent(cfg: &RunConfig, kind: AgentKind, kappa: usize) -> Result<AnyAgent> {
    let norm = normalizer(cfg);
    Ok(match kind {
        AgentKind::Dqn => {
            let mut a = DqnAgent::new(kappa, cfg.hyper.clone(), cfg.iterations, norm, cfg.seed)?;
            if let Some(path) = &cfg.load_weights {
                let net = QNetwork::read_checkpoint(std::io::BufReader::new(File::open(path)?), Role::Predicted)?;
                a.load_weights(&net)?;
            }
            AnyAgent::Dqn(a)
        }
        AgentKind::QLearning => AnyAgent::QLearning(QLearningAgent::new(kappa, cfg.hyper.clone(), cfg.iterations, norm, cfg.seed)?),
        AgentKind::Sleep => AnyAgent::Sleep(SleepAgent),
    })
}

/// Result of stepping one agent through a run.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub rows: Vec<MetricsRow>,
    pub records: Vec<CsvRecord>,
    pub overall: Overall,
}

/// Steps `agent` through `episodes` time-steps of `env`, calling `on_record`
/// with each CSV line as it is produced.
pub fn simulate<A: Agent + ?Sized>(
    env: &mut Network,
    agent: &mut A,
    episodes: usize,
    mut on_record: impl FnMut(&CsvRecord) -> Result<()>,
) -> Result<Simulation> {
    let mut acc = Accumulator::new();
    let mut rows = Vec::with_capacity(episodes);
    let mut records = Vec::with_capacity(episodes);
    for t in 0..episodes {
        env.begin_step();
        let out = agent.step(env, t + 1 == episodes)?;
        check_feasibility(&out)?;
        let row = MetricsRow::from_outcome(t, env, &out)?;
        let rec = acc.push(&row);
        on_record(&rec)?;
        env.advance(&out.levels, &out.eval);
        rows.push(row);
        records.push(rec);
    }
    Ok(Simulation { rows, records, overall: acc.overall() })
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub agent: String,
    pub seed: u64,
    #[serde(flatten)]
    pub overall: Overall,
    pub wall_clock_s: f64,
    pub config: BTreeMap<String, String>,
}

/// Runs `cfg` once and writes `metrics.csv` and `summary.json` into `out_dir`.
pub fn run(cfg: &RunConfig, out_dir: &Path, quiet: bool) -> Result<Summary> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let start = Instant::now();
    let mut env = build_network(cfg)?;
    let mut agent = build_agent(cfg, cfg.agent, env.topology().kappa())?;
    let mut writer = MetricsWriter::new(BufWriter::new(File::create(out_dir.join("metrics.csv"))?))?;
    let every = (cfg.episodes / 10).max(1);
    let sim = simulate(&mut env, &mut agent, cfg.episodes, |rec| {
        if !quiet && (rec.t + 1) % every == 0 {
            eprintln!("[{}] t={} ee_cum={:.4}", cfg.agent, rec.t + 1, rec.ee_cum);
        }
        writer.write(rec)
    })?;
    writer.finish()?.flush()?;
    if let (AnyAgent::Dqn(a), Some(path)) = (&agent, &cfg.save_weights) {
        a.predicted().write_checkpoint(BufWriter::new(File::create(path)?))?;
    }
    let summary = Summary {
        agent: cfg.agent.to_string(),
        seed: cfg.seed,
        overall: sim.overall,
        wall_clock_s: start.elapsed().as_secs_f64(),
        config: cfg.echo(),
    };
    serde_json::to_writer_pretty(BufWriter::new(File::create(out_dir.join("summary.json"))?), &summary)?;
    Ok(summary)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Runs every agent on the same configuration and seed, each into
/// `out_dir/<agent>/`, and writes `comparison.csv`.
pub fn compare(cfg: &RunConfig, out_dir: &Path, quiet: bool) -> Result<Vec<Summary>> {
    fs::create_dir_all(out_dir)?;
    let summaries = AgentKind::ALL
        .par_iter()
        .map(|&kind| {
            let c = RunConfig { agent: kind, ..cfg.clone() };
            run(&c, &out_dir.join(kind.name()), quiet)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut w = csv::Writer::from_path(out_dir.join("comparison.csv"))?;
    w.write_record([
        "agent",
        "ee",
        "throughput_bps",
        "power_dbw",
        "rsrp_decline_dbw",
        "itf_decline_dbw",
        "decline_gap_dbw",
        "success_ratio",
        "iterations",
    ])?;
    for s in &summaries {
        let o = &s.overall;
        w.write_record([
            s.agent.clone(),
            o.ee.to_string(),
            o.throughput_bps.to_string(),
            opt(o.power_dbw),
            opt(o.rsrp_decline_dbw),
            opt(o.itf_decline_dbw),
            opt(o.decline_gap_dbw),
            opt(o.success_ratio),
            opt(o.iterations),
        ])?;
    }
    w.flush()?;
    Ok(summaries)
}

/// Parses `key=v1,v2,...` into a sweep axis.
pub fn parse_axis(spec: &str) -> Result<(String, Vec<String>)> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| Error::Validation { key: spec.into(), message: "expected key=v1,v2,...".into() })?;
    let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        return Err(Error::Validation { key: key.into(), message: "no values to sweep".into() });
    }
    Ok((key.trim().to_string(), values))
}

/// Every combination of the axes, first axis slowest.
pub fn cartesian(axes: &[(String, Vec<String>)]) -> Vec<Vec<(String, String)>> {
    axes.iter().fold(vec![Vec::new()], |acc, (key, values)| {
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push((key.clone(), v.clone()));
                    p
                })
            })
            .collect()
    })
}

fn point_dir(point: &[(String, String)]) -> String {
    let name: Vec<String> = point.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let name = name.join("_").replace(['/', '\\', ' '], "-");
    if name.is_empty() {
        "base".into()
    } else {
        name
    }
}

/// Runs the cartesian product of `axes` over `cfg` in parallel, one
/// directory per point, and writes `sweep.csv`.
pub fn sweep(cfg: &RunConfig, axes: &[(String, Vec<String>)], out_dir: &Path, quiet: bool) -> Result<Vec<Summary>> {
    let points = cartesian(axes);
    let configs = points
        .iter()
        .map(|p| {
            let mut c = cfg.clone();
            for (k, v) in p {
                c.set(k, v)?;
            }
            c.validate()?;
            Ok((point_dir(p), c))
        })
        .collect::<Result<Vec<(String, RunConfig)>>>()?;
    fs::create_dir_all(out_dir)?;
    let summaries = configs
        .par_iter()
        .map(|(dir, c)| run(c, &out_dir.join(dir), quiet))
        .collect::<Result<Vec<_>>>()?;
    let mut w = csv::Writer::from_path(out_dir.join("sweep.csv"))?;
    // agent and seed are reported unless they are already axes
    let has = |k: &str| axes.iter().any(|(a, _)| a == k);
    let mut header: Vec<String> = axes.iter().map(|(k, _)| k.clone()).collect();
    header.extend(["agent", "seed"].into_iter().filter(|k| !has(k)).map(String::from));
    header.extend(["ee", "throughput_bps", "power_dbw", "success_ratio", "iterations"].map(String::from));
    w.write_record(&header)?;
    for (p, s) in points.iter().zip(&summaries) {
        let mut rec: Vec<String> = p.iter().map(|(_, v)| v.clone()).collect();
        if !has("agent") {
            rec.push(s.agent.clone());
        }
        if !has("seed") {
            rec.push(s.seed.to_string());
        }
        let o = &s.overall;
        rec.extend([
            o.ee.to_string(),
            o.throughput_bps.to_string(),
            opt(o.power_dbw),
            opt(o.success_ratio),
            opt(o.iterations),
        ]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(summaries)
}

/// Agent-versus-oracle comparison over a run.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub episodes: usize,
    /// Episodes with at least one active site.
    pub compared: usize,
    pub mean_ratio: Option<f64>,
    /// Share of compared episodes reaching 95% of the oracle.
    pub within_95: Option<f64>,
}

/// Steps the configured agent and, on every episode with traffic, compares
/// its accepted energy efficiency with the exhaustive optimum. Writes
/// `oracle.csv`. Fails if an agent ever beats the oracle.
pub fn oracle(cfg: &RunConfig, out_dir: &Path, quiet: bool) -> Result<OracleReport> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let mut env = build_network(cfg)?;
    let mut agent = build_agent(cfg, cfg.agent, env.topology().kappa())?;
    let mut w = csv::Writer::from_path(out_dir.join("oracle.csv"))?;
    w.write_record(["t", "agent_ee", "oracle_ee", "ratio", "agent_action", "oracle_action"])?;
    let mut ratios = Vec::new();
    for t in 0..cfg.episodes {
        env.begin_step();
        let out = agent.step(&env, t + 1 == cfg.episodes)?;
        check_feasibility(&out)?;
        if let Some(ee) = out.reward {
            let best = exhaustive_oracle(&env)?;
            if ee > best.ee + 1e-9 * best.ee.abs().max(1.0) {
                return Err(Error::InvariantViolation(format!(
                    "t={t}: agent EE {ee} exceeds the exhaustive optimum {}",
                    best.ee
                )));
            }
            let ratio = ee / best.ee;
            ratios.push(ratio);
            let fmt = |a: &[usize]| a.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
            w.write_record([
                t.to_string(),
                ee.to_string(),
                best.ee.to_string(),
                ratio.to_string(),
                fmt(&out.joint_action()),
                fmt(&best.actions),
            ])?;
        }
        env.advance(&out.levels, &out.eval);
    }
    w.flush()?;
    let n = ratios.len();
    let report = OracleReport {
        episodes: cfg.episodes,
        compared: n,
        mean_ratio: (n > 0).then(|| ratios.iter().sum::<f64>() / n as f64),
        within_95: (n > 0).then(|| ratios.iter().filter(|r| **r >= 0.95).count() as f64 / n as f64),
    };
    if !quiet {
        eprintln!("[oracle] {report:?}");
    }
    serde_json::to_writer_pretty(BufWriter::new(File::create(out_dir.join("oracle.json"))?), &report)?;
    Ok(report)
}

/// Output directory: the command-line override, else the configured one.
pub fn resolve_out(cfg: &RunConfig, cli: Option<PathBuf>) -> PathBuf {
    cli.unwrap_or_else(|| cfg.out_dir.clone())
}
