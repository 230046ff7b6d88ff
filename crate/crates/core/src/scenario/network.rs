use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::topology::{associate_max_rsrp, Association, Topology, SECTORS_PER_BS};
use super::traffic::{generate_traffic, ArrivalConfig, TrafficRequest};
use crate::error::{Error, Result};
use crate::radio::{self, Position, PowerDbw};
use crate::rng::{self, Stream};

/// Time-step duration in seconds.
pub const SLOT_S: f64 = 1e-3;

/// Per-time-step network snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeState {
    pub t: usize,
    /// Bits still to deliver, per user; zero means idle.
    pub residual: Vec<f64>,
    /// Step at which each user's current request arrived (FIFO key).
    pub arrival_step: Vec<usize>,
    /// Reference-signal RSRP per user in watts, measured at `P_max`.
    pub rsrp_report: Vec<f64>,
    pub association: Vec<Association>,
    /// User scheduled on each (site, sector) this step.
    pub scheduled: Vec<[Option<usize>; SECTORS_PER_BS]>,
    /// Activity flag per site.
    pub phi: Vec<bool>,
    /// Power applied by each site in the last step; `None` while asleep.
    pub current_power: Vec<Option<PowerDbw>>,
}

impl EpisodeState {
    pub fn new(num_bs: usize, association: Vec<Association>, rsrp_report: Vec<f64>) -> Self {
        let users = association.len();
        let mut s = Self {
            t: 0,
            residual: vec![0.0; users],
            arrival_step: vec![0; users],
            rsrp_report,
            association,
            scheduled: vec![[None; SECTORS_PER_BS]; num_bs],
            phi: vec![false; num_bs],
            current_power: vec![None; num_bs],
        };
        s.reschedule();
        s
    }

    pub fn num_bs(&self) -> usize {
        self.phi.len()
    }

    pub fn idle(&self) -> Vec<bool> {
        self.residual.iter().map(|v| *v <= 0.0).collect()
    }

    pub fn add_request(&mut self, req: &TrafficRequest) {
        self.residual[req.user] += req.volume;
        self.arrival_step[req.user] = req.arrival_step;
    }

    /// Picks the oldest pending user on every sector (ties by user id) and
    /// recomputes the activity flags.
    pub fn reschedule(&mut self) {
        for slot in &mut self.scheduled {
            *slot = [None; SECTORS_PER_BS];
        }
        for (u, a) in self.association.iter().enumerate() {
            if self.residual[u] <= 0.0 {
                continue;
            }
            let slot = &mut self.scheduled[a.bs][a.sector];
            match *slot {
                Some(v) if (self.arrival_step[v], v) <= (self.arrival_step[u], u) => {}
                _ => *slot = Some(u),
            }
        }
        for (b, phi) in self.phi.iter_mut().enumerate() {
            *phi = self.scheduled[b].iter().any(Option::is_some);
        }
    }

    /// Serves one slot: `residual -= rate * slot` (floored at zero) for every
    /// user, then moves to the next step and reschedules.
    pub fn advance(&mut self, user_rates: &[f64]) {
        for (v, c) in self.residual.iter_mut().zip(user_rates) {
            *v = (*v - c * SLOT_S).max(0.0);
        }
        self.t += 1;
        self.reschedule();
        for (b, p) in self.current_power.iter_mut().enumerate() {
            if !self.phi[b] {
                *p = None;
            }
        }
    }

    /// Users currently scheduled on site `bs`.
    pub fn scheduled_users(&self, bs: usize) -> impl Iterator<Item = usize> + '_ {
        self.scheduled[bs].iter().flatten().copied()
    }
}

/// Rates produced by one power assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Per-user rate in bit/s; zero for users not scheduled.
    pub user_rate: Vec<f64>,
    pub user_sinr: Vec<f64>,
    /// Per-site sum rate over its scheduled users; zero while asleep.
    pub bs_rate: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Mobility {
    speed: f64,
    radius: f64,
    waypoints: Vec<Position>,
    rng: ChaCha8Rng,
}

impl Mobility {
    fn waypoint(&mut self, z: f64) -> Position {
        let r = self.radius * self.rng.gen::<f64>().sqrt();
        let th = self.rng.gen_range(0.0..std::f64::consts::TAU);
        Position::new(r * th.cos(), r * th.sin(), z)
    }
}

/// Dense-RAN environment: fixed sites, users, traffic and the stepping state.
#[derive(Debug, Clone)]
pub struct Network {
    topo: Topology,
    users: Vec<Position>,
    /// `gains[(u * B + b) * 3 + s]`
    gains: Vec<f64>,
    arrivals: ArrivalConfig,
    traffic_rng: ChaCha8Rng,
    mobility: Option<Mobility>,
    noise_w: f64,
    state: EpisodeState,
}

impl Network {
    pub fn new(topo: Topology, users: Vec<Position>, arrivals: ArrivalConfig, seed: u64) -> Result<Self> {
        arrivals.validate()?;
        if let Some(bad) = users.iter().find(|u| !u.is_valid()) {
            return Err(Error::InvalidConfig(format!("invalid user position {bad:?}")));
        }
        let noise_w = topo.radio.noise_watts();
        let mut net = Self {
            gains: Vec::new(),
            state: EpisodeState::new(topo.num_bs(), Vec::new(), Vec::new()),
            topo,
            users,
            arrivals,
            traffic_rng: rng::stream(seed, Stream::Traffic),
            mobility: None,
            noise_w,
        };
        net.refresh_channel();
        Ok(net)
    }

    /// Users wander towards random waypoints at `speed` m/s; association is
    /// refreshed every step.
    pub fn with_mobility(mut self, speed: f64, seed: u64) -> Self {
        if speed > 0.0 {
            let radius = self
                .topo
                .sites
                .iter()
                .map(|s| (s.x * s.x + s.y * s.y).sqrt())
                .fold(0.0, f64::max)
                + self.topo.isd / 2.0;
            let mut m = Mobility {
                speed,
                radius,
                waypoints: Vec::new(),
                rng: rng::stream(seed, Stream::Mobility),
            };
            m.waypoints = self.users.iter().map(|u| m.waypoint(u.z)).collect();
            self.mobility = Some(m);
        }
        self
    }

    fn refresh_channel(&mut self) {
        let nb = self.topo.num_bs();
        self.gains = Vec::with_capacity(self.users.len() * nb * SECTORS_PER_BS);
        for u in &self.users {
            for b in 0..nb {
                for s in 0..SECTORS_PER_BS {
                    self.gains.push(self.topo.sector_gain(b, s, u).value());
                }
            }
        }
        let association = associate_max_rsrp(&self.topo, &self.users);
        let p_ref = self.topo.p_max().watts();
        let rsrp = association.iter().enumerate().map(|(u, a)| p_ref * self.gain(u, a.bs, a.sector)).collect();
        self.state.association = association;
        self.state.rsrp_report = rsrp;
        if self.state.residual.len() != self.users.len() {
            self.state = EpisodeState::new(nb, self.state.association.clone(), self.state.rsrp_report.clone());
        }
        self.state.reschedule();
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn users(&self) -> &[Position] {
        &self.users
    }

    pub fn state(&self) -> &EpisodeState {
        &self.state
    }

    pub fn noise_watts(&self) -> f64 {
        self.noise_w
    }

    pub fn arrivals(&self) -> &ArrivalConfig {
        &self.arrivals
    }

    #[inline]
    pub fn gain(&self, user: usize, bs: usize, sector: usize) -> f64 {
        self.gains[(user * self.topo.num_bs() + bs) * SECTORS_PER_BS + sector]
    }

    /// Draws this step's arrivals for idle users and reschedules.
    pub fn begin_step(&mut self) -> Vec<TrafficRequest> {
        let idle = self.state.idle();
        let reqs = generate_traffic(self.state.t, &mut self.traffic_rng, &self.arrivals, &idle);
        for r in &reqs {
            self.state.add_request(r);
        }
        self.state.reschedule();
        reqs
    }

    /// Queues a request outside the arrival process and reschedules.
    pub fn inject(&mut self, req: &TrafficRequest) {
        self.state.add_request(req);
        self.state.reschedule();
    }

    /// Sites with a scheduled user, ascending.
    pub fn active_bs(&self) -> Vec<usize> {
        (0..self.topo.num_bs()).filter(|&b| self.state.phi[b]).collect()
    }

    /// Rates when every active site `b` transmits at `levels[b]`.
    /// Entries for sleeping sites are ignored.
    pub fn evaluate(&self, levels: &[usize]) -> Evaluation {
        let nb = self.topo.num_bs();
        let watts: Vec<f64> = (0..nb)
            .map(|b| if self.state.phi[b] { self.topo.level(levels[b]).watts() } else { 0.0 })
            .collect();
        self.evaluate_watts(&watts)
    }

    /// Rates with every active site at `P_max`.
    pub fn evaluate_reference(&self) -> Evaluation {
        let levels = vec![self.topo.max_level(); self.topo.num_bs()];
        self.evaluate(&levels)
    }

    fn evaluate_watts(&self, watts: &[f64]) -> Evaluation {
        let nb = self.topo.num_bs();
        let nu = self.users.len();
        let bw = self.topo.radio.bandwidth_hz;
        let mut user_rate = vec![0.0; nu];
        let mut user_sinr = vec![0.0; nu];
        let mut bs_rate = vec![0.0; nb];
        for b in 0..nb {
            if !self.state.phi[b] {
                continue;
            }
            for (s, slot) in self.state.scheduled[b].iter().enumerate() {
                let Some(u) = *slot else { continue };
                // an active interferer radiates from each of its busy sectors
                let interferers = (0..nb).filter(|&o| o != b).map(|o| {
                    let h: f64 = (0..SECTORS_PER_BS)
                        .filter(|&so| self.state.scheduled[o][so].is_some())
                        .map(|so| self.gain(u, o, so))
                        .sum();
                    (self.state.phi[o], watts[o], h)
                });
                let lb = radio::link_budget_watts(watts[b], self.gain(u, b, s), interferers, self.noise_w);
                let g = radio::sinr(&lb);
                let c = radio::data_rate(bw, g);
                user_sinr[u] = g;
                user_rate[u] = c;
                bs_rate[b] += c;
            }
        }
        Evaluation { user_rate, user_sinr, bs_rate }
    }

    /// Local observation of site `bs`: summed residual bits of its scheduled
    /// users and their mean reference RSRP in dBW.
    pub fn bs_observation(&self, bs: usize) -> (f64, f64) {
        self.observation_with(bs, |u| self.state.residual[u])
    }

    /// Observation of site `bs` after serving one slot at `eval`'s rates.
    pub fn bs_next_observation(&self, bs: usize, eval: &Evaluation) -> (f64, f64) {
        self.observation_with(bs, |u| (self.state.residual[u] - eval.user_rate[u] * SLOT_S).max(0.0))
    }

    fn observation_with(&self, bs: usize, residual: impl Fn(usize) -> f64) -> (f64, f64) {
        let mut v = 0.0;
        let mut y = 0.0;
        let mut n = 0usize;
        for u in self.state.scheduled_users(bs) {
            v += residual(u);
            y += radio::watts_to_dbw(self.state.rsrp_report[u]).unwrap_or(f64::NEG_INFINITY);
            n += 1;
        }
        if n == 0 {
            (0.0, radio::watts_to_dbw(self.topo.radio.noise_watts()).unwrap_or(-125.0))
        } else {
            (v, y / n as f64)
        }
    }

    /// Applies the accepted power levels, serves the slot and moves to the
    /// next time-step.
    pub fn advance(&mut self, levels: &[usize], eval: &Evaluation) {
        for b in 0..self.topo.num_bs() {
            self.state.current_power[b] = self.state.phi[b].then(|| self.topo.level(levels[b]));
        }
        self.state.advance(&eval.user_rate);
        if let Some(m) = &mut self.mobility {
            let step = m.speed * SLOT_S;
            for (u, pos) in self.users.iter_mut().enumerate() {
                let wp = m.waypoints[u];
                let (dx, dy) = (wp.x - pos.x, wp.y - pos.y);
                let d = (dx * dx + dy * dy).sqrt();
                if d <= step {
                    pos.x = wp.x;
                    pos.y = wp.y;
                    m.waypoints[u] = m.waypoint(pos.z);
                } else {
                    pos.x += dx / d * step;
                    pos.y += dy / d * step;
                }
            }
            self.refresh_channel();
        }
    }
}
