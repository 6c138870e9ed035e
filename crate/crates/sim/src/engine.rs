//! Discrete-time trial engine.

use std::fmt;

use hetnet_core::geometry::{BeamLayout, Point2D};
use hetnet_core::radio::{self, InterferenceGainModel};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::config::SimConfig;
use crate::error::Result;
use crate::handover::{CellId, EventKind, HoStateMachine, RssFilter, StepTimers};
use crate::mobility::MueTrajectory;
use crate::rng;
use crate::topology::{assign_channels, generate_topology, NetworkTopology};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    pub step: u64,
    pub time: f64,
    pub mue: usize,
    pub kind: EventKind,
    pub cell: CellId,
    pub value: f64,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.2} {} {} {} {:.3}",
            self.time, self.mue, self.kind, self.cell, self.value
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub seed: u64,
    pub mue_count: usize,
    /// Handover attempts, one per completed handover into a small cell.
    pub ho_count: u64,
    pub hof_count: u64,
    pub hof_rate: f64,
    pub link_losses: u64,
    /// Bits cached during each beam visit.
    pub cache_fill_samples: Vec<f64>,
    /// Stay of every handover-entered cell that was left, seconds.
    pub time_of_stay_samples: Vec<f64>,
    pub muted_fraction: f64,
}

impl ExperimentResult {
    pub fn hof_per_mue(&self) -> f64 {
        self.hof_count as f64 / self.mue_count.max(1) as f64
    }

    pub fn ho_per_mue(&self) -> f64 {
        self.ho_count as f64 / self.mue_count.max(1) as f64
    }
}

/// Per-trial constants shared by all users.
pub struct Environment<'a> {
    pub topology: &'a NetworkTopology,
    pub config: &'a SimConfig,
    timers: StepTimers,
    hearing_radius: f64,
    gains: InterferenceGainModel,
}

impl<'a> Environment<'a> {
    pub fn new(topology: &'a NetworkTopology, config: &'a SimConfig) -> Self {
        let r = &config.radio;
        let floor = config.handover.serving_threshold_dbm - r.measurement_margin_db;
        let mw = &r.microwave;
        let hearing_radius = mw.reference_distance
            * 10f64.powf((r.microwave_tx_dbm - floor - mw.reference_loss_db()) / (10.0 * mw.exponent));
        let beams = topology.sbs.first().map(|c| c.beams);
        let gains = InterferenceGainModel::from_beams(
            beams.map_or(1, |b| b.n_beams()),
            beams.map_or(0.0, |b| b.beam_width()),
            r.antenna,
        );
        Environment {
            topology,
            config,
            timers: StepTimers::from_config(config),
            hearing_radius,
            gains,
        }
    }

    pub fn hearing_radius(&self) -> f64 {
        self.hearing_radius
    }

    /// Mean (unshadowed) microwave RSS of small cell `k` at `p`.
    pub fn mean_rss(&self, k: usize, p: &Point2D) -> f64 {
        let r = &self.config.radio;
        let d = p.distance(&self.topology.sbs[k].position).max(r.microwave.reference_distance);
        r.microwave_tx_dbm - radio::path_loss(d, &r.microwave, 0.0).expect("distance clamped to reference")
    }

    /// Strongest small cell above the serving threshold by mean RSS.
    pub fn initial_association(&self, p: &Point2D) -> CellId {
        let threshold = self.config.handover.serving_threshold_dbm;
        (0..self.topology.len())
            .map(|k| (k, self.mean_rss(k, p)))
            .filter(|&(_, rss)| rss >= threshold)
            .fold(None, |best: Option<(usize, f64)>, c| match best {
                Some(b) if b.1 >= c.1 => Some(b),
                _ => Some(c),
            })
            .map_or(CellId::Macro, |(k, _)| CellId::Small(k))
    }

    fn mmw_rate<R: Rng>(&self, k: usize, p: &Point2D, rng: &mut R) -> f64 {
        let r = &self.config.radio;
        let cell = &self.topology.sbs[k];
        let link = &cell.link;
        let d = p.distance(&cell.position).max(cell.channel.reference_distance);
        let snr = link.snr_constant() * d.powf(-cell.channel.exponent);
        let mut inr = 0.0;
        if r.interference {
            let per_gain = link.snr_constant() / link.combined_gain;
            for (j, cell) in self.topology.sbs.iter().enumerate() {
                if j == k {
                    continue;
                }
                let g = radio::db_to_linear(self.gains.sample_db(rng.random(), rng.random()));
                let dj = p.distance(&cell.position).max(cell.channel.reference_distance);
                inr += per_gain * g * dj.powf(-cell.channel.exponent);
            }
        }
        radio::shannon_rate(link.bandwidth, snr / (1.0 + inr))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AgentStats {
    pub attempts: u64,
    pub hof: u64,
    pub link_losses: u64,
    pub time_of_stay: Vec<f64>,
    pub cache_fills: Vec<f64>,
    pub muted_steps: u64,
    pub steps: u64,
}

/// One user with its protocol state and private random streams.
pub struct Agent {
    pub id: usize,
    pub trajectory: MueTrajectory,
    pub fsm: HoStateMachine,
    pub stats: AgentStats,
    filter: RssFilter,
    mobility: ChaCha8Rng,
    measurement: ChaCha8Rng,
    interference: ChaCha8Rng,
    beam_visit: Option<(usize, usize, f64)>,
    samples: Vec<(usize, f64)>,
    scratch: Vec<(EventKind, CellId, f64)>,
}

impl Agent {
    pub fn new(id: usize, seed: u64, env: &Environment<'_>) -> Self {
        let mut mobility = rng::mobility_stream(seed, id);
        let c = env.config;
        let trajectory = MueTrajectory::random(&mut mobility, env.topology.area_radius, c.speed, c.frame_length);
        Self::with_trajectory(id, seed, trajectory, mobility, env)
    }

    /// User starting on a given trajectory.
    pub fn placed(id: usize, seed: u64, trajectory: MueTrajectory, env: &Environment<'_>) -> Self {
        Self::with_trajectory(id, seed, trajectory, rng::mobility_stream(seed, id), env)
    }

    fn with_trajectory(
        id: usize,
        seed: u64,
        trajectory: MueTrajectory,
        mobility: ChaCha8Rng,
        env: &Environment<'_>,
    ) -> Self {
        let serving = env.initial_association(&trajectory.position);
        Agent {
            id,
            trajectory,
            fsm: HoStateMachine::new(serving, env.timers, env.config.handover, env.config.dt),
            stats: AgentStats::default(),
            filter: RssFilter::new(env.timers.filter_window),
            mobility,
            measurement: rng::measurement_stream(seed, id),
            interference: rng::interference_stream(seed, id),
            beam_visit: None,
            samples: Vec::new(),
            scratch: Vec::new(),
        }
    }

    fn close_beam_visit(&mut self) {
        if let Some((k, _, bits)) = self.beam_visit.take() {
            self.stats.cache_fills.push(bits);
            self.scratch.push((EventKind::BeamExit, CellId::Small(k), bits));
        }
    }

    /// Advances the user by one step, appending events when `trace` is given.
    pub fn step(&mut self, env: &Environment<'_>, step: u64, trace: Option<&mut Vec<Event>>) {
        let cfg = env.config;
        let dt = cfg.dt;
        self.scratch.clear();
        self.stats.steps += 1;
        self.trajectory.advance(dt);
        let pos = self.trajectory.position;

        if pos.norm() > env.topology.area_radius {
            self.close_beam_visit();
            self.trajectory.respawn(&mut self.mobility, env.topology.area_radius);
            self.filter.clear();
            let serving = env.initial_association(&self.trajectory.position);
            self.fsm.reset(serving);
            self.scratch.push((EventKind::Respawn, serving, 0.0));
        } else {
            self.measure(env, &pos);
            self.fsm.advance_clock();
            let mute = cfg.caching && self.update_cache(env, &pos);
            if mute {
                self.stats.muted_steps += 1;
            }
            if let Some(stay) = self.fsm.check_link(&self.filter, &mut self.scratch) {
                self.stats.time_of_stay.push(stay);
            }
            if let Some(stay) = self.fsm.tick(&self.filter, mute, self.trajectory.cache_bits, &mut self.scratch) {
                self.stats.time_of_stay.push(stay);
            }
        }

        for &(kind, cell, _) in &self.scratch {
            match (kind, cell) {
                (EventKind::HoComplete, CellId::Small(_)) => self.stats.attempts += 1,
                (EventKind::Hof, _) => self.stats.hof += 1,
                (EventKind::LinkLoss, _) => self.stats.link_losses += 1,
                _ => {}
            }
        }
        if let Some(trace) = trace {
            let time = (step + 1) as f64 * dt;
            trace.extend(self.scratch.iter().map(|&(kind, cell, value)| Event {
                step,
                time,
                mue: self.id,
                kind,
                cell,
                value,
            }));
        }
    }

    fn measure(&mut self, env: &Environment<'_>, pos: &Point2D) {
        let radio = &env.config.radio;
        let sigma = radio.microwave.shadowing_std;
        self.samples.clear();
        for (k, cell) in env.topology.sbs.iter().enumerate() {
            if pos.distance(&cell.position) > env.hearing_radius {
                continue;
            }
            let z: f64 = self.measurement.sample(StandardNormal);
            self.samples.push((k, env.mean_rss(k, pos) - sigma * z));
        }
        self.filter.update(&self.samples);
    }

    /// Accrues mmW content inside the serving cell's beams and drains
    /// playback. Returns whether cell search should be muted.
    fn update_cache(&mut self, env: &Environment<'_>, pos: &Point2D) -> bool {
        let cfg = env.config;
        let traffic = &cfg.traffic;
        let beam = self.fsm.serving_small().and_then(|k| {
            let cell = &env.topology.sbs[k];
            cell.beams.beam_covering(&pos.relative_to(&cell.position)).map(|b| (k, b))
        });
        match (self.beam_visit, beam) {
            (Some((k0, b0, _)), Some((k, b))) if k0 == k && b0 == b => {}
            (_, Some((k, b))) => {
                self.close_beam_visit();
                self.beam_visit = Some((k, b, 0.0));
                let d = pos.distance(&env.topology.sbs[k].position);
                self.scratch.push((EventKind::BeamEnter, CellId::Small(k), d));
            }
            (Some(_), None) => self.close_beam_visit(),
            (None, None) => {}
        }
        let cache = &mut self.trajectory.cache_bits;
        if let Some((k, _, visit)) = self.beam_visit.as_mut() {
            let rate = env.mmw_rate(*k, pos, &mut self.interference);
            let before = *cache;
            *cache = (*cache + rate * cfg.dt).min(traffic.cache_capacity);
            *visit += *cache - before;
        }
        *cache = (*cache - traffic.playback_bitrate() * cfg.dt).max(0.0);
        let segments = (*cache / traffic.segment_size).floor();
        segments / traffic.play_rate > cfg.handover.ttt
    }

    /// Flushes an open beam visit at the end of the frame.
    pub fn finish(&mut self) {
        self.scratch.clear();
        if let Some((_, _, bits)) = self.beam_visit.take() {
            self.stats.cache_fills.push(bits);
        }
    }
}

/// Runs a frame for the given users on a fixed topology.
pub fn run_scene(
    config: &SimConfig,
    topology: &NetworkTopology,
    agents: &mut [Agent],
    mut trace: Option<&mut Vec<Event>>,
) {
    let env = Environment::new(topology, config);
    let steps = config.steps();
    for agent in agents.iter_mut() {
        for n in 0..steps {
            agent.step(&env, n, trace.as_deref_mut());
        }
        agent.finish();
    }
    if let Some(trace) = trace {
        trace.sort_by_key(|e| (e.step, e.mue));
    }
}

fn summarize(seed: u64, agents: &[Agent]) -> ExperimentResult {
    let mut r = ExperimentResult {
        seed,
        mue_count: agents.len(),
        ho_count: 0,
        hof_count: 0,
        hof_rate: 0.0,
        link_losses: 0,
        cache_fill_samples: Vec::new(),
        time_of_stay_samples: Vec::new(),
        muted_fraction: 0.0,
    };
    let (mut muted, mut steps) = (0, 0);
    for a in agents {
        r.ho_count += a.stats.attempts;
        r.hof_count += a.stats.hof;
        r.link_losses += a.stats.link_losses;
        r.cache_fill_samples.extend(&a.stats.cache_fills);
        r.time_of_stay_samples.extend(&a.stats.time_of_stay);
        muted += a.stats.muted_steps;
        steps += a.stats.steps;
    }
    r.hof_rate = r.hof_count as f64 / r.ho_count.max(1) as f64;
    r.muted_fraction = if steps == 0 { 0.0 } else { muted as f64 / steps as f64 };
    r
}

/// Topology drawn from the trial seed with the configured beam template.
pub fn trial_topology(config: &SimConfig, seed: u64) -> Result<NetworkTopology> {
    let t = &config.topology;
    let template = BeamLayout::new(t.n_beams, t.beam_width, 0.0, t.beam_reach)?;
    let mut topology = generate_topology(
        seed,
        t.sbs_count,
        t.area_radius,
        t.min_intercell_distance,
        &template,
        config.radio.mmw_link,
    )?;
    let r = &config.radio;
    assign_channels(&mut topology, seed, r.mmw, r.mmw_nlos, r.los_probability);
    Ok(topology)
}

/// One independent trial: topology and users drawn from `seed`.
pub fn run_trial(config: &SimConfig, seed: u64) -> Result<ExperimentResult> {
    Ok(run_trial_traced(config, seed, false)?.0)
}

pub fn run_trial_traced(config: &SimConfig, seed: u64, trace: bool) -> Result<(ExperimentResult, Vec<Event>)> {
    config.validate()?;
    let topology = trial_topology(config, seed)?;
    let env = Environment::new(&topology, config);
    let mut agents: Vec<Agent> = (0..config.mue_count).map(|u| Agent::new(u, seed, &env)).collect();
    let mut events = Vec::new();
    run_scene(config, &topology, &mut agents, trace.then_some(&mut events));
    Ok((summarize(seed, &agents), events))
}

/// Summary of users that were run through [`run_scene`].
pub fn collect(seed: u64, agents: &[Agent]) -> ExperimentResult {
    summarize(seed, agents)
}
