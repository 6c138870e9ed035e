//! Sweeps behind each report command.

use std::time::Instant;

use hetnet_core::analysis::{
    average_caching_rate, caching_duration_cdf, expected_cache_distance, ho_skip_factor, hof_probability,
    CachingScenario, HofModel,
};
use hetnet_core::geometry::{coverage_probability, BeamLayout};
use hetnet_core::radio::{LinkBudget, PathLossParams};
use hetnet_sim::engine::{run_trial, run_trial_traced, trial_topology};
use hetnet_sim::validation::{beam_crossing_durations, path_accrual};
use hetnet_sim::{EmpiricalCdf, Event, ExperimentResult};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::HarnessError;
use crate::report::{mean_ci, paired_reduction, Cell, SweepReport};

/// Seed of trial `i`, spread with SplitMix64 so neighbouring trials share
/// no structure.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    let mut z = seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(0x632b_e59b_d9b4_e019);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn sorted(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn beam(cfg: &ExperimentConfig) -> Result<BeamLayout, HarnessError> {
    let t = &cfg.sim.topology;
    Ok(BeamLayout::new(t.n_beams, t.beam_width, 0.0, t.beam_reach)?)
}

fn relative(sim: f64, analytic: f64) -> f64 {
    (sim - analytic) / analytic
}

/// Caching-duration distribution per initial distance: analytic CDF on a
/// grid of `t0` and the empirical CDF of simulated beam crossings.
pub fn run_fig3(cfg: &ExperimentConfig) -> Result<SweepReport, HarnessError> {
    let start = Instant::now();
    let p = &cfg.fig3;
    let layout = beam(cfg)?;
    let width = layout.beam_width();
    let mode = cfg.mode;
    let grid: Vec<f64> = (0..p.points)
        .map(|i| p.t_max * i as f64 / (p.points - 1) as f64)
        .collect();
    let blocks: Vec<Result<Vec<Vec<Cell>>, HarnessError>> = sorted(p.distances.clone())
        .into_par_iter()
        .enumerate()
        .map(|(i, r)| {
            let s = CachingScenario::with_relative_heading(
                r,
                p.speed,
                std::f64::consts::FRAC_PI_2,
                layout,
                0,
                cfg.sim.radio.mmw_link,
                cfg.los_channel(),
            )?;
            let empirical = if mode.simulated() {
                let samples = beam_crossing_durations(r, p.speed, width, p.samples, trial_seed(cfg.seed, i));
                let ecdf = EmpiricalCdf::new(samples)?;
                let ks = ecdf.ks_distance(|t| caching_duration_cdf(t, &s).map(|c| c.value).unwrap_or(f64::NAN));
                if ks.is_nan() {
                    return Err(HarnessError::Numeric(format!("KS distance undefined at r = {r}")));
                }
                Some((ecdf, ks))
            } else {
                None
            };
            grid.iter()
                .map(|&t0| {
                    let analytic = if mode.analytic() {
                        Some(caching_duration_cdf(t0, &s)?)
                    } else {
                        None
                    };
                    let f_emp = empirical.as_ref().map(|(e, _)| e.eval(t0));
                    let f_an = analytic.map(|c| c.value);
                    let disc = f_emp.zip(f_an).map(|(e, a)| e - a);
                    Ok(vec![
                        t0.into(),
                        r.into(),
                        f_an.into(),
                        f_emp.into(),
                        empirical.as_ref().map(|(_, ks)| *ks).into(),
                        disc.into(),
                        analytic.map(|c| c.excess()).into(),
                    ])
                })
                .collect()
        })
        .collect();
    let mut rep = SweepReport::new(
        "fig3",
        vec!["t0", "r", "F_analytic", "F_empirical", "ks_stat", "discrepancy", "clamp_excess"],
    );
    for block in blocks {
        for row in block? {
            rep.push(row);
        }
    }
    rep.note("speed_mps", p.speed);
    rep.note("samples_per_distance", p.samples);
    rep.wall_time = start.elapsed().as_secs_f64();
    Ok(rep)
}

/// Per-speed summary of paired caching-off / caching-on trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedSummary {
    pub speed: f64,
    pub hof_off: Vec<f64>,
    pub hof_on: Vec<f64>,
    pub ho_off: Vec<f64>,
    pub ho_on: Vec<f64>,
    pub hof_rate_off: Vec<f64>,
    pub hof_rate_on: Vec<f64>,
}

/// Runs `trials` paired trials at each speed. Trial `i` uses the same seed
/// at every speed and for both caching settings.
pub fn fig4_trials(cfg: &ExperimentConfig, speeds: &[f64], trials: usize) -> Result<Vec<SpeedSummary>, HarnessError> {
    let jobs: Vec<(usize, usize, bool)> = (0..speeds.len())
        .flat_map(|s| (0..trials).flat_map(move |i| [(s, i, false), (s, i, true)]))
        .collect();
    let results: Vec<Result<ExperimentResult, HarnessError>> = jobs
        .par_iter()
        .map(|&(s, i, caching)| Ok(run_trial(&cfg.sim_at(speeds[s], caching), trial_seed(cfg.seed, i))?))
        .collect();
    let mut out: Vec<SpeedSummary> = speeds
        .iter()
        .map(|&speed| SpeedSummary {
            speed,
            hof_off: Vec::new(),
            hof_on: Vec::new(),
            ho_off: Vec::new(),
            ho_on: Vec::new(),
            hof_rate_off: Vec::new(),
            hof_rate_on: Vec::new(),
        })
        .collect();
    for (&(s, _, caching), r) in jobs.iter().zip(results) {
        let r = r?;
        let o = &mut out[s];
        if caching {
            o.hof_on.push(r.hof_per_mue());
            o.ho_on.push(r.ho_per_mue());
            o.hof_rate_on.push(r.hof_rate);
        } else {
            o.hof_off.push(r.hof_per_mue());
            o.ho_off.push(r.ho_per_mue());
            o.hof_rate_off.push(r.hof_rate);
        }
    }
    Ok(out)
}

/// Analytic handover-failure probability, skip factor and the implied
/// reduction `1 − 1/ζ` at one speed.
pub fn fig4_analysis(cfg: &ExperimentConfig, speed: f64, spacing: f64) -> Result<(f64, u64, f64), HarnessError> {
    let model = HofModel::new(cfg.microwave_cell_radius(), cfg.sim.handover.mts, spacing)?;
    let p = hof_probability(speed, &model)?.value;
    let s = CachingScenario::with_relative_heading(
        cfg.fig4_analysis_distance,
        speed,
        std::f64::consts::FRAC_PI_2,
        beam(cfg)?,
        0,
        cfg.sim.radio.mmw_link,
        cfg.los_channel(),
    )?;
    let distance = expected_cache_distance(&s, &cfg.sim.traffic)?;
    let zeta = ho_skip_factor(distance.mean, &model);
    let reduction = if zeta >= 1 { 1.0 - 1.0 / zeta as f64 } else { 0.0 };
    Ok((p, zeta, reduction))
}

/// Handover failures per user and frame against speed, caching off and on.
pub fn run_fig4(cfg: &ExperimentConfig) -> Result<SweepReport, HarnessError> {
    let start = Instant::now();
    let speeds = sorted(cfg.speeds.clone());
    let mode = cfg.mode;
    let sims = if mode.simulated() {
        Some(fig4_trials(cfg, &speeds, cfg.trials)?)
    } else {
        None
    };
    let spacing = trial_topology(&cfg.sim, trial_seed(cfg.seed, 0))?
        .mean_nearest_neighbor_distance()
        .unwrap_or(cfg.sim.topology.area_radius);
    let analysis: Option<Vec<(f64, u64, f64)>> = if mode.analytic() {
        Some(
            speeds
                .par_iter()
                .map(|&v| fig4_analysis(cfg, v, spacing))
                .collect::<Result<_, _>>()?,
        )
    } else {
        None
    };
    let mut rep = SweepReport::new(
        "fig4",
        vec![
            "speed_kmh",
            "hof_off",
            "hof_on",
            "relative_reduction",
            "ci",
            "hof_off_ci",
            "hof_on_ci",
            "ho_off",
            "ho_on",
            "hof_rate_off",
            "hof_rate_on",
            "analytic_hof_probability",
            "analytic_skip_factor",
            "analytic_reduction",
            "discrepancy",
        ],
    );
    for (k, &v) in speeds.iter().enumerate() {
        let mut row: Vec<Cell> = vec![(v * 3.6).into()];
        let sim_reduction = match &sims {
            Some(s) => {
                let s = &s[k];
                let (off, off_ci) = mean_ci(&s.hof_off);
                let (on, on_ci) = mean_ci(&s.hof_on);
                let (red, red_ci) = paired_reduction(&s.hof_off, &s.hof_on);
                row.extend([off, on, red, red_ci, off_ci, on_ci].map(Cell::from));
                row.extend(
                    [&s.ho_off, &s.ho_on, &s.hof_rate_off, &s.hof_rate_on]
                        .map(|xs| Cell::from(mean_ci(xs).0)),
                );
                Some(red)
            }
            None => {
                row.extend(std::iter::repeat_n(Cell::Empty, 10));
                None
            }
        };
        match &analysis {
            Some(a) => {
                let (p, zeta, red) = a[k];
                row.extend([p.into(), zeta.into(), red.into()]);
                row.push(sim_reduction.map(|s| s - red).into());
            }
            None => row.extend(std::iter::repeat_n(Cell::Empty, 4)),
        }
        rep.push(row);
    }
    rep.note("trials", cfg.trials);
    rep.note("hof_unit", "failures per user per frame");
    rep.note("frame_length_s", cfg.sim.frame_length);
    rep.note("mean_sbs_spacing_m", spacing);
    rep.note("microwave_cell_radius_m", cfg.microwave_cell_radius());
    rep.wall_time = start.elapsed().as_secs_f64();
    Ok(rep)
}

/// Coverage-weighted caching rate: closed form (or quadrature off α = 2)
/// and a stepped accrual along the path.
pub fn fig5_point(
    cfg: &ExperimentConfig,
    link: &LinkBudget,
    channel: &PathLossParams,
    r: f64,
    theta_hat: f64,
) -> Result<(Option<f64>, Option<f64>), HarnessError> {
    let layout = beam(cfg)?;
    let p = &cfg.fig5;
    let analytic = if cfg.mode.analytic() {
        let s = CachingScenario::with_relative_heading(r, p.speed, theta_hat, layout, 0, *link, *channel)?;
        Some(average_caching_rate(&s)?.value)
    } else {
        None
    };
    let simulated = if cfg.mode.simulated() {
        let coverage = coverage_probability(&layout)?.value;
        let acc = path_accrual(r, theta_hat, p.speed, layout.beam_width(), link, channel, p.sim_dt)
            .ok_or_else(|| HarnessError::Numeric(format!("no crossing at r = {r}, θ = {theta_hat}")))?;
        Some(coverage * acc.mean_rate())
    } else {
        None
    };
    Ok((analytic, simulated))
}

/// Caching rate against initial distance for each heading and transmit
/// power, line of sight and blocked.
pub fn run_fig5(cfg: &ExperimentConfig) -> Result<SweepReport, HarnessError> {
    let start = Instant::now();
    let p = &cfg.fig5;
    let mut points = Vec::new();
    for &pt in &sorted(p.tx_powers_dbm.clone()) {
        for &theta in &sorted(p.theta_u.clone()) {
            for &r in &sorted(p.distances.clone()) {
                points.push((pt, theta, r));
            }
        }
    }
    let los = cfg.los_channel();
    let nlos = cfg.nlos_channel();
    let rows: Vec<Result<Vec<Cell>, HarnessError>> = points
        .par_iter()
        .map(|&(pt, theta, r)| {
            let link = |ch: &PathLossParams, base: &LinkBudget| LinkBudget {
                tx_power_dbm: pt,
                beta: ch.beta(),
                ..*base
            };
            let (a_los, s_los) = fig5_point(cfg, &link(&los, &cfg.sim.radio.mmw_link), &los, r, theta)?;
            let (a_nlos, s_nlos) = fig5_point(cfg, &link(&nlos, &cfg.mmw_nlos_link), &nlos, r, theta)?;
            let disc = |s: Option<f64>, a: Option<f64>| s.zip(a).map(|(s, a)| relative(s, a));
            Ok(vec![
                pt.into(),
                r.into(),
                theta.to_degrees().round().into(),
                a_los.into(),
                a_nlos.into(),
                s_los.into(),
                s_nlos.into(),
                disc(s_los, a_los).into(),
                disc(s_nlos, a_nlos).into(),
            ])
        })
        .collect();
    let mut rep = SweepReport::new(
        "fig5",
        vec![
            "tx_power_dbm",
            "r",
            "theta_u",
            "rate_los",
            "rate_nlos",
            "rate_los_sim",
            "rate_nlos_sim",
            "discrepancy_los",
            "discrepancy_nlos",
        ],
    );
    for row in rows {
        rep.push(row?);
    }
    rep.note("rate_unit", "bit/s, coverage-weighted");
    rep.note("theta_u_reference", "degrees from the beam's trailing edge");
    rep.note("speed_mps", p.speed);
    rep.wall_time = start.elapsed().as_secs_f64();
    Ok(rep)
}

/// One trial at the first configured speed, with its event trace.
pub fn run_single(cfg: &ExperimentConfig) -> Result<(SweepReport, Vec<Event>), HarnessError> {
    let start = Instant::now();
    let sim = cfg.sim_at(cfg.speeds[0], cfg.sim.caching);
    let (r, events) = run_trial_traced(&sim, cfg.seed, true)?;
    let mean = |xs: &[f64]| if xs.is_empty() { None } else { Some(mean_ci(xs).0) };
    let mut rep = SweepReport::new(
        "single-run",
        vec![
            "seed",
            "speed_kmh",
            "caching",
            "mue_count",
            "ho_count",
            "hof_count",
            "hof_rate",
            "link_losses",
            "muted_fraction",
            "mean_time_of_stay",
            "mean_cache_fill",
        ],
    );
    rep.push(vec![
        r.seed.into(),
        (sim.speed * 3.6).into(),
        Cell::Text(sim.caching.to_string()),
        (r.mue_count as u64).into(),
        r.ho_count.into(),
        r.hof_count.into(),
        r.hof_rate.into(),
        r.link_losses.into(),
        r.muted_fraction.into(),
        mean(&r.time_of_stay_samples).into(),
        mean(&r.cache_fill_samples).into(),
    ]);
    rep.wall_time = start.elapsed().as_secs_f64();
    Ok((rep, events))
}
