//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line with the
//! measured values, then asserts.
//!
//! Run with `cargo test -p hetnet-harness --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use hetnet_core::analysis::{
    average_caching_rate, caching_duration_cdf, hof_probability, radial_rate_quadrature, CachingScenario, HofModel,
};
use hetnet_core::geometry::{chord_length_cdf, chord_length_pdf, coverage_probability, BeamLayout};
use hetnet_core::numeric::{integrate, Tolerance};
use hetnet_core::radio::{db_to_linear, linear_to_db, LinkBudget, PathLossParams};
use hetnet_harness::config::{validate_config, ExperimentConfig, Mode};
use hetnet_harness::figures::{fig4_trials, run_fig5};
use hetnet_harness::report::{data_lines, paired_reduction};
use hetnet_sim::engine::{run_trial, trial_topology, Agent, Environment};
use hetnet_sim::validation::{beam_crossing_durations, coverage_crossings, single_cell_hof};
use hetnet_sim::{EmpiricalCdf, SimConfig};
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

fn report(id: &str, name: &str, ok: bool, elapsed: Duration, limit: Option<Duration>, detail: &str) -> bool {
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let pass = ok && in_time;
    let budget = limit.map_or(String::new(), |l| format!(" / {:.0} s", l.as_secs_f64()));
    println!(
        "[criterion {id}] {} {name} ({:.1} s{budget}): {detail}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
    );
    pass
}

fn binomial_3sigma(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn criterion_1_closed_form_matches_quadrature() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let ch = PathLossParams::mmw_los();
    let mut worst: f64 = 0.0;
    let mut all_closed = true;
    for _ in 0..100 {
        let width = rng.random_range(2.0f64..40.0).to_radians();
        let n = rng.random_range(2..=((2.0 * PI / width) as usize).min(8));
        let beam = BeamLayout::new(n, width, rng.random_range(0.0..2.0 * PI), 50.0).unwrap();
        let power = rng.random_range(10.0..40.0);
        let link = LinkBudget::new(power, 5e9, -174.0, 36.0, &ch).unwrap();
        let theta_hat = width + (PI / 2.0 - width) * rng.random_range(0.01..1.0);
        let s = CachingScenario::with_relative_heading(
            rng.random_range(1.0..60.0),
            rng.random_range(0.5..20.0),
            theta_hat,
            beam,
            rng.random_range(0..n),
            link,
            ch,
        )
        .unwrap();
        let closed = average_caching_rate(&s).unwrap();
        all_closed &= closed.closed_form;
        let numeric = radial_rate_quadrature(&s).unwrap();
        worst = worst.max(((closed.conditional - numeric) / numeric).abs());
    }
    let ok = all_closed && worst < 1e-8;
    let pass = report(
        "1",
        "closed-form rate vs quadrature, 100 scenarios",
        ok,
        start.elapsed(),
        Some(Duration::from_secs(10)),
        &format!("max relative error {worst:.3e} (< 1e-8)"),
    );
    assert!(pass);
}

#[test]
fn criterion_2_coverage_probability() {
    let start = Instant::now();
    let n = 1_000_000;
    let mut lines = Vec::new();
    let mut ok = true;
    for (i, &(beams, deg)) in [(2, 10.0), (3, 10.0), (3, 30.0), (4, 15.0)].iter().enumerate() {
        let layout = BeamLayout::new(beams, f64::to_radians(deg), 0.3, 30.0).unwrap();
        let p = coverage_probability(&layout).unwrap().value;
        let hits = coverage_crossings(&layout, n, SEED + i as u64);
        let freq = hits as f64 / n as f64;
        let tol = binomial_3sigma(p, n);
        ok &= (freq - p).abs() <= tol;
        lines.push(format!("({beams},{deg}°) analytic {p:.5} MC {freq:.5} ±{tol:.5}"));
    }
    let full = coverage_probability(&BeamLayout::new(3, 120f64.to_radians(), 0.0, 30.0).unwrap()).unwrap();
    ok &= full.value == 1.0;
    lines.push(format!("(3,120°) = {} (clamped: {})", full.value, full.was_clamped()));
    let pass = report(
        "2",
        "coverage probability vs Monte Carlo",
        ok,
        start.elapsed(),
        Some(Duration::from_secs(30)),
        &lines.join("; "),
    );
    assert!(pass);
}

#[test]
fn criterion_3_caching_duration_cdf() {
    let start = Instant::now();
    let v = 60.0 / 3.6;
    let width = 10f64.to_radians();
    let beam = BeamLayout::new(3, width, 0.0, 50.0).unwrap();
    let ch = PathLossParams::mmw_los();
    let link = LinkBudget::mmw_table_default(&ch);
    let mut ok = true;
    let mut lines = Vec::new();
    for (i, r) in [5.0, 10.0, 20.0].into_iter().enumerate() {
        let s = CachingScenario::with_relative_heading(r, v, PI / 2.0, beam, 0, link, ch).unwrap();
        let samples = beam_crossing_durations(r, v, width, 1_000_000, SEED + i as u64);
        let ecdf = EmpiricalCdf::new(samples).unwrap();
        let mut clamps = 0usize;
        let mut excess: f64 = 0.0;
        for &t in ecdf.samples() {
            let c = caching_duration_cdf(t, &s).unwrap();
            if c.was_clamped() {
                clamps += 1;
                excess = excess.max(c.excess());
            }
        }
        let ks = ecdf.ks_distance(|t| caching_duration_cdf(t, &s).unwrap().value);
        ok &= ks < 0.01;
        lines.push(format!("r={r} KS {ks:.5}, clamped {clamps} of 1e6 (max excess {excess:.1e})"));
    }
    let pass = report(
        "3",
        "caching-duration CDF vs 1e6 crossings",
        ok,
        start.elapsed(),
        Some(Duration::from_secs(60)),
        &lines.join("; "),
    );
    assert!(pass);
}

#[test]
fn criterion_4_single_cell_hof() {
    let start = Instant::now();
    let (v, mts, a) = (60.0 / 3.6, 1.0, 30.0);
    let p = hof_probability(v, &HofModel::new(a, mts, 60.0).unwrap()).unwrap().value;
    let limit = v * mts;
    let oracle = integrate(
        |phi| chord_length_pdf(2.0 * a * f64::sin(phi), a).unwrap() * 2.0 * a * phi.cos(),
        0.0,
        (limit / (2.0 * a)).asin(),
        Tolerance::default(),
    )
    .unwrap()
    .value;
    let n = 1_000_000;
    let out = single_cell_hof(v, a, mts, n, SEED);
    let freq = out.frequency();
    let tol = binomial_3sigma(p, n);
    let stays = EmpiricalCdf::new(out.time_of_stay.clone()).unwrap();
    let ks = stays.ks_distance(|t| chord_length_cdf(t * v, a).unwrap());
    let ok = (freq - p).abs() <= tol && (p - 0.1792).abs() < 5e-5 && (p - oracle).abs() < 1e-9 && ks < 0.01;
    let pass = report(
        "4",
        "single-cell HOF frequency",
        ok,
        start.elapsed(),
        Some(Duration::from_secs(60)),
        &format!(
            "analytic {p:.6} (chord-pdf quadrature {oracle:.6}), simulated {freq:.6} ±{tol:.6}, time-of-stay KS {ks:.5}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_caching_reduces_hof() {
    let start = Instant::now();
    let cfg = ExperimentConfig::defaults();
    let mut speeds = cfg.speeds.clone();
    speeds.sort_by(f64::total_cmp);
    let sims = fig4_trials(&cfg, &speeds, cfg.trials).unwrap();
    let mut ok = true;
    let mut lines = Vec::new();
    let mut reduction_60 = f64::NAN;
    for s in &sims {
        let off = s.hof_off.iter().sum::<f64>() / s.hof_off.len() as f64;
        let on = s.hof_on.iter().sum::<f64>() / s.hof_on.len() as f64;
        let (red, ci) = paired_reduction(&s.hof_off, &s.hof_on);
        let ho_off = s.ho_off.iter().sum::<f64>() / s.ho_off.len() as f64;
        let ho_on = s.ho_on.iter().sum::<f64>() / s.ho_on.len() as f64;
        ok &= on <= off;
        if (s.speed * 3.6 - 60.0).abs() < 1e-9 {
            reduction_60 = red;
        }
        lines.push(format!(
            "{:.0} km/h HOF off {off:.4} on {on:.4} red {:+.1}% ±{:.1}% (HO {ho_off:.2}→{ho_on:.2})",
            s.speed * 3.6,
            100.0 * red,
            100.0 * ci
        ));
    }
    ok &= (0.30..=0.60).contains(&reduction_60);
    let pass = report(
        "5",
        "caching-on HOF ≤ off at every speed, 60 km/h reduction in [30%, 60%], 200 trials",
        ok,
        start.elapsed(),
        Some(Duration::from_secs(600)),
        &lines.join("; "),
    );
    assert!(pass);
}

#[test]
fn criterion_6_caching_rate() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::defaults();
    cfg.set_mode(Mode::Analysis);
    let rep = run_fig5(&cfg).unwrap();
    let (pt, r, th) = (rep.values("tx_power_dbm"), rep.values("r"), rep.values("theta_u"));
    let (los, nlos) = (rep.values("rate_los"), rep.values("rate_nlos"));
    let at20: Vec<usize> = (0..rep.rows.len()).filter(|&i| r[i] == Some(20.0)).collect();
    let los_min = at20.iter().map(|&i| los[i].unwrap()).fold(f64::INFINITY, f64::min);
    let los_ok = los_min > 10e9;
    let mut nlos_lines = Vec::new();
    let mut nlos_ok = false;
    for power in [20.0, 27.0, 30.0] {
        let best = at20
            .iter()
            .filter(|&&i| pt[i] == Some(power))
            .map(|&i| nlos[i].unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        nlos_ok |= (1e9..=3e9).contains(&best);
        nlos_lines.push(format!("{power} dBm {:.2}", best / 1e9));
    }
    let mut monotone = true;
    for i in 1..rep.rows.len() {
        if pt[i] == pt[i - 1] && th[i] == th[i - 1] {
            monotone &= los[i] <= los[i - 1] && nlos[i] <= nlos[i - 1];
        }
    }
    let elapsed = start.elapsed();
    let limit = Some(Duration::from_secs(10));
    let a = report(
        "6a",
        "LoS caching rate at r = 20 m > 10 Gbps",
        los_ok,
        elapsed,
        limit,
        &format!("minimum over θ_u and P_t {:.2} Gbps", los_min / 1e9),
    );
    let b = report(
        "6b",
        "NLoS caching rate at r = 20 m within [1, 3] Gbps",
        nlos_ok,
        elapsed,
        limit,
        &format!("maximum over θ_u, Gbps: {}", nlos_lines.join(", ")),
    );
    let c = report(
        "6c",
        "caching rate non-increasing in r per θ_u",
        monotone,
        elapsed,
        limit,
        &format!("{} points", rep.rows.len()),
    );
    assert!(a && b && c);
}

fn hetnet(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hetnet")).args(args).output().expect("binary runs")
}

#[test]
fn criterion_7_determinism() {
    let start = Instant::now();
    let dir = std::env::temp_dir().join(format!("hetnet-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let config = dir.join("small.toml");
    fs::write(
        &config,
        "[experiment]\nspeeds_kmh = [10, 60]\n[simulation]\nmue_count = 3\nframe_length = 10\n\
         [fig3]\nsamples = 20000\n[fig5]\nsim_dt = 1e-3\n",
    )
    .unwrap();
    let mut ok = true;
    let mut lines = Vec::new();
    for fig in ["fig3", "fig4", "fig5"] {
        let mut runs = Vec::new();
        for k in 0..2 {
            let out = dir.join(format!("{fig}-{k}.csv"));
            let status = hetnet(&[
                fig,
                "--config",
                config.to_str().unwrap(),
                "--seed",
                "7",
                "--trials",
                "4",
                "--out",
                out.to_str().unwrap(),
            ]);
            ok &= status.status.success();
            runs.push(fs::read_to_string(&out).unwrap_or_default());
        }
        let same = data_lines(&runs[0]) == data_lines(&runs[1]) && data_lines(&runs[0]).len() > 1;
        let tagged = ["# seed: 7", "# config_sha256: ", "# tool: hetnet "].iter().all(|h| runs[0].contains(h));
        ok &= same && tagged;
        lines.push(format!("{fig} identical rows: {same}, header tags: {tagged}"));
    }
    let bad = dir.join("bad.toml");
    fs::write(&bad, "handover.tt = 1\n").unwrap();
    let code = hetnet(&["validate", "--config", bad.to_str().unwrap()]).status.code();
    ok &= code == Some(2);
    lines.push(format!("config error exit code {code:?}"));
    fs::remove_dir_all(&dir).ok();
    let pass = report("7", "byte-identical data rows on rerun", ok, start.elapsed(), None, &lines.join("; "));
    assert!(pass);
}

#[test]
fn criterion_8_invariants() {
    let start = Instant::now();
    let mut runner = TestRunner::new(PropConfig {
        cases: 64,
        failure_persistence: None,
        rng_seed: proptest::test_runner::RngSeed::Fixed(SEED),
        ..PropConfig::default()
    });
    let ch = PathLossParams::mmw_los();
    let link = LinkBudget::mmw_table_default(&ch);
    let mut results = Vec::new();

    let cdf = runner.run(
        &(1.0f64..100.0, 0.5f64..40.0, 1.0f64..60.0, 0.0f64..50.0, 0.0f64..10.0),
        |(r, v, w, t, dt)| {
            let beam = BeamLayout::new(3, w.to_radians(), 0.0, 50.0).unwrap();
            let s = CachingScenario::with_relative_heading(r, v, PI / 2.0, beam, 0, link, ch).unwrap();
            let a = caching_duration_cdf(t, &s).unwrap().value;
            let b = caching_duration_cdf(t + dt, &s).unwrap().value;
            prop_assert!((0.0..=1.0).contains(&a) && b >= a);
            Ok(())
        },
    );
    results.push(("CDF monotone and bounded", cdf.is_ok()));

    let db = runner.run(&(-200.0f64..200.0), |x| {
        prop_assert!((linear_to_db(db_to_linear(x)) - x).abs() <= 1e-12 * x.abs().max(1.0));
        Ok(())
    });
    results.push(("dB round trip < 1e-12", db.is_ok()));

    let mut slow = TestRunner::new(PropConfig {
        cases: 8,
        failure_persistence: None,
        rng_seed: proptest::test_runner::RngSeed::Fixed(SEED),
        ..PropConfig::default()
    });
    let base = SimConfig {
        mue_count: 3,
        frame_length: 15.0,
        ..validate_config("").unwrap().sim
    };
    let cache = slow.run(&(0u64..10_000), |seed| {
        let cfg = SimConfig { caching: true, ..base };
        let topo = trial_topology(&cfg, seed).unwrap();
        let env = Environment::new(&topo, &cfg);
        let mut agents: Vec<Agent> = (0..cfg.mue_count).map(|u| Agent::new(u, seed, &env)).collect();
        for n in 0..cfg.steps() {
            for a in agents.iter_mut() {
                a.step(&env, n, None);
                let c = a.trajectory.cache_bits;
                prop_assert!(c >= 0.0 && c <= cfg.traffic.cache_capacity);
            }
        }
        Ok(())
    });
    results.push(("cache within [0, Ψ]", cache.is_ok()));

    let attempts = slow.run(&(0u64..10_000), |seed| {
        let off = run_trial(&SimConfig { caching: false, ..base }, seed).unwrap();
        let on = run_trial(&SimConfig { caching: true, ..base }, seed).unwrap();
        prop_assert!(on.ho_count <= off.ho_count, "{} > {}", on.ho_count, off.ho_count);
        Ok(())
    });
    results.push(("HO attempts with muting ≤ without", attempts.is_ok()));

    let ok = results.iter().all(|r| r.1);
    let detail = results
        .iter()
        .map(|(n, r)| format!("{n}: {}", if *r { "ok" } else { "violated" }))
        .collect::<Vec<_>>()
        .join("; ");
    let pass = report("8", "invariant properties", ok, start.elapsed(), None, &detail);
    assert!(pass, "{cdf:?} {db:?} {cache:?} {attempts:?}");
}
