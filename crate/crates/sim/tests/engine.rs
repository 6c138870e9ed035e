use hetnet_core::geometry::{BeamLayout, Point2D};
use hetnet_sim::engine::{collect, run_scene, run_trial, run_trial_traced, Agent, Environment};
use hetnet_sim::topology::SmallCell;
use hetnet_sim::{MueTrajectory, NetworkTopology, SimConfig};
use proptest::prelude::*;

fn quick() -> SimConfig {
    SimConfig {
        mue_count: 4,
        frame_length: 20.0,
        ..SimConfig::default()
    }
}

/// One small cell at the origin with beams at 0°, 120° and 240°.
fn isolated(cfg: &SimConfig) -> NetworkTopology {
    let t = &cfg.topology;
    let beams = BeamLayout::new(t.n_beams, t.beam_width, 0.0, t.beam_reach).unwrap();
    NetworkTopology::from_cells(
        vec![SmallCell {
            position: Point2D::ORIGIN,
            beams,
            link: cfg.radio.mmw_link,
            channel: cfg.radio.mmw,
        }],
        t.area_radius,
    )
}

fn noiseless(mts: f64, frame: f64) -> SimConfig {
    let mut cfg = SimConfig {
        mue_count: 1,
        frame_length: frame,
        ..SimConfig::default()
    };
    cfg.radio.microwave.shadowing_std = 0.0;
    cfg.radio.interference = false;
    cfg.handover.mts = mts;
    cfg
}

fn pass(cfg: &SimConfig, start: f64, heading: f64) -> (hetnet_sim::ExperimentResult, Vec<hetnet_sim::Event>) {
    let topo = isolated(cfg);
    let env = Environment::new(&topo, cfg);
    let traj = MueTrajectory {
        position: Point2D::from_polar(start, heading + std::f64::consts::PI),
        direction: heading,
        speed: cfg.speed,
        cache_bits: 0.0,
        frame_length: cfg.frame_length,
    };
    let mut agents = vec![Agent::placed(0, 1, traj, &env)];
    let mut events = Vec::new();
    run_scene(cfg, &topo, &mut agents, Some(&mut events));
    (collect(1, &agents), events)
}

#[test]
fn same_seed_same_result() {
    let cfg = quick();
    let (a, ea) = run_trial_traced(&cfg, 11, true).unwrap();
    let (b, eb) = run_trial_traced(&cfg, 11, true).unwrap();
    assert_eq!(a, b);
    assert_eq!(ea, eb);
    assert_ne!(a, run_trial(&cfg, 12).unwrap());
}

#[test]
fn empty_frame_counts_nothing() {
    let cfg = SimConfig { frame_length: 0.0, ..quick() };
    let r = run_trial(&cfg, 3).unwrap();
    assert_eq!((r.ho_count, r.hof_count, r.link_losses), (0, 0, 0));
    assert!(r.cache_fill_samples.is_empty() && r.time_of_stay_samples.is_empty());
}

#[test]
fn blocked_links_cache_less() {
    let mut los = SimConfig { caching: true, ..quick() };
    los.traffic = hetnet_core::analysis::TrafficModel::new(1e6, 1000.0, 1e13).unwrap();
    let nlos = SimConfig {
        radio: hetnet_sim::config::RadioParams { los_probability: 0.0, ..los.radio },
        ..los
    };
    let total = |c: &SimConfig| -> f64 {
        (0..4).map(|s| run_trial(c, s).unwrap().cache_fill_samples.iter().sum::<f64>()).sum()
    };
    assert!(total(&nlos) < total(&los));
}

#[test]
fn caching_does_not_add_handover_attempts() {
    let off = quick();
    let on = SimConfig { caching: true, ..off };
    let (mut n_off, mut n_on) = (0, 0);
    for seed in 0..8 {
        n_off += run_trial(&off, seed).unwrap().ho_count;
        n_on += run_trial(&on, seed).unwrap().ho_count;
    }
    assert!(n_on <= n_off, "{n_on} > {n_off}");
}

#[test]
fn diametral_pass_through_small_cell_fails_once() {
    // The stay inside an isolated cell is a few seconds, well under 10 s.
    let cfg = noiseless(10.0, 12.0);
    let (r, _) = pass(&cfg, 80.0, 0.0);
    assert_eq!(r.ho_count, 1);
    assert_eq!(r.hof_count, 1);
    assert_eq!(r.time_of_stay_samples.len(), 1);
}

#[test]
fn golden_single_pass_trace() {
    let cfg = noiseless(10.0, 12.0);
    let (_, events) = pass(&cfg, 80.0, 0.0);
    let got: Vec<String> = events.iter().map(|e| e.to_string()).collect();
    let want = include_str!("golden/single_pass.trace");
    assert_eq!(got, want.lines().collect::<Vec<_>>());
}

#[test]
fn path_missing_every_beam_ignores_caching() {
    // Along 30°/210° the path stays between the beams.
    let off = noiseless(1.0, 12.0);
    let on = SimConfig { caching: true, ..off };
    let heading = 30f64.to_radians();
    let (a, ea) = pass(&off, 80.0, heading);
    let (b, eb) = pass(&on, 80.0, heading);
    assert_eq!(a.ho_count, b.ho_count);
    assert_eq!(a.hof_count, b.hof_count);
    assert_eq!(ea, eb);
    assert!(b.cache_fill_samples.is_empty());
}

#[test]
fn path_through_a_beam_fills_the_cache() {
    let cfg = SimConfig {
        caching: true,
        ..noiseless(1.0, 12.0)
    };
    let (r, _) = pass(&cfg, 80.0, -5f64.to_radians());
    assert!(r.cache_fill_samples.iter().any(|&b| b > 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cache_stays_within_capacity(seed in 0u64..1000, psi_exp in 6.0f64..11.0) {
        let mut cfg = SimConfig { caching: true, mue_count: 2, frame_length: 10.0, ..SimConfig::default() };
        cfg.traffic = hetnet_core::analysis::TrafficModel::new(1e6, 1000.0, 1e6 * (10f64.powf(psi_exp) / 1e6).floor().max(1.0)).unwrap();
        let topo = hetnet_sim::engine::trial_topology(&cfg, seed).unwrap();
        let env = Environment::new(&topo, &cfg);
        let mut agents: Vec<Agent> = (0..cfg.mue_count).map(|u| Agent::new(u, seed, &env)).collect();
        for n in 0..cfg.steps() {
            for a in agents.iter_mut() {
                a.step(&env, n, None);
                let after = a.trajectory.cache_bits;
                prop_assert!(after >= 0.0 && after <= cfg.traffic.cache_capacity);
            }
        }
        let drain_bound = cfg.traffic.playback_bitrate() * cfg.frame_length;
        for a in agents.iter_mut() {
            a.finish();
            let filled: f64 = a.stats.cache_fills.iter().sum();
            let left = a.trajectory.cache_bits;
            prop_assert!(a.stats.cache_fills.iter().all(|&b| b >= 0.0));
            prop_assert!(left <= filled * (1.0 + 1e-12) + 1e-6);
            prop_assert!(filled - left <= drain_bound * (1.0 + 1e-9) + 1e-6);
        }
    }

    #[test]
    fn hof_rate_is_a_fraction(seed in 0u64..1000) {
        let cfg = SimConfig { mue_count: 2, frame_length: 10.0, ..SimConfig::default() };
        let r = run_trial(&cfg, seed).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.hof_rate));
        prop_assert!(r.hof_count <= r.ho_count);
        prop_assert!(r.time_of_stay_samples.iter().all(|&s| s >= 0.0));
    }
}
