//! Parameters of one simulated experiment.

use hetnet_core::analysis::TrafficModel;
use hetnet_core::radio::{AntennaPattern, LinkBudget, PathLossParams};
use serde::Serialize;

use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TopologyParams {
    pub sbs_count: usize,
    pub area_radius: f64,
    pub min_intercell_distance: f64,
    pub n_beams: usize,
    /// Beam width θ_k, radians.
    pub beam_width: f64,
    /// Radial extent of each mmW beam, metres.
    pub beam_reach: f64,
}

impl Default for TopologyParams {
    fn default() -> Self {
        TopologyParams {
            sbs_count: 50,
            area_radius: 500.0,
            min_intercell_distance: 30.0,
            n_beams: 3,
            beam_width: 10f64.to_radians(),
            beam_reach: 50.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HandoverParams {
    /// Cell-search period T_s, seconds.
    pub search_period: f64,
    /// Time-to-trigger ΔT, seconds.
    pub ttt: f64,
    pub hysteresis_db: f64,
    /// Minimum time of stay t_MTS, seconds.
    pub mts: f64,
    /// Length of the moving-average RSS filter, seconds.
    pub filter_window: f64,
    /// Delay between trigger and completion of a handover, seconds.
    pub execution_time: f64,
    /// Filtered RSS below which a small cell cannot serve, dBm.
    pub serving_threshold_dbm: f64,
}

impl Default for HandoverParams {
    fn default() -> Self {
        HandoverParams {
            search_period: 0.2,
            ttt: 0.16,
            hysteresis_db: 3.0,
            mts: 1.0,
            filter_window: 0.2,
            execution_time: 0.05,
            serving_threshold_dbm: -80.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadioParams {
    /// Microwave channel used for measurements and association.
    pub microwave: PathLossParams,
    pub microwave_tx_dbm: f64,
    /// mmW channel of line-of-sight links.
    pub mmw: PathLossParams,
    /// mmW channel of blocked links.
    pub mmw_nlos: PathLossParams,
    /// Probability that a small cell's mmW link is line of sight.
    pub los_probability: f64,
    pub mmw_link: LinkBudget,
    pub antenna: AntennaPattern,
    /// Add interference from every other small cell to the mmW caching link,
    /// each with a randomly drawn sectorized gain.
    pub interference: bool,
    /// Cells whose mean RSS is this far below the serving threshold are not
    /// measured.
    pub measurement_margin_db: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        let mmw = PathLossParams::mmw_los();
        RadioParams {
            microwave: PathLossParams::microwave(),
            microwave_tx_dbm: 20.0,
            mmw,
            mmw_nlos: PathLossParams::mmw_nlos(),
            los_probability: 1.0,
            mmw_link: LinkBudget::mmw_table_default(&mmw),
            antenna: AntennaPattern::table_default(),
            interference: true,
            measurement_margin_db: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub topology: TopologyParams,
    pub radio: RadioParams,
    pub handover: HandoverParams,
    pub traffic: TrafficModel,
    pub caching: bool,
    pub mue_count: usize,
    /// Frame length T, seconds.
    pub frame_length: f64,
    pub dt: f64,
    pub speed: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            topology: TopologyParams::default(),
            radio: RadioParams::default(),
            handover: HandoverParams::default(),
            traffic: TrafficModel::new(1e6, 1000.0, 1e11).expect("valid defaults"),
            caching: false,
            mue_count: 10,
            frame_length: 60.0,
            dt: 0.01,
            speed: 60.0 / 3.6,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        let mut check = |ok: bool, msg: &str| {
            if !ok {
                errors.push(msg.to_string());
            }
        };
        let t = &self.topology;
        check(t.area_radius > 0.0, "topology.area_radius must be positive");
        check(t.min_intercell_distance >= 0.0, "topology.min_intercell_distance must be non-negative");
        check(t.n_beams >= 1, "topology.n_beams must be at least 1");
        check(
            t.beam_width > 0.0 && t.n_beams as f64 * t.beam_width <= std::f64::consts::TAU,
            "topology.beam_width must be positive and beams must not overlap",
        );
        check(t.beam_reach > 0.0, "topology.beam_reach must be positive");
        let h = &self.handover;
        check(h.search_period > 0.0, "handover.search_period must be positive");
        check(h.ttt >= 0.0, "handover.ttt must be non-negative");
        check(h.hysteresis_db >= 0.0, "handover.hysteresis_db must be non-negative");
        check(h.mts > 0.0, "handover.mts must be positive");
        check(h.filter_window > 0.0, "handover.filter_window must be positive");
        check(h.execution_time >= 0.0, "handover.execution_time must be non-negative");
        check(self.frame_length >= 0.0, "frame_length must be non-negative");
        check(self.speed > 0.0, "speed must be positive");
        check(self.dt > 0.0, "dt must be positive");
        let resolution = h.search_period.min(if h.ttt > 0.0 { h.ttt } else { f64::INFINITY }) / 10.0;
        check(
            self.dt <= resolution * (1.0 + 1e-9),
            "dt must not exceed min(search_period, ttt)/10",
        );
        check(h.filter_window >= self.dt, "handover.filter_window must cover at least one step");
        check(
            (0.0..=1.0).contains(&self.radio.los_probability),
            "radio.los_probability must lie in [0, 1]",
        );
        check(
            self.radio.measurement_margin_db >= 0.0,
            "radio.measurement_margin_db must be non-negative",
        );
        if errors.is_empty() {
            Ok(())
        } else {
            Err(SimError::Config(errors))
        }
    }

    pub fn steps(&self) -> u64 {
        (self.frame_length / self.dt).round() as u64
    }

    /// Number of whole steps covering `seconds`, at least one.
    pub fn steps_for(&self, seconds: f64) -> u64 {
        ((seconds / self.dt).round() as u64).max(1)
    }
}
