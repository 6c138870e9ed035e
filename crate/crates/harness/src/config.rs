//! Experiment configuration: schema, defaults and validation.
//!
//! The file format is TOML restricted to scalar and numeric-list values.
//! Keys live in dotted sections, written either as `[section]` headers or
//! inline (`handover.ttt = 0.16`). Every key has a default; an empty file is
//! a complete configuration.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use hetnet_core::analysis::TrafficModel;
use hetnet_core::radio::{AntennaPattern, Band, LinkBudget, PathLossParams};
use hetnet_sim::config::{HandoverParams, RadioParams, TopologyParams};
use hetnet_sim::SimConfig;
use sha2::{Digest, Sha256};

use crate::error::HarnessError;

/// Rewrites a simulator validation message in terms of file keys.
fn sim_message(msg: &str) -> String {
    const RENAMES: [(&str, &str); 6] = [
        (
            "topology.beam_width must be positive and beams must not overlap",
            "topology.beam_width_deg must be positive and topology.n_beams × topology.beam_width_deg must not exceed 360",
        ),
        ("radio.los_probability", "mmw.los_probability"),
        ("radio.measurement_margin_db", "microwave.measurement_margin_db"),
        ("frame_length", "simulation.frame_length"),
        ("speed must", "experiment.speeds_kmh entries must"),
        ("dt must", "simulation.dt must"),
    ];
    RENAMES
        .iter()
        .find(|(from, _)| msg.starts_with(from))
        .map_or_else(|| msg.to_string(), |(from, to)| format!("{to}{}", &msg[from.len()..]))
}

/// Where a default value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Simulation parameter table of the reference setup.
    Table,
    /// Stated in the text of the reference setup.
    Setup,
    /// Not given by the reference setup; chosen here.
    Invented,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Table => "table",
            Origin::Setup => "setup",
            Origin::Invented => "invented",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    List(Vec<f64>),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v:?}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::List(v) => {
                f.write_str("[")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x:?}")?;
                }
                f.write_str("]")
            }
            Value::Text(v) => write!(f, "{v:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Int,
    Float,
    Bool,
    List,
    Choice(&'static [&'static str]),
}

struct Entry {
    key: &'static str,
    kind: Kind,
    default: fn() -> Value,
    origin: Origin,
    doc: &'static str,
}

const MODES: &[&str] = &["analysis", "simulation", "compare"];

macro_rules! entry {
    ($key:literal, $kind:ident, $default:expr, $origin:ident, $doc:literal) => {
        Entry {
            key: $key,
            kind: Kind::$kind,
            default: || $default,
            origin: Origin::$origin,
            doc: $doc,
        }
    };
}

#[rustfmt::skip]
const SCHEMA: &[Entry] = &[
    entry!("experiment.seed", Int, Value::Int(1), Invented, "master seed"),
    entry!("experiment.trials", Int, Value::Int(200), Invented, "independent trials per sweep point"),
    Entry { key: "experiment.mode", kind: Kind::Choice(MODES), default: || Value::Text("compare".into()), origin: Origin::Invented, doc: "analysis | simulation | compare" },
    entry!("experiment.speeds_kmh", List, Value::List(vec![3.0, 10.0, 30.0, 45.0, 60.0]), Table, "user speeds, km/h"),

    entry!("topology.sbs_count", Int, Value::Int(50), Table, "number of small cells K"),
    entry!("topology.area_radius", Float, Value::Float(500.0), Setup, "network disk radius, m"),
    entry!("topology.min_intercell_distance", Float, Value::Float(30.0), Setup, "minimum small-cell spacing, m"),
    entry!("topology.n_beams", Int, Value::Int(3), Table, "mmW beams per small cell N_k"),
    entry!("topology.beam_width_deg", Float, Value::Float(10.0), Table, "beam width θ_k, degrees"),
    entry!("topology.beam_reach", Float, Value::Float(50.0), Invented, "radial extent of a beam, m"),

    entry!("mmw.carrier_frequency_ghz", Float, Value::Float(73.0), Table, "carrier f_c, GHz"),
    entry!("mmw.tx_power_dbm", Float, Value::Float(30.0), Table, "small-cell transmit power P_t, dBm"),
    entry!("mmw.bandwidth_ghz", Float, Value::Float(5.0), Table, "bandwidth w, GHz"),
    entry!("mmw.noise_psd_dbm_hz", Float, Value::Float(-174.0), Table, "noise density N_0, dBm/Hz"),
    entry!("mmw.reference_distance", Float, Value::Float(1.0), Table, "path-loss reference distance r_0, m"),
    entry!("mmw.alpha_los", Float, Value::Float(2.0), Table, "LoS path-loss exponent"),
    entry!("mmw.alpha_nlos", Float, Value::Float(3.5), Table, "NLoS path-loss exponent"),
    entry!("mmw.shadowing_los_db", Float, Value::Float(4.0), Invented, "LoS shadowing std, dB"),
    entry!("mmw.shadowing_nlos_db", Float, Value::Float(7.0), Invented, "NLoS shadowing std, dB"),
    entry!("mmw.main_lobe_gain_db", Float, Value::Float(18.0), Table, "G_max, dB"),
    entry!("mmw.side_lobe_gain_db", Float, Value::Float(-2.0), Table, "G_min, dB"),
    entry!("mmw.main_lobe_width_deg", Float, Value::Float(10.0), Table, "main lobe width θ_m, degrees"),
    entry!("mmw.los_probability", Float, Value::Float(1.0), Invented, "probability a cell's mmW link is LoS"),
    entry!("mmw.interference", Bool, Value::Bool(true), Invented, "random-gain interference on the caching link"),

    entry!("microwave.carrier_frequency_ghz", Float, Value::Float(2.0), Invented, "carrier, GHz"),
    entry!("microwave.tx_power_dbm", Float, Value::Float(20.0), Invented, "small-cell transmit power, dBm"),
    entry!("microwave.exponent", Float, Value::Float(3.5), Invented, "path-loss exponent"),
    entry!("microwave.shadowing_db", Float, Value::Float(4.0), Invented, "shadowing std, dB"),
    entry!("microwave.measurement_margin_db", Float, Value::Float(10.0), Invented, "cells this far below the serving threshold are not measured"),

    entry!("handover.search_period", Float, Value::Float(0.2), Invented, "cell search period T_s, s"),
    entry!("handover.ttt", Float, Value::Float(0.16), Invented, "time-to-trigger ΔT, s"),
    entry!("handover.hysteresis_db", Float, Value::Float(3.0), Invented, "handover hysteresis, dB"),
    entry!("handover.mts", Float, Value::Float(1.0), Table, "minimum time of stay t_MTS, s"),
    entry!("handover.filter_window", Float, Value::Float(0.2), Invented, "RSS moving-average window, s"),
    entry!("handover.execution_time", Float, Value::Float(0.05), Invented, "trigger-to-completion delay, s"),
    entry!("handover.serving_threshold_dbm", Float, Value::Float(-80.0), Setup, "small-cell serving threshold, dBm"),

    entry!("traffic.segment_size_mbit", Float, Value::Float(1.0), Table, "segment size B, Mbit"),
    entry!("traffic.play_rate", Float, Value::Float(1000.0), Table, "play rate Q, segments/s"),
    entry!("traffic.cache_capacity_gbit", Float, Value::Float(100.0), Invented, "cache size Ψ, Gbit"),

    entry!("simulation.caching", Bool, Value::Bool(false), Invented, "caching for single-run"),
    entry!("simulation.mue_count", Int, Value::Int(10), Invented, "users per trial"),
    entry!("simulation.frame_length", Float, Value::Float(60.0), Invented, "frame length T, s"),
    entry!("simulation.dt", Float, Value::Float(0.01), Invented, "time step, s"),

    entry!("fig3.distances", List, Value::List(vec![5.0, 10.0, 20.0]), Invented, "initial distances r, m"),
    entry!("fig3.speed_kmh", Float, Value::Float(60.0), Setup, "user speed, km/h"),
    entry!("fig3.t_max", Float, Value::Float(2.0), Invented, "largest t0 on the grid, s"),
    entry!("fig3.points", Int, Value::Int(101), Invented, "grid points over [0, t_max]"),
    entry!("fig3.samples", Int, Value::Int(1_000_000), Invented, "Monte Carlo crossings per distance"),

    entry!("fig4.analysis_distance", Float, Value::Float(20.0), Invented, "initial distance for the analytic cache distance, m"),

    entry!("fig5.distances", List, Value::List(vec![5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0]), Invented, "initial distances r, m"),
    entry!("fig5.theta_u_deg", List, Value::List(vec![20.0, 30.0, 45.0, 60.0]), Invented, "headings from the trailing edge, degrees"),
    entry!("fig5.tx_powers_dbm", List, Value::List(vec![20.0, 27.0, 30.0]), Table, "transmit powers swept, dBm"),
    entry!("fig5.speed_kmh", Float, Value::Float(60.0), Setup, "user speed, km/h"),
    entry!("fig5.sim_dt", Float, Value::Float(1e-4), Invented, "step of the path-accrual simulation, s"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analysis,
    Simulation,
    Compare,
}

impl Mode {
    pub fn analytic(self) -> bool {
        self != Mode::Simulation
    }

    pub fn simulated(self) -> bool {
        self != Mode::Analysis
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "analysis" => Ok(Mode::Analysis),
            "simulation" => Ok(Mode::Simulation),
            "compare" => Ok(Mode::Compare),
            other => Err(format!("unknown mode {other:?}; expected analysis, simulation or compare")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Analysis => "analysis",
            Mode::Simulation => "simulation",
            Mode::Compare => "compare",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Params {
    pub distances: Vec<f64>,
    pub speed: f64,
    pub t_max: f64,
    pub points: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig5Params {
    pub distances: Vec<f64>,
    pub theta_u: Vec<f64>,
    pub tx_powers_dbm: Vec<f64>,
    pub speed: f64,
    pub sim_dt: f64,
}

/// Fully resolved configuration of one harness invocation.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    pub mode: Mode,
    /// Speeds in m/s.
    pub speeds: Vec<f64>,
    pub sim: SimConfig,
    pub mmw_nlos_link: LinkBudget,
    pub fig3: Fig3Params,
    pub fig4_analysis_distance: f64,
    pub fig5: Fig5Params,
    values: BTreeMap<&'static str, (Value, bool)>,
}

impl ExperimentConfig {
    /// Table and setup defaults with the documented invented values.
    pub fn defaults() -> Self {
        validate_config("").expect("defaults are valid")
    }

    /// One line per key: `key = value  # origin[, set]`.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let mut section = "";
        for e in SCHEMA {
            let (value, set) = &self.values[e.key];
            let (sec, name) = e.key.split_once('.').expect("dotted key");
            if sec != section {
                if !section.is_empty() {
                    out.push('\n');
                }
                let _ = writeln!(out, "[{sec}]");
                section = sec;
            }
            let origin = if *set { "user".to_string() } else { e.origin.to_string() };
            let _ = writeln!(out, "{name} = {value}  # {origin}: {}", e.doc);
        }
        out
    }

    /// SHA-256 over the resolved values, independent of file layout.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for e in SCHEMA {
            let (value, _) = &self.values[e.key];
            h.update(format!("{}={}\n", e.key, value).as_bytes());
        }
        h.finalize().iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.values.insert("experiment.seed", (Value::Int(seed as i64), true));
    }

    pub fn set_trials(&mut self, trials: usize) {
        self.trials = trials;
        self.values.insert("experiment.trials", (Value::Int(trials as i64), true));
    }

    pub fn set_mode(&mut self, mode: Mode) {
        self.mode = mode;
        self.values.insert("experiment.mode", (Value::Text(mode.to_string()), true));
    }

    /// Simulator configuration at one speed with caching on or off.
    pub fn sim_at(&self, speed: f64, caching: bool) -> SimConfig {
        SimConfig {
            speed,
            caching,
            ..self.sim
        }
    }

    pub fn los_channel(&self) -> PathLossParams {
        self.sim.radio.mmw
    }

    pub fn nlos_channel(&self) -> PathLossParams {
        self.sim.radio.mmw_nlos
    }

    /// Radius at which the mean microwave RSS meets the serving threshold.
    pub fn microwave_cell_radius(&self) -> f64 {
        let r = &self.sim.radio;
        let mw = &r.microwave;
        let budget = r.microwave_tx_dbm - self.sim.handover.serving_threshold_dbm - mw.reference_loss_db();
        mw.reference_distance * 10f64.powf(budget / (10.0 * mw.exponent))
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, toml::Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            other => out.push((key, other.clone())),
        }
    }
}

fn suggestion(key: &str) -> Option<&'static str> {
    SCHEMA
        .iter()
        .map(|e| (e.key, strsim::jaro_winkler(key, e.key)))
        .filter(|&(_, score)| score > 0.8)
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| k)
}

fn convert(key: &str, kind: Kind, raw: &toml::Value) -> Result<Value, String> {
    let number = |v: &toml::Value| match v {
        toml::Value::Integer(i) => Some(*i as f64),
        toml::Value::Float(f) => Some(*f),
        _ => None,
    };
    match (kind, raw) {
        (Kind::Int, toml::Value::Integer(i)) => Ok(Value::Int(*i)),
        (Kind::Float, v) if number(v).is_some() => Ok(Value::Float(number(v).expect("checked"))),
        (Kind::Bool, toml::Value::Boolean(b)) => Ok(Value::Bool(*b)),
        (Kind::List, toml::Value::Array(items)) => items
            .iter()
            .map(|v| number(v).ok_or_else(|| format!("{key}: list entries must be numbers")))
            .collect::<Result<Vec<_>, _>>()
            .map(Value::List),
        (Kind::Choice(options), toml::Value::String(s)) if options.contains(&s.as_str()) => Ok(Value::Text(s.clone())),
        (Kind::Choice(options), _) => Err(format!("{key}: expected one of {}", options.join(", "))),
        (kind, v) => Err(format!("{key}: expected {}, found {}", kind_name(kind), v.type_str())),
    }
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Int => "an integer",
        Kind::Float => "a number",
        Kind::Bool => "a boolean",
        Kind::List => "a list of numbers",
        Kind::Choice(_) => "a string",
    }
}

struct Reader<'a> {
    values: &'a BTreeMap<&'static str, (Value, bool)>,
}

impl Reader<'_> {
    fn float(&self, key: &str) -> f64 {
        match &self.values[key].0 {
            Value::Float(v) => *v,
            Value::Int(v) => *v as f64,
            other => unreachable!("{key} holds {other:?}"),
        }
    }

    fn int(&self, key: &str) -> i64 {
        match &self.values[key].0 {
            Value::Int(v) => *v,
            other => unreachable!("{key} holds {other:?}"),
        }
    }

    fn flag(&self, key: &str) -> bool {
        matches!(self.values[key].0, Value::Bool(true))
    }

    fn list(&self, key: &str) -> Vec<f64> {
        match &self.values[key].0 {
            Value::List(v) => v.clone(),
            other => unreachable!("{key} holds {other:?}"),
        }
    }

    fn text(&self, key: &str) -> &str {
        match &self.values[key].0 {
            Value::Text(v) => v,
            other => unreachable!("{key} holds {other:?}"),
        }
    }
}

fn kmh(v: f64) -> f64 {
    v / 3.6
}

/// Parses and validates configuration text, applying defaults for every
/// absent key. All problems are reported together.
pub fn validate_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| HarnessError::Config(vec![format!("syntax: {}", e.message())]))?;
    let mut raw = Vec::new();
    flatten("", &table, &mut raw);

    let mut errors = Vec::new();
    let mut values: BTreeMap<&'static str, (Value, bool)> =
        SCHEMA.iter().map(|e| (e.key, ((e.default)(), false))).collect();
    for (key, v) in &raw {
        match SCHEMA.iter().find(|e| e.key == key) {
            None => errors.push(match suggestion(key) {
                Some(s) => format!("{key}: unknown key (did you mean {s}?)"),
                None => format!("{key}: unknown key"),
            }),
            Some(e) => match convert(key, e.kind, v) {
                Ok(value) => {
                    values.insert(e.key, (value, true));
                }
                Err(msg) => errors.push(msg),
            },
        }
    }

    let r = Reader { values: &values };
    let mut check = |ok: bool, msg: &str| {
        if !ok {
            errors.push(msg.to_string());
        }
    };
    check(r.int("experiment.seed") >= 0, "experiment.seed must be non-negative");
    check(r.int("experiment.trials") >= 1, "experiment.trials must be at least 1");
    let speeds = r.list("experiment.speeds_kmh");
    check(
        !speeds.is_empty() && speeds.iter().all(|&v| v > 0.0),
        "experiment.speeds_kmh must be non-empty and positive",
    );
    check(r.int("topology.sbs_count") >= 0, "topology.sbs_count must be non-negative");
    check(r.int("topology.n_beams") >= 2, "topology.n_beams must be at least 2");
    check(r.float("mmw.bandwidth_ghz") > 0.0, "mmw.bandwidth_ghz must be positive");
    check(r.float("mmw.carrier_frequency_ghz") > 0.0, "mmw.carrier_frequency_ghz must be positive");
    check(
        r.float("microwave.carrier_frequency_ghz") > 0.0,
        "microwave.carrier_frequency_ghz must be positive",
    );
    check(r.float("traffic.segment_size_mbit") > 0.0, "traffic.segment_size_mbit must be positive");
    check(r.float("traffic.play_rate") > 0.0, "traffic.play_rate must be positive");
    check(r.float("traffic.cache_capacity_gbit") > 0.0, "traffic.cache_capacity_gbit must be positive");
    check(r.int("simulation.mue_count") >= 0, "simulation.mue_count must be non-negative");
    let f3 = r.list("fig3.distances");
    check(
        !f3.is_empty() && f3.iter().all(|&d| d > 0.0),
        "fig3.distances must be non-empty and positive",
    );
    check(r.float("fig3.speed_kmh") > 0.0, "fig3.speed_kmh must be positive");
    check(r.float("fig3.t_max") > 0.0, "fig3.t_max must be positive");
    check(r.int("fig3.points") >= 2, "fig3.points must be at least 2");
    check(r.int("fig3.samples") >= 1, "fig3.samples must be at least 1");
    check(r.float("fig4.analysis_distance") > 0.0, "fig4.analysis_distance must be positive");
    let theta = r.list("fig5.theta_u_deg");
    let f5 = r.list("fig5.distances");
    check(
        !f5.is_empty() && f5.iter().all(|&d| d >= r.float("mmw.reference_distance")),
        "fig5.distances must be non-empty and at least mmw.reference_distance",
    );
    check(!theta.is_empty(), "fig5.theta_u_deg must be non-empty");
    check(!r.list("fig5.tx_powers_dbm").is_empty(), "fig5.tx_powers_dbm must be non-empty");
    check(r.float("fig5.speed_kmh") > 0.0, "fig5.speed_kmh must be positive");
    check(r.float("fig5.sim_dt") > 0.0, "fig5.sim_dt must be positive");

    let mut model = |what: &str, e: hetnet_core::Error| errors.push(format!("{what}: {e}"));
    let channel = |alpha: &str, shadow: &str, band: Band| {
        PathLossParams::new(
            r.float("mmw.carrier_frequency_ghz").max(f64::MIN_POSITIVE) * 1e9,
            r.float("mmw.reference_distance"),
            r.float(alpha),
            r.float(shadow),
            band,
        )
    };
    let los = channel("mmw.alpha_los", "mmw.shadowing_los_db", Band::MmwLos).map_err(|e| model("mmw LoS channel", e));
    let nlos =
        channel("mmw.alpha_nlos", "mmw.shadowing_nlos_db", Band::MmwNlos).map_err(|e| model("mmw NLoS channel", e));
    let microwave = PathLossParams::new(
        r.float("microwave.carrier_frequency_ghz").max(f64::MIN_POSITIVE) * 1e9,
        1.0,
        r.float("microwave.exponent"),
        r.float("microwave.shadowing_db"),
        Band::Microwave,
    )
    .map_err(|e| model("microwave channel", e));
    let antenna = AntennaPattern::new(
        r.float("mmw.main_lobe_gain_db"),
        r.float("mmw.side_lobe_gain_db"),
        r.float("mmw.main_lobe_width_deg").to_radians(),
    )
    .map_err(|e| model("mmw antenna", e));
    let budget = |ch: &PathLossParams| {
        LinkBudget::new(
            r.float("mmw.tx_power_dbm"),
            r.float("mmw.bandwidth_ghz") * 1e9,
            r.float("mmw.noise_psd_dbm_hz"),
            2.0 * r.float("mmw.main_lobe_gain_db"),
            ch,
        )
    };
    let bandwidth_ok = r.float("mmw.bandwidth_ghz") > 0.0;
    let los_link = los
        .as_ref()
        .ok()
        .filter(|_| bandwidth_ok)
        .map(|ch| budget(ch).map_err(|e| model("mmw link", e)));
    let nlos_link = nlos
        .as_ref()
        .ok()
        .filter(|_| bandwidth_ok)
        .map(|ch| budget(ch).map_err(|e| model("mmw NLoS link", e)));
    let traffic = TrafficModel::new(
        r.float("traffic.segment_size_mbit") * 1e6,
        r.float("traffic.play_rate"),
        r.float("traffic.cache_capacity_gbit") * 1e9,
    )
    .map_err(|e| model("traffic", e));

    let (
        Ok(los),
        Ok(nlos),
        Ok(microwave),
        Ok(antenna),
        Some(Ok(los_link)),
        Some(Ok(nlos_link)),
        Ok(traffic),
        true,
    ) = (los, nlos, microwave, antenna, los_link, nlos_link, traffic, errors.is_empty())
    else {
        return Err(HarnessError::Config(errors));
    };

    let sim = SimConfig {
        topology: TopologyParams {
            sbs_count: r.int("topology.sbs_count") as usize,
            area_radius: r.float("topology.area_radius"),
            min_intercell_distance: r.float("topology.min_intercell_distance"),
            n_beams: r.int("topology.n_beams") as usize,
            beam_width: r.float("topology.beam_width_deg").to_radians(),
            beam_reach: r.float("topology.beam_reach"),
        },
        radio: RadioParams {
            microwave,
            microwave_tx_dbm: r.float("microwave.tx_power_dbm"),
            mmw: los,
            mmw_nlos: nlos,
            los_probability: r.float("mmw.los_probability"),
            mmw_link: los_link,
            antenna,
            interference: r.flag("mmw.interference"),
            measurement_margin_db: r.float("microwave.measurement_margin_db"),
        },
        handover: HandoverParams {
            search_period: r.float("handover.search_period"),
            ttt: r.float("handover.ttt"),
            hysteresis_db: r.float("handover.hysteresis_db"),
            mts: r.float("handover.mts"),
            filter_window: r.float("handover.filter_window"),
            execution_time: r.float("handover.execution_time"),
            serving_threshold_dbm: r.float("handover.serving_threshold_dbm"),
        },
        traffic,
        caching: r.flag("simulation.caching"),
        mue_count: r.int("simulation.mue_count") as usize,
        frame_length: r.float("simulation.frame_length"),
        dt: r.float("simulation.dt"),
        speed: kmh(speeds[0]),
    };
    if let Err(hetnet_sim::SimError::Config(list)) = sim.validate() {
        errors.extend(list.iter().map(|m| sim_message(m)));
    }
    let beam_ok = sim.topology.beam_width > 0.0 && sim.topology.beam_width < std::f64::consts::FRAC_PI_2;
    if !beam_ok {
        errors.push("topology.beam_width_deg must lie in (0, 90)".into());
    }
    if theta.iter().any(|&t| !(t > r.float("topology.beam_width_deg") && t <= 90.0)) {
        errors.push("fig5.theta_u_deg entries must lie in (topology.beam_width_deg, 90]".into());
    }
    if !errors.is_empty() {
        return Err(HarnessError::Config(errors));
    }

    Ok(ExperimentConfig {
        seed: r.int("experiment.seed") as u64,
        trials: r.int("experiment.trials") as usize,
        mode: r.text("experiment.mode").parse().expect("validated choice"),
        speeds: speeds.iter().copied().map(kmh).collect(),
        sim,
        mmw_nlos_link: nlos_link,
        fig3: Fig3Params {
            distances: f3,
            speed: kmh(r.float("fig3.speed_kmh")),
            t_max: r.float("fig3.t_max"),
            points: r.int("fig3.points") as usize,
            samples: r.int("fig3.samples") as usize,
        },
        fig4_analysis_distance: r.float("fig4.analysis_distance"),
        fig5: Fig5Params {
            distances: f5,
            theta_u: theta.iter().map(|t| t.to_radians()).collect(),
            tx_powers_dbm: r.list("fig5.tx_powers_dbm"),
            speed: kmh(r.float("fig5.speed_kmh")),
            sim_dt: r.float("fig5.sim_dt"),
        },
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn errors(text: &str) -> Vec<String> {
        match validate_config(text) {
            Err(HarnessError::Config(e)) => e,
            other => panic!("expected config errors, got {other:?}"),
        }
    }

    #[test]
    fn empty_config_gives_table_defaults() {
        let c = validate_config("").unwrap();
        assert_eq!(c.sim.topology.sbs_count, 50);
        assert_eq!(c.sim.topology.n_beams, 3);
        assert!((c.sim.topology.beam_width - 10f64.to_radians()).abs() < 1e-15);
        assert_eq!(c.sim.radio.mmw_link.tx_power_dbm, 30.0);
        assert_eq!(c.sim.radio.mmw_link.bandwidth, 5e9);
        assert_eq!(c.sim.radio.mmw.exponent, 2.0);
        assert_eq!(c.sim.radio.mmw_nlos.exponent, 3.5);
        assert_eq!(c.sim.handover.mts, 1.0);
        assert_eq!(c.sim.traffic.segment_size, 1e6);
        assert_eq!(c.sim.traffic.play_rate, 1000.0);
        assert_eq!(c.speeds.len(), 5);
        assert_eq!(c.trials, 200);
        assert_eq!(c.mode, Mode::Compare);
    }

    #[test]
    fn echo_labels_every_invented_default() {
        let echo = ExperimentConfig::defaults().echo();
        let mut section = "";
        let mut seen = 0;
        for line in echo.lines() {
            if let Some(s) = line.strip_prefix('[') {
                section = s.trim_end_matches(']');
                continue;
            }
            let Some((name, _)) = line.split_once(" = ") else { continue };
            let key = format!("{section}.{name}");
            let e = SCHEMA.iter().find(|e| e.key == key).unwrap();
            assert!(line.contains(&format!("# {}:", e.origin)), "{line}");
            seen += 1;
        }
        assert_eq!(seen, SCHEMA.len());
        assert!(echo.contains("# invented"));
    }

    #[test]
    fn echo_round_trips() {
        let mut c = validate_config("handover.ttt = 0.1\n[experiment]\nseed = 9").unwrap();
        c.set_trials(7);
        let text: String = c.echo().lines().map(|l| l.split("  #").next().unwrap().to_owned() + "\n").collect();
        let again = validate_config(&text).unwrap();
        assert_eq!(again.hash(), c.hash());
        assert_eq!(again.sim, c.sim);
    }

    #[test]
    fn negative_bandwidth_is_named() {
        let e = errors("mmw.bandwidth_ghz = -5");
        assert!(e.iter().any(|m| m.contains("bandwidth")), "{e:?}");
    }

    #[test]
    fn unknown_key_gets_a_suggestion() {
        let e = errors("[handover]\nhysterisis_db = 2");
        assert_eq!(e, vec!["handover.hysterisis_db: unknown key (did you mean handover.hysteresis_db?)"]);
    }

    #[test]
    fn errors_are_aggregated() {
        let e = errors("experiment.trials = 0\ntraffic.play_rate = -1\nhandover.mts = 0");
        assert!(e.len() >= 3, "{e:?}");
    }

    #[test]
    fn unknown_keys_do_not_hide_other_errors() {
        let e = errors("mmw.bandwidth_ghz = -1\n[handover]\nhysterisis_db = 2");
        assert_eq!(e.len(), 2, "{e:?}");
        assert!(e.iter().any(|m| m.contains("mmw.bandwidth_ghz")));
    }

    #[test]
    fn simulator_errors_name_file_keys() {
        let e = errors("topology.n_beams = 40\nmmw.los_probability = 2\nsimulation.dt = 1");
        assert!(e.iter().any(|m| m.starts_with("topology.beam_width_deg")), "{e:?}");
        assert!(e.iter().any(|m| m.starts_with("mmw.los_probability")), "{e:?}");
        assert!(e.iter().any(|m| m.starts_with("simulation.dt")), "{e:?}");
    }

    #[test]
    fn wrong_type_is_reported() {
        let e = errors("topology.sbs_count = \"many\"\nexperiment.mode = \"fast\"");
        assert_eq!(e.len(), 2, "{e:?}");
    }

    #[test]
    fn hash_ignores_layout() {
        let a = validate_config("[handover]\nttt = 0.1").unwrap();
        let b = validate_config("handover.ttt = 0.1 # same").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), ExperimentConfig::defaults().hash());
    }
}
