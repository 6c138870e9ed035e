//! Monte Carlo mobility simulator for dual-mode small-cell networks.
//!
//! Users move on straight lines through a disk of small cells, measure
//! filtered microwave RSS and hand over under a 3GPP-style search,
//! time-to-trigger and execution sequence. With caching enabled they fill a
//! cache while inside the serving cell's mmW beams and mute cell search
//! while the cache holds more than one time-to-trigger of playback.
//!
//! All randomness derives from a trial seed through per-purpose ChaCha
//! streams, so identical `(config, seed)` pairs give identical results.

pub mod config;
pub mod engine;
pub mod error;
pub mod handover;
pub mod mobility;
pub mod rng;
pub mod topology;
pub mod validation;

pub use config::SimConfig;
pub use engine::{run_trial, Event, ExperimentResult};
pub use error::{Result, SimError};
pub use handover::{CellId, EventKind, HoState, HoStateMachine};
pub use mobility::MueTrajectory;
pub use topology::{generate_topology, NetworkTopology};
pub use validation::EmpiricalCdf;
