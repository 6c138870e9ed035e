//! Analytical core for caching-assisted mobility management in joint
//! microwave / millimeter-wave heterogeneous networks.
//!
//! - [`geometry`]: beam sectors, crossing distances, chord statistics and the
//!   mmW coverage probability of a dual-mode small cell.
//! - [`radio`]: log-distance path loss, sectorized antenna gains, SNR and
//!   Shannon rate.
//! - [`analysis`]: caching-duration distribution, average caching rate,
//!   cache distance, handover-skip factor and handover-failure probability.
//! - [`numeric`]: adaptive quadrature and clamped-value bookkeeping shared by
//!   the modules above.

pub mod analysis;
pub mod error;
pub mod geometry;
pub mod numeric;
pub mod radio;

pub use error::{Error, Result};
pub use numeric::Clamped;
