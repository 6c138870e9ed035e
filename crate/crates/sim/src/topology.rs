//! Small-cell placement.

use std::f64::consts::TAU;

use hetnet_core::geometry::{BeamLayout, Point2D};
use hetnet_core::radio::{LinkBudget, PathLossParams};
use rand::Rng;
use serde::Serialize;

use crate::error::{Result, SimError};
use crate::rng;

/// Upper bound on rejection-sampling draws when placing small cells.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallCell {
    pub position: Point2D,
    pub beams: BeamLayout,
    pub link: LinkBudget,
    /// mmW propagation of this cell's links.
    pub channel: PathLossParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MacroCell {
    pub position: Point2D,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkTopology {
    pub sbs: Vec<SmallCell>,
    pub mbs: MacroCell,
    pub area_radius: f64,
    pub min_intercell_distance: f64,
}

impl NetworkTopology {
    /// Topology from explicit cell positions, for hand-built scenes.
    pub fn from_cells(sbs: Vec<SmallCell>, area_radius: f64) -> Self {
        let min_intercell_distance = pairwise_min_distance(&sbs).unwrap_or(0.0);
        NetworkTopology {
            sbs,
            mbs: MacroCell {
                position: Point2D::ORIGIN,
            },
            area_radius,
            min_intercell_distance,
        }
    }

    pub fn len(&self) -> usize {
        self.sbs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sbs.is_empty()
    }

    /// Mean distance from each small cell to its nearest neighbour.
    pub fn mean_nearest_neighbor_distance(&self) -> Option<f64> {
        if self.sbs.len() < 2 {
            return None;
        }
        let total: f64 = self
            .sbs
            .iter()
            .enumerate()
            .map(|(i, a)| {
                self.sbs
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, b)| a.position.distance(&b.position))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        Some(total / self.sbs.len() as f64)
    }
}

/// Draws each cell's mmW condition: line of sight with probability
/// `los_probability`, otherwise `nlos`.
pub fn assign_channels(
    topology: &mut NetworkTopology,
    seed: u64,
    los: PathLossParams,
    nlos: PathLossParams,
    los_probability: f64,
) {
    let mut rng = rng::stream(seed, rng::CHANNEL_STREAM);
    for cell in &mut topology.sbs {
        let u: f64 = rng.random();
        cell.channel = if u < los_probability { los } else { nlos };
    }
}

fn pairwise_min_distance(cells: &[SmallCell]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, a) in cells.iter().enumerate() {
        for b in &cells[i + 1..] {
            let d = a.position.distance(&b.position);
            best = Some(best.map_or(d, |m| m.min(d)));
        }
    }
    best
}

/// Uniform placement in a disk conditioned on a minimum pairwise distance.
///
/// `beam` supplies the beam count, width and reach; each cell draws its own
/// base azimuth uniformly, which then stays fixed.
pub fn generate_topology(
    seed: u64,
    k: usize,
    area_radius: f64,
    min_dist: f64,
    beam: &BeamLayout,
    link: LinkBudget,
) -> Result<NetworkTopology> {
    if area_radius.is_nan() || area_radius <= 0.0 || min_dist.is_nan() || min_dist < 0.0 {
        return Err(SimError::Config(vec![format!(
            "topology needs area_radius > 0 and min_dist >= 0 (got {area_radius}, {min_dist})"
        )]));
    }
    let mut rng = rng::stream(seed, rng::TOPOLOGY_STREAM);
    let mut sbs: Vec<SmallCell> = Vec::with_capacity(k);
    let mut attempts = 0;
    while sbs.len() < k {
        if attempts == MAX_PLACEMENT_ATTEMPTS {
            return Err(SimError::PackingInfeasible {
                requested: k,
                placed: sbs.len(),
                attempts,
                area_radius,
                min_distance: min_dist,
            });
        }
        attempts += 1;
        let p = Point2D::from_polar(
            area_radius * rng.random::<f64>().sqrt(),
            TAU * rng.random::<f64>(),
        );
        if sbs.iter().all(|c| c.position.distance(&p) >= min_dist) {
            let beams = BeamLayout::new(
                beam.n_beams(),
                beam.beam_width(),
                TAU * rng.random::<f64>(),
                beam.cell_radius(),
            )?;
            sbs.push(SmallCell {
                position: p,
                beams,
                link,
                channel: PathLossParams::mmw_los(),
            });
        }
    }
    Ok(NetworkTopology {
        sbs,
        mbs: MacroCell {
            position: Point2D::ORIGIN,
        },
        area_radius,
        min_intercell_distance: min_dist,
    })
}
