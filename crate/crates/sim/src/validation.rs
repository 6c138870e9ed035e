//! Monte Carlo experiments that cross-check the closed-form results.

use std::f64::consts::{PI, TAU};

use hetnet_core::geometry::{BeamLayout, Point2D};
use hetnet_core::radio::{self, LinkBudget, PathLossParams};
use rand::Rng;
use serde::Serialize;

use crate::error::{Result, SimError};
use crate::rng;

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(SimError::EmptySamples);
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(SimError::Config(vec!["samples contain NaN".into()]));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.sorted.partition_point(|&x| x <= t) as f64 / self.sorted.len() as f64
    }

    /// Kolmogorov–Smirnov distance to a continuous distribution function.
    pub fn ks_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }
}

/// Intersection parameter `s ≥ 0` of the ray `p + s·u` with the half-line
/// from the origin along `edge`, if any.
fn ray_hits_edge(p: Point2D, heading: f64, edge: f64) -> Option<f64> {
    let (ux, uy) = (heading.cos(), heading.sin());
    let (ex, ey) = (edge.cos(), edge.sin());
    // Solve s·u − t·e = −p.
    let det = -ux * ey + ex * uy;
    if det.abs() < 1e-15 {
        return None;
    }
    let s = (p.x * ey - ex * p.y) / det;
    let t = (p.x * uy - ux * p.y) / det;
    (s >= 0.0 && t >= 0.0).then_some(s)
}

/// Caching durations of users starting `r` metres out on the trailing edge
/// of a beam of width `beam_width`, with headings uniform over the range
/// that reaches the leading edge.
pub fn beam_crossing_durations(r: f64, speed: f64, beam_width: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut g = rng::stream(seed, 0xc0);
    let start = Point2D::from_polar(r, 0.0);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let heading = beam_width + (PI - beam_width) * g.random::<f64>();
        if let Some(s) = ray_hits_edge(start, heading, beam_width) {
            out.push(s / speed);
        }
    }
    out
}

fn on_beam(layout: &BeamLayout, p: &Point2D) -> bool {
    layout.beam_at_azimuth(p.azimuth()).is_some()
}

fn segment_crosses_edge(a: Point2D, b: Point2D, edge: f64, reach: f64) -> bool {
    let (ex, ey) = (reach * edge.cos(), reach * edge.sin());
    let cross = |ox: f64, oy: f64, px: f64, py: f64| ox * py - oy * px;
    let d1 = cross(ex, ey, a.x, a.y);
    let d2 = cross(ex, ey, b.x, b.y);
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let d3 = cross(dx, dy, -a.x, -a.y);
    let d4 = cross(dx, dy, ex - a.x, ey - a.y);
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0
}

/// Users entering the cell at a uniform boundary point with a uniform
/// heading on `[0, 2π)`; counts those whose path inside the cell meets a
/// beam. Outward headings only see the entry point.
pub fn coverage_crossings(layout: &BeamLayout, n: usize, seed: u64) -> u64 {
    let mut g = rng::stream(seed, 0xc1);
    let a = layout.cell_radius();
    let mut hits = 0;
    for _ in 0..n {
        let entry = Point2D::from_polar(a, TAU * g.random::<f64>());
        let heading = TAU * g.random::<f64>();
        let inward = -(entry.x * heading.cos() + entry.y * heading.sin()) / a;
        let exit = if inward > 0.0 {
            entry.offset(2.0 * a * inward, heading)
        } else {
            entry
        };
        let covered = on_beam(layout, &entry)
            || on_beam(layout, &exit)
            || (0..layout.n_beams()).any(|i| {
                let lead = layout.leading_edge(i).expect("index in range");
                let trail = layout.trailing_edge(i).expect("index in range");
                segment_crosses_edge(entry, exit, lead, a) || segment_crosses_edge(entry, exit, trail, a)
            });
        if covered {
            hits += 1;
        }
    }
    hits
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleCellOutcome {
    pub crossings: u64,
    pub failures: u64,
    pub time_of_stay: Vec<f64>,
}

impl SingleCellOutcome {
    pub fn frequency(&self) -> f64 {
        self.failures as f64 / self.crossings as f64
    }
}

/// Users handed into an isolated circular cell of radius `a` at a uniform
/// boundary point, heading at a uniform angle to the tangent, and staying
/// until they leave the disk. A stay shorter than `mts` is a failure.
pub fn single_cell_hof(speed: f64, a: f64, mts: f64, n: usize, seed: u64) -> SingleCellOutcome {
    let mut g = rng::stream(seed, 0xc2);
    let mut out = SingleCellOutcome {
        crossings: n as u64,
        failures: 0,
        time_of_stay: Vec::with_capacity(n),
    };
    for _ in 0..n {
        let azimuth = TAU * g.random::<f64>();
        let heading = azimuth + PI / 2.0 + PI * g.random::<f64>();
        let entry = Point2D::from_polar(a, azimuth);
        // Exit where |entry + s·u| = a again.
        let s = -2.0 * (entry.x * heading.cos() + entry.y * heading.sin());
        let stay = s.max(0.0) / speed;
        if stay < mts {
            out.failures += 1;
        }
        out.time_of_stay.push(stay);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathAccrual {
    pub bits: f64,
    pub duration: f64,
}

impl PathAccrual {
    pub fn mean_rate(&self) -> f64 {
        self.bits / self.duration
    }
}

/// Bits accrued at the instantaneous noise-limited rate while stepping
/// from `r` metres out on the trailing edge of a beam, heading `theta_hat`
/// from that edge, until the leading edge is reached.
pub fn path_accrual(
    r: f64,
    theta_hat: f64,
    speed: f64,
    beam_width: f64,
    link: &LinkBudget,
    channel: &PathLossParams,
    dt: f64,
) -> Option<PathAccrual> {
    let start = Point2D::from_polar(r, 0.0);
    let length = ray_hits_edge(start, theta_hat, beam_width)?;
    let duration = length / speed;
    let steps = (duration / dt).ceil() as u64;
    let mut bits = 0.0;
    for i in 0..steps {
        let t0 = i as f64 * dt;
        let h = dt.min(duration - t0);
        let p = start.offset(speed * (t0 + 0.5 * h), theta_hat);
        let d = p.norm().max(channel.reference_distance);
        bits += radio::instantaneous_rate(d, link, channel).ok()? * h;
    }
    Some(PathAccrual { bits, duration })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_samples_rejected() {
        assert!(matches!(EmpiricalCdf::new(vec![]), Err(SimError::EmptySamples)));
    }

    #[test]
    fn single_sample_is_a_step() {
        let e = EmpiricalCdf::new(vec![2.0]).unwrap();
        assert_eq!(e.eval(1.999), 0.0);
        assert_eq!(e.eval(2.0), 1.0);
        assert_eq!(e.eval(5.0), 1.0);
    }

    #[test]
    fn order_does_not_matter() {
        let a = EmpiricalCdf::new(vec![3.0, 1.0, 2.0, 2.0]).unwrap();
        let b = EmpiricalCdf::new(vec![2.0, 2.0, 1.0, 3.0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.eval(2.0), 0.75);
    }

    #[test]
    fn ks_of_uniform_grid() {
        let e = EmpiricalCdf::new((0..10).map(|i| i as f64 / 10.0).collect()).unwrap();
        let ks = e.ks_distance(|x| x.clamp(0.0, 1.0));
        assert!((ks - 0.1).abs() < 1e-12);
    }

    #[test]
    fn edge_hit_matches_perpendicular_distance() {
        let w = 10f64.to_radians();
        let s = ray_hits_edge(Point2D::from_polar(10.0, 0.0), PI / 2.0 + w, w).unwrap();
        assert!((s - 10.0 * w.sin()).abs() < 1e-12);
        assert!(ray_hits_edge(Point2D::from_polar(10.0, 0.0), -0.5, w).is_none());
    }

    #[test]
    fn diametral_chord_is_longest() {
        let out = single_cell_hof(1.0, 30.0, 0.0, 1000, 1);
        assert!(out.time_of_stay.iter().all(|&s| (0.0..=60.0 + 1e-9).contains(&s)));
    }

    #[test]
    fn accrual_duration_matches_crossing() {
        let ch = PathLossParams::mmw_los();
        let link = LinkBudget::mmw_table_default(&ch);
        let w = 10f64.to_radians();
        let a = path_accrual(20.0, PI / 2.0 + w, 16.0, w, &link, &ch, 1e-4).unwrap();
        assert!((a.duration - 20.0 * w.sin() / 16.0).abs() < 1e-12);
        assert!(a.mean_rate() > 0.0);
    }
}
