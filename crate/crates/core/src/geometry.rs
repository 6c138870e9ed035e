//! Planar geometry of fixed-azimuth mmW beams, straight-line trajectories and
//! circular cells.
//!
//! Every small cell sits at the origin of its own frame. Beam `i` of a
//! [`BeamLayout`] is the angular sector whose *leading edge* lies at azimuth
//! `base_azimuth + 2πi/N` and whose *trailing edge* lies one beam width
//! clockwise of it. A user that enters a beam through its trailing edge
//! caches content until it leaves through the leading edge.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::numeric::Clamped;

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn signed_angle(theta: f64) -> f64 {
    let t = normalize_angle(theta);
    if t > PI {
        t - TAU
    } else {
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        ensure(x.is_finite(), "x", x, "finite coordinate")?;
        ensure(y.is_finite(), "y", y, "finite coordinate")?;
        Ok(Point2D { x, y })
    }

    pub fn from_polar(radius: f64, azimuth: f64) -> Self {
        Point2D {
            x: radius * azimuth.cos(),
            y: radius * azimuth.sin(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn azimuth(&self) -> f64 {
        normalize_angle(self.y.atan2(self.x))
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn offset(&self, distance: f64, direction: f64) -> Point2D {
        Point2D {
            x: self.x + distance * direction.cos(),
            y: self.y + distance * direction.sin(),
        }
    }

    /// Coordinates relative to `origin`.
    pub fn relative_to(&self, origin: &Point2D) -> Point2D {
        Point2D {
            x: self.x - origin.x,
            y: self.y - origin.y,
        }
    }
}

/// `N` equally spaced beams of equal width around a small cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamLayout {
    n_beams: usize,
    beam_width: f64,
    base_azimuth: f64,
    cell_radius: f64,
}

impl BeamLayout {
    pub fn new(n_beams: usize, beam_width: f64, base_azimuth: f64, cell_radius: f64) -> Result<Self> {
        ensure(n_beams >= 1, "n_beams", n_beams as f64, "n_beams >= 1")?;
        ensure(
            beam_width > 0.0 && beam_width < TAU,
            "beam_width",
            beam_width,
            "0 < beam_width < 2π",
        )?;
        // A relative slack absorbs rounding in e.g. 3 · (2π/3).
        ensure(
            n_beams as f64 * beam_width <= TAU * (1.0 + 1e-12),
            "n_beams * beam_width",
            n_beams as f64 * beam_width,
            "n_beams * beam_width <= 2π",
        )?;
        ensure(base_azimuth.is_finite(), "base_azimuth", base_azimuth, "finite angle")?;
        ensure(
            cell_radius > 0.0 && cell_radius.is_finite(),
            "cell_radius",
            cell_radius,
            "cell_radius > 0",
        )?;
        Ok(BeamLayout {
            n_beams,
            beam_width,
            base_azimuth: normalize_angle(base_azimuth),
            cell_radius,
        })
    }

    pub fn n_beams(&self) -> usize {
        self.n_beams
    }

    pub fn beam_width(&self) -> f64 {
        self.beam_width
    }

    pub fn base_azimuth(&self) -> f64 {
        self.base_azimuth
    }

    pub fn cell_radius(&self) -> f64 {
        self.cell_radius
    }

    /// Angular spacing between consecutive leading edges.
    pub fn spacing(&self) -> f64 {
        TAU / self.n_beams as f64
    }

    fn check_index(&self, beam_index: usize) -> Result<()> {
        ensure(
            beam_index < self.n_beams,
            "beam_index",
            beam_index as f64,
            "beam_index < n_beams",
        )
    }

    /// Azimuth of the leading edge (θ₀) of beam `beam_index`.
    pub fn leading_edge(&self, beam_index: usize) -> Result<f64> {
        self.check_index(beam_index)?;
        Ok(normalize_angle(self.base_azimuth + beam_index as f64 * self.spacing()))
    }

    /// Azimuth of the trailing edge (θ₀ − θ_k) of beam `beam_index`.
    pub fn trailing_edge(&self, beam_index: usize) -> Result<f64> {
        Ok(normalize_angle(self.leading_edge(beam_index)? - self.beam_width))
    }

    /// Index of the beam whose sector contains azimuth `theta`, ignoring range.
    pub fn beam_at_azimuth(&self, theta: f64) -> Option<usize> {
        // Measured counter-clockwise from the trailing edge of beam 0.
        let from_trailing = normalize_angle(theta - self.base_azimuth + self.beam_width);
        let spacing = self.spacing();
        let index = (from_trailing / spacing).floor() as usize;
        let within = from_trailing - index as f64 * spacing;
        (within < self.beam_width).then_some(index % self.n_beams)
    }

    /// Beam covering `point` (relative to the cell centre), if it lies inside
    /// both a beam sector and the cell radius.
    pub fn beam_covering(&self, point: &Point2D) -> Option<usize> {
        let r2 = point.norm_sq();
        if r2 > self.cell_radius * self.cell_radius {
            return None;
        }
        if r2 == 0.0 {
            return Some(0);
        }
        self.beam_at_azimuth(point.azimuth())
    }
}

/// A straight-line trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub origin: Point2D,
    direction: f64,
    speed: f64,
}

impl Ray {
    pub fn new(origin: Point2D, direction: f64, speed: f64) -> Result<Self> {
        ensure(direction.is_finite(), "direction", direction, "finite angle")?;
        ensure(speed > 0.0 && speed.is_finite(), "speed", speed, "speed > 0")?;
        Ok(Ray {
            origin,
            direction: normalize_angle(direction),
            speed,
        })
    }

    pub fn direction(&self) -> f64 {
        self.direction
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn position_at(&self, t: f64) -> Point2D {
        self.origin.offset(self.speed * t, self.direction)
    }
}

/// Probability that a user entering the cell boundary at a uniform point,
/// heading in a direction uniform over `[0, 2π)`, passes through a mmW beam.
///
/// Entry points on a beam arc count as covered outright; otherwise the user
/// must head into the angle subtended by the arc outside its own inter-beam
/// gap, which is `(1 − 1/N)π + θ/2`.
pub fn coverage_probability(layout: &BeamLayout) -> Result<Clamped> {
    let n = layout.n_beams() as f64;
    let theta = layout.beam_width();
    ensure(n >= 2.0, "n_beams", n, "n_beams >= 2")?;
    let on_arc = n * theta / TAU;
    let via_gap = 0.5 * (1.0 - 1.0 / n) + theta / (2.0 * TAU);
    Ok(Clamped::unit(on_arc + (1.0 - on_arc) * via_gap))
}

/// Perpendicular distance from `pos` to the leading edge line of a beam.
///
/// For a user on the trailing edge this is the shortest path across the
/// beam. Written as `|x sinθ₀ − y cosθ₀|`, which has no pole at θ₀ = π/2.
pub fn min_crossing_distance(pos: &Point2D, layout: &BeamLayout, beam_index: usize) -> Result<f64> {
    if pos.norm_sq() == 0.0 {
        return Err(Error::DegenerateGeometry("position coincides with the cell centre"));
    }
    let theta0 = layout.leading_edge(beam_index)?;
    Ok((pos.x * theta0.sin() - pos.y * theta0.cos()).abs())
}

/// Distance travelled from `pos` along `ray_direction` until the leading edge
/// of the beam is reached.
///
/// Equivalent to `(y − x tanθ₀)/(tanθ₀ cosθ_u − sinθ_u)` after multiplying
/// through by `cosθ₀`.
pub fn crossing_length(
    pos: &Point2D,
    ray_direction: f64,
    layout: &BeamLayout,
    beam_index: usize,
) -> Result<f64> {
    let theta0 = layout.leading_edge(beam_index)?;
    let (s0, c0) = theta0.sin_cos();
    let numerator = pos.y * c0 - pos.x * s0;
    let denominator = (theta0 - ray_direction).sin();
    if denominator.abs() <= 1e-12 {
        return Err(Error::NoCrossing("trajectory parallel to the leading edge"));
    }
    let length = numerator / denominator;
    if length < 0.0 {
        return Err(Error::NoCrossing("leading edge lies behind the trajectory"));
    }
    let hit = pos.offset(length, ray_direction);
    // The edge is a half-line from the cell centre.
    if hit.x * c0 + hit.y * s0 < -1e-9 * (1.0 + pos.norm()) {
        return Err(Error::NoCrossing("trajectory meets the edge line behind the cell centre"));
    }
    Ok(length)
}

/// Density of the length of a chord with one fixed endpoint and the chord
/// angle uniform over `[0, π]`.
pub fn chord_length_pdf(d: f64, cell_radius: f64) -> Result<f64> {
    ensure(cell_radius > 0.0, "cell_radius", cell_radius, "cell_radius > 0")?;
    ensure(
        (0.0..2.0 * cell_radius).contains(&d),
        "chord length",
        d,
        "0 <= d < 2a",
    )?;
    let diameter = 2.0 * cell_radius;
    Ok(2.0 / (PI * ((diameter - d) * (diameter + d)).sqrt()))
}

/// Distribution function matching [`chord_length_pdf`]: `(2/π) arcsin(d/2a)`.
pub fn chord_length_cdf(d: f64, cell_radius: f64) -> Result<f64> {
    ensure(cell_radius > 0.0, "cell_radius", cell_radius, "cell_radius > 0")?;
    ensure(d >= 0.0, "chord length", d, "d >= 0")?;
    Ok((2.0 / PI) * (d / (2.0 * cell_radius)).min(1.0).asin())
}

/// Chord traversed by a user entering a circular cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordCrossing {
    pub length: f64,
    /// Set when the direction is tangent or points out of the disk, in which
    /// case `length` is zero.
    pub degenerate: bool,
}

/// Length of the chord from boundary point `entry` (relative to the cell
/// centre) along `direction`.
pub fn circle_entry_crossing(entry: &Point2D, direction: f64, cell_radius: f64) -> Result<ChordCrossing> {
    ensure(cell_radius > 0.0, "cell_radius", cell_radius, "cell_radius > 0")?;
    let r = entry.norm();
    ensure(
        (r - cell_radius).abs() <= 1e-9 * cell_radius,
        "entry radius",
        r,
        "entry on the cell boundary",
    )?;
    // Second root of |p + s u|² = a² with |p| = a.
    let inward = -(entry.x * direction.cos() + entry.y * direction.sin()) / r;
    let length = 2.0 * cell_radius * inward;
    if length <= 1e-12 * cell_radius {
        Ok(ChordCrossing {
            length: 0.0,
            degenerate: true,
        })
    } else {
        Ok(ChordCrossing {
            length,
            degenerate: false,
        })
    }
}

/// Direction of a chord from `entry` that makes angle `from_tangent ∈ [0, π]`
/// with the counter-clockwise tangent.
pub fn chord_direction(entry: &Point2D, from_tangent: f64) -> f64 {
    normalize_angle(entry.azimuth() + FRAC_PI_2 + from_tangent)
}
