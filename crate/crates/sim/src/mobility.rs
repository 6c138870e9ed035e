//! Straight-line user mobility inside the network disk.

use std::f64::consts::{PI, TAU};

use hetnet_core::geometry::{normalize_angle, Point2D};
use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MueTrajectory {
    pub position: Point2D,
    /// Heading θ_u, fixed for the frame.
    pub direction: f64,
    pub speed: f64,
    pub cache_bits: f64,
    pub frame_length: f64,
}

impl MueTrajectory {
    /// Uniform position in the disk with a uniform heading.
    pub fn random<R: Rng>(rng: &mut R, area_radius: f64, speed: f64, frame_length: f64) -> Self {
        let position = Point2D::from_polar(area_radius * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>());
        MueTrajectory {
            position,
            direction: TAU * rng.random::<f64>(),
            speed,
            cache_bits: 0.0,
            frame_length,
        }
    }

    pub fn advance(&mut self, dt: f64) {
        self.position = self.position.offset(self.speed * dt, self.direction);
    }

    /// Moves the user to a uniform point of the boundary heading inward,
    /// with the angle to the tangent uniform on `(0, π)`.
    pub fn respawn<R: Rng>(&mut self, rng: &mut R, area_radius: f64) {
        let azimuth = TAU * rng.random::<f64>();
        let from_tangent = PI * rng.random::<f64>();
        // Slightly inside so the next step does not register another exit.
        self.position = Point2D::from_polar(area_radius * (1.0 - 1e-9), azimuth);
        self.direction = normalize_angle(azimuth + PI / 2.0 + from_tangent);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn respawn_points_inward() {
        let mut r = rng::stream(3, 9);
        let mut m = MueTrajectory::random(&mut r, 500.0, 10.0, 60.0);
        for _ in 0..1000 {
            m.respawn(&mut r, 500.0);
            let radial = m.position.x * m.direction.cos() + m.position.y * m.direction.sin();
            assert!(radial <= 0.0);
            assert!(m.position.norm() < 500.0);
        }
    }

    #[test]
    fn advance_moves_speed_times_dt() {
        let mut r = rng::stream(1, 1);
        let mut m = MueTrajectory::random(&mut r, 500.0, 16.0, 60.0);
        let p = m.position;
        m.advance(0.5);
        assert!((m.position.distance(&p) - 8.0).abs() < 1e-12);
    }
}
