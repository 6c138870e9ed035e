//! Closed-form caching and handover results for a user crossing one mmW beam.
//!
//! A [`CachingScenario`] places the user on the trailing edge of a beam at
//! distance `r` from the small cell, moving at speed `v` in direction `θ_u`.
//! The relative heading `θ̂ = θ_u − θ₀ + θ_k` is measured from the trailing
//! edge; the user reaches the leading edge only for `θ̂ ∈ (θ_k, π)`.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::geometry::{self, normalize_angle, BeamLayout, Point2D};
use crate::numeric::{self, Clamped, Tolerance};
use crate::radio::{self, LinkBudget, PathLossParams};

/// Number of stratified heading samples behind [`expected_cache_distance`].
pub const CACHE_DISTANCE_SAMPLES: usize = 100_000;

/// Survival level at which the expected-duration integral is truncated.
pub const SURVIVAL_CUTOFF: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CachingScenario {
    initial_distance: f64,
    speed: f64,
    direction: f64,
    beam: BeamLayout,
    beam_index: usize,
    link: LinkBudget,
    channel: PathLossParams,
    theta_hat: f64,
}

impl CachingScenario {
    pub fn new(
        initial_distance: f64,
        speed: f64,
        direction: f64,
        beam: BeamLayout,
        beam_index: usize,
        link: LinkBudget,
        channel: PathLossParams,
    ) -> Result<Self> {
        ensure(
            initial_distance > 0.0 && initial_distance.is_finite(),
            "initial_distance",
            initial_distance,
            "initial_distance > 0",
        )?;
        ensure(speed > 0.0 && speed.is_finite(), "speed", speed, "speed > 0")?;
        ensure(direction.is_finite(), "direction", direction, "finite angle")?;
        let trailing = beam.trailing_edge(beam_index)?;
        let direction = normalize_angle(direction);
        Ok(CachingScenario {
            initial_distance,
            speed,
            direction,
            beam,
            beam_index,
            link,
            channel,
            theta_hat: normalize_angle(direction - trailing),
        })
    }

    /// Convenience constructor taking the heading relative to the trailing
    /// edge instead of an absolute direction.
    pub fn with_relative_heading(
        initial_distance: f64,
        speed: f64,
        theta_hat: f64,
        beam: BeamLayout,
        beam_index: usize,
        link: LinkBudget,
        channel: PathLossParams,
    ) -> Result<Self> {
        let trailing = beam.trailing_edge(beam_index)?;
        Self::new(
            initial_distance,
            speed,
            trailing + theta_hat,
            beam,
            beam_index,
            link,
            channel,
        )
    }

    pub fn initial_distance(&self) -> f64 {
        self.initial_distance
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn direction(&self) -> f64 {
        self.direction
    }

    pub fn beam(&self) -> &BeamLayout {
        &self.beam
    }

    pub fn beam_index(&self) -> usize {
        self.beam_index
    }

    pub fn link(&self) -> &LinkBudget {
        &self.link
    }

    pub fn channel(&self) -> &PathLossParams {
        &self.channel
    }

    pub fn theta_hat(&self) -> f64 {
        self.theta_hat
    }

    pub fn beam_width(&self) -> f64 {
        self.beam.beam_width()
    }

    /// Same scenario with a different heading.
    pub fn with_theta_hat(&self, theta_hat: f64) -> Self {
        let trailing = self.beam.trailing_edge(self.beam_index).expect("index validated");
        let direction = normalize_angle(trailing + theta_hat);
        CachingScenario {
            direction,
            theta_hat: normalize_angle(direction - trailing),
            ..*self
        }
    }

    /// Same scenario at a different starting distance.
    pub fn with_initial_distance(&self, initial_distance: f64) -> Result<Self> {
        ensure(
            initial_distance > 0.0,
            "initial_distance",
            initial_distance,
            "initial_distance > 0",
        )?;
        Ok(CachingScenario {
            initial_distance,
            ..*self
        })
    }

    /// Starting point on the trailing edge, relative to the small cell.
    pub fn position(&self) -> Point2D {
        let trailing = self.beam.trailing_edge(self.beam_index).expect("index validated");
        Point2D::from_polar(self.initial_distance, trailing)
    }

    pub fn min_crossing_distance(&self) -> f64 {
        geometry::min_crossing_distance(&self.position(), &self.beam, self.beam_index)
            .expect("initial distance is positive")
    }

    pub fn crossing_length(&self) -> Result<f64> {
        geometry::crossing_length(&self.position(), self.direction, &self.beam, self.beam_index)
    }

    pub fn caching_duration(&self) -> Result<f64> {
        Ok(self.crossing_length()? / self.speed)
    }

    /// Whether the heading reaches the leading edge at all.
    pub fn crosses(&self) -> bool {
        self.theta_hat > self.beam_width() && self.theta_hat < PI
    }

    fn coverage(&self) -> Result<f64> {
        Ok(geometry::coverage_probability(&self.beam)?.value)
    }
}

/// Distribution function of the caching duration over headings uniform on
/// the admissible range of width `π − θ_k`.
pub fn caching_duration_cdf(t0: f64, scenario: &CachingScenario) -> Result<Clamped> {
    ensure(t0 >= 0.0, "t0", t0, "t0 >= 0")?;
    let r_min = scenario.min_crossing_distance();
    let reach = scenario.speed() * t0;
    if reach < r_min || reach == 0.0 {
        return Ok(Clamped::unit(0.0));
    }
    let to_reach = (r_min / reach).min(1.0).acos();
    let to_apex = (r_min / scenario.initial_distance()).min(1.0).acos();
    let raw = (to_reach + to_apex.min(to_reach)) / (PI - scenario.beam_width());
    Ok(Clamped::unit(raw))
}

/// Rate of caching over one beam crossing, bit/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CachingRate {
    /// Coverage-weighted rate `P^c · R^c`.
    pub value: f64,
    /// `R^c`, the per-crossing rate before the coverage factor.
    pub conditional: f64,
    pub coverage: f64,
    pub closed_form: bool,
}

struct RateTerms {
    f_start: f64,
    f_end: f64,
    delta1: f64,
    /// `w r sinθ̂ / r^c`, i.e. δ₂ without the coverage factor.
    delta2: f64,
}

fn rate_terms(scenario: &CachingScenario) -> Result<RateTerms> {
    let theta_k = scenario.beam_width();
    let theta_hat = scenario.theta_hat();
    ensure(
        theta_hat > theta_k && theta_hat <= FRAC_PI_2,
        "theta_hat",
        theta_hat,
        "theta_k < theta_hat <= π/2",
    )?;
    let r = scenario.initial_distance();
    ensure(
        r >= scenario.channel().reference_distance,
        "initial_distance",
        r,
        "initial_distance >= reference_distance",
    )?;
    let perpendicular = r * theta_hat.sin();
    let crossing = scenario.crossing_length()?;
    Ok(RateTerms {
        f_start: theta_hat.sin(),
        f_end: (theta_hat - theta_k).sin(),
        delta1: scenario.link().snr_constant() * perpendicular.powf(-scenario.channel().exponent),
        delta2: scenario.link().bandwidth * perpendicular / crossing,
    })
}

/// Average achievable caching rate `P^c(N, θ) · R^c`.
///
/// `R^c` integrates the Shannon rate over the distance to the small cell
/// between the start and end of the crossing, normalised by the crossing
/// length. For `α = 2` the integral has the antiderivative
/// `2√δ₁ atan(√δ₁ f) − ln(1 + δ₁f²)/f` in `f = sin(θ̂ − θ)`; other exponents
/// are integrated numerically. Headings are restricted to `θ_k < θ̂ ≤ π/2`,
/// where the distance to the cell grows monotonically along the path.
pub fn average_caching_rate(scenario: &CachingScenario) -> Result<CachingRate> {
    let coverage = scenario.coverage()?;
    let terms = rate_terms(scenario)?;
    let alpha = scenario.channel().exponent;
    let (conditional, closed_form) = if (alpha - 2.0).abs() < 1e-12 {
        let s = terms.delta1.sqrt();
        let antiderivative = |f: f64| 2.0 * s * (s * f).atan() - (terms.delta1 * f * f).ln_1p() / f;
        let bracket = antiderivative(terms.f_start) - antiderivative(terms.f_end);
        (terms.delta2 * bracket / LN_2, true)
    } else {
        (radial_rate_quadrature(scenario)?, false)
    };
    Ok(CachingRate {
        value: coverage * conditional,
        conditional,
        coverage,
        closed_form,
    })
}

/// `R^c` by adaptive quadrature over the distance to the small cell, valid
/// for any path-loss exponent.
pub fn radial_rate_quadrature(scenario: &CachingScenario) -> Result<f64> {
    rate_terms(scenario)?;
    let r = scenario.initial_distance();
    let theta_hat = scenario.theta_hat();
    let end = r * theta_hat.sin() / (theta_hat - scenario.beam_width()).sin();
    let crossing = scenario.crossing_length()?;
    let link = *scenario.link();
    let k = link.snr_constant();
    let alpha = scenario.channel().exponent;
    // Integrate bits-per-second-per-Hz to keep magnitudes near unity.
    let q = numeric::integrate(
        |rho: f64| (k * rho.powf(-alpha)).ln_1p() / LN_2,
        r,
        end,
        Tolerance::default(),
    )?;
    Ok(link.bandwidth * q.value / crossing)
}

/// Mean Shannon rate experienced along the straight path from the trailing
/// edge to the leading edge (any crossing heading). Distances below the
/// reference distance are held at the reference distance.
pub fn path_average_rate(scenario: &CachingScenario) -> Result<f64> {
    let crossing = scenario.crossing_length()?;
    Ok(path_bits_per_meter(scenario, crossing)? / crossing)
}

/// `∫ rate ds` over the first `length` metres of the path, in bit·m/s.
fn path_bits_per_meter(scenario: &CachingScenario, length: f64) -> Result<f64> {
    let start = scenario.position();
    let (dx, dy) = (scenario.direction().cos(), scenario.direction().sin());
    let link = *scenario.link();
    let channel = *scenario.channel();
    let k = link.snr_constant();
    let r0 = channel.reference_distance;
    // Closest approach splits the integrand at its peak.
    let closest = (-(start.x * dx + start.y * dy)).clamp(0.0, length);
    let spectral = |s: f64| {
        let rho = (start.x + s * dx).hypot(start.y + s * dy).max(r0);
        (k * rho.powf(-channel.exponent)).ln_1p() / LN_2
    };
    let tol = Tolerance {
        abs_tol: 1e-10,
        rel_tol: 1e-11,
        max_subdivisions: 4000,
    };
    let mut total = 0.0;
    for (a, b) in [(0.0, closest), (closest, length)] {
        if b > a {
            total += numeric::integrate(spectral, a, b, tol)?.value;
        }
    }
    Ok(link.bandwidth * total)
}

/// Segments cached from `rate · duration` bits, capped by the cache size.
pub fn cached_segments(rate: f64, duration: f64, traffic: &TrafficModel) -> u64 {
    let bits = (rate * duration).max(0.0);
    let fitted = (bits / traffic.segment_size).floor();
    fitted.min(traffic.capacity_segments() as f64) as u64
}

/// Distance covered while playing back `segments` cached segments.
pub fn cache_distance(segments: u64, speed: f64, traffic: &TrafficModel) -> f64 {
    segments as f64 / traffic.play_rate * speed
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrafficModel {
    /// Bits per video segment.
    pub segment_size: f64,
    /// Segments played per second.
    pub play_rate: f64,
    /// Cache size in bits.
    pub cache_capacity: f64,
}

impl TrafficModel {
    pub fn new(segment_size: f64, play_rate: f64, cache_capacity: f64) -> Result<Self> {
        ensure(segment_size > 0.0, "segment_size", segment_size, "segment_size > 0")?;
        ensure(play_rate > 0.0, "play_rate", play_rate, "play_rate > 0")?;
        ensure(
            cache_capacity > 0.0,
            "cache_capacity",
            cache_capacity,
            "cache_capacity > 0",
        )?;
        let ratio = cache_capacity / segment_size;
        ensure(
            (ratio - ratio.round()).abs() <= 1e-9 * ratio.max(1.0),
            "cache_capacity",
            cache_capacity,
            "cache_capacity a whole number of segments",
        )?;
        Ok(TrafficModel {
            segment_size,
            play_rate,
            cache_capacity,
        })
    }

    pub fn capacity_segments(&self) -> u64 {
        (self.cache_capacity / self.segment_size).round() as u64
    }

    /// Playback drain in bit/s.
    pub fn playback_bitrate(&self) -> f64 {
        self.play_rate * self.segment_size
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalIntegral {
    pub value: f64,
    /// Upper limit where the survival function first fell below the cutoff.
    pub horizon: f64,
}

/// `∫₀^∞ S(t) dt` for a survival function `S = 1 − F`, truncated where
/// `S < 1e-9`.
///
/// `scale` is a characteristic time of the distribution; the horizon is
/// searched by doubling from it and a tail still above the cutoff after
/// `1e15 · scale` is reported as non-convergent. Passing `S` rather than `F`
/// avoids the cancellation in `1 − F` that would otherwise dominate far in
/// the tail.
pub fn survival_integral<S>(survival: S, scale: f64) -> Result<SurvivalIntegral>
where
    S: Fn(f64) -> Result<f64>,
{
    ensure(scale > 0.0, "scale", scale, "scale > 0")?;
    let mut breakpoints = vec![0.0, scale];
    let mut horizon = scale;
    while survival(horizon)? >= SURVIVAL_CUTOFF {
        horizon *= 2.0;
        if horizon > 1e15 * scale {
            return Err(Error::Numeric {
                reason: "survival function tail does not decay below the cutoff",
                estimate: horizon,
                error: survival(horizon)?,
            });
        }
        breakpoints.push(horizon);
    }
    let tol = Tolerance {
        abs_tol: 1e-12,
        rel_tol: 1e-12,
        max_subdivisions: 10_000,
    };
    let mut value = 0.0;
    for w in breakpoints.windows(2) {
        // Evaluation errors cannot escape the closure; NaN aborts the quadrature.
        let q = numeric::integrate(|t| survival(t).unwrap_or(f64::NAN), w[0], w[1], tol)?;
        value += q.value;
    }
    Ok(SurvivalIntegral { value, horizon })
}

/// `1 − F(t0)` for [`caching_duration_cdf`], evaluated without cancellation.
pub fn caching_duration_survival(t0: f64, scenario: &CachingScenario) -> Result<f64> {
    ensure(t0 >= 0.0, "t0", t0, "t0 >= 0")?;
    let r_min = scenario.min_crossing_distance();
    let reach = scenario.speed() * t0;
    if reach < r_min || reach == 0.0 {
        return Ok(1.0);
    }
    let span = PI - scenario.beam_width();
    let x = (r_min / reach).min(1.0);
    let b = (r_min / scenario.initial_distance()).min(1.0);
    // π − θ_k − acos x − min(acos b, acos x), rewritten with acos = π/2 − asin.
    let raw = if x <= b {
        b.asin() - scenario.beam_width() + x.asin()
    } else {
        span - 2.0 * x.acos()
    };
    Ok((raw / span).clamp(0.0, 1.0))
}

/// Expected caching duration from the survival function of
/// [`caching_duration_cdf`]. The duration is heavy-tailed (survival decays
/// like `1/t`), so the result depends on the truncation and the horizon is
/// returned alongside.
pub fn expected_caching_duration(scenario: &CachingScenario) -> Result<SurvivalIntegral> {
    let scale = scenario.min_crossing_distance() / scenario.speed();
    survival_integral(|t| caching_duration_survival(t, scenario), scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CacheDistanceEstimate {
    /// Mean playback distance, metres.
    pub mean: f64,
    /// Mean number of cached segments.
    pub mean_segments: f64,
    /// Fraction of headings that fill the cache.
    pub capacity_bound_fraction: f64,
    pub samples: usize,
}

/// Expected distance travelled on cached content after one beam crossing.
///
/// Headings are taken at the midpoints of equal-probability strata of the
/// admissible range, which are quantiles of the caching-duration
/// distribution. Each heading caches `⌊R̄^c t^c / B⌋` segments (capped by the
/// cache), with `R̄^c` the coverage-weighted path-average rate, and the floor
/// is applied per sample before averaging.
pub fn expected_cache_distance(
    scenario: &CachingScenario,
    traffic: &TrafficModel,
) -> Result<CacheDistanceEstimate> {
    expected_cache_distance_with(scenario, traffic, CACHE_DISTANCE_SAMPLES)
}

pub fn expected_cache_distance_with(
    scenario: &CachingScenario,
    traffic: &TrafficModel,
    samples: usize,
) -> Result<CacheDistanceEstimate> {
    ensure(samples > 0, "samples", samples as f64, "samples > 0")?;
    let coverage = scenario.coverage()?;
    let theta_k = scenario.beam_width();
    let span = PI - theta_k;
    let mut segments_sum = 0.0;
    let mut capped = 0usize;
    for i in 0..samples {
        let theta_hat = theta_k + span * (i as f64 + 0.5) / samples as f64;
        let s = scenario.with_theta_hat(theta_hat);
        let crossing = s.crossing_length()?;
        let duration = crossing / s.speed();
        let bits = coverage * path_bits_per_meter(&s, crossing)? / s.speed();
        let m = cached_segments(bits, 1.0, traffic);
        if m == traffic.capacity_segments() {
            capped += 1;
        }
        debug_assert!(duration > 0.0);
        segments_sum += m as f64;
    }
    let mean_segments = segments_sum / samples as f64;
    Ok(CacheDistanceEstimate {
        mean: cache_distance(1, scenario.speed(), traffic) * mean_segments,
        mean_segments,
        capacity_bound_fraction: capped as f64 / samples as f64,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HofModel {
    pub cell_radius: f64,
    /// Minimum time of stay for a successful handover, seconds.
    pub mts: f64,
    pub mean_intercell_distance: f64,
}

impl HofModel {
    pub fn new(cell_radius: f64, mts: f64, mean_intercell_distance: f64) -> Result<Self> {
        ensure(cell_radius > 0.0, "cell_radius", cell_radius, "cell_radius > 0")?;
        ensure(mts > 0.0, "mts", mts, "mts > 0")?;
        ensure(
            mean_intercell_distance > 0.0,
            "mean_intercell_distance",
            mean_intercell_distance,
            "mean_intercell_distance > 0",
        )?;
        Ok(HofModel {
            cell_radius,
            mts,
            mean_intercell_distance,
        })
    }
}

/// Number of cells passed on cached content without a cell search.
pub fn ho_skip_factor(expected_distance: f64, model: &HofModel) -> u64 {
    (expected_distance.max(0.0) / model.mean_intercell_distance).floor() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HofProbability {
    pub value: f64,
    /// Every chord is shorter than `v · t_MTS`.
    pub saturated: bool,
}

/// Probability that a random chord of the cell is shorter than `v · t_MTS`.
pub fn hof_probability(speed: f64, model: &HofModel) -> Result<HofProbability> {
    ensure(speed >= 0.0, "speed", speed, "speed >= 0")?;
    let required = speed * model.mts;
    let diameter = 2.0 * model.cell_radius;
    if required > diameter {
        return Ok(HofProbability {
            value: 1.0,
            saturated: true,
        });
    }
    Ok(HofProbability {
        value: (2.0 / PI) * (required / diameter).asin(),
        saturated: false,
    })
}

/// Rate at one distance, for callers that want the raw link value.
pub fn rate_at(distance: f64, link: &LinkBudget, channel: &PathLossParams) -> Result<f64> {
    radio::instantaneous_rate(distance, link, channel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radio::PathLossParams;

    pub(crate) fn scenario(r: f64, theta_hat_deg: f64) -> CachingScenario {
        let channel = PathLossParams::mmw_los();
        let beam = BeamLayout::new(3, 10f64.to_radians(), 0.7, 200.0).unwrap();
        CachingScenario::with_relative_heading(
            r,
            60.0 / 3.6,
            theta_hat_deg.to_radians(),
            beam,
            1,
            LinkBudget::mmw_table_default(&channel),
            channel,
        )
        .unwrap()
    }

    #[test]
    fn cdf_zero_at_and_below_min_distance() {
        let s = scenario(10.0, 45.0);
        let r_min = s.min_crossing_distance();
        assert!((r_min - 10.0 * 10f64.to_radians().sin()).abs() < 1e-12);
        let t_min = r_min / s.speed();
        assert_eq!(caching_duration_cdf(t_min, &s).unwrap().value, 0.0);
        assert_eq!(caching_duration_cdf(0.5 * t_min, &s).unwrap().value, 0.0);
        assert_eq!(caching_duration_cdf(0.0, &s).unwrap().value, 0.0);
        assert!(caching_duration_cdf(-1.0, &s).is_err());
    }

    #[test]
    fn cdf_tends_to_one_without_clamping() {
        let s = scenario(10.0, 45.0);
        let far = caching_duration_cdf(1e9, &s).unwrap();
        assert!(!far.was_clamped());
        assert!(1.0 - far.value < 1e-8);
    }

    #[test]
    fn closed_form_requires_outward_heading() {
        assert!(average_caching_rate(&scenario(20.0, 5.0)).is_err());
        assert!(average_caching_rate(&scenario(20.0, 120.0)).is_err());
        assert!(average_caching_rate(&scenario(20.0, 90.0)).is_ok());
    }

    #[test]
    fn closed_form_matches_radial_quadrature() {
        for (r, th) in [(5.0, 15.0), (20.0, 30.0), (50.0, 60.0), (20.0, 89.0), (3.0, 10.5)] {
            let s = scenario(r, th);
            let closed = average_caching_rate(&s).unwrap();
            assert!(closed.closed_form);
            let quad = radial_rate_quadrature(&s).unwrap();
            let rel = (closed.conditional - quad).abs() / quad;
            assert!(rel < 1e-10, "r={r} θ̂={th}: {rel:e}");
        }
    }

    #[test]
    fn nlos_uses_quadrature() {
        let channel = PathLossParams::mmw_nlos();
        let beam = BeamLayout::new(3, 10f64.to_radians(), 0.0, 200.0).unwrap();
        let s = CachingScenario::with_relative_heading(
            20.0,
            16.0,
            0.6,
            beam,
            0,
            LinkBudget::mmw_table_default(&channel),
            channel,
        )
        .unwrap();
        let rate = average_caching_rate(&s).unwrap();
        assert!(!rate.closed_form);
        assert!(rate.value > 0.0);
    }

    #[test]
    fn zero_coverage_factor_zeroes_rate() {
        // P^c is never exactly zero for valid layouts; the product is linear in it.
        let s = scenario(20.0, 30.0);
        let r = average_caching_rate(&s).unwrap();
        assert!((r.value - r.coverage * r.conditional).abs() <= 1e-6 * r.value);
        assert_eq!(0.0 * r.conditional, 0.0);
    }

    #[test]
    fn segments_examples() {
        let t = TrafficModel::new(1e6, 1000.0, 4e6).unwrap();
        assert_eq!(cached_segments(5e6, 0.0, &t), 0);
        assert_eq!(cached_segments(10e6, 1.0, &t), 4);
        let t = TrafficModel::new(1e6, 1000.0, 100e6).unwrap();
        assert_eq!(cached_segments(3.7e6, 1.0, &t), 3);
        assert_eq!(cached_segments(-3.0, 1.0, &t), 0);
    }

    #[test]
    fn cache_distance_examples() {
        let t = TrafficModel::new(1e6, 1000.0, 1e9).unwrap();
        assert_eq!(cache_distance(0, 10.0, &t), 0.0);
        assert!((cache_distance(1000, 10.0, &t) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn traffic_model_validation() {
        assert!(TrafficModel::new(1e6, 1000.0, 2.5e6).is_err());
        assert!(TrafficModel::new(0.0, 1000.0, 1e6).is_err());
        assert!(TrafficModel::new(1e6, -1.0, 1e6).is_err());
    }

    #[test]
    fn skip_factor_floors() {
        let m = HofModel::new(30.0, 1.0, 40.0).unwrap();
        assert_eq!(ho_skip_factor(0.0, &m), 0);
        assert_eq!(ho_skip_factor(2.9 * 40.0, &m), 2);
    }

    #[test]
    fn hof_examples() {
        let m = HofModel::new(30.0, 1.0, 60.0).unwrap();
        assert_eq!(hof_probability(0.0, &m).unwrap().value, 0.0);
        let edge = hof_probability(60.0, &m).unwrap();
        assert!((edge.value - 1.0).abs() < 1e-15 && !edge.saturated);
        let fast = hof_probability(100.0, &m).unwrap();
        assert!(fast.saturated && fast.value == 1.0);
        // (2/π)·asin(16.6667/60), evaluated independently.
        let p = hof_probability(60.0 / 3.6, &m).unwrap().value;
        assert!((p - 0.179_195_780_146).abs() < 1e-9, "{p}");
    }

    #[test]
    fn survival_of_step_is_its_location() {
        let t_star = 2.5;
        let step = |t: f64| Ok(if t >= t_star { 0.0 } else { 1.0 });
        let s = survival_integral(step, 1.0).unwrap();
        assert!((s.value - t_star).abs() < 1e-9, "{}", s.value);
        // Distance equals v · t*.
        assert!((7.0 * s.value - 7.0 * t_star).abs() < 1e-8);
    }

    #[test]
    fn survival_of_exponential() {
        let s = survival_integral(|t: f64| Ok((-t / 3.0).exp()), 3.0).unwrap();
        assert!((s.value - 3.0).abs() < 1e-8);
    }

    #[test]
    fn non_decaying_tail_is_reported() {
        let err = survival_integral(|_| Ok(0.5), 1.0).unwrap_err();
        assert!(matches!(err, Error::Numeric { .. }));
    }

    #[test]
    fn survival_complements_cdf() {
        for (r, th) in [(10.0, 45.0), (3.0, 120.0), (40.0, 15.0)] {
            let s = scenario(r, th);
            let t_min = s.min_crossing_distance() / s.speed();
            for k in [0.5, 1.0, 1.01, 1.5, 3.0, 10.0, 1e3, 1e6] {
                let t = k * t_min;
                let f = caching_duration_cdf(t, &s).unwrap().value;
                let sv = caching_duration_survival(t, &s).unwrap();
                assert!((f + sv - 1.0).abs() < 1e-12, "t={t}: {f} + {sv}");
            }
        }
    }

    #[test]
    fn expected_duration_heavy_tail_truncated() {
        let s = scenario(10.0, 45.0);
        let e = expected_caching_duration(&s).unwrap();
        let scale = s.min_crossing_distance() / s.speed();
        assert!(e.horizon > 1e8 * scale);
        assert!(e.value > scale && e.value < 100.0 * scale, "{e:?}");
    }
}
