//! Adaptive Gauss–Kronrod quadrature and clamped probabilities.

use serde::Serialize;

use crate::error::{Error, Result};

/// A value forced into a closed interval, together with the value before
/// clamping so callers can report how far the raw expression strayed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Clamped {
    pub value: f64,
    pub raw: f64,
}

impl Clamped {
    pub fn unit(raw: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        if value != raw {
            tracing::debug!(raw, value, "probability clamped to [0, 1]");
        }
        Clamped { value, raw }
    }

    pub fn was_clamped(&self) -> bool {
        self.value != self.raw
    }

    /// Distance between the raw and clamped value.
    pub fn excess(&self) -> f64 {
        (self.raw - self.value).abs()
    }
}

// Gauss–Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for [`integrate`]. The interval is accepted when the error
/// estimate is below `max(abs_tol, rel_tol * |estimate|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_tol: 1e-12,
            rel_tol: 1e-13,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        // Odd Kronrod nodes coincide with the 7-point Gauss nodes.
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the
/// summed estimate meets `tol`. `a > b` yields the negated integral.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if a > b {
        let q = integrate(f, b, a, tol)?;
        return Ok(Quadrature { value: -q.value, ..q });
    }

    let (v, e) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    let mut evaluations = 15;
    loop {
        let value: f64 = intervals.iter().map(|iv| iv.2).sum();
        let error: f64 = intervals.iter().map(|iv| iv.3).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Numeric {
                reason: "integrand produced a non-finite value",
                estimate: value,
                error,
            });
        }
        if error <= tol.abs_tol.max(tol.rel_tol * value.abs()) {
            return Ok(Quadrature {
                value,
                error,
                evaluations,
            });
        }
        if intervals.len() >= tol.max_subdivisions {
            return Err(Error::Numeric {
                reason: "quadrature did not converge within the subdivision limit",
                estimate: value,
                error,
            });
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty interval list");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval cannot be split further in floating point.
            return Err(Error::Numeric {
                reason: "quadrature interval collapsed below machine resolution",
                estimate: value,
                error,
            });
        }
        let (lv, le) = gk15(&f, lo, mid);
        let (rv, re) = gk15(&f, mid, hi);
        evaluations += 30;
        intervals.push((lo, mid, lv, le));
        intervals.push((mid, hi, rv, re));
    }
}
