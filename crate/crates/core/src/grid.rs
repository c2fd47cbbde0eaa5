use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on grid size, to catch typos like a step of `1e-12`.
pub const MAX_GRID_POINTS: usize = 10_000_000;

/// A non-empty, non-decreasing list of fundamentals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    points: Vec<f64>,
}

impl ThetaGrid {
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("theta grid is empty"));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::domain("theta grid contains a non-finite value"));
        }
        if points.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain("theta grid must be sorted"));
        }
        Ok(Self { points })
    }

    /// `n >= 2` evenly spaced points from `lo` to `hi` inclusive.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("linspace needs at least 2 points"));
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::domain("linspace needs finite lo <= hi"));
        }
        let span = hi - lo;
        let last = (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| lo + span * (i as f64 / last)).collect();
        points[n - 1] = hi;
        Ok(Self { points })
    }

    /// Multiples of `step` lying in `[lo, hi]`.
    ///
    /// Endpoints are snapped onto the step lattice. When `1 / step` is an
    /// integer the points are formed as `k / (1/step)` so that decimal steps
    /// land on the nearest double (`0.3`, not `0.30000000000000004`).
    pub fn stepped(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::domain("grid step must be positive"));
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::domain("grid bounds must be finite"));
        }
        let k_lo = (lo / step - 1e-9).ceil();
        let k_hi = (hi / step + 1e-9).floor();
        if k_hi < k_lo {
            return Err(Error::domain("theta grid is empty"));
        }
        let count = k_hi - k_lo + 1.0;
        if count > MAX_GRID_POINTS as f64 {
            return Err(Error::domain("theta grid has too many points"));
        }
        let inv = 1.0 / step;
        let divisor = inv.round();
        let exact_divisor = divisor >= 1.0 && (inv - divisor).abs() <= 1e-9 * inv;
        let points = (0..count as i64)
            .map(|i| {
                let k = k_lo + i as f64;
                if exact_divisor {
                    k / divisor
                } else {
                    k * step
                }
            })
            .collect();
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
