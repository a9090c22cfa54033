//! Central finite differences with per-coordinate relative step scaling.
//!
//! First derivatives use step `h1 · max(1, |xᵢ|)`; derivative-of-derivative
//! quantities (closedness residuals, finite-difference Jacobians feeding a
//! second differencing) use the coarser `h2 · max(1, |xᵢ|)` to keep roundoff
//! amplification in check.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Step-size configuration for central differences.
#[derive(Clone, Copy, Debug)]
pub struct FdConfig<S> {
    /// Relative step for first derivatives.
    pub h1: S,
    /// Relative step for nested (second-order) differencing.
    pub h2: S,
}

impl<S: Real> Default for FdConfig<S> {
    fn default() -> Self {
        FdConfig {
            h1: S::of(1e-6),
            h2: S::of(1e-4),
        }
    }
}

impl<S: Real> FdConfig<S> {
    /// Absolute first-derivative step at coordinate value `xi`.
    pub fn step1(&self, xi: S) -> S {
        self.h1 * S::one().max(xi.abs())
    }

    /// Absolute nested-differencing step at coordinate value `xi`.
    pub fn step2(&self, xi: S) -> S {
        self.h2 * S::one().max(xi.abs())
    }
}

/// Central-difference partial derivative of a scalar function along
/// coordinate `i`, with the step taken from `step`.
pub fn central_scalar<S: Real>(
    f: &dyn Fn(&[S]) -> S,
    x: &[S],
    i: usize,
    step: S,
    coord_name: &str,
) -> Result<S> {
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[i] = xp[i] + step;
    xm[i] = xm[i] - step;
    let fp = f(&xp);
    let fm = f(&xm);
    if !fp.is_finite() || !fm.is_finite() {
        return Err(Error::NonFiniteEval {
            coord: coord_name.to_string(),
            point: crate::error::fmt_point(x),
        });
    }
    Ok((fp - fm) / (step + step))
}

/// Central-difference partial derivative of a vector-valued function along
/// coordinate `i`.
pub fn central_vector<S: Real>(
    f: &dyn Fn(&[S]) -> Vec<S>,
    x: &[S],
    i: usize,
    step: S,
    coord_name: &str,
) -> Result<Vec<S>> {
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[i] = xp[i] + step;
    xm[i] = xm[i] - step;
    let fp = f(&xp);
    let fm = f(&xm);
    if !crate::scalar::all_finite(&fp) || !crate::scalar::all_finite(&fm) {
        return Err(Error::NonFiniteEval {
            coord: coord_name.to_string(),
            point: crate::error::fmt_point(x),
        });
    }
    Ok(fp
        .iter()
        .zip(&fm)
        .map(|(&a, &b)| (a - b) / (step + step))
        .collect())
}
