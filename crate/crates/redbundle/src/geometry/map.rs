//! Smooth maps between charts, with analytic or finite-difference Jacobians.

use super::chart::Chart;
use super::fd::{central_vector, FdConfig};
use crate::error::Result;
use crate::linalg::Mat;
use crate::scalar::Real;
use std::sync::Arc;

type MapFn<S> = Arc<dyn Fn(&[S]) -> Vec<S> + Send + Sync>;
type JacFn<S> = Arc<dyn Fn(&[S]) -> Mat<S> + Send + Sync>;

/// A map `φ: source → target` given in coordinates, optionally with an
/// analytic Jacobian `J[a][b] = ∂φᵃ/∂xᵇ` (target rows, source columns).
#[derive(Clone)]
pub struct SmoothMap<S> {
    source: Chart,
    target: Chart,
    f: MapFn<S>,
    jac: Option<JacFn<S>>,
}

impl<S: Real> SmoothMap<S> {
    pub fn new(
        source: Chart,
        target: Chart,
        f: impl Fn(&[S]) -> Vec<S> + Send + Sync + 'static,
    ) -> Self {
        SmoothMap {
            source,
            target,
            f: Arc::new(f),
            jac: None,
        }
    }

    pub fn with_jacobian(
        source: Chart,
        target: Chart,
        f: impl Fn(&[S]) -> Vec<S> + Send + Sync + 'static,
        jac: impl Fn(&[S]) -> Mat<S> + Send + Sync + 'static,
    ) -> Self {
        SmoothMap {
            source,
            target,
            f: Arc::new(f),
            jac: Some(Arc::new(jac)),
        }
    }

    /// A linear map with constant matrix `m` (its own Jacobian).
    pub fn linear(source: Chart, target: Chart, m: Mat<S>) -> Self {
        let m2 = m.clone();
        SmoothMap::with_jacobian(
            source,
            target,
            move |x: &[S]| m.mul_vec(x),
            move |_: &[S]| m2.clone(),
        )
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn apply(&self, x: &[S]) -> Vec<S> {
        (self.f)(x)
    }

    pub fn has_jacobian(&self) -> bool {
        self.jac.is_some()
    }

    pub(crate) fn map_fn(&self) -> MapFn<S> {
        self.f.clone()
    }

    pub(crate) fn jacobian_fn(&self) -> Option<JacFn<S>> {
        self.jac.clone()
    }

    /// Jacobian at `x`: analytic when available, otherwise central differences
    /// column by column with first-derivative steps.
    pub fn jacobian(&self, x: &[S], fd: &FdConfig<S>) -> Result<Mat<S>> {
        self.source.expect_point(x, "smooth map jacobian")?;
        if let Some(j) = &self.jac {
            return Ok(j(x));
        }
        self.jacobian_fd(x, fd.step1(S::one()), fd)
    }

    /// Jacobian forced through central differences with the nested step size;
    /// used when the result feeds a second differencing pass.
    pub fn jacobian_fd_coarse(&self, x: &[S], fd: &FdConfig<S>) -> Result<Mat<S>> {
        if let Some(j) = &self.jac {
            return Ok(j(x));
        }
        self.jacobian_fd(x, fd.step2(S::one()), fd)
    }

    fn jacobian_fd(&self, x: &[S], _base: S, fd: &FdConfig<S>) -> Result<Mat<S>> {
        let n_out = self.target.dim();
        let n_in = self.source.dim();
        let mut j = Mat::zeros(n_out, n_in);
        for b in 0..n_in {
            let col = central_vector(
                &|y: &[S]| (self.f)(y),
                x,
                b,
                fd.step1(x[b]),
                self.source.coord(b),
            )?;
            for a in 0..n_out {
                j[(a, b)] = col[a];
            }
        }
        Ok(j)
    }

    /// Composition `other ∘ self` (apply `self` first). Jacobians compose by
    /// the chain rule when both are analytic.
    pub fn then(&self, other: &SmoothMap<S>) -> Result<SmoothMap<S>> {
        self.target
            .expect_same(&other.source, "smooth map composition")?;
        let f1 = self.f.clone();
        let f2 = other.f.clone();
        let composed = move |x: &[S]| f2(&f1(x));
        match (&self.jac, &other.jac) {
            (Some(j1), Some(j2)) => {
                let j1 = j1.clone();
                let j2 = j2.clone();
                let f1b = self.f.clone();
                Ok(SmoothMap::with_jacobian(
                    self.source.clone(),
                    other.target.clone(),
                    composed,
                    move |x: &[S]| j2(&f1b(x)).mul_mat(&j1(x)),
                ))
            }
            _ => Ok(SmoothMap::new(
                self.source.clone(),
                other.target.clone(),
                composed,
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_and_fd_jacobians_agree() {
        let src = Chart::new("uv", &["u", "v"]).unwrap();
        let dst = Chart::new("xy", &["x", "y"]).unwrap();
        let phi = SmoothMap::with_jacobian(
            src.clone(),
            dst.clone(),
            |x: &[f64]| vec![x[0] * x[1], x[0].sin()],
            |x: &[f64]| {
                Mat::from_rows(&[vec![x[1], x[0]], vec![x[0].cos(), 0.0]])
            },
        );
        let fd_only = SmoothMap::new(src, dst, |x: &[f64]| vec![x[0] * x[1], x[0].sin()]);
        let fd = FdConfig::default();
        let x = [0.7, -1.3];
        let ja = phi.jacobian(&x, &fd).unwrap();
        let jf = fd_only.jacobian(&x, &fd).unwrap();
        assert!(ja.sub(&jf).inf_norm() < 1e-8);
    }

    #[test]
    fn composition_chains_jacobians() {
        let a = Chart::new("a", &["s"]).unwrap();
        let b = Chart::new("b", &["u", "v"]).unwrap();
        let c = Chart::new("c", &["w"]).unwrap();
        let f = SmoothMap::with_jacobian(
            a.clone(),
            b.clone(),
            |x: &[f64]| vec![x[0], x[0] * x[0]],
            |x: &[f64]| Mat::from_rows(&[vec![1.0], vec![2.0 * x[0]]]),
        );
        let g = SmoothMap::with_jacobian(
            b,
            c,
            |x: &[f64]| vec![x[0] + x[1]],
            |_: &[f64]| Mat::from_rows(&[vec![1.0, 1.0]]),
        );
        let h = f.then(&g).unwrap();
        // h(s) = s + s², h'(2) = 1 + 2·2 = 5.
        assert_eq!(h.apply(&[2.0]), vec![6.0]);
        let j = h.jacobian(&[2.0], &FdConfig::default()).unwrap();
        assert!((j[(0, 0)] - 5.0).abs() < 1e-12);
        assert!(h.has_jacobian());
    }
}
