//! Pointwise geometric objects on a chart: scalar fields, vector fields,
//! 1-forms, 2-forms, and bivectors.
//!
//! Everything is lazy: an object is a chart plus an evaluation closure, and
//! nothing is evaluated until a point is supplied. Scalar fields may carry an
//! analytic gradient; when absent, consumers fall back to central differences.

use super::chart::Chart;
use super::fd::{central_scalar, FdConfig};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Real;
use std::sync::Arc;

type ScalarFn<S> = Arc<dyn Fn(&[S]) -> S + Send + Sync>;
type VectorFn<S> = Arc<dyn Fn(&[S]) -> Vec<S> + Send + Sync>;
type MatrixFn<S> = Arc<dyn Fn(&[S]) -> Mat<S> + Send + Sync>;

/// Real-valued function on a chart, with optional analytic gradient.
#[derive(Clone)]
pub struct ScalarField<S> {
    chart: Chart,
    f: ScalarFn<S>,
    grad: Option<VectorFn<S>>,
}

impl<S: Real> ScalarField<S> {
    pub fn new(chart: Chart, f: impl Fn(&[S]) -> S + Send + Sync + 'static) -> Self {
        ScalarField {
            chart,
            f: Arc::new(f),
            grad: None,
        }
    }

    pub fn with_gradient(
        chart: Chart,
        f: impl Fn(&[S]) -> S + Send + Sync + 'static,
        grad: impl Fn(&[S]) -> Vec<S> + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            chart,
            f: Arc::new(f),
            grad: Some(Arc::new(grad)),
        }
    }

    /// The i-th coordinate as a scalar field, with its exact gradient.
    pub fn coordinate(chart: Chart, i: usize) -> Self {
        let dim = chart.dim();
        ScalarField::with_gradient(
            chart,
            move |x: &[S]| x[i],
            move |_: &[S]| {
                let mut g = vec![S::zero(); dim];
                g[i] = S::one();
                g
            },
        )
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn eval(&self, x: &[S]) -> S {
        (self.f)(x)
    }

    pub fn has_gradient(&self) -> bool {
        self.grad.is_some()
    }

    /// Analytic gradient if present, else `None`.
    pub fn gradient(&self, x: &[S]) -> Option<Vec<S>> {
        self.grad.as_ref().map(|g| g(x))
    }

    /// Gradient by analytic closure when available, otherwise by central
    /// differences with first-derivative steps.
    pub fn gradient_or_fd(&self, x: &[S], fd: &FdConfig<S>) -> Result<Vec<S>> {
        self.chart.expect_point(x, "scalar field gradient")?;
        if let Some(g) = &self.grad {
            return Ok(g(x));
        }
        let f = self.f.clone();
        (0..x.len())
            .map(|i| {
                central_scalar(
                    &|y: &[S]| f(y),
                    x,
                    i,
                    fd.step1(x[i]),
                    self.chart.coord(i),
                )
            })
            .collect()
    }

    /// Pre-compose with a smooth map `φ`, producing `self ∘ φ` on `φ`'s source
    /// chart. The gradient survives when both the field gradient and the map
    /// Jacobian are analytic: ∇(f∘φ) = J_φᵀ ∇f(φ(x)).
    pub fn compose(&self, phi: &super::map::SmoothMap<S>) -> Result<ScalarField<S>> {
        self.chart.expect_same(phi.target(), "scalar field composition")?;
        let f = self.f.clone();
        let map = phi.map_fn();
        let composed = move |x: &[S]| f(&map(x));
        match (&self.grad, phi.jacobian_fn()) {
            (Some(g), Some(jac)) => {
                let g = g.clone();
                let map2 = phi.map_fn();
                Ok(ScalarField::with_gradient(
                    phi.source().clone(),
                    composed,
                    move |x: &[S]| {
                        let y = map2(x);
                        jac(x).vec_mul(&g(&y))
                    },
                ))
            }
            _ => Ok(ScalarField::new(phi.source().clone(), composed)),
        }
    }
}

/// Vector field: point ↦ components in the chart basis.
#[derive(Clone)]
pub struct VectorField<S> {
    chart: Chart,
    f: VectorFn<S>,
}

impl<S: Real> VectorField<S> {
    pub fn new(chart: Chart, f: impl Fn(&[S]) -> Vec<S> + Send + Sync + 'static) -> Self {
        VectorField {
            chart,
            f: Arc::new(f),
        }
    }

    /// Constant coordinate direction `∂/∂xᵢ`.
    pub fn coordinate(chart: Chart, i: usize) -> Self {
        let dim = chart.dim();
        VectorField::new(chart, move |_| {
            let mut v = vec![S::zero(); dim];
            v[i] = S::one();
            v
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn eval(&self, x: &[S]) -> Vec<S> {
        (self.f)(x)
    }
}

/// 1-form: point ↦ covector components in the chart basis.
#[derive(Clone)]
pub struct OneForm<S> {
    chart: Chart,
    f: VectorFn<S>,
}

impl<S: Real> OneForm<S> {
    pub fn new(chart: Chart, f: impl Fn(&[S]) -> Vec<S> + Send + Sync + 'static) -> Self {
        OneForm {
            chart,
            f: Arc::new(f),
        }
    }

    /// Constant coordinate covector `dxᵢ`.
    pub fn coordinate(chart: Chart, i: usize) -> Self {
        let dim = chart.dim();
        OneForm::new(chart, move |_| {
            let mut v = vec![S::zero(); dim];
            v[i] = S::one();
            v
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn eval(&self, x: &[S]) -> Vec<S> {
        (self.f)(x)
    }

    /// Pair with a tangent vector at a point.
    pub fn apply(&self, x: &[S], v: &[S]) -> S {
        crate::scalar::dot(&self.eval(x), v)
    }

    pub fn scale(&self, s: S) -> OneForm<S> {
        let f = self.f.clone();
        OneForm::new(self.chart.clone(), move |x| {
            f(x).into_iter().map(|c| c * s).collect()
        })
    }
}

/// 2-form: point ↦ antisymmetric coefficient matrix `W` with
/// `ω(x)(u, w) = uᵀ W(x) w`, i.e. `W[i][j]` is the coefficient of
/// `dxⁱ∧dxʲ` (and `W[j][i]` its negative).
#[derive(Clone)]
pub struct TwoForm<S> {
    chart: Chart,
    f: MatrixFn<S>,
}

impl<S: Real> TwoForm<S> {
    pub fn new(chart: Chart, f: impl Fn(&[S]) -> Mat<S> + Send + Sync + 'static) -> Self {
        TwoForm {
            chart,
            f: Arc::new(f),
        }
    }

    pub fn constant(chart: Chart, w: Mat<S>) -> Self {
        TwoForm::new(chart, move |_| w.clone())
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn eval(&self, x: &[S]) -> Mat<S> {
        (self.f)(x)
    }

    /// Evaluate on a pair of tangent vectors.
    pub fn apply(&self, x: &[S], u: &[S], w: &[S]) -> S {
        self.eval(x).pair(u, w)
    }

    /// Pointwise difference `self − other` (same chart required).
    pub fn sub(&self, other: &TwoForm<S>) -> Result<TwoForm<S>> {
        self.chart.expect_same(&other.chart, "2-form difference")?;
        let a = self.f.clone();
        let b = other.f.clone();
        Ok(TwoForm::new(self.chart.clone(), move |x| {
            a(x).sub(&b(x))
        }))
    }

    /// Entry-level antisymmetry defect at a point.
    pub fn antisymmetry_defect(&self, x: &[S]) -> S {
        self.eval(x).antisymmetry_defect()
    }
}

/// Bivector: point ↦ antisymmetric contravariant matrix `Λ` with
/// `Λ(α, β) = αᵀ Λ β` on covectors.
#[derive(Clone)]
pub struct Bivector<S> {
    chart: Chart,
    f: MatrixFn<S>,
}

impl<S: Real> Bivector<S> {
    pub fn new(chart: Chart, f: impl Fn(&[S]) -> Mat<S> + Send + Sync + 'static) -> Self {
        Bivector {
            chart,
            f: Arc::new(f),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn eval(&self, x: &[S]) -> Mat<S> {
        (self.f)(x)
    }

    /// Evaluate on a pair of covectors.
    pub fn apply(&self, x: &[S], alpha: &[S], beta: &[S]) -> S {
        self.eval(x).pair(alpha, beta)
    }
}

/// Build a 2-form from a sparse list of `(i, j, coefficient-fn)` terms, each
/// standing for `cᵢⱼ(x) dxⁱ∧dxʲ`.
pub fn two_form_from_terms<S: Real>(
    chart: Chart,
    terms: Vec<(usize, usize, ScalarFn<S>)>,
) -> Result<TwoForm<S>> {
    let dim = chart.dim();
    for &(i, j, _) in &terms {
        if i >= dim || j >= dim {
            return Err(Error::Dimension {
                context: "2-form term index",
                expected: dim,
                got: i.max(j),
            });
        }
        if i == j {
            return Err(Error::Chart {
                chart: chart.name().to_string(),
                msg: format!("2-form term dx{i}∧dx{i} is identically zero"),
            });
        }
    }
    Ok(TwoForm::new(chart, move |x| {
        let mut w = Mat::zeros(dim, dim);
        for (i, j, c) in &terms {
            let v = c(x);
            w[(*i, *j)] = w[(*i, *j)] + v;
            w[(*j, *i)] = w[(*j, *i)] - v;
        }
        w
    }))
}

/// Convenience wrapper for a constant coefficient term.
pub fn const_term<S: Real>(i: usize, j: usize, c: S) -> (usize, usize, ScalarFn<S>) {
    (i, j, Arc::new(move |_: &[S]| c))
}

/// Convenience wrapper for a coefficient closure term.
pub fn fn_term<S: Real>(
    i: usize,
    j: usize,
    c: impl Fn(&[S]) -> S + Send + Sync + 'static,
) -> (usize, usize, ScalarFn<S>) {
    (i, j, Arc::new(c))
}
