//! Extended phase spaces fibred over evolution spaces.
//!
//! A [`SymplecticRBundle`] packages, in one chart:
//! * a total space with coordinates `(t, p, q¹…qⁿ, p₁…pₙ)` and a symplectic
//!   2-form `Ω` (canonically `dt∧dp + Σ dqⁱ∧dpᵢ`),
//! * the projection `μ` that forgets the auxiliary momentum `p`,
//! * the fiber translation `ψ_s : p ↦ p + s` with infinitesimal generator
//!   `Z = ∂/∂p`.
//!
//! Sign conventions (fixed so the canonical table reads `{t,p} = 1`,
//! `{qⁱ,pⱼ} = δⁱⱼ`): the Poisson bivector is `Λ = −Ω⁻¹`, brackets are
//! `{F,G} = dFᵀ Λ dG`, and Hamiltonian fields solve `Ω·X = −dF`
//! (equivalently `i_X Ω = dF` with first-slot contraction).

use crate::error::{Error, Result};
use crate::geometry::{
    differential, vertical_lift_at, Chart, FdConfig, ScalarField, SmoothMap, TwoForm,
    VectorField,
};
use crate::linalg::Mat;
use crate::scalar::Real;
use std::sync::Arc;

/// The fiber translation action `ψ_s` on the total space.
#[derive(Clone)]
pub struct PrincipalAction<S> {
    apply: Arc<dyn Fn(S, &[S]) -> Vec<S> + Send + Sync>,
    total: Chart,
}

impl<S: Real> PrincipalAction<S> {
    /// Translation of a single coordinate slot.
    pub fn translation(total: Chart, slot: usize) -> Self {
        PrincipalAction {
            apply: Arc::new(move |s, a: &[S]| {
                let mut y = a.to_vec();
                y[slot] = y[slot] + s;
                y
            }),
            total,
        }
    }

    pub fn apply(&self, s: S, a: &[S]) -> Vec<S> {
        (self.apply)(s, a)
    }

    /// The action at parameter `s` as a smooth map (identity Jacobian for a
    /// translation).
    pub fn map_at(&self, s: S) -> SmoothMap<S> {
        let apply = self.apply.clone();
        let dim = self.total.dim();
        SmoothMap::with_jacobian(
            self.total.clone(),
            self.total.clone(),
            move |a: &[S]| apply(s, a),
            move |_: &[S]| Mat::identity(dim),
        )
    }
}

/// Extended phase space `(t, p, qⁱ, pᵢ)` with symplectic form, projection, and
/// fiber translation.
#[derive(Clone)]
pub struct SymplecticRBundle<S> {
    total: Chart,
    base: Chart,
    omega: TwoForm<S>,
    fiber_slot: usize,
    proj_slots: Vec<usize>,
    action: PrincipalAction<S>,
    n_pairs: usize,
}

impl<S: Real> SymplecticRBundle<S> {
    pub fn total_chart(&self) -> &Chart {
        &self.total
    }

    pub fn base_chart(&self) -> &Chart {
        &self.base
    }

    pub fn omega(&self) -> &TwoForm<S> {
        &self.omega
    }

    /// Number of `(qⁱ, pᵢ)` pairs.
    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    /// Index of the auxiliary momentum `p` in the total chart.
    pub fn fiber_slot(&self) -> usize {
        self.fiber_slot
    }

    /// Total-chart indices retained by the projection, in base-chart order.
    pub fn projection_slots(&self) -> &[usize] {
        &self.proj_slots
    }

    pub fn principal_action(&self) -> &PrincipalAction<S> {
        &self.action
    }

    /// The fundamental vector field `Z = ∂/∂p` of the fiber translation.
    pub fn z_mu(&self) -> VectorField<S> {
        VectorField::coordinate(self.total.clone(), self.fiber_slot)
    }

    /// Projection `μ` of a total point to the base (drops `p`).
    pub fn project(&self, a: &[S]) -> Vec<S> {
        self.proj_slots.iter().map(|&i| a[i]).collect()
    }

    /// Tangent projection `Tμ` (same index selection on components).
    pub fn project_tangent(&self, u: &[S]) -> Vec<S> {
        self.project(u)
    }

    /// Lift a base point into the total space at fiber value `p`.
    pub fn lift(&self, v: &[S], p: S) -> Vec<S> {
        let mut a = vec![S::zero(); self.total.dim()];
        for (r, &i) in self.proj_slots.iter().enumerate() {
            a[i] = v[r];
        }
        a[self.fiber_slot] = p;
        a
    }

    /// `μ` as a smooth map with its constant Jacobian.
    pub fn projection_map(&self) -> SmoothMap<S> {
        let slots = self.proj_slots.clone();
        let jac = Mat::from_fn(self.base.dim(), self.total.dim(), |r, c| {
            if slots[r] == c {
                S::one()
            } else {
                S::zero()
            }
        });
        let slots2 = self.proj_slots.clone();
        SmoothMap::with_jacobian(
            self.total.clone(),
            self.base.clone(),
            move |a: &[S]| slots2.iter().map(|&i| a[i]).collect(),
            move |_: &[S]| jac.clone(),
        )
    }

    /// The lift `v ↦ (v, p₀)` as a smooth map with its constant Jacobian.
    pub fn lift_map(&self, p0: S) -> SmoothMap<S> {
        let this = self.clone();
        let slots = self.proj_slots.clone();
        let total_dim = self.total.dim();
        let jac = Mat::from_fn(total_dim, self.base.dim(), |r, c| {
            if slots[c] == r {
                S::one()
            } else {
                S::zero()
            }
        });
        SmoothMap::with_jacobian(
            self.base.clone(),
            self.total.clone(),
            move |v: &[S]| this.lift(v, p0),
            move |_: &[S]| jac.clone(),
        )
    }

    /// Compose a base function with `μ`, keeping analytic gradients.
    pub fn lift_function(&self, f: &ScalarField<S>) -> Result<ScalarField<S>> {
        f.compose(&self.projection_map())
    }

    /// Replace the symplectic form (used by magnetic deformation and by
    /// negative controls in the verification suites).
    pub fn with_omega(&self, omega: TwoForm<S>) -> Result<SymplecticRBundle<S>> {
        self.total
            .expect_same(omega.chart(), "bundle symplectic form")?;
        let mut b = self.clone();
        b.omega = omega;
        Ok(b)
    }
}

/// Canonical coordinate names `t, p, q1…qn, p1…pn`.
pub fn canonical_bundle<S: Real>(n: usize) -> Result<SymplecticRBundle<S>> {
    let q: Vec<String> = (1..=n).map(|i| format!("q{i}")).collect();
    let q_ref: Vec<&str> = q.iter().map(|s| s.as_str()).collect();
    canonical_bundle_named("canonical", &q_ref)
}

/// Canonical bundle over configuration coordinates with custom names: total
/// chart `t, p, <q…>, p_<q…>`, base chart `t, <q…>, p_<q…>`, canonical
/// symplectic form `dt∧dp + Σ dqⁱ∧dpᵢ`.
pub fn canonical_bundle_named<S: Real>(
    name: &str,
    q_names: &[&str],
) -> Result<SymplecticRBundle<S>> {
    let n = q_names.len();
    let mut coords: Vec<String> = vec!["t".into(), "p".into()];
    coords.extend(q_names.iter().map(|s| s.to_string()));
    coords.extend(q_names.iter().map(|s| format!("p_{s}")));
    let coords_ref: Vec<&str> = coords.iter().map(|s| s.as_str()).collect();
    let mut pairs = vec![(0usize, 1usize)];
    for i in 0..n {
        pairs.push((2 + i, 2 + n + i));
    }
    let total = Chart::cotangent(&format!("{name}_total"), &coords_ref, pairs)?;

    let mut base_coords: Vec<&str> = vec!["t"];
    base_coords.extend(coords_ref[2..].iter().copied());
    let base = Chart::new(&format!("{name}_base"), &base_coords)?;

    let dim = 2 * n + 2;
    let mut w = Mat::zeros(dim, dim);
    w[(0, 1)] = S::one();
    w[(1, 0)] = -S::one();
    for i in 0..n {
        w[(2 + i, 2 + n + i)] = S::one();
        w[(2 + n + i, 2 + i)] = -S::one();
    }
    let omega = TwoForm::constant(total.clone(), w);

    let mut proj_slots = vec![0usize];
    proj_slots.extend(2..dim);

    Ok(SymplecticRBundle {
        action: PrincipalAction::translation(total.clone(), 1),
        total,
        base,
        omega,
        fiber_slot: 1,
        proj_slots,
        n_pairs: n,
    })
}

/// Poisson bracket `{F, G} = dFᵀ Λ dG` with `Λ = −Ω⁻¹`, evaluated at `a`.
pub fn symplectic_bracket<S: Real>(
    bundle: &SymplecticRBundle<S>,
    f: &ScalarField<S>,
    g: &ScalarField<S>,
    a: &[S],
    fd: &FdConfig<S>,
) -> Result<S> {
    bundle
        .total
        .expect_same(f.chart(), "bracket first argument")?;
    bundle
        .total
        .expect_same(g.chart(), "bracket second argument")?;
    let df = differential(f, a, fd)?;
    let dg = differential(g, a, fd)?;
    let w = bundle.omega.eval(a);
    let x = w.solve(&dg).map_err(|_| Error::Degenerate {
        point: crate::error::fmt_point(a),
    })?;
    Ok(-crate::scalar::dot(&df, &x))
}

/// Poisson bivector matrix `Λ = −Ω⁻¹` at a point.
pub fn poisson_bivector_at<S: Real>(
    bundle: &SymplecticRBundle<S>,
    a: &[S],
) -> Result<Mat<S>> {
    let w = bundle.omega.eval(a);
    let inv = w.inverse().map_err(|_| Error::Degenerate {
        point: crate::error::fmt_point(a),
    })?;
    Ok(inv.scale(-S::one()))
}

/// Induced bracket on the base: `{f, f′}_V(v) = {f∘μ, f′∘μ}(lift(v, 0))`.
/// The value is independent of the lift fiber value; the verification suites
/// re-check that numerically.
pub fn base_poisson_bracket<S: Real>(
    bundle: &SymplecticRBundle<S>,
    f: &ScalarField<S>,
    g: &ScalarField<S>,
    v: &[S],
    fd: &FdConfig<S>,
) -> Result<S> {
    bundle
        .base
        .expect_same(f.chart(), "base bracket first argument")?;
    bundle
        .base
        .expect_same(g.chart(), "base bracket second argument")?;
    let fl = bundle.lift_function(f)?;
    let gl = bundle.lift_function(g)?;
    let a = bundle.lift(v, S::zero());
    symplectic_bracket(bundle, &fl, &gl, &a, fd)
}

/// A magnetic term: a 2-form `β` on configuration space `(t, qⁱ)` together
/// with its pullback `B` to the total chart (supported on configuration
/// slots only).
#[derive(Clone)]
pub struct MagneticTerm<S> {
    beta: TwoForm<S>,
    b_total: TwoForm<S>,
}

impl<S: Real> MagneticTerm<S> {
    /// Build from `β` on the configuration chart of a cotangent-type total
    /// chart. `β`'s chart must list the configuration coordinates in the
    /// total chart's pair order (`t` first, then the `qⁱ`).
    pub fn new(beta: TwoForm<S>, total: &Chart) -> Result<MagneticTerm<S>> {
        let pairs = total
            .cotangent_pairs()
            .ok_or_else(|| Error::Chart {
                chart: total.name().to_string(),
                msg: "magnetic term requires a cotangent-type total chart".to_string(),
            })?
            .clone();
        if beta.chart().dim() != pairs.len() {
            return Err(Error::Dimension {
                context: "magnetic term configuration chart",
                expected: pairs.len(),
                got: beta.chart().dim(),
            });
        }
        let beta2 = beta.clone();
        let dim = total.dim();
        let b_total = TwoForm::new(total.clone(), move |a| {
            let cfg = pairs.config_point(a);
            let b = beta2.eval(&cfg);
            let mut w = Mat::zeros(dim, dim);
            for (i, &(si, _)) in pairs.pairs().iter().enumerate() {
                for (j, &(sj, _)) in pairs.pairs().iter().enumerate() {
                    w[(si, sj)] = b[(i, j)];
                }
            }
            w
        });
        Ok(MagneticTerm { beta, b_total })
    }

    /// The defining 2-form on configuration space.
    pub fn beta(&self) -> &TwoForm<S> {
        &self.beta
    }

    /// The pulled-back 2-form on the total chart.
    pub fn b_total(&self) -> &TwoForm<S> {
        &self.b_total
    }

    /// The restriction of `β` to the `qⁱ` directions (the `dt∧dqⁱ` components
    /// dropped), as a 2-form on the same configuration chart. This is the
    /// piece whose vertical lift deforms the *base* bracket.
    pub fn beta_bar(&self) -> TwoForm<S> {
        let beta = self.beta.clone();
        TwoForm::new(self.beta.chart().clone(), move |c| {
            let mut w = beta.eval(c);
            let n = w.rows();
            for i in 0..n {
                w[(0, i)] = S::zero();
                w[(i, 0)] = S::zero();
            }
            w
        })
    }
}

/// Deform `Ω ↦ Ω − B`. The chart layout, projection, and fiber translation
/// are untouched. Degeneracy of the deformed form is *not* checked here; use
/// [`degenerate_points`] on a sample of the working box to surface warnings.
pub fn magnetic_deform<S: Real>(
    bundle: &SymplecticRBundle<S>,
    term: &MagneticTerm<S>,
) -> Result<SymplecticRBundle<S>> {
    bundle
        .total_chart()
        .expect_same(term.b_total.chart(), "magnetic deformation")?;
    bundle.with_omega(bundle.omega.sub(&term.b_total)?)
}

/// Points from `samples` at which the bundle's 2-form fails to invert.
pub fn degenerate_points<S: Real>(
    bundle: &SymplecticRBundle<S>,
    samples: &[Vec<S>],
) -> Vec<Vec<S>> {
    samples
        .iter()
        .filter(|a| bundle.omega.eval(a).inverse().is_err())
        .cloned()
        .collect()
}

/// Residual of the magnetic bracket identity
/// `{F, F′}^B = {F, F′} + β^v(dF, dF′)` at a point: the left side inverts the
/// deformed form, the right side uses the undeformed bracket plus the
/// vertical lift of `β`.
pub fn deformed_bracket_residual<S: Real>(
    bundle: &SymplecticRBundle<S>,
    term: &MagneticTerm<S>,
    f: &ScalarField<S>,
    g: &ScalarField<S>,
    a: &[S],
    fd: &FdConfig<S>,
) -> Result<S> {
    let deformed = magnetic_deform(bundle, term)?;
    let lhs = symplectic_bracket(&deformed, f, g, a, fd)?;
    let plain = symplectic_bracket(bundle, f, g, a, fd)?;
    let df = differential(f, a, fd)?;
    let dg = differential(g, a, fd)?;
    let lift = vertical_lift_at(term.beta(), bundle.total_chart(), a)?;
    let rhs = plain + lift.pair(&df, &dg);
    Ok((lhs - rhs).abs())
}
