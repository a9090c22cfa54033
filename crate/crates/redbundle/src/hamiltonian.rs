//! Hamiltonian sections of extended phase spaces and the time-dependent
//! structures they induce downstairs.
//!
//! A [`HamiltonianSection`] embeds the base `(t, qⁱ, pᵢ)` into the total
//! space as the graph `h(v) = (t, −H(v), qⁱ, pᵢ)` of an energy function `H`.
//! Three derived objects drive everything else:
//!
//! * the extended function `F_h = p + H∘μ`, whose zero level is the image of
//!   `h`, whose fiber derivative is identically 1, and whose Hamiltonian
//!   vector field carries the dynamics on the total space;
//! * the induced pair `(ω_h, η_h) = (h*Ω, −h*(i_Z Ω))` on the base — a
//!   [`CosymplecticStructure`]: both forms closed, with the bordered matrix
//!   `[[W, η], [−ηᵀ, 0]]` invertible;
//! * the Reeb field of that pair, which in canonical coordinates is the
//!   classical evolution operator
//!   `∂/∂t + (∂H/∂pᵢ) ∂/∂qⁱ − (∂H/∂qⁱ) ∂/∂pᵢ`.
//!
//! Consistency identities exposed for the verification suites:
//! reconstruction `Ω = μ*ω_h − dF_h ∧ μ*η_h`, projection of the extended
//! dynamics onto the Reeb field, and the correspondence between the bracket
//! of lifted functions upstairs and the cosymplectic bracket downstairs.

use crate::bundle::{symplectic_bracket, SymplecticRBundle};
use crate::error::{fmt_point, Error, Result};
use crate::geometry::{
    differential, interior_product, pullback_one_form, pullback_one_form_at,
    pullback_two_form, pullback_two_form_at, wedge_covectors, Chart, FdConfig, OneForm,
    ScalarField, SmoothMap, TwoForm, VectorField,
};
use crate::linalg::Mat;
use crate::scalar::{dot, inf_norm_diff, Real};

/// Graph section of an extended phase space: `h(v) = (t, −H(v), qⁱ, pᵢ)`.
#[derive(Clone)]
pub struct HamiltonianSection<S> {
    bundle: SymplecticRBundle<S>,
    energy: ScalarField<S>,
    map: SmoothMap<S>,
    extended: ScalarField<S>,
}

impl<S: Real> HamiltonianSection<S> {
    /// Build the section of `bundle` determined by the energy `H` on the base
    /// chart.
    pub fn new(bundle: SymplecticRBundle<S>, energy: ScalarField<S>) -> Result<Self> {
        bundle
            .base_chart()
            .expect_same(energy.chart(), "hamiltonian section energy")?;
        let map = section_map(&bundle, &energy);
        let extended = extended_function(&bundle, &energy)?;
        Ok(HamiltonianSection {
            bundle,
            energy,
            map,
            extended,
        })
    }

    pub fn bundle(&self) -> &SymplecticRBundle<S> {
        &self.bundle
    }

    /// The energy `H` on the base chart.
    pub fn energy(&self) -> &ScalarField<S> {
        &self.energy
    }

    /// The section as a smooth map base → total. Its Jacobian is analytic
    /// whenever the energy carries an analytic gradient.
    pub fn map(&self) -> &SmoothMap<S> {
        &self.map
    }

    /// Embed a base point.
    pub fn eval(&self, v: &[S]) -> Result<Vec<S>> {
        self.bundle
            .base_chart()
            .expect_point(v, "hamiltonian section")?;
        Ok(self.map.apply(v))
    }

    /// The extended function `F_h = p + H∘μ` on the total chart.
    pub fn extended_hamiltonian(&self) -> &ScalarField<S> {
        &self.extended
    }

    /// Hamiltonian vector field of `F_h` at a total point (the extended
    /// dynamics): solves `Ω·X = −dF_h`.
    pub fn dynamics_at(&self, a: &[S], fd: &FdConfig<S>) -> Result<Vec<S>> {
        hamiltonian_vector_field_at(&self.bundle, &self.extended, a, fd)
    }

    /// The extended dynamics as a lazy vector field.
    pub fn dynamics_field(&self, fd: &FdConfig<S>) -> VectorField<S> {
        hamiltonian_vector_field(&self.bundle, &self.extended, fd)
    }

    /// Horizontal projection induced by the section: `X ↦ X − dF_h(X)·Z`.
    /// It annihilates the fiber generator, leaves `Tμ` unchanged, and is
    /// idempotent.
    pub fn horizontal_at(&self, a: &[S], x_vec: &[S], fd: &FdConfig<S>) -> Result<Vec<S>> {
        self.bundle
            .total_chart()
            .expect_point(a, "horizontal projection")?;
        if x_vec.len() != a.len() {
            return Err(Error::Dimension {
                context: "horizontal projection vector",
                expected: a.len(),
                got: x_vec.len(),
            });
        }
        let df = differential(&self.extended, a, fd)?;
        let c = dot(&df, x_vec);
        let mut out = x_vec.to_vec();
        let slot = self.bundle.fiber_slot();
        out[slot] = out[slot] - c;
        Ok(out)
    }

    /// Structural residuals of `F_h` probed at a base point: the value on the
    /// section image, the fiber derivative minus one, and the translation
    /// property `F_h(ψ_s a) − F_h(a) − s` with shift `s`. Returns the worst
    /// of the three.
    pub fn extended_function_residual(
        &self,
        v: &[S],
        s: S,
        fd: &FdConfig<S>,
    ) -> Result<S> {
        let a = self.eval(v)?;
        let on_section = self.extended.eval(&a).abs();
        let df = differential(&self.extended, &a, fd)?;
        let fiber_drv = (df[self.bundle.fiber_slot()] - S::one()).abs();
        let shifted = self.bundle.principal_action().apply(s, &a);
        let translation =
            (self.extended.eval(&shifted) - self.extended.eval(&a) - s).abs();
        Ok(on_section.max(fiber_drv).max(translation))
    }
}

/// The section as a smooth map with analytic Jacobian when the energy has an
/// analytic gradient: identity placement on base slots, `−∇H` on the fiber
/// row.
fn section_map<S: Real>(
    bundle: &SymplecticRBundle<S>,
    energy: &ScalarField<S>,
) -> SmoothMap<S> {
    let b = bundle.clone();
    let h = energy.clone();
    let apply = move |v: &[S]| {
        let p = -h.eval(v);
        b.lift(v, p)
    };
    if !energy.has_gradient() {
        return SmoothMap::new(
            bundle.base_chart().clone(),
            bundle.total_chart().clone(),
            apply,
        );
    }
    let slots = bundle.projection_slots().to_vec();
    let fiber = bundle.fiber_slot();
    let total_dim = bundle.total_chart().dim();
    let base_dim = bundle.base_chart().dim();
    let h2 = energy.clone();
    SmoothMap::with_jacobian(
        bundle.base_chart().clone(),
        bundle.total_chart().clone(),
        apply,
        move |v: &[S]| {
            let mut j = Mat::zeros(total_dim, base_dim);
            for (r, &slot) in slots.iter().enumerate() {
                j[(slot, r)] = S::one();
            }
            let g = h2.gradient(v).expect("analytic gradient checked above");
            for (r, gv) in g.iter().enumerate() {
                j[(fiber, r)] = -*gv;
            }
            j
        },
    )
}

/// `F_h = p + H∘μ`, with analytic gradient `d(H∘μ) + dp` when available.
fn extended_function<S: Real>(
    bundle: &SymplecticRBundle<S>,
    energy: &ScalarField<S>,
) -> Result<ScalarField<S>> {
    let lifted = bundle.lift_function(energy)?;
    let fiber = bundle.fiber_slot();
    let chart = bundle.total_chart().clone();
    let l = lifted.clone();
    let f = move |a: &[S]| a[fiber] + l.eval(a);
    if !lifted.has_gradient() {
        return Ok(ScalarField::new(chart, f));
    }
    let l2 = lifted.clone();
    Ok(ScalarField::with_gradient(chart, f, move |a: &[S]| {
        let mut g = l2.gradient(a).expect("analytic gradient checked above");
        g[fiber] = g[fiber] + S::one();
        g
    }))
}

/// Hamiltonian vector field of `F` on the bundle's total space at a point:
/// solves `Ω·X = −dF` (first-slot contraction makes this `i_X Ω = dF`).
pub fn hamiltonian_vector_field_at<S: Real>(
    bundle: &SymplecticRBundle<S>,
    f: &ScalarField<S>,
    a: &[S],
    fd: &FdConfig<S>,
) -> Result<Vec<S>> {
    bundle
        .total_chart()
        .expect_same(f.chart(), "hamiltonian vector field")?;
    let df = differential(f, a, fd)?;
    let rhs: Vec<S> = df.iter().map(|&d| -d).collect();
    let w = bundle.omega().eval(a);
    w.solve(&rhs).map_err(|_| Error::Degenerate {
        point: fmt_point(a),
    })
}

/// Hamiltonian vector field as a lazy field (components NaN where the solve
/// fails; callers that need diagnostics use the pointwise variant).
pub fn hamiltonian_vector_field<S: Real>(
    bundle: &SymplecticRBundle<S>,
    f: &ScalarField<S>,
    fd: &FdConfig<S>,
) -> VectorField<S> {
    let bundle = bundle.clone();
    let f = f.clone();
    let fd = *fd;
    let dim = bundle.total_chart().dim();
    VectorField::new(bundle.total_chart().clone(), move |a| {
        hamiltonian_vector_field_at(&bundle, &f, a, &fd)
            .unwrap_or_else(|_| vec![S::nan(); dim])
    })
}

/// A 2-form/1-form pair `(ω, η)` on a chart with the flat map
/// `X ↦ i_Xω + η(X)·η` represented pointwise by the matrix `−W + η ηᵀ`.
///
/// When the pair is cosymplectic (both forms closed, bordered matrix
/// invertible) the flat map is an isomorphism; the Reeb field and the
/// Hamiltonian fields below are its characteristic inverses. Closedness and
/// invertibility are *checked*, not assumed — the residual methods feed the
/// verification suites.
#[derive(Clone)]
pub struct CosymplecticStructure<S> {
    chart: Chart,
    omega: TwoForm<S>,
    eta: OneForm<S>,
}

impl<S: Real> CosymplecticStructure<S> {
    pub fn new(chart: Chart, omega: TwoForm<S>, eta: OneForm<S>) -> Result<Self> {
        chart.expect_same(omega.chart(), "cosymplectic 2-form")?;
        chart.expect_same(eta.chart(), "cosymplectic 1-form")?;
        Ok(CosymplecticStructure { chart, omega, eta })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn omega(&self) -> &TwoForm<S> {
        &self.omega
    }

    pub fn eta(&self) -> &OneForm<S> {
        &self.eta
    }

    /// Matrix of the flat map at a point: `−W + η ηᵀ`.
    pub fn flat_matrix_at(&self, x: &[S]) -> Result<Mat<S>> {
        self.chart.expect_point(x, "cosymplectic flat map")?;
        let w = self.omega.eval(x);
        let eta = self.eta.eval(x);
        let n = self.chart.dim();
        Ok(Mat::from_fn(n, n, |r, c| -w[(r, c)] + eta[r] * eta[c]))
    }

    /// Reeb field at a point: the unique `R` with `i_Rω = 0`, `η(R) = 1`,
    /// obtained by solving `(−W + η ηᵀ)·R = η`.
    pub fn reeb_at(&self, x: &[S]) -> Result<Vec<S>> {
        let m = self.flat_matrix_at(x)?;
        let eta = self.eta.eval(x);
        m.solve(&eta).map_err(|_| Error::Degenerate {
            point: fmt_point(x),
        })
    }

    /// Reeb field as a lazy vector field (NaN components where the structure
    /// degenerates).
    pub fn reeb_field(&self) -> VectorField<S> {
        let this = self.clone();
        let dim = self.chart.dim();
        VectorField::new(self.chart.clone(), move |x| {
            this.reeb_at(x).unwrap_or_else(|_| vec![S::nan(); dim])
        })
    }

    /// Defining residuals of the Reeb field at a point:
    /// `(‖i_Rω‖∞, |η(R) − 1|)`.
    pub fn reeb_defect_at(&self, x: &[S]) -> Result<(S, S)> {
        let r = self.reeb_at(x)?;
        let w = self.omega.eval(x);
        let contraction = w.vec_mul(&r);
        let pairing = (dot(&self.eta.eval(x), &r) - S::one()).abs();
        Ok((crate::scalar::inf_norm(&contraction), pairing))
    }

    /// Hamiltonian field of `f` at a point: solves
    /// `(−W + η ηᵀ)·X = df − R(f)·η`, which enforces `i_Xω = df − R(f)η` and
    /// `η(X) = 0`.
    pub fn hamiltonian_field_at(
        &self,
        f: &ScalarField<S>,
        x: &[S],
        fd: &FdConfig<S>,
    ) -> Result<Vec<S>> {
        self.chart
            .expect_same(f.chart(), "cosymplectic hamiltonian field")?;
        let df = differential(f, x, fd)?;
        let r = self.reeb_at(x)?;
        let rf = dot(&df, &r);
        let eta = self.eta.eval(x);
        let rhs: Vec<S> = df
            .iter()
            .zip(&eta)
            .map(|(&d, &e)| d - rf * e)
            .collect();
        let m = self.flat_matrix_at(x)?;
        m.solve(&rhs).map_err(|_| Error::Degenerate {
            point: fmt_point(x),
        })
    }

    /// Hamiltonian field as a lazy vector field.
    pub fn hamiltonian_field(
        &self,
        f: &ScalarField<S>,
        fd: &FdConfig<S>,
    ) -> Result<VectorField<S>> {
        self.chart
            .expect_same(f.chart(), "cosymplectic hamiltonian field")?;
        let this = self.clone();
        let f = f.clone();
        let fd = *fd;
        let dim = self.chart.dim();
        Ok(VectorField::new(self.chart.clone(), move |x| {
            this.hamiltonian_field_at(&f, x, &fd)
                .unwrap_or_else(|_| vec![S::nan(); dim])
        }))
    }

    /// Bracket `{f, g} = ω(X_f, X_g) = df(X_g)` at a point.
    pub fn bracket_at(
        &self,
        f: &ScalarField<S>,
        g: &ScalarField<S>,
        x: &[S],
        fd: &FdConfig<S>,
    ) -> Result<S> {
        self.chart
            .expect_same(f.chart(), "cosymplectic bracket first argument")?;
        let xg = self.hamiltonian_field_at(g, x, fd)?;
        let df = differential(f, x, fd)?;
        Ok(dot(&df, &xg))
    }

    /// Bordered matrix `[[W, η], [−ηᵀ, 0]]` at a point; its determinant is
    /// nonzero exactly where `η ∧ ωⁿ` is a volume form.
    pub fn bordered_matrix_at(&self, x: &[S]) -> Result<Mat<S>> {
        self.chart.expect_point(x, "cosymplectic volume matrix")?;
        let w = self.omega.eval(x);
        let eta = self.eta.eval(x);
        let n = self.chart.dim();
        Ok(Mat::from_fn(n + 1, n + 1, |r, c| {
            if r < n && c < n {
                w[(r, c)]
            } else if r < n && c == n {
                eta[r]
            } else if r == n && c < n {
                -eta[c]
            } else {
                S::zero()
            }
        }))
    }

    /// Determinant of the bordered matrix (0 where it is singular).
    pub fn volume_determinant_at(&self, x: &[S]) -> Result<S> {
        Ok(self.bordered_matrix_at(x)?.det())
    }

    /// Closedness residuals `(dω, dη)` at a point, by nested central
    /// differences on the coefficient functions.
    pub fn closedness_residuals_at(&self, x: &[S], fd: &FdConfig<S>) -> Result<(S, S)> {
        let dw = crate::geometry::closedness_residual(&self.omega, x, fd)?;
        let de = crate::geometry::one_form_closedness_residual(&self.eta, x, fd)?;
        Ok((dw, de))
    }

    /// Entry-level antisymmetry defect of the 2-form at a point.
    pub fn antisymmetry_defect_at(&self, x: &[S]) -> S {
        self.omega.antisymmetry_defect(x)
    }
}

/// The pair induced on the base by a Hamiltonian section:
/// `ω_h = h*Ω`, `η_h = −h*(i_Z Ω)`. In canonical coordinates `η_h = dt` and
/// `ω_h` has entries `(t,qⁱ) ↦ −∂H/∂qⁱ`, `(t,pᵢ) ↦ −∂H/∂pᵢ`, `(qⁱ,pᵢ) ↦ 1`.
pub fn cosymplectic_from_section<S: Real>(
    section: &HamiltonianSection<S>,
    fd: &FdConfig<S>,
) -> Result<CosymplecticStructure<S>> {
    let bundle = section.bundle();
    let omega = pullback_two_form(section.map(), bundle.omega(), fd)?;
    let zeta = interior_product(&bundle.z_mu(), bundle.omega())?;
    let eta = pullback_one_form(section.map(), &zeta, fd)?.scale(-S::one());
    CosymplecticStructure::new(bundle.base_chart().clone(), omega, eta)
}

/// Residual of the reconstruction identity `Ω = μ*ω_h − dF_h ∧ μ*η_h` at a
/// total point (max-entry norm of the difference).
pub fn omega_reconstruction_residual<S: Real>(
    section: &HamiltonianSection<S>,
    cosym: &CosymplecticStructure<S>,
    a: &[S],
    fd: &FdConfig<S>,
) -> Result<S> {
    let bundle = section.bundle();
    bundle
        .total_chart()
        .expect_point(a, "reconstruction identity")?;
    let mu = bundle.projection_map();
    let w_total = bundle.omega().eval(a);
    let w_pull = pullback_two_form_at(&mu, cosym.omega(), a, fd)?;
    let eta_pull = pullback_one_form_at(&mu, cosym.eta(), a, fd)?;
    let df = differential(section.extended_hamiltonian(), a, fd)?;
    let wedge = wedge_covectors(&df, &eta_pull);
    Ok(w_total.sub(&w_pull).add(&wedge).inf_norm())
}

/// Max deviation `‖Tμ(X_{F_h})(a) − R(μ(a))‖∞` of the projected extended
/// dynamics from the base Reeb field.
pub fn projection_consistency_residual<S: Real>(
    section: &HamiltonianSection<S>,
    cosym: &CosymplecticStructure<S>,
    a: &[S],
    fd: &FdConfig<S>,
) -> Result<S> {
    let x = section.dynamics_at(a, fd)?;
    let down = section.bundle().project_tangent(&x);
    let reeb = cosym.reeb_at(&section.bundle().project(a))?;
    Ok(inf_norm_diff(&down, &reeb))
}

/// Residual of the bracket correspondence for base functions at a total
/// point: `{f∘μ, g∘μ}_Ω(a) − {f, g}_{(ω,η)}(μ(a))`. The downstairs value is
/// independent of the energy used to build the pair; the verification suites
/// exploit that by comparing across sections.
pub fn bracket_correspondence_residual<S: Real>(
    section: &HamiltonianSection<S>,
    cosym: &CosymplecticStructure<S>,
    f: &ScalarField<S>,
    g: &ScalarField<S>,
    a: &[S],
    fd: &FdConfig<S>,
) -> Result<S> {
    let bundle = section.bundle();
    let up = symplectic_bracket(
        bundle,
        &bundle.lift_function(f)?,
        &bundle.lift_function(g)?,
        a,
        fd,
    )?;
    let down = cosym.bracket_at(f, g, &bundle.project(a), fd)?;
    Ok((up - down).abs())
}
