//! One-parameter symmetries of extended phase spaces, their momentum maps,
//! and reduction by a cyclic coordinate.
//!
//! A [`SymmetryAction`] is a flow `φ_s` on the total chart together with the
//! induced flow on the base and the infinitesimal generators of both. For the
//! action to be *canonical* it must preserve the symplectic form, commute
//! with the fiber translation, and cover the base flow through the
//! projection; [`canonical_action_residuals`] measures all of that pointwise,
//! plus the defining property of a momentum map `J`: its Hamiltonian vector
//! field is the generator, and `J` is constant along fibers and orbits.
//!
//! [`CyclicReduction`] realizes reduction at a momentum level `ν` for the
//! ubiquitous special case where the action is translation in one
//! configuration coordinate `q_k` of a canonical chart and `J = p_k`: the
//! level set `{p_k = ν}` is quotiented by dropping `(q_k, p_k)`, landing in
//! the canonical chart over the remaining coordinates. The residual methods
//! certify, sample point by sample point, that the reduced objects are the
//! ones induced by the quotient: the reduced energy, the reduced
//! 2-form/1-form pair (pullback through the quotient equals restriction to
//! the level), and the reduced Reeb dynamics.

use crate::bundle::{canonical_bundle_named, symplectic_bracket, SymplecticRBundle};
use crate::error::{Error, Result};
use crate::geometry::{
    pullback_one_form_at, pullback_two_form_at, Chart, FdConfig, ScalarField, SmoothMap,
    VectorField,
};
use crate::hamiltonian::{
    hamiltonian_vector_field_at, CosymplecticStructure, HamiltonianSection,
};
use crate::linalg::Mat;
use crate::scalar::{inf_norm_diff, Real};
use std::sync::Arc;

type FlowFn<S> = Arc<dyn Fn(S, &[S]) -> Vec<S> + Send + Sync>;
type FlowJacFn<S> = Arc<dyn Fn(S, &[S]) -> Mat<S> + Send + Sync>;

/// A one-parameter group action given as a flow on the total chart, the
/// covered flow on the base chart, and the generators of both.
#[derive(Clone)]
pub struct SymmetryAction<S> {
    name: String,
    total: Chart,
    base: Chart,
    flow_total: FlowFn<S>,
    flow_base: FlowFn<S>,
    jac_total: Option<FlowJacFn<S>>,
    generator_total: VectorField<S>,
    generator_base: VectorField<S>,
}

impl<S: Real> SymmetryAction<S> {
    pub fn new(
        name: &str,
        total: Chart,
        base: Chart,
        flow_total: impl Fn(S, &[S]) -> Vec<S> + Send + Sync + 'static,
        flow_base: impl Fn(S, &[S]) -> Vec<S> + Send + Sync + 'static,
        generator_total: VectorField<S>,
        generator_base: VectorField<S>,
    ) -> Result<Self> {
        total.expect_same(generator_total.chart(), "action generator")?;
        base.expect_same(generator_base.chart(), "action base generator")?;
        Ok(SymmetryAction {
            name: name.to_string(),
            total,
            base,
            flow_total: Arc::new(flow_total),
            flow_base: Arc::new(flow_base),
            jac_total: None,
            generator_total,
            generator_base,
        })
    }

    /// Attach an analytic Jacobian `∂φ_s/∂a` for the total flow; without it,
    /// pullback checks fall back to finite differences and only reach the
    /// loose tolerance band.
    pub fn with_total_jacobian(
        mut self,
        jac: impl Fn(S, &[S]) -> Mat<S> + Send + Sync + 'static,
    ) -> Self {
        self.jac_total = Some(Arc::new(jac));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn total_chart(&self) -> &Chart {
        &self.total
    }

    pub fn base_chart(&self) -> &Chart {
        &self.base
    }

    pub fn apply_total(&self, s: S, a: &[S]) -> Vec<S> {
        (self.flow_total)(s, a)
    }

    pub fn apply_base(&self, s: S, v: &[S]) -> Vec<S> {
        (self.flow_base)(s, v)
    }

    pub fn generator_total(&self) -> &VectorField<S> {
        &self.generator_total
    }

    pub fn generator_base(&self) -> &VectorField<S> {
        &self.generator_base
    }

    /// The total flow at a fixed parameter as a smooth map.
    pub fn total_map_at(&self, s: S) -> SmoothMap<S> {
        let flow = self.flow_total.clone();
        match &self.jac_total {
            Some(j) => {
                let j = j.clone();
                SmoothMap::with_jacobian(
                    self.total.clone(),
                    self.total.clone(),
                    move |a: &[S]| flow(s, a),
                    move |a: &[S]| j(s, a),
                )
            }
            None => SmoothMap::new(self.total.clone(), self.total.clone(), move |a: &[S]| {
                flow(s, a)
            }),
        }
    }

    /// The base flow at a fixed parameter as a smooth map.
    pub fn base_map_at(&self, s: S) -> SmoothMap<S> {
        let flow = self.flow_base.clone();
        SmoothMap::new(self.base.clone(), self.base.clone(), move |v: &[S]| {
            flow(s, v)
        })
    }

    /// Central-difference check that the declared generators are the
    /// parameter derivatives of the flows at `s = 0`, probed at a total point
    /// and a base point. Finite differencing caps the attainable residual
    /// near the square root of machine precision.
    pub fn generator_residual(&self, a: &[S], v: &[S], fd: &FdConfig<S>) -> Result<S> {
        self.total.expect_point(a, "action generator probe")?;
        self.base.expect_point(v, "action generator probe")?;
        let h = fd.step1(S::one());
        let two_h = h + h;
        let diff = |plus: &[S], minus: &[S], want: &[S]| {
            plus.iter()
                .zip(minus)
                .zip(want)
                .map(|((&p, &m), &w)| ((p - m) / two_h - w).abs())
                .fold(S::zero(), S::max)
        };
        let up = diff(
            &self.apply_total(h, a),
            &self.apply_total(-h, a),
            &self.generator_total.eval(a),
        );
        let down = diff(
            &self.apply_base(h, v),
            &self.apply_base(-h, v),
            &self.generator_base.eval(v),
        );
        Ok(up.max(down))
    }
}

/// A momentum function on the total chart together with its basic
/// representative on the base (`J = j ∘ μ` when the map is genuine).
#[derive(Clone)]
pub struct MomentumMap<S> {
    total: ScalarField<S>,
    base: ScalarField<S>,
}

impl<S: Real> MomentumMap<S> {
    pub fn new(total: ScalarField<S>, base: ScalarField<S>) -> Self {
        MomentumMap { total, base }
    }

    /// `J` on the total chart.
    pub fn total(&self) -> &ScalarField<S> {
        &self.total
    }

    /// The basic representative `j` on the base chart.
    pub fn base(&self) -> &ScalarField<S> {
        &self.base
    }
}

/// Pointwise residuals of the canonical-action axioms. All are exact-zero
/// properties; the `momentum_*` fields stay zero when no momentum is
/// supplied.
#[derive(Clone, Copy, Debug)]
pub struct ActionResiduals<S> {
    /// `‖φ_s*Ω − Ω‖∞` at the probe point.
    pub symplectic: S,
    /// `‖φ_s(ψ_r(a)) − ψ_r(φ_s(a))‖∞` against the fiber translation `ψ_r`.
    pub commutation: S,
    /// `‖μ(φ_s(a)) − φ̄_s(μ(a))‖∞` — the total flow covers the base flow.
    pub equivariance: S,
    /// `‖X_J(a) − ξ(a)‖∞` — the Hamiltonian field of `J` is the generator.
    pub momentum_field: S,
    /// `|J(φ_s(a)) − J(a)|` — `J` is constant along group orbits.
    pub momentum_action_invariance: S,
    /// Worst of `|J(ψ_r(a)) − J(a)|` and `|J(a) − j(μ(a))|` — `J` descends to
    /// the base. This is the axiom the time-translation control violates.
    pub momentum_basicness: S,
}

impl<S: Real> ActionResiduals<S> {
    /// Largest of all six residuals.
    pub fn worst(&self) -> S {
        self.symplectic
            .max(self.commutation)
            .max(self.equivariance)
            .max(self.momentum_field)
            .max(self.momentum_action_invariance)
            .max(self.momentum_basicness)
    }
}

/// Evaluate the canonical-action residuals at a total point `a`, group
/// parameter `s`, and fiber shift `r`.
pub fn canonical_action_residuals<S: Real>(
    bundle: &SymplecticRBundle<S>,
    action: &SymmetryAction<S>,
    momentum: Option<&MomentumMap<S>>,
    a: &[S],
    s: S,
    r: S,
    fd: &FdConfig<S>,
) -> Result<ActionResiduals<S>> {
    bundle
        .total_chart()
        .expect_same(action.total_chart(), "action residuals")?;
    bundle.total_chart().expect_point(a, "action residuals")?;

    let phi = action.total_map_at(s);
    let pulled = pullback_two_form_at(&phi, bundle.omega(), a, fd)?;
    let symplectic = pulled.sub(&bundle.omega().eval(a)).inf_norm();

    let psi = bundle.principal_action();
    let commutation = inf_norm_diff(
        &action.apply_total(s, &psi.apply(r, a)),
        &psi.apply(r, &action.apply_total(s, a)),
    );

    let equivariance = inf_norm_diff(
        &bundle.project(&action.apply_total(s, a)),
        &action.apply_base(s, &bundle.project(a)),
    );

    let (momentum_field, momentum_action_invariance, momentum_basicness) = match momentum {
        None => (S::zero(), S::zero(), S::zero()),
        Some(m) => {
            let xj = hamiltonian_vector_field_at(bundle, m.total(), a, fd)?;
            let field = inf_norm_diff(&xj, &action.generator_total().eval(a));
            let j0 = m.total().eval(a);
            let inv = (m.total().eval(&action.apply_total(s, a)) - j0).abs();
            let basic = (m.total().eval(&psi.apply(r, a)) - j0)
                .abs()
                .max((j0 - m.base().eval(&bundle.project(a))).abs());
            (field, inv, basic)
        }
    };

    Ok(ActionResiduals {
        symplectic,
        commutation,
        equivariance,
        momentum_field,
        momentum_action_invariance,
        momentum_basicness,
    })
}

/// `|H(φ̄_s(v)) − H(v)|` — invariance of a base function under the base flow.
pub fn base_invariance_residual<S: Real>(
    action: &SymmetryAction<S>,
    f: &ScalarField<S>,
    v: &[S],
    s: S,
) -> Result<S> {
    action
        .base_chart()
        .expect_same(f.chart(), "base invariance")?;
    action.base_chart().expect_point(v, "base invariance")?;
    Ok((f.eval(&action.apply_base(s, v)) - f.eval(v)).abs())
}

/// `|{F_h, J}|` at a total point — conservation of the momentum along the
/// extended dynamics; zero when the energy is invariant.
pub fn momentum_conservation_residual<S: Real>(
    section: &HamiltonianSection<S>,
    momentum: &MomentumMap<S>,
    a: &[S],
    fd: &FdConfig<S>,
) -> Result<S> {
    symplectic_bracket(
        section.bundle(),
        section.extended_hamiltonian(),
        momentum.total(),
        a,
        fd,
    )
    .map(|v| v.abs())
}

/// Momentum of a cotangent-lifted point transformation, from its generator on
/// the configuration chart `(t, q…)`: `J(a) = Σᵢ pᵢ ξⁱ(t, q)`, where the sum
/// runs over the chart's conjugate pairs (including the `(t, p)` pair).
/// Values only — models attach explicit gradients where the tight-tolerance
/// suites need them.
pub fn cotangent_momentum<S: Real>(
    total: &Chart,
    config_generator: &VectorField<S>,
) -> Result<ScalarField<S>> {
    let pairs = total
        .cotangent_pairs()
        .ok_or_else(|| Error::Chart {
            chart: total.name().to_string(),
            msg: "cotangent momentum requires a cotangent-type chart".to_string(),
        })?
        .clone();
    if config_generator.chart().dim() != pairs.len() {
        return Err(Error::Dimension {
            context: "cotangent momentum configuration chart",
            expected: pairs.len(),
            got: config_generator.chart().dim(),
        });
    }
    let gen = config_generator.clone();
    Ok(ScalarField::new(total.clone(), move |a: &[S]| {
        let cfg = pairs.config_point(a);
        let xi = gen.eval(&cfg);
        pairs
            .pairs()
            .iter()
            .enumerate()
            .map(|(i, &(_, pslot))| a[pslot] * xi[i])
            .fold(S::zero(), |acc, v| acc + v)
    }))
}

/// The time-translation flow `t ↦ t + s` on both levels, with generator
/// `∂/∂t`. A negative control: it preserves the symplectic form, commutes
/// with the fiber translation, and covers the base flow — but its Hamiltonian
/// function is the fiber coordinate `p` itself, which is not basic, so no
/// genuine momentum map exists.
pub fn time_translation_action<S: Real>(bundle: &SymplecticRBundle<S>) -> SymmetryAction<S> {
    let tot = bundle.total_chart().clone();
    let base = bundle.base_chart().clone();
    let tdim = tot.dim();
    let shift = |slot: usize| {
        move |s: S, x: &[S]| {
            let mut y = x.to_vec();
            y[slot] = y[slot] + s;
            y
        }
    };
    SymmetryAction::new(
        "time-translation",
        tot.clone(),
        base.clone(),
        shift(0),
        shift(0),
        VectorField::coordinate(tot, 0),
        VectorField::coordinate(base, 0),
    )
    .expect("charts match their own generators")
    .with_total_jacobian(move |_s: S, _a: &[S]| Mat::identity(tdim))
}

/// The (non-basic) Hamiltonian function of the time translation, `J = p`,
/// paired with a zero base representative. Feeding this to
/// [`canonical_action_residuals`] drives the basicness residual to `|r|`.
pub fn fiber_momentum_candidate<S: Real>(bundle: &SymplecticRBundle<S>) -> MomentumMap<S> {
    MomentumMap::new(
        ScalarField::coordinate(bundle.total_chart().clone(), bundle.fiber_slot()),
        ScalarField::new(bundle.base_chart().clone(), |_: &[S]| S::zero()),
    )
}

/// Translation action in a configuration coordinate of a canonical chart,
/// with its conjugate-momentum map. `pair_index` counts the `(qᵏ, pₖ)` pairs
/// (the `(t, p)` pair excluded).
pub fn cyclic_translation_action<S: Real>(
    bundle: &SymplecticRBundle<S>,
    pair_index: usize,
) -> Result<(SymmetryAction<S>, MomentumMap<S>)> {
    let n = bundle.n_pairs();
    if pair_index >= n {
        return Err(Error::Precondition(format!(
            "cyclic pair index {pair_index} out of range for {n} configuration pairs"
        )));
    }
    let tot = bundle.total_chart().clone();
    let base = bundle.base_chart().clone();
    let q_total = 2 + pair_index;
    let p_total = 2 + n + pair_index;
    let q_base = 1 + pair_index;
    let p_base = 1 + n + pair_index;
    let tdim = tot.dim();
    let shift = |slot: usize| {
        move |s: S, x: &[S]| {
            let mut y = x.to_vec();
            y[slot] = y[slot] + s;
            y
        }
    };
    let name = format!("{}-translation", tot.coord(q_total));
    let action = SymmetryAction::new(
        &name,
        tot.clone(),
        base.clone(),
        shift(q_total),
        shift(q_base),
        VectorField::coordinate(tot.clone(), q_total),
        VectorField::coordinate(base.clone(), q_base),
    )?
    .with_total_jacobian(move |_s: S, _a: &[S]| Mat::identity(tdim));
    let momentum = MomentumMap::new(
        ScalarField::coordinate(tot, p_total),
        ScalarField::coordinate(base, p_base),
    );
    Ok((action, momentum))
}

/// Reduction of a canonical bundle at momentum level `ν` for a cyclic
/// configuration coordinate: the level set `{p_k = ν}` quotiented by the
/// `q_k`-translation, realized as the canonical bundle over the remaining
/// coordinates.
///
/// The construction assumes the canonical constant symplectic form upstairs;
/// the residual methods check the conclusion pointwise, so a deformed or
/// corrupted form surfaces as a failing residual rather than silent error.
#[derive(Clone)]
pub struct CyclicReduction<S> {
    full: SymplecticRBundle<S>,
    reduced: SymplecticRBundle<S>,
    nu: S,
    q_total: usize,
    p_total: usize,
    q_base: usize,
    p_base: usize,
    kept_total: Vec<usize>,
    kept_base: Vec<usize>,
    lev_slots: Vec<usize>,
    level: Chart,
}

impl<S: Real> CyclicReduction<S> {
    pub fn new(
        full: &SymplecticRBundle<S>,
        pair_index: usize,
        nu: S,
        reduced_name: &str,
    ) -> Result<Self> {
        let n = full.n_pairs();
        if pair_index >= n {
            return Err(Error::Precondition(format!(
                "cyclic pair index {pair_index} out of range for {n} configuration pairs"
            )));
        }
        let q_total = 2 + pair_index;
        let p_total = 2 + n + pair_index;
        let q_base = 1 + pair_index;
        let p_base = 1 + n + pair_index;
        let coords = full.total_chart().coords();
        let kept_q: Vec<&str> = (0..n)
            .filter(|&j| j != pair_index)
            .map(|j| coords[2 + j])
            .collect();
        let reduced = canonical_bundle_named(reduced_name, &kept_q)?;
        let kept_total: Vec<usize> = (0..full.total_chart().dim())
            .filter(|&i| i != q_total && i != p_total)
            .collect();
        let kept_base: Vec<usize> = (0..full.base_chart().dim())
            .filter(|&i| i != q_base && i != p_base)
            .collect();
        let lev_slots: Vec<usize> = (0..full.base_chart().dim())
            .filter(|&i| i != p_base)
            .collect();
        let base_coords = full.base_chart().coords();
        let lev_names: Vec<&str> = lev_slots.iter().map(|&i| base_coords[i]).collect();
        let level = Chart::new(&format!("{reduced_name}_level"), &lev_names)?;
        Ok(CyclicReduction {
            full: full.clone(),
            reduced,
            nu,
            q_total,
            p_total,
            q_base,
            p_base,
            kept_total,
            kept_base,
            lev_slots,
            level,
        })
    }

    pub fn full(&self) -> &SymplecticRBundle<S> {
        &self.full
    }

    pub fn reduced(&self) -> &SymplecticRBundle<S> {
        &self.reduced
    }

    pub fn nu(&self) -> S {
        self.nu
    }

    /// The momentum map of the cyclic translation: `J = p_k`.
    pub fn momentum_map(&self) -> MomentumMap<S> {
        MomentumMap::new(
            ScalarField::coordinate(self.full.total_chart().clone(), self.p_total),
            ScalarField::coordinate(self.full.base_chart().clone(), self.p_base),
        )
    }

    /// Distance of a total point from the momentum level.
    pub fn level_residual(&self, a: &[S]) -> S {
        (a[self.p_total] - self.nu).abs()
    }

    /// Quotient of a total point on (or near) the level set.
    pub fn project_total(&self, a: &[S]) -> Vec<S> {
        self.kept_total.iter().map(|&i| a[i]).collect()
    }

    /// Quotient of a base point on (or near) the level set.
    pub fn project_base(&self, v: &[S]) -> Vec<S> {
        self.kept_base.iter().map(|&i| v[i]).collect()
    }

    /// Embed a reduced base point into the full base at a chosen cyclic
    /// coordinate value, with the momentum pinned at `ν`.
    pub fn embed_base(&self, y: &[S], q_value: S) -> Vec<S> {
        let mut v = vec![S::zero(); self.full.base_chart().dim()];
        for (r, &i) in self.kept_base.iter().enumerate() {
            v[i] = y[r];
        }
        v[self.q_base] = q_value;
        v[self.p_base] = self.nu;
        v
    }

    /// Embed a reduced total point into the full total chart.
    pub fn embed_total(&self, y: &[S], q_value: S) -> Vec<S> {
        let mut a = vec![S::zero(); self.full.total_chart().dim()];
        for (r, &i) in self.kept_total.iter().enumerate() {
            a[i] = y[r];
        }
        a[self.q_total] = q_value;
        a[self.p_total] = self.nu;
        a
    }

    /// The base embedding at a fixed cyclic value, as a smooth map with its
    /// constant Jacobian.
    pub fn embed_base_map(&self, q_value: S) -> SmoothMap<S> {
        let this = self.clone();
        let jac = Mat::from_fn(
            self.full.base_chart().dim(),
            self.reduced.base_chart().dim(),
            |r, c| {
                if this.kept_base[c] == r {
                    S::one()
                } else {
                    S::zero()
                }
            },
        );
        let this2 = self.clone();
        SmoothMap::with_jacobian(
            self.reduced.base_chart().clone(),
            self.full.base_chart().clone(),
            move |y: &[S]| this2.embed_base(y, q_value),
            move |_: &[S]| jac.clone(),
        )
    }

    /// Chart of the momentum level set: the full base coordinates with the
    /// cyclic momentum removed (it is pinned at `ν`).
    pub fn level_chart(&self) -> &Chart {
        &self.level
    }

    /// Inclusion of the level set into the full base.
    pub fn level_inclusion(&self) -> SmoothMap<S> {
        let slots = self.lev_slots.clone();
        let p_base = self.p_base;
        let nu = self.nu;
        let dim = self.full.base_chart().dim();
        let jac = Mat::from_fn(dim, slots.len(), |r, c| {
            if slots[c] == r {
                S::one()
            } else {
                S::zero()
            }
        });
        let slots2 = self.lev_slots.clone();
        SmoothMap::with_jacobian(
            self.level.clone(),
            self.full.base_chart().clone(),
            move |y: &[S]| {
                let mut v = vec![S::zero(); dim];
                for (j, &i) in slots2.iter().enumerate() {
                    v[i] = y[j];
                }
                v[p_base] = nu;
                v
            },
            move |_: &[S]| jac.clone(),
        )
    }

    /// Quotient of the level set onto the reduced base (drops the cyclic
    /// coordinate).
    pub fn level_quotient(&self) -> SmoothMap<S> {
        // Position of each kept base slot inside the level coordinates.
        let sel: Vec<usize> = self
            .kept_base
            .iter()
            .map(|&k| {
                self.lev_slots
                    .iter()
                    .position(|&l| l == k)
                    .expect("kept slots are level slots")
            })
            .collect();
        let jac = Mat::from_fn(sel.len(), self.lev_slots.len(), |r, c| {
            if sel[r] == c {
                S::one()
            } else {
                S::zero()
            }
        });
        let sel2 = sel.clone();
        SmoothMap::with_jacobian(
            self.level.clone(),
            self.reduced.base_chart().clone(),
            move |y: &[S]| sel2.iter().map(|&i| y[i]).collect(),
            move |_: &[S]| jac.clone(),
        )
    }

    /// Restrict a full base point on the level set to level coordinates.
    pub fn restrict_base(&self, v: &[S]) -> Vec<S> {
        self.lev_slots.iter().map(|&i| v[i]).collect()
    }

    /// Reduce a Hamiltonian section: the reduced energy is
    /// `H_ν(y) = H(ι(y))` with the cyclic coordinate frozen at 0 and the
    /// momentum at `ν`. Meaningful only for an invariant energy — check with
    /// [`base_invariance_residual`].
    pub fn reduce_section(
        &self,
        section: &HamiltonianSection<S>,
    ) -> Result<HamiltonianSection<S>> {
        self.full
            .base_chart()
            .expect_same(section.energy().chart(), "section reduction")?;
        let reduced_energy = section.energy().compose(&self.embed_base_map(S::zero()))?;
        HamiltonianSection::new(self.reduced.clone(), reduced_energy)
    }

    /// Residual of the extended-function identity on the level set:
    /// `F_{h_ν}(π(a)) = F_h(a)` for `a` with `p_k = ν`; includes the level
    /// offset itself.
    pub fn extended_match_residual(
        &self,
        section: &HamiltonianSection<S>,
        reduced_section: &HamiltonianSection<S>,
        a: &[S],
    ) -> Result<S> {
        self.full.total_chart().expect_point(a, "extended match")?;
        let lev = self.level_residual(a);
        let up = section.extended_hamiltonian().eval(a);
        let down = reduced_section
            .extended_hamiltonian()
            .eval(&self.project_total(a));
        Ok(lev.max((up - down).abs()))
    }

    /// Residual of the structure identity on the level set: the pullback of
    /// the reduced pair through the quotient equals the restriction of the
    /// full pair, `π*(ω_ν, η_ν) = ι*(ω_h, η_h)`, probed at a level point.
    pub fn reduced_pair_match_residual(
        &self,
        full_pair: &CosymplecticStructure<S>,
        reduced_pair: &CosymplecticStructure<S>,
        y: &[S],
        fd: &FdConfig<S>,
    ) -> Result<S> {
        let inc = self.level_inclusion();
        let quo = self.level_quotient();
        let wi = pullback_two_form_at(&inc, full_pair.omega(), y, fd)?;
        let wq = pullback_two_form_at(&quo, reduced_pair.omega(), y, fd)?;
        let ei = pullback_one_form_at(&inc, full_pair.eta(), y, fd)?;
        let eq = pullback_one_form_at(&quo, reduced_pair.eta(), y, fd)?;
        Ok(wi.sub(&wq).inf_norm().max(inf_norm_diff(&ei, &eq)))
    }

    /// Residual of the dynamics identity at a full base point `v` on the
    /// level set: the Reeb field projects onto the reduced Reeb field, and
    /// its cyclic-momentum component vanishes (the level is invariant).
    pub fn reduced_dynamics_residual(
        &self,
        full_pair: &CosymplecticStructure<S>,
        reduced_pair: &CosymplecticStructure<S>,
        v: &[S],
    ) -> Result<S> {
        self.full
            .base_chart()
            .expect_same(full_pair.chart(), "reduced dynamics")?;
        self.reduced
            .base_chart()
            .expect_same(reduced_pair.chart(), "reduced dynamics")?;
        let lev = (v[self.p_base] - self.nu).abs();
        let r_full = full_pair.reeb_at(v)?;
        let r_red = reduced_pair.reeb_at(&self.project_base(v))?;
        let proj: Vec<S> = self.kept_base.iter().map(|&i| r_full[i]).collect();
        let drift = r_full[self.p_base].abs();
        Ok(inf_norm_diff(&proj, &r_red).max(drift).max(lev))
    }
}
