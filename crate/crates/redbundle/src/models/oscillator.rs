//! Planar oscillator with time-dependent damping and stiffness.
//!
//! The energy on the base chart `(t, q₁, q₂, p₁, p₂)` is
//!
//! ```text
//! H = e^{σ(t)} (p₁² + p₂²) / 2 + F(t) (q₁² + q₂²)
//! ```
//!
//! with `σ` the damping exponent and `F` the stiffness profile. The system is
//! invariant under the clockwise rotation that advances the polar angle,
//!
//! ```text
//! (q₁, q₂) ↦ (q₁ cos s + q₂ sin s, −q₁ sin s + q₂ cos s),
//! ```
//!
//! momenta transforming identically, with conserved momentum
//! `J = q₂ p₁ − q₁ p₂`.
//!
//! The polar chart uses the clockwise angle, `q₁ = r cos θ`, `q₂ = −r sin θ`,
//! so the rotation becomes the translation `θ ↦ θ + s` and `J = p_θ`. In that
//! chart the energy reads `H = e^{σ} (p_r² + p_θ²/r²)/2 + F r²`, `θ` is
//! cyclic, and fixing `p_θ = ν` reduces the system to the radial chart
//! `(t, r, p_r)` with energy `H_ν = e^{σ} (p_r² + ν²/r²)/2 + F r²`.

use crate::bundle::{canonical_bundle_named, SymplecticRBundle};
use crate::error::Result;
use crate::geometry::{Chart, ScalarField, SmoothMap, VectorField};
use crate::hamiltonian::HamiltonianSection;
use crate::linalg::Mat;
use crate::models::coeff::Coeff;
use crate::sample::TestBox;
use crate::scalar::Real;
use crate::symmetry::{cyclic_translation_action, CyclicReduction, MomentumMap, SymmetryAction};

/// Model parameters: damping exponent `σ(t)` and stiffness `F(t)`.
#[derive(Clone, Debug)]
pub struct Oscillator {
    pub sigma: Coeff,
    pub stiffness: Coeff,
}

/// A fully assembled chart of the oscillator: bundle, Hamiltonian section,
/// rotation symmetry with its momentum map, and a sampling box on the total
/// chart for randomized checks.
pub struct OscillatorChart<S> {
    pub bundle: SymplecticRBundle<S>,
    pub section: HamiltonianSection<S>,
    pub action: SymmetryAction<S>,
    pub momentum: MomentumMap<S>,
    pub sample_box: TestBox<S>,
}

/// The reduced radial system at momentum level `ν`.
pub struct OscillatorReduced<S> {
    pub reduction: CyclicReduction<S>,
    pub section: HamiltonianSection<S>,
    pub sample_box: TestBox<S>,
    pub nu: S,
}

impl Oscillator {
    pub fn new(sigma: Coeff, stiffness: Coeff) -> Oscillator {
        Oscillator { sigma, stiffness }
    }

    /// The configuration used by the conserved-quantity acceptance runs:
    /// `σ(t) = 0.1 t`, `F(t) = 0.5`.
    pub fn standard() -> Oscillator {
        Oscillator::new(Coeff::Poly(vec![0.0, 0.1]), Coeff::Const(0.5))
    }

    /// Energy on the Cartesian base chart `(t, q₁, q₂, p₁, p₂)`, with exact
    /// gradient.
    pub fn cartesian_energy<S: Real>(&self, base: Chart) -> ScalarField<S> {
        let (sig, stiff) = (self.sigma.clone(), self.stiffness.clone());
        let (sig2, stiff2) = (sig.clone(), stiff.clone());
        let half = S::of(0.5);
        let two = S::of(2.0);
        ScalarField::with_gradient(
            base,
            move |v: &[S]| {
                let es = sig.value(v[0]).exp();
                es * half * (v[3] * v[3] + v[4] * v[4])
                    + stiff.value(v[0]) * (v[1] * v[1] + v[2] * v[2])
            },
            move |v: &[S]| {
                let t = v[0];
                let es = sig2.value(t).exp();
                let kin = es * half * (v[3] * v[3] + v[4] * v[4]);
                let f = stiff2.value(t);
                vec![
                    sig2.derivative(t) * kin + stiff2.derivative(t) * (v[1] * v[1] + v[2] * v[2]),
                    two * f * v[1],
                    two * f * v[2],
                    es * v[3],
                    es * v[4],
                ]
            },
        )
    }

    /// Energy on the polar base chart `(t, r, θ, p_r, p_θ)`, with exact
    /// gradient. The angle is cyclic.
    pub fn polar_energy<S: Real>(&self, base: Chart) -> ScalarField<S> {
        let (sig, stiff) = (self.sigma.clone(), self.stiffness.clone());
        let (sig2, stiff2) = (sig.clone(), stiff.clone());
        let half = S::of(0.5);
        let two = S::of(2.0);
        ScalarField::with_gradient(
            base,
            move |v: &[S]| {
                let es = sig.value(v[0]).exp();
                let r = v[1];
                es * half * (v[3] * v[3] + v[4] * v[4] / (r * r))
                    + stiff.value(v[0]) * r * r
            },
            move |v: &[S]| {
                let t = v[0];
                let es = sig2.value(t).exp();
                let r = v[1];
                let kin = es * half * (v[3] * v[3] + v[4] * v[4] / (r * r));
                let f = stiff2.value(t);
                vec![
                    sig2.derivative(t) * kin + stiff2.derivative(t) * r * r,
                    -es * v[4] * v[4] / (r * r * r) + two * f * r,
                    S::zero(),
                    es * v[3],
                    es * v[4] / (r * r),
                ]
            },
        )
    }

    /// Assembled Cartesian chart with the rotation action.
    pub fn cartesian<S: Real>(&self) -> Result<OscillatorChart<S>> {
        let bundle = canonical_bundle_named::<S>("oscillator", &["q1", "q2"])?;
        let section = HamiltonianSection::new(
            bundle.clone(),
            self.cartesian_energy(bundle.base_chart().clone()),
        )?;
        let (action, momentum) = rotation_action(&bundle)?;
        Ok(OscillatorChart {
            bundle,
            section,
            action,
            momentum,
            sample_box: Self::cartesian_box(),
        })
    }

    /// Assembled polar chart with the angle-translation action.
    pub fn polar<S: Real>(&self) -> Result<OscillatorChart<S>> {
        let bundle = canonical_bundle_named::<S>("oscillator_polar", &["r", "th"])?;
        let section = HamiltonianSection::new(
            bundle.clone(),
            self.polar_energy(bundle.base_chart().clone()),
        )?;
        let (action, momentum) = cyclic_translation_action(&bundle, 1)?;
        Ok(OscillatorChart {
            bundle,
            section,
            action,
            momentum,
            sample_box: Self::polar_box(),
        })
    }

    /// The reduced radial system at angular-momentum level `ν`, built by
    /// quotienting the polar chart along its cyclic angle.
    pub fn reduced<S: Real>(&self, nu: S) -> Result<OscillatorReduced<S>> {
        let polar = self.polar::<S>()?;
        let reduction = CyclicReduction::new(&polar.bundle, 1, nu, "oscillator_reduced")?;
        let section = reduction.reduce_section(&polar.section)?;
        Ok(OscillatorReduced {
            reduction,
            section,
            sample_box: Self::reduced_box(),
            nu,
        })
    }

    /// Closed-form Reeb field of the reduced system on its base chart
    /// `(t, r, p_r)`:
    ///
    /// ```text
    /// R = ∂t + e^{σ} p_r ∂r + (e^{σ} ν²/r³ − 2 F r) ∂p_r
    /// ```
    pub fn reduced_reeb_closed_form<S: Real>(&self, nu: S, base: Chart) -> VectorField<S> {
        let (sig, stiff) = (self.sigma.clone(), self.stiffness.clone());
        let two = S::of(2.0);
        VectorField::new(base, move |v: &[S]| {
            let es = sig.value(v[0]).exp();
            let r = v[1];
            vec![
                S::one(),
                es * v[2],
                es * nu * nu / (r * r * r) - two * stiff.value(v[0]) * r,
            ]
        })
    }

    /// Right-hand side of the extended dynamics on the Cartesian total chart
    /// `(t, p, q₁, q₂, p₁, p₂)` in closed form (matches the Hamiltonian
    /// vector field of the extended function; tested against it).
    pub fn cartesian_extended_rhs<S: Real>(&self) -> impl Fn(&[S]) -> Vec<S> {
        let (sig, stiff) = (self.sigma.clone(), self.stiffness.clone());
        let half = S::of(0.5);
        let two = S::of(2.0);
        move |y: &[S]| {
            let t = y[0];
            let es = sig.value(t).exp();
            let f = stiff.value(t);
            let kin = es * half * (y[4] * y[4] + y[5] * y[5]);
            let qsq = y[2] * y[2] + y[3] * y[3];
            vec![
                S::one(),
                -(sig.derivative(t) * kin + stiff.derivative(t) * qsq),
                es * y[4],
                es * y[5],
                -two * f * y[2],
                -two * f * y[3],
            ]
        }
    }

    /// Extended dynamics on the polar total chart `(t, p, r, θ, p_r, p_θ)`.
    /// The angular momentum slot has zero velocity: `ṗ_θ = 0`.
    pub fn polar_extended_rhs<S: Real>(&self) -> impl Fn(&[S]) -> Vec<S> {
        let (sig, stiff) = (self.sigma.clone(), self.stiffness.clone());
        let half = S::of(0.5);
        let two = S::of(2.0);
        move |y: &[S]| {
            let t = y[0];
            let es = sig.value(t).exp();
            let f = stiff.value(t);
            let r = y[2];
            let kin = es * half * (y[4] * y[4] + y[5] * y[5] / (r * r));
            vec![
                S::one(),
                -(sig.derivative(t) * kin + stiff.derivative(t) * r * r),
                es * y[4],
                es * y[5] / (r * r),
                es * y[5] * y[5] / (r * r * r) - two * f * r,
                S::zero(),
            ]
        }
    }

    /// Extended dynamics on the reduced total chart `(t, p, r, p_r)` at
    /// momentum level `ν`.
    pub fn reduced_extended_rhs<S: Real>(&self, nu: S) -> impl Fn(&[S]) -> Vec<S> {
        let (sig, stiff) = (self.sigma.clone(), self.stiffness.clone());
        let half = S::of(0.5);
        let two = S::of(2.0);
        move |y: &[S]| {
            let t = y[0];
            let es = sig.value(t).exp();
            let f = stiff.value(t);
            let r = y[2];
            let kin = es * half * (y[3] * y[3] + nu * nu / (r * r));
            vec![
                S::one(),
                -(sig.derivative(t) * kin + stiff.derivative(t) * r * r),
                es * y[3],
                es * nu * nu / (r * r * r) - two * f * r,
            ]
        }
    }

    /// The transition from the polar to the Cartesian total chart, with
    /// analytic Jacobian. Configuration: `q₁ = r cos θ`, `q₂ = −r sin θ`;
    /// momenta transform by the inverse-transpose configuration Jacobian:
    /// `p₁ = cos θ p_r − sin θ p_θ / r`, `p₂ = −sin θ p_r − cos θ p_θ / r`.
    pub fn polar_to_cartesian<S: Real>(&self) -> Result<SmoothMap<S>> {
        let polar = canonical_bundle_named::<S>("oscillator_polar", &["r", "th"])?;
        let cart = canonical_bundle_named::<S>("oscillator", &["q1", "q2"])?;
        Ok(SmoothMap::with_jacobian(
            polar.total_chart().clone(),
            cart.total_chart().clone(),
            |x: &[S]| {
                let (r, th, pr, pth) = (x[2], x[3], x[4], x[5]);
                let (st, ct) = (th.sin(), th.cos());
                vec![
                    x[0],
                    x[1],
                    r * ct,
                    -r * st,
                    ct * pr - st * pth / r,
                    -st * pr - ct * pth / r,
                ]
            },
            |x: &[S]| {
                let (r, th, pr, pth) = (x[2], x[3], x[4], x[5]);
                let (st, ct) = (th.sin(), th.cos());
                let r2 = r * r;
                let mut j = Mat::zeros(6, 6);
                j[(0, 0)] = S::one();
                j[(1, 1)] = S::one();
                j[(2, 2)] = ct;
                j[(2, 3)] = -r * st;
                j[(3, 2)] = -st;
                j[(3, 3)] = -r * ct;
                j[(4, 2)] = st * pth / r2;
                j[(4, 3)] = -st * pr - ct * pth / r;
                j[(4, 4)] = ct;
                j[(4, 5)] = -st / r;
                j[(5, 2)] = ct * pth / r2;
                j[(5, 3)] = -ct * pr + st * pth / r;
                j[(5, 4)] = -st;
                j[(5, 5)] = -ct / r;
                j
            },
        ))
    }

    /// The inverse transition on the domain `r > 0`, `θ ∈ (−π, π)`. The
    /// radial momentum is the outward projection `p_r = (q·p)/r`, and the
    /// angle momentum is the conserved rotation momentum `p_θ = q₂p₁ − q₁p₂`.
    pub fn cartesian_to_polar<S: Real>(&self) -> Result<SmoothMap<S>> {
        let polar = canonical_bundle_named::<S>("oscillator_polar", &["r", "th"])?;
        let cart = canonical_bundle_named::<S>("oscillator", &["q1", "q2"])?;
        Ok(SmoothMap::new(
            cart.total_chart().clone(),
            polar.total_chart().clone(),
            |x: &[S]| {
                let (q1, q2, p1, p2) = (x[2], x[3], x[4], x[5]);
                let r = (q1 * q1 + q2 * q2).sqrt();
                vec![
                    x[0],
                    x[1],
                    r,
                    (-q2).atan2(q1),
                    (q1 * p1 + q2 * p2) / r,
                    q2 * p1 - q1 * p2,
                ]
            },
        ))
    }

    /// Sampling box on the Cartesian total chart.
    pub fn cartesian_box<S: Real>() -> TestBox<S> {
        let b = |lo: f64, hi: f64| (S::of(lo), S::of(hi));
        TestBox::new(&[
            b(0.0, 5.0),
            b(-2.0, 2.0),
            b(-2.0, 2.0),
            b(-2.0, 2.0),
            b(-2.0, 2.0),
            b(-2.0, 2.0),
        ])
    }

    /// Sampling box on the polar total chart; keeps the radius away from the
    /// coordinate singularity at `r = 0`.
    pub fn polar_box<S: Real>() -> TestBox<S> {
        let b = |lo: f64, hi: f64| (S::of(lo), S::of(hi));
        TestBox::new(&[
            b(0.0, 5.0),
            b(-2.0, 2.0),
            b(0.5, 2.0),
            b(-3.0, 3.0),
            b(-2.0, 2.0),
            b(-2.0, 2.0),
        ])
    }

    /// Sampling box on the reduced total chart `(t, p, r, p_r)`.
    pub fn reduced_box<S: Real>() -> TestBox<S> {
        let b = |lo: f64, hi: f64| (S::of(lo), S::of(hi));
        TestBox::new(&[b(0.0, 5.0), b(-2.0, 2.0), b(0.5, 2.0), b(-2.0, 2.0)])
    }
}

/// The clockwise rotation action on the Cartesian charts with its momentum
/// map `J = q₂p₁ − q₁p₂`, all pieces analytic.
pub fn rotation_action<S: Real>(
    bundle: &SymplecticRBundle<S>,
) -> Result<(SymmetryAction<S>, MomentumMap<S>)> {
    let tot = bundle.total_chart().clone();
    let base = bundle.base_chart().clone();
    let rotate_pairs = |pairs: &[(usize, usize)], s: S, x: &[S]| {
        let (sn, c) = (s.sin(), s.cos());
        let mut y = x.to_vec();
        for &(i, j) in pairs {
            y[i] = x[i] * c + x[j] * sn;
            y[j] = -x[i] * sn + x[j] * c;
        }
        y
    };
    let flow_total = move |s: S, x: &[S]| rotate_pairs(&[(2, 3), (4, 5)], s, x);
    let flow_base = move |s: S, x: &[S]| rotate_pairs(&[(1, 2), (3, 4)], s, x);
    let gen_total = VectorField::new(tot.clone(), |x: &[S]| {
        vec![S::zero(), S::zero(), x[3], -x[2], x[5], -x[4]]
    });
    let gen_base = VectorField::new(base.clone(), |x: &[S]| {
        vec![S::zero(), x[2], -x[1], x[4], -x[3]]
    });
    let action = SymmetryAction::new(
        "rotation",
        tot.clone(),
        base.clone(),
        flow_total,
        flow_base,
        gen_total,
        gen_base,
    )?
    .with_total_jacobian(|s: S, _x: &[S]| {
        let (sn, c) = (s.sin(), s.cos());
        let mut j = Mat::zeros(6, 6);
        j[(0, 0)] = S::one();
        j[(1, 1)] = S::one();
        for &(a, b) in &[(2usize, 3usize), (4, 5)] {
            j[(a, a)] = c;
            j[(a, b)] = sn;
            j[(b, a)] = -sn;
            j[(b, b)] = c;
        }
        j
    });
    let momentum = MomentumMap::new(
        ScalarField::with_gradient(
            tot,
            |x: &[S]| x[3] * x[4] - x[2] * x[5],
            |x: &[S]| vec![S::zero(), S::zero(), -x[5], x[4], x[3], -x[2]],
        ),
        ScalarField::with_gradient(
            base,
            |x: &[S]| x[2] * x[3] - x[1] * x[4],
            |x: &[S]| vec![S::zero(), -x[4], x[3], x[2], -x[1]],
        ),
    );
    Ok((action, momentum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FdConfig;
    use crate::integrate::{integrate, Method};
    use crate::sample::rng_for;
    use crate::scalar::inf_norm_diff;
    use crate::symmetry::{canonical_action_residuals, momentum_conservation_residual};

    fn model() -> Oscillator {
        Oscillator::new(
            Coeff::parse("poly:0,0.1").unwrap(),
            Coeff::parse("const:0.5").unwrap(),
        )
    }

    #[test]
    fn energies_agree_across_the_chart_transition() {
        let m = model();
        let cart = m.cartesian::<f64>().unwrap();
        let polar = m.polar::<f64>().unwrap();
        let to_cart = m.polar_to_cartesian::<f64>().unwrap();
        let fd = FdConfig::default();
        let mut rng = rng_for(11, "osc-transition");
        for x in Oscillator::polar_box::<f64>().samples(&mut rng, 40) {
            let y = to_cart.apply(&x);
            let hp = polar.section.energy().eval(&polar.bundle.project(&x));
            let hc = cart.section.energy().eval(&cart.bundle.project(&y));
            assert!((hp - hc).abs() < 1e-12, "energy mismatch {hp} vs {hc}");
            // Chain rule: ∇(H_cart ∘ φ) = Jᵀ (∇H_cart ∘ φ) on total-chart
            // lifts of the energies.
            let hp_tot = polar.bundle.lift_function(polar.section.energy()).unwrap();
            let hc_tot = cart.bundle.lift_function(cart.section.energy()).unwrap();
            let j = to_cart.jacobian(&x, &fd).unwrap();
            let gc = hc_tot.gradient(&y).unwrap();
            let gp = hp_tot.gradient(&x).unwrap();
            let pulled = j.transpose().mul_vec(&gc);
            assert!(inf_norm_diff(&gp, &pulled) < 1e-10);
        }
    }

    #[test]
    fn transition_jacobian_matches_finite_differences() {
        let m = model();
        let to_cart = m.polar_to_cartesian::<f64>().unwrap();
        let fd = FdConfig::default();
        let mut rng = rng_for(12, "osc-jac");
        for x in Oscillator::polar_box::<f64>().samples(&mut rng, 25) {
            let j = to_cart.jacobian(&x, &fd).unwrap();
            let j_fd = to_cart.jacobian_fd_coarse(&x, &fd).unwrap();
            assert!(j.sub(&j_fd).inf_norm() < 1e-6);
        }
    }

    #[test]
    fn transition_round_trips() {
        let m = model();
        let to_cart = m.polar_to_cartesian::<f64>().unwrap();
        let to_polar = m.cartesian_to_polar::<f64>().unwrap();
        let mut rng = rng_for(13, "osc-roundtrip");
        for x in Oscillator::polar_box::<f64>().samples(&mut rng, 25) {
            let back = to_polar.apply(&to_cart.apply(&x));
            assert!(inf_norm_diff(&x, &back) < 1e-12);
        }
    }

    #[test]
    fn rotation_in_cartesian_is_angle_shift_in_polar() {
        let m = model();
        let cart = m.cartesian::<f64>().unwrap();
        let polar = m.polar::<f64>().unwrap();
        let to_cart = m.polar_to_cartesian::<f64>().unwrap();
        let mut rng = rng_for(14, "osc-conjugacy");
        let s = 0.83;
        for x in Oscillator::polar_box::<f64>().samples(&mut rng, 25) {
            let via_polar = to_cart.apply(&polar.action.apply_total(s, &x));
            let via_cart = cart.action.apply_total(s, &to_cart.apply(&x));
            assert!(inf_norm_diff(&via_polar, &via_cart) < 1e-12);
            // Momentum agrees across the transition.
            let jp = polar.momentum.total().eval(&x);
            let jc = cart.momentum.total().eval(&to_cart.apply(&x));
            assert!((jp - jc).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_satisfies_all_action_axioms() {
        let m = model();
        let cart = m.cartesian::<f64>().unwrap();
        let fd = FdConfig::default();
        let mut rng = rng_for(15, "osc-axioms");
        let bx = Oscillator::cartesian_box::<f64>();
        for a in bx.samples(&mut rng, 10) {
            let res = canonical_action_residuals(
                &cart.bundle,
                &cart.action,
                Some(&cart.momentum),
                &a,
                0.37,
                -0.92,
                &fd,
            )
            .unwrap();
            assert!(res.symplectic < 1e-10, "symplectic {}", res.symplectic);
            assert!(res.commutation < 1e-12);
            assert!(res.equivariance < 1e-12);
            assert!(res.momentum_field < 1e-10);
            assert!(res.momentum_action_invariance < 1e-12);
            assert!(res.momentum_basicness < 1e-12);
        }
    }

    #[test]
    fn closed_form_dynamics_match_section_dynamics() {
        let m = model();
        let fd = FdConfig::default();
        let mut rng = rng_for(16, "osc-rhs");
        let cart = m.cartesian::<f64>().unwrap();
        let rhs = m.cartesian_extended_rhs::<f64>();
        for a in Oscillator::cartesian_box::<f64>().samples(&mut rng, 15) {
            let want = cart.section.dynamics_at(&a, &fd).unwrap();
            assert!(inf_norm_diff(&rhs(&a), &want) < 1e-10);
        }
        let polar = m.polar::<f64>().unwrap();
        let rhs_p = m.polar_extended_rhs::<f64>();
        for a in Oscillator::polar_box::<f64>().samples(&mut rng, 15) {
            let want = polar.section.dynamics_at(&a, &fd).unwrap();
            assert!(inf_norm_diff(&rhs_p(&a), &want) < 1e-10);
        }
        let red = m.reduced::<f64>(0.7).unwrap();
        let rhs_r = m.reduced_extended_rhs::<f64>(0.7);
        for a in Oscillator::reduced_box::<f64>().samples(&mut rng, 15) {
            let want = red.section.dynamics_at(&a, &fd).unwrap();
            assert!(inf_norm_diff(&rhs_r(&a), &want) < 1e-10);
        }
    }

    #[test]
    fn momentum_and_extended_function_are_conserved_along_the_flow() {
        let m = model();
        let cart = m.cartesian::<f64>().unwrap();
        let rhs = m.cartesian_extended_rhs::<f64>();
        let y0 = vec![0.0, 0.4, 1.0, -0.3, 0.2, 0.8];
        let traj = integrate(Method::Rk4, &rhs, &y0, 1e-3, 1000, None).unwrap();
        let j0 = cart.momentum.total().eval(&y0);
        let f0 = cart.section.extended_hamiltonian().eval(&y0);
        let yf = traj.last();
        assert!((cart.momentum.total().eval(yf) - j0).abs() < 1e-9);
        assert!((cart.section.extended_hamiltonian().eval(yf) - f0).abs() < 1e-9);
        // The infinitesimal statement: the bracket of the extended function
        // with the momentum vanishes.
        let fd = FdConfig::default();
        let res =
            momentum_conservation_residual(&cart.section, &cart.momentum, &y0, &fd).unwrap();
        assert!(res < 1e-10);
    }

    #[test]
    fn reduced_dynamics_follow_the_full_flow_on_the_level_set() {
        let m = model();
        let nu = 1.0;
        let rhs_full = m.polar_extended_rhs::<f64>();
        let rhs_red = m.reduced_extended_rhs::<f64>(nu);
        // Start on the level set p_θ = ν.
        let y0 = vec![0.0, 0.2, 1.3, 0.4, -0.1, nu];
        let z0 = vec![0.0, 0.2, 1.3, -0.1];
        let full = integrate(Method::Rk4, &rhs_full, &y0, 1e-3, 1000, None).unwrap();
        let red = integrate(Method::Rk4, &rhs_red, &z0, 1e-3, 1000, None).unwrap();
        let mut sup: f64 = 0.0;
        for (yf, zr) in full.states.iter().zip(red.states.iter()) {
            let projected = vec![yf[0], yf[1], yf[2], yf[4]];
            sup = sup.max(inf_norm_diff(&projected, zr));
            sup = sup.max((yf[5] - nu).abs());
        }
        assert!(sup < 1e-10, "reduction trajectory mismatch {sup}");
    }

    #[test]
    fn reduced_reeb_matches_the_closed_form() {
        let m = model();
        let nu = 0.8;
        let red = m.reduced::<f64>(nu).unwrap();
        let fd = FdConfig::default();
        let pair = crate::hamiltonian::cosymplectic_from_section(&red.section, &fd).unwrap();
        let closed = m.reduced_reeb_closed_form::<f64>(
            nu,
            red.reduction.reduced().base_chart().clone(),
        );
        let mut rng = rng_for(17, "osc-reeb");
        for a in Oscillator::reduced_box::<f64>().samples(&mut rng, 20) {
            let v = red.reduction.reduced().project(&a);
            let reeb = pair.reeb_at(&v).unwrap();
            assert!(inf_norm_diff(&reeb, &closed.eval(&v)) < 1e-10);
        }
    }

    #[test]
    fn reduction_certifies_the_quotient_identities() {
        let m = model();
        let nu = 0.8;
        let polar = m.polar::<f64>().unwrap();
        let red = m.reduced::<f64>(nu).unwrap();
        let fd = FdConfig::default();
        let full_pair = crate::hamiltonian::cosymplectic_from_section(&polar.section, &fd).unwrap();
        let red_pair = crate::hamiltonian::cosymplectic_from_section(&red.section, &fd).unwrap();
        let mut rng = rng_for(18, "osc-quotient");
        for mut a in Oscillator::polar_box::<f64>().samples(&mut rng, 10) {
            a[5] = nu; // restrict to the momentum level set
            let ext = red.reduction.extended_match_residual(&polar.section, &red.section, &a);
            assert!(ext.unwrap() < 1e-12);
            let v = polar.bundle.project(&a);
            let y = red.reduction.restrict_base(&v);
            let pair_res = red
                .reduction
                .reduced_pair_match_residual(&full_pair, &red_pair, &y, &fd)
                .unwrap();
            assert!(pair_res < 1e-10, "pair residual {pair_res}");
            let dyn_res = red
                .reduction
                .reduced_dynamics_residual(&full_pair, &red_pair, &v)
                .unwrap();
            assert!(dyn_res < 1e-10, "dynamics residual {dyn_res}");
        }
    }
}
