//! Rigid body with a fixed point in a gravity field of time-varying strength.
//!
//! The body has diagonal inertia `I = (I₁, I₂, I₃)` and potential
//! `V = Γ · γ(t)`, where `Γ = A(q)ᵀ e₃` is the space vertical seen from the
//! body frame and `γ(t)` is a body-frame weight vector with components given
//! by closed-form time profiles. The system is symmetric under rotation
//! about the space vertical for *any* `γ(t)`, with conserved momentum
//! `J = Π · Γ` (the vertical component of the space angular momentum).
//!
//! Three faces of the same system:
//!
//! * **Quaternion state** `[q, t, Π, p]` — a global ordinary differential
//!   equation with unit-quaternion attitude, body angular momentum `Π`, and
//!   the extended-energy bookkeeping slot `p` with `ṗ = −Γ·γ′(t)`.
//! * **Euler chart** — the Z-X-Z angle chart on the extended phase space
//!   `(t, p, φ, θ, ψ, p_φ, p_θ, p_ψ)`, a canonical bundle whose energy has a
//!   closed-form gradient; `φ` is cyclic with `J = p_φ`.
//! * **Reduced sphere** — at momentum level zero the quotient is the motion
//!   of the unit vector `Γ` itself: ambient state `[q, p_q, t, p]` with
//!   `q ∈ S²`, `p_q ⊥ q`, obtained from the full system by `q = Γ`,
//!   `p_q = Γ × Π`. The spherical chart `(t, p, θ, φ, p_θ, p_φ)` presents it
//!   as a canonical bundle, and a closed magnetic 2-form `−ν sin θ dθ∧dφ`
//!   provides the nonzero-level deformation used by the bracket checks.

use crate::bundle::{canonical_bundle_named, MagneticTerm, SymplecticRBundle};
use crate::error::{fmt_point, Error, Result};
use crate::geometry::{two_form_from_terms, fn_term, Chart, ScalarField, SmoothMap};
use crate::hamiltonian::HamiltonianSection;
use crate::linalg::Mat;
use crate::models::coeff::Coeff;
use crate::models::so3::{
    cross, dot3, euler_zxz_velocity_matrix, euler_zxz_velocity_matrix_dpsi,
    euler_zxz_velocity_matrix_dtheta, mat3_mul_vec, norm3, quat_from_euler_zxz, quat_mul,
    quat_normalize, solve3, transpose3, vertical_from_euler_zxz, vertical_in_body,
};
use crate::sample::TestBox;
use crate::scalar::Real;
use crate::symmetry::{cyclic_translation_action, CyclicReduction, MomentumMap, SymmetryAction};

/// Model parameters: diagonal inertia and the body-frame weight profile.
#[derive(Clone, Debug)]
pub struct HeavyTop {
    pub inertia: [f64; 3],
    pub gamma: [Coeff; 3],
}

/// Assembled Euler chart: canonical bundle, Hamiltonian section, the cyclic
/// `φ`-translation action with momentum `p_φ`, and a sampling box that stays
/// clear of the chart's polar degeneracy.
pub struct HeavyTopEuler<S> {
    pub bundle: SymplecticRBundle<S>,
    pub section: HamiltonianSection<S>,
    pub action: SymmetryAction<S>,
    pub momentum: MomentumMap<S>,
    pub sample_box: TestBox<S>,
}

/// Assembled spherical chart of the zero-momentum reduced system.
pub struct HeavyTopSpherical<S> {
    pub bundle: SymplecticRBundle<S>,
    pub section: HamiltonianSection<S>,
    pub sample_box: TestBox<S>,
}

impl HeavyTop {
    pub fn new(inertia: [f64; 3], gamma: [Coeff; 3]) -> Result<HeavyTop> {
        if inertia.iter().any(|i| !(*i > 0.0) || !i.is_finite()) {
            return Err(Error::Config(format!(
                "inertia components must be positive and finite, got {inertia:?}"
            )));
        }
        Ok(HeavyTop { inertia, gamma })
    }

    /// Asymmetric body under steady vertical weight.
    pub fn standard() -> HeavyTop {
        HeavyTop::new(
            [1.0, 1.5, 2.0],
            [
                Coeff::constant(0.0),
                Coeff::constant(0.0),
                Coeff::constant(1.0),
            ],
        )
        .expect("valid parameters")
    }

    /// Spherical inertia, no weight: reduced motion is geodesic on the
    /// sphere (great circles).
    pub fn geodesic() -> HeavyTop {
        HeavyTop::new(
            [1.0, 1.0, 1.0],
            [
                Coeff::constant(0.0),
                Coeff::constant(0.0),
                Coeff::constant(0.0),
            ],
        )
        .expect("valid parameters")
    }

    fn inertia_of<S: Real>(&self) -> [S; 3] {
        [
            S::of(self.inertia[0]),
            S::of(self.inertia[1]),
            S::of(self.inertia[2]),
        ]
    }

    fn gamma_at<S: Real>(&self, t: S) -> [S; 3] {
        [
            self.gamma[0].value(t),
            self.gamma[1].value(t),
            self.gamma[2].value(t),
        ]
    }

    fn gamma_rate<S: Real>(&self, t: S) -> [S; 3] {
        [
            self.gamma[0].derivative(t),
            self.gamma[1].derivative(t),
            self.gamma[2].derivative(t),
        ]
    }

    // ------------------------------------------------------------------
    // Quaternion state `[qw, qx, qy, qz, t, Π₁, Π₂, Π₃, p]`
    // ------------------------------------------------------------------

    /// Right-hand side of the full quaternion system:
    /// `q̇ = ½ q ⊗ (0, I⁻¹Π)`, `Π̇ = Π × I⁻¹Π + Γ × γ(t)`, `ṫ = 1`,
    /// `ṗ = −Γ · γ′(t)`.
    pub fn full_rhs<S: Real>(&self) -> impl Fn(&[S]) -> Vec<S> {
        let this = self.clone();
        let half = S::of(0.5);
        move |y: &[S]| {
            let q = [y[0], y[1], y[2], y[3]];
            let t = y[4];
            let pi = [y[5], y[6], y[7]];
            let inertia = this.inertia_of::<S>();
            let om = [pi[0] / inertia[0], pi[1] / inertia[1], pi[2] / inertia[2]];
            let qdot = quat_mul(&q, &[S::zero(), om[0], om[1], om[2]]);
            let vert = vertical_in_body(&q);
            let gam = this.gamma_at(t);
            let torque = cross(&vert, &gam);
            let gyro = cross(&pi, &om);
            vec![
                half * qdot[0],
                half * qdot[1],
                half * qdot[2],
                half * qdot[3],
                S::one(),
                gyro[0] + torque[0],
                gyro[1] + torque[1],
                gyro[2] + torque[2],
                -dot3(&vert, &this.gamma_rate(t)),
            ]
        }
    }

    /// Per-step projection for the quaternion system: renormalize the
    /// attitude, reporting the pre-projection defect `|‖q‖ − 1|`.
    pub fn full_projection<S: Real>() -> impl FnMut(&mut Vec<S>) -> S {
        |y: &mut Vec<S>| {
            let q = [y[0], y[1], y[2], y[3]];
            let (unit, drift) = quat_normalize(&q);
            y[0] = unit[0];
            y[1] = unit[1];
            y[2] = unit[2];
            y[3] = unit[3];
            drift
        }
    }

    /// Conserved momentum of the vertical-rotation symmetry: `J = Π · Γ`.
    pub fn full_momentum<S: Real>(&self, y: &[S]) -> S {
        let vert = vertical_in_body(&[y[0], y[1], y[2], y[3]]);
        dot3(&[y[5], y[6], y[7]], &vert)
    }

    /// Instantaneous energy `½ Π · I⁻¹Π + Γ · γ(t)`.
    pub fn full_energy<S: Real>(&self, y: &[S]) -> S {
        let pi = [y[5], y[6], y[7]];
        let inertia = self.inertia_of::<S>();
        let om = [pi[0] / inertia[0], pi[1] / inertia[1], pi[2] / inertia[2]];
        let vert = vertical_in_body(&[y[0], y[1], y[2], y[3]]);
        S::of(0.5) * dot3(&pi, &om) + dot3(&vert, &self.gamma_at(y[4]))
    }

    /// The extended conserved quantity `p + H`; constant along the flow even
    /// when `γ` depends on time.
    pub fn full_extended<S: Real>(&self, y: &[S]) -> S {
        y[8] + self.full_energy(y)
    }

    // ------------------------------------------------------------------
    // Euler Z-X-Z chart `(t, p, φ, θ, ψ, p_φ, p_θ, p_ψ)`
    // ------------------------------------------------------------------

    /// Energy on the Euler base chart `(t, φ, θ, ψ, p_φ, p_θ, p_ψ)`:
    /// `H = ½ Π · I⁻¹Π + Γ(θ, ψ) · γ(t)` with `Π = B(θ, ψ)⁻ᵀ (p_φ, p_θ, p_ψ)`.
    /// Exact gradient; returns NaN at the chart degeneracy `sin θ = 0`.
    pub fn euler_energy<S: Real>(&self, base: Chart) -> ScalarField<S> {
        let this = self.clone();
        let this2 = self.clone();
        let half = S::of(0.5);
        ScalarField::with_gradient(
            base,
            move |v: &[S]| {
                let (t, th, ps) = (v[0], v[2], v[3]);
                let pe = [v[4], v[5], v[6]];
                let b = euler_zxz_velocity_matrix(th, ps);
                match solve3(&transpose3(&b), &pe) {
                    Some(pi) => {
                        let inertia = this.inertia_of::<S>();
                        let om = [pi[0] / inertia[0], pi[1] / inertia[1], pi[2] / inertia[2]];
                        half * dot3(&pi, &om)
                            + dot3(&vertical_from_euler_zxz(th, ps), &this.gamma_at(t))
                    }
                    None => S::nan(),
                }
            },
            move |v: &[S]| {
                let (t, th, ps) = (v[0], v[2], v[3]);
                let pe = [v[4], v[5], v[6]];
                let b = euler_zxz_velocity_matrix(th, ps);
                let bt = transpose3(&b);
                let pi = match solve3(&bt, &pe) {
                    Some(pi) => pi,
                    None => return vec![S::nan(); 7],
                };
                let inertia = this2.inertia_of::<S>();
                let om = [pi[0] / inertia[0], pi[1] / inertia[1], pi[2] / inertia[2]];
                let gam = this2.gamma_at(t);
                let vert = vertical_from_euler_zxz(th, ps);
                let (st, ct) = (th.sin(), th.cos());
                let (sp, cp) = (ps.sin(), ps.cos());
                let dvert_dth = [ct * sp, ct * cp, -st];
                let dvert_dps = [st * cp, -st * sp, S::zero()];
                // ∂Π/∂α = −B⁻ᵀ (∂B/∂α)ᵀ Π, so ∂H/∂α = −ω·x_α + ∂Γ/∂α·γ
                // with x_α the solution of Bᵀ x = (∂B/∂α)ᵀ Π.
                let u_th =
                    mat3_mul_vec(&transpose3(&euler_zxz_velocity_matrix_dtheta(th, ps)), &pi);
                let u_ps =
                    mat3_mul_vec(&transpose3(&euler_zxz_velocity_matrix_dpsi(th, ps)), &pi);
                let (x_th, x_ps) = match (solve3(&bt, &u_th), solve3(&bt, &u_ps)) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return vec![S::nan(); 7],
                };
                let dh_dpe = match solve3(&b, &om) {
                    Some(x) => x,
                    None => return vec![S::nan(); 7],
                };
                vec![
                    dot3(&vert, &this2.gamma_rate(t)),
                    S::zero(),
                    -dot3(&om, &x_th) + dot3(&dvert_dth, &gam),
                    -dot3(&om, &x_ps) + dot3(&dvert_dps, &gam),
                    dh_dpe[0],
                    dh_dpe[1],
                    dh_dpe[2],
                ]
            },
        )
    }

    /// Assembled Euler chart with the cyclic `φ`-translation action.
    pub fn euler<S: Real>(&self) -> Result<HeavyTopEuler<S>> {
        let bundle = canonical_bundle_named::<S>("heavytop", &["phi", "theta", "psi"])?;
        let section = HamiltonianSection::new(
            bundle.clone(),
            self.euler_energy(bundle.base_chart().clone()),
        )?;
        let (action, momentum) = cyclic_translation_action(&bundle, 0)?;
        Ok(HeavyTopEuler {
            bundle,
            section,
            action,
            momentum,
            sample_box: Self::euler_box(),
        })
    }

    /// Extended dynamics on the Euler total chart, straight from the energy
    /// gradient: `(1, −H_t, H_{p}, −H_{q})`.
    pub fn euler_extended_rhs<S: Real>(&self) -> Result<impl Fn(&[S]) -> Vec<S>> {
        let bundle = canonical_bundle_named::<S>("heavytop", &["phi", "theta", "psi"])?;
        let energy = self.euler_energy::<S>(bundle.base_chart().clone());
        Ok(move |y: &[S]| {
            let v = [y[0], y[2], y[3], y[4], y[5], y[6], y[7]];
            let g = energy.gradient(&v).expect("analytic gradient");
            vec![S::one(), -g[0], g[4], g[5], g[6], -g[1], -g[2], -g[3]]
        })
    }

    /// Convert an Euler total-chart point to the quaternion state. Fails at
    /// the chart degeneracy `sin θ = 0`.
    pub fn euler_to_full<S: Real>(&self, a: &[S]) -> Result<Vec<S>> {
        let (t, p) = (a[0], a[1]);
        let (ph, th, ps) = (a[2], a[3], a[4]);
        let pe = [a[5], a[6], a[7]];
        let b = euler_zxz_velocity_matrix(th, ps);
        let pi = solve3(&transpose3(&b), &pe).ok_or_else(|| Error::Degenerate {
            point: fmt_point(a),
        })?;
        let q = quat_from_euler_zxz(ph, th, ps);
        Ok(vec![q[0], q[1], q[2], q[3], t, pi[0], pi[1], pi[2], p])
    }

    /// Reduction of the Euler chart along the cyclic angle `φ` at momentum
    /// level `ν`, with the reduced Hamiltonian section.
    pub fn euler_reduction<S: Real>(
        &self,
        nu: S,
    ) -> Result<(CyclicReduction<S>, HamiltonianSection<S>)> {
        let euler = self.euler::<S>()?;
        let reduction = CyclicReduction::new(&euler.bundle, 0, nu, "heavytop_reduced")?;
        let section = reduction.reduce_section(&euler.section)?;
        Ok((reduction, section))
    }

    // ------------------------------------------------------------------
    // Zero-momentum reduced system, ambient state `[q, p_q, t, p]`
    // ------------------------------------------------------------------

    /// Right-hand side of the reduced system on the sphere in ambient
    /// coordinates (valid on `‖q‖ = 1`, `p_q ⊥ q`):
    /// `q̇ = q × u`, `ṗ_q = p_q × u − γ + (q·γ) q` with `u = I⁻¹(p_q × q)`,
    /// plus the clock `ṫ = 1` and the bookkeeping slot `ṗ = −q · γ′(t)`.
    pub fn reduced_rhs<S: Real>(&self) -> impl Fn(&[S]) -> Vec<S> {
        let this = self.clone();
        move |z: &[S]| {
            let q = [z[0], z[1], z[2]];
            let pq = [z[3], z[4], z[5]];
            let t = z[6];
            let inertia = this.inertia_of::<S>();
            let w = cross(&pq, &q);
            let u = [w[0] / inertia[0], w[1] / inertia[1], w[2] / inertia[2]];
            let qdot = cross(&q, &u);
            let gam = this.gamma_at(t);
            let lift = dot3(&q, &gam);
            let pq_gyro = cross(&pq, &u);
            vec![
                qdot[0],
                qdot[1],
                qdot[2],
                pq_gyro[0] - gam[0] + lift * q[0],
                pq_gyro[1] - gam[1] + lift * q[1],
                pq_gyro[2] - gam[2] + lift * q[2],
                S::one(),
                -dot3(&q, &this.gamma_rate(t)),
            ]
        }
    }

    /// Per-step projection for the reduced system: renormalize `q` and
    /// remove the `p_q` component along `q`; reports the larger of the two
    /// pre-projection defects.
    pub fn reduced_projection<S: Real>() -> impl FnMut(&mut Vec<S>) -> S {
        |z: &mut Vec<S>| {
            let q = [z[0], z[1], z[2]];
            let n = norm3(&q);
            let qh = [q[0] / n, q[1] / n, q[2] / n];
            let pq = [z[3], z[4], z[5]];
            let along = dot3(&pq, &qh);
            for i in 0..3 {
                z[i] = qh[i];
                z[3 + i] = pq[i] - along * qh[i];
            }
            (n - S::one()).abs().max(along.abs())
        }
    }

    /// Map a full quaternion state on the zero-momentum level `Π · Γ = 0` to
    /// the reduced ambient state: `q = Γ`, `p_q = Γ × Π`.
    pub fn full_to_reduced<S: Real>(&self, y: &[S]) -> Vec<S> {
        let vert = vertical_in_body(&[y[0], y[1], y[2], y[3]]);
        let pq = cross(&vert, &[y[5], y[6], y[7]]);
        vec![vert[0], vert[1], vert[2], pq[0], pq[1], pq[2], y[4], y[8]]
    }

    /// Reduced energy in ambient coordinates:
    /// `H₀ = ½ (p_q × q) · I⁻¹ (p_q × q) + q · γ(t)`.
    pub fn reduced_energy_ambient<S: Real>(&self, z: &[S]) -> S {
        let q = [z[0], z[1], z[2]];
        let pq = [z[3], z[4], z[5]];
        let inertia = self.inertia_of::<S>();
        let w = cross(&pq, &q);
        let u = [w[0] / inertia[0], w[1] / inertia[1], w[2] / inertia[2]];
        S::of(0.5) * dot3(&w, &u) + dot3(&q, &self.gamma_at(z[6]))
    }

    /// The extended conserved quantity of the reduced system, `p + H₀`.
    pub fn reduced_extended_ambient<S: Real>(&self, z: &[S]) -> S {
        z[7] + self.reduced_energy_ambient(z)
    }

    // ------------------------------------------------------------------
    // Spherical chart `(t, p, θ, φ, p_θ, p_φ)` of the reduced system
    // ------------------------------------------------------------------

    /// Reduced energy on the spherical base chart `(t, θ, φ, p_θ, p_φ)` with
    /// exact gradient, computed through the ambient embedding
    /// `q = (sin θ cos φ, sin θ sin φ, cos θ)`,
    /// `p_q = p_θ e_θ + (p_φ / sin θ) u_φ`.
    pub fn spherical_energy<S: Real>(&self, base: Chart) -> ScalarField<S> {
        let this = self.clone();
        let this2 = self.clone();
        let half = S::of(0.5);
        let value = move |v: &[S]| {
            let (t, th, ph, pth, pph) = (v[0], v[1], v[2], v[3], v[4]);
            let (st, ct) = (th.sin(), th.cos());
            let (sp, cp) = (ph.sin(), ph.cos());
            let q = [st * cp, st * sp, ct];
            let eth = [ct * cp, ct * sp, -st];
            let uph = [-sp, cp, S::zero()];
            let k = pph / st;
            let pq = [
                pth * eth[0] + k * uph[0],
                pth * eth[1] + k * uph[1],
                pth * eth[2],
            ];
            let inertia = this.inertia_of::<S>();
            let w = cross(&pq, &q);
            let u = [w[0] / inertia[0], w[1] / inertia[1], w[2] / inertia[2]];
            half * dot3(&w, &u) + dot3(&q, &this.gamma_at(t))
        };
        let grad = move |v: &[S]| {
            let (t, th, ph, pth, pph) = (v[0], v[1], v[2], v[3], v[4]);
            let (st, ct) = (th.sin(), th.cos());
            let (sp, cp) = (ph.sin(), ph.cos());
            let q = [st * cp, st * sp, ct];
            let eth = [ct * cp, ct * sp, -st];
            let uph = [-sp, cp, S::zero()];
            let rho = [cp, sp, S::zero()];
            let k = pph / st;
            let pq = [
                pth * eth[0] + k * uph[0],
                pth * eth[1] + k * uph[1],
                pth * eth[2],
            ];
            let inertia = this2.inertia_of::<S>();
            let w = cross(&pq, &q);
            let u = [w[0] / inertia[0], w[1] / inertia[1], w[2] / inertia[2]];
            let gam = this2.gamma_at(t);
            // Ambient partials of H(q, p_q): ∂H/∂q = −p_q × u + γ,
            // ∂H/∂p_q = q × u.
            let pu = cross(&pq, &u);
            let hq = [gam[0] - pu[0], gam[1] - pu[1], gam[2] - pu[2]];
            let hp = cross(&q, &u);
            // Chart partials of the embedding:
            // ∂p_q/∂θ = −p_θ q − p_φ (cos θ / sin²θ) u_φ,
            // ∂p_q/∂φ = p_θ cos θ u_φ − (p_φ / sin θ) ρ,   ρ = (cos φ, sin φ, 0).
            let c1 = pph * ct / (st * st);
            let dpq_dth = [
                -pth * q[0] - c1 * uph[0],
                -pth * q[1] - c1 * uph[1],
                -pth * q[2],
            ];
            let dpq_dph = [
                pth * ct * uph[0] - k * rho[0],
                pth * ct * uph[1] - k * rho[1],
                pth * ct * uph[2],
            ];
            let eph = [st * uph[0], st * uph[1], S::zero()];
            vec![
                dot3(&q, &this2.gamma_rate(t)),
                dot3(&hq, &eth) + dot3(&hp, &dpq_dth),
                dot3(&hq, &eph) + dot3(&hp, &dpq_dph),
                dot3(&hp, &eth),
                dot3(&hp, &uph) / st,
            ]
        };
        ScalarField::with_gradient(base, value, grad)
    }

    /// Assembled spherical chart of the zero-momentum reduced system.
    pub fn spherical<S: Real>(&self) -> Result<HeavyTopSpherical<S>> {
        let bundle = canonical_bundle_named::<S>("heavytop_sphere", &["th_s", "ph_s"])?;
        let section = HamiltonianSection::new(
            bundle.clone(),
            self.spherical_energy(bundle.base_chart().clone()),
        )?;
        Ok(HeavyTopSpherical {
            bundle,
            section,
            sample_box: Self::spherical_box(),
        })
    }

    /// Extended dynamics on the spherical total chart from the energy
    /// gradient.
    pub fn spherical_extended_rhs<S: Real>(&self) -> Result<impl Fn(&[S]) -> Vec<S>> {
        let bundle = canonical_bundle_named::<S>("heavytop_sphere", &["th_s", "ph_s"])?;
        let energy = self.spherical_energy::<S>(bundle.base_chart().clone());
        Ok(move |y: &[S]| {
            let v = [y[0], y[2], y[3], y[4], y[5]];
            let g = energy.gradient(&v).expect("analytic gradient");
            vec![S::one(), -g[0], g[3], g[4], -g[1], -g[2]]
        })
    }

    /// Map a spherical total-chart point to the reduced ambient state.
    pub fn spherical_to_reduced<S: Real>(&self, x: &[S]) -> Vec<S> {
        let (t, p, th, ph, pth, pph) = (x[0], x[1], x[2], x[3], x[4], x[5]);
        let (st, ct) = (th.sin(), th.cos());
        let (sp, cp) = (ph.sin(), ph.cos());
        let q = [st * cp, st * sp, ct];
        let eth = [ct * cp, ct * sp, -st];
        let uph = [-sp, cp, S::zero()];
        let k = pph / st;
        vec![
            q[0],
            q[1],
            q[2],
            pth * eth[0] + k * uph[0],
            pth * eth[1] + k * uph[1],
            pth * eth[2],
            t,
            p,
        ]
    }

    /// The closed magnetic 2-form `β = −ν sin θ dθ ∧ dφ` on the spherical
    /// configuration chart `(t, θ, φ)`, packaged for deforming the reduced
    /// bundle at momentum level `ν`.
    pub fn spherical_magnetic_term<S: Real>(&self, nu: S) -> Result<MagneticTerm<S>> {
        let bundle = canonical_bundle_named::<S>("heavytop_sphere", &["th_s", "ph_s"])?;
        let config = Chart::new("heavytop_sphere_config", &["t", "th_s", "ph_s"])?;
        let beta = two_form_from_terms(
            config,
            vec![fn_term(1, 2, move |c: &[S]| -nu * c[1].sin())],
        )?;
        MagneticTerm::new(beta, bundle.total_chart())
    }

    /// The affine chart transition identifying the Euler reduction at level
    /// zero with the spherical chart:
    /// `(t, p, θ, ψ, p_θ, p_ψ) ↦ (t, p, θ, π/2 − ψ, p_θ, −p_ψ)`.
    pub fn reduced_euler_to_spherical<S: Real>(&self) -> Result<SmoothMap<S>> {
        let (reduction, _) = self.euler_reduction::<S>(S::zero())?;
        let sphere = canonical_bundle_named::<S>("heavytop_sphere", &["th_s", "ph_s"])?;
        let mut jac = Mat::<S>::zeros(6, 6);
        for (r, c, v) in [
            (0, 0, S::one()),
            (1, 1, S::one()),
            (2, 2, S::one()),
            (3, 3, -S::one()),
            (4, 4, S::one()),
            (5, 5, -S::one()),
        ] {
            jac[(r, c)] = v;
        }
        let half_pi = S::of(std::f64::consts::FRAC_PI_2);
        Ok(SmoothMap::with_jacobian(
            reduction.reduced().total_chart().clone(),
            sphere.total_chart().clone(),
            move |x: &[S]| vec![x[0], x[1], x[2], half_pi - x[3], x[4], -x[5]],
            move |_: &[S]| jac.clone(),
        ))
    }

    // ------------------------------------------------------------------
    // Sampling boxes
    // ------------------------------------------------------------------

    /// Box on the Euler total chart, keeping `θ` away from the chart
    /// degeneracy at the poles.
    pub fn euler_box<S: Real>() -> TestBox<S> {
        let b = |lo: f64, hi: f64| (S::of(lo), S::of(hi));
        TestBox::new(&[
            b(0.0, 5.0),
            b(-2.0, 2.0),
            b(0.25, 1.25),
            b(0.4, std::f64::consts::PI - 0.4),
            b(0.25, 1.25),
            b(-2.0, 2.0),
            b(-2.0, 2.0),
            b(-2.0, 2.0),
        ])
    }

    /// Box on the spherical total chart, away from the poles.
    pub fn spherical_box<S: Real>() -> TestBox<S> {
        let b = |lo: f64, hi: f64| (S::of(lo), S::of(hi));
        TestBox::new(&[
            b(0.0, 5.0),
            b(-2.0, 2.0),
            b(0.4, std::f64::consts::PI - 0.4),
            b(-3.0, 3.0),
            b(-2.0, 2.0),
            b(-2.0, 2.0),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{closedness_residual, differential, FdConfig};
    use crate::integrate::{integrate, Method};
    use crate::sample::rng_for;
    use crate::scalar::inf_norm_diff;

    fn timedep() -> HeavyTop {
        HeavyTop::new(
            [1.0, 1.5, 2.0],
            [
                Coeff::constant(0.0),
                Coeff::constant(0.0),
                Coeff::parse("const:1+sin:1,1,0").unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_nonpositive_inertia() {
        assert!(HeavyTop::new(
            [1.0, 0.0, 1.0],
            [
                Coeff::constant(0.0),
                Coeff::constant(0.0),
                Coeff::constant(1.0)
            ]
        )
        .is_err());
    }

    #[test]
    fn full_flow_conserves_momentum_and_extended_energy() {
        let m = timedep();
        let rhs = m.full_rhs::<f64>();
        let q0 = quat_from_euler_zxz(0.7_f64, 1.1, -0.4);
        let y0 = vec![q0[0], q0[1], q0[2], q0[3], 0.0, 0.4, -0.3, 0.5, 0.2];
        let j0 = m.full_momentum(&y0);
        let f0 = m.full_extended(&y0);
        let mut proj = HeavyTop::full_projection::<f64>();
        let traj = integrate(Method::Rk4, &rhs, &y0, 1e-3, 2000, Some(&mut proj)).unwrap();
        let yf = traj.last();
        assert!((m.full_momentum(yf) - j0).abs() < 1e-9, "momentum drifted");
        assert!((m.full_extended(yf) - f0).abs() < 1e-8, "extended drifted");
        assert!(traj.max_projection_drift < 1e-8);
        // With constant gravity the plain energy is conserved as well.
        let m2 = HeavyTop::standard();
        let rhs2 = m2.full_rhs::<f64>();
        let h0 = m2.full_energy(&y0);
        let traj2 = integrate(Method::Rk4, &rhs2, &y0, 1e-3, 2000, None).unwrap();
        assert!((m2.full_energy(traj2.last()) - h0).abs() < 1e-9);
    }

    #[test]
    fn euler_energy_gradient_matches_finite_differences() {
        let m = timedep();
        let euler = m.euler::<f64>().unwrap();
        let energy = euler.section.energy();
        let twin = {
            let e = m.euler_energy::<f64>(euler.bundle.base_chart().clone());
            ScalarField::new(euler.bundle.base_chart().clone(), move |v: &[f64]| e.eval(v))
        };
        let fd = FdConfig::default();
        let mut rng = rng_for(21, "top-euler-grad");
        for a in HeavyTop::euler_box::<f64>().samples(&mut rng, 25) {
            let v = euler.bundle.project(&a);
            let g = energy.gradient(&v).unwrap();
            let g_fd = differential(&twin, &v, &fd).unwrap();
            assert!(
                inf_norm_diff(&g, &g_fd) < 1e-6,
                "gradient mismatch at {v:?}: {g:?} vs {g_fd:?}"
            );
        }
    }

    #[test]
    fn spherical_energy_gradient_matches_finite_differences() {
        let m = timedep();
        let sph = m.spherical::<f64>().unwrap();
        let energy = sph.section.energy();
        let twin = {
            let e = m.spherical_energy::<f64>(sph.bundle.base_chart().clone());
            ScalarField::new(sph.bundle.base_chart().clone(), move |v: &[f64]| e.eval(v))
        };
        let fd = FdConfig::default();
        let mut rng = rng_for(22, "top-sph-grad");
        for a in HeavyTop::spherical_box::<f64>().samples(&mut rng, 25) {
            let v = sph.bundle.project(&a);
            let g = energy.gradient(&v).unwrap();
            let g_fd = differential(&twin, &v, &fd).unwrap();
            assert!(
                inf_norm_diff(&g, &g_fd) < 1e-6,
                "gradient mismatch at {v:?}: {g:?} vs {g_fd:?}"
            );
        }
    }

    #[test]
    fn euler_chart_agrees_with_quaternion_state() {
        let m = timedep();
        let euler = m.euler::<f64>().unwrap();
        let mut rng = rng_for(23, "top-coherence");
        for a in HeavyTop::euler_box::<f64>().samples(&mut rng, 30) {
            let y = m.euler_to_full(&a).unwrap();
            let h_chart = euler.section.energy().eval(&euler.bundle.project(&a));
            let h_state = m.full_energy(&y);
            assert!((h_chart - h_state).abs() < 1e-12);
            // The cyclic momentum p_φ is the vertical angular momentum Π·Γ.
            let j_chart = euler.momentum.total().eval(&a);
            assert!((j_chart - m.full_momentum(&y)).abs() < 1e-12);
        }
    }

    #[test]
    fn euler_and_quaternion_flows_agree() {
        let m = timedep();
        let a0 = vec![0.0, 0.2, 0.7, 1.2, 0.5, 0.3, 0.2, 0.4];
        let rhs_euler = m.euler_extended_rhs::<f64>().unwrap();
        let rhs_full = m.full_rhs::<f64>();
        let y0 = m.euler_to_full(&a0).unwrap();
        let te = integrate(Method::Rk4, &rhs_euler, &a0, 1e-3, 1000, None).unwrap();
        let mut proj = HeavyTop::full_projection::<f64>();
        let tf = integrate(Method::Rk4, &rhs_full, &y0, 1e-3, 1000, Some(&mut proj)).unwrap();
        let y_from_euler = m.euler_to_full(te.last()).unwrap();
        let y_direct = tf.last();
        // Compare the gauge-free observables: body momenta, vertical, time,
        // bookkeeping slot.
        let vert_e = vertical_in_body(&[
            y_from_euler[0],
            y_from_euler[1],
            y_from_euler[2],
            y_from_euler[3],
        ]);
        let vert_d = vertical_in_body(&[y_direct[0], y_direct[1], y_direct[2], y_direct[3]]);
        assert!(inf_norm_diff(&vert_e, &vert_d) < 1e-6);
        assert!(inf_norm_diff(&y_from_euler[5..8], &y_direct[5..8]) < 1e-6);
        assert!((y_from_euler[4] - y_direct[4]).abs() < 1e-12);
        assert!((y_from_euler[8] - y_direct[8]).abs() < 1e-6);
    }

    #[test]
    fn zero_momentum_reduction_matches_full_flow() {
        let m = timedep();
        let q0 = quat_from_euler_zxz(0.5_f64, 1.1, 0.3);
        let vert0 = vertical_in_body(&q0);
        // Π ⊥ Γ puts the state on the zero-momentum level.
        let pi0 = cross(&vert0, &[0.2, -0.4, 0.3]);
        let y0 = vec![q0[0], q0[1], q0[2], q0[3], 0.0, pi0[0], pi0[1], pi0[2], 0.1];
        assert!(m.full_momentum(&y0).abs() < 1e-15);
        let rhs_full = m.full_rhs::<f64>();
        let rhs_red = m.reduced_rhs::<f64>();
        let mut proj_full = HeavyTop::full_projection::<f64>();
        let full = integrate(Method::Rk4, &rhs_full, &y0, 1e-3, 1000, Some(&mut proj_full)).unwrap();
        let z0 = m.full_to_reduced(&y0);
        let mut proj_red = HeavyTop::reduced_projection::<f64>();
        let red = integrate(Method::Rk4, &rhs_red, &z0, 1e-3, 1000, Some(&mut proj_red)).unwrap();
        let mut sup: f64 = 0.0;
        for (yf, zr) in full.states.iter().zip(red.states.iter()) {
            sup = sup.max(inf_norm_diff(&m.full_to_reduced(yf), zr));
        }
        assert!(sup < 1e-6, "reduction mismatch {sup}");
    }

    #[test]
    fn geodesic_reduced_motion_closes_after_one_period() {
        let m = HeavyTop::geodesic();
        let omega = 0.9_f64;
        let z0 = vec![1.0, 0.0, 0.0, 0.0, omega, 0.0, 0.0, 0.0];
        let period = 2.0 * std::f64::consts::PI / omega;
        let n = 7000;
        let dt = period / n as f64;
        let rhs = m.reduced_rhs::<f64>();
        let mut proj = HeavyTop::reduced_projection::<f64>();
        let traj = integrate(Method::Rk4, &rhs, &z0, dt, n, Some(&mut proj)).unwrap();
        let zf = traj.last();
        // After one period the point and momentum return; t advances.
        assert!(inf_norm_diff(&zf[0..6], &z0[0..6]) < 1e-6);
        assert!((zf[6] - period).abs() < 1e-9);
        let qn = norm3(&[zf[0], zf[1], zf[2]]);
        assert!((qn - 1.0).abs() < 1e-9);
    }

    #[test]
    fn spherical_chart_matches_ambient_reduction() {
        let m = timedep();
        let sph = m.spherical::<f64>().unwrap();
        let mut rng = rng_for(24, "top-sph-coherence");
        for x in HeavyTop::spherical_box::<f64>().samples(&mut rng, 30) {
            let z = m.spherical_to_reduced(&x);
            let h_chart = sph.section.energy().eval(&sph.bundle.project(&x));
            assert!((h_chart - m.reduced_energy_ambient(&z)).abs() < 1e-12);
            // The ambient state satisfies the sphere constraints exactly.
            let q = [z[0], z[1], z[2]];
            assert!((norm3(&q) - 1.0).abs() < 1e-14);
            assert!(dot3(&q, &[z[3], z[4], z[5]]).abs() < 1e-14);
        }
        // Short-time flow agreement through the chart.
        let x0 = vec![0.0, 0.1, 1.2, 0.4, 0.3, -0.2];
        let rhs_chart = m.spherical_extended_rhs::<f64>().unwrap();
        let rhs_amb = m.reduced_rhs::<f64>();
        let tc = integrate(Method::Rk4, &rhs_chart, &x0, 1e-3, 200, None).unwrap();
        let ta = integrate(
            Method::Rk4,
            &rhs_amb,
            &m.spherical_to_reduced(&x0),
            1e-3,
            200,
            None,
        )
        .unwrap();
        let mapped = m.spherical_to_reduced(tc.last());
        assert!(inf_norm_diff(&mapped, ta.last()) < 1e-8);
    }

    #[test]
    fn reduced_euler_chart_is_the_spherical_chart_in_disguise() {
        let m = timedep();
        let (reduction, red_section) = m.euler_reduction::<f64>(0.0).unwrap();
        let sph = m.spherical::<f64>().unwrap();
        let map = m.reduced_euler_to_spherical::<f64>().unwrap();
        let fd = FdConfig::default();
        let red_pair =
            crate::hamiltonian::cosymplectic_from_section(&red_section, &fd).unwrap();
        let sph_pair =
            crate::hamiltonian::cosymplectic_from_section(&sph.section, &fd).unwrap();
        let b = |lo: f64, hi: f64| (lo, hi);
        let red_box = TestBox::new(&[
            b(0.0, 5.0),
            b(-2.0, 2.0),
            b(0.4, std::f64::consts::PI - 0.4),
            b(0.25, 1.25),
            b(-2.0, 2.0),
            b(-2.0, 2.0),
        ]);
        let mut rng = rng_for(25, "top-red-sph");
        for y in red_box.samples(&mut rng, 25) {
            let x = map.apply(&y);
            let h_red = red_section.energy().eval(&reduction.reduced().project(&y));
            let h_sph = sph.section.energy().eval(&sph.bundle.project(&x));
            assert!(
                (h_red - h_sph).abs() < 1e-12,
                "energy mismatch {h_red} vs {h_sph}"
            );
            // Reeb fields correspond under the (constant-Jacobian) base map:
            // (t, θ, ψ, p_θ, p_ψ) ↦ (t, θ, π/2 − ψ, p_θ, −p_ψ).
            let v_red = reduction.reduced().project(&y);
            let v_sph = sph.bundle.project(&x);
            let r_red = red_pair.reeb_at(&v_red).unwrap();
            let r_sph = sph_pair.reeb_at(&v_sph).unwrap();
            let pushed = vec![r_red[0], r_red[1], -r_red[2], r_red[3], -r_red[4]];
            assert!(
                inf_norm_diff(&pushed, &r_sph) < 1e-9,
                "Reeb mismatch {pushed:?} vs {r_sph:?}"
            );
        }
    }

    #[test]
    fn magnetic_term_is_closed_and_deforms_cleanly() {
        let m = timedep();
        let nu = 0.5;
        let term = m.spherical_magnetic_term::<f64>(nu).unwrap();
        let fd = FdConfig::default();
        let mut rng = rng_for(26, "top-magnetic");
        // Closedness of β on the configuration chart.
        let cfg_box = TestBox::new(&[(0.0, 5.0), (0.4, 2.7), (-3.0, 3.0)]);
        for c in cfg_box.samples(&mut rng, 20) {
            let res = closedness_residual(term.beta(), &c, &fd).unwrap();
            assert!(res < 1e-9, "closedness residual {res}");
        }
        // The deformed form stays nondegenerate on the working box.
        let sph = m.spherical::<f64>().unwrap();
        let deformed = crate::bundle::magnetic_deform(&sph.bundle, &term).unwrap();
        let pts = HeavyTop::spherical_box::<f64>().samples(&mut rng, 50);
        assert!(crate::bundle::degenerate_points(&deformed, &pts).is_empty());
        // Bracket deformation identity at sampled points.
        let tot = sph.bundle.total_chart().clone();
        let f = ScalarField::with_gradient(
            tot.clone(),
            |x: &[f64]| x[2] * x[4] + x[1],
            |x: &[f64]| vec![0.0, 1.0, x[4], 0.0, x[2], 0.0],
        );
        let g = ScalarField::with_gradient(
            tot,
            |x: &[f64]| x[3] * x[5] + x[0] * x[2],
            |x: &[f64]| vec![x[2], 0.0, x[0], x[5], 0.0, x[3]],
        );
        for x in HeavyTop::spherical_box::<f64>().samples(&mut rng, 20) {
            let res =
                crate::bundle::deformed_bracket_residual(&sph.bundle, &term, &f, &g, &x, &fd)
                    .unwrap();
            assert!(res < 1e-10, "deformed bracket residual {res}");
        }
    }

    #[test]
    fn euler_reduction_certifies_quotient_identities() {
        let m = timedep();
        let nu = 0.5;
        let euler = m.euler::<f64>().unwrap();
        let (reduction, red_section) = m.euler_reduction::<f64>(nu).unwrap();
        let fd = FdConfig::default();
        let full_pair =
            crate::hamiltonian::cosymplectic_from_section(&euler.section, &fd).unwrap();
        let red_pair =
            crate::hamiltonian::cosymplectic_from_section(&red_section, &fd).unwrap();
        let mut rng = rng_for(27, "top-quotient");
        for mut a in HeavyTop::euler_box::<f64>().samples(&mut rng, 8) {
            a[5] = nu; // p_φ on the level set
            let ext = reduction
                .extended_match_residual(&euler.section, &red_section, &a)
                .unwrap();
            assert!(ext < 1e-12, "extended residual {ext}");
            let v = euler.bundle.project(&a);
            let y = reduction.restrict_base(&v);
            let pair_res = reduction
                .reduced_pair_match_residual(&full_pair, &red_pair, &y, &fd)
                .unwrap();
            assert!(pair_res < 1e-9, "pair residual {pair_res}");
            let dyn_res = reduction
                .reduced_dynamics_residual(&full_pair, &red_pair, &v)
                .unwrap();
            assert!(dyn_res < 1e-9, "dynamics residual {dyn_res}");
        }
    }
}
