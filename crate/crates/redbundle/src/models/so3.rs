//! Quaternion and 3-vector helpers for rigid-body attitude states.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * Quaternions are `[w, x, y, z]` with scalar part first and unit norm.
//! * A quaternion `q` represents the body-to-space rotation `A(q)`: a vector
//!   `v` given in body coordinates appears in space as `A(q) v`.
//! * Body angular velocity `w` drives the attitude by `q̇ = ½ q ⊗ (0, w)`.
//! * Euler angles use the Z-X-Z convention: `A = Rz(phi) · Rx(theta) · Rz(psi)`.

use crate::scalar::Real;

/// Cross product `a × b`.
pub fn cross<S: Real>(a: &[S; 3], b: &[S; 3]) -> [S; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Dot product of 3-vectors.
pub fn dot3<S: Real>(a: &[S; 3], b: &[S; 3]) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Euclidean norm of a 3-vector.
pub fn norm3<S: Real>(a: &[S; 3]) -> S {
    dot3(a, a).sqrt()
}

/// Hamilton product `a ⊗ b` (scalar part first).
pub fn quat_mul<S: Real>(a: &[S; 4], b: &[S; 4]) -> [S; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

/// Quaternion norm.
pub fn quat_norm<S: Real>(q: &[S; 4]) -> S {
    (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt()
}

/// Scale a quaternion to unit norm; returns the normalized quaternion and the
/// pre-normalization defect `|‖q‖ − 1|`.
pub fn quat_normalize<S: Real>(q: &[S; 4]) -> ([S; 4], S) {
    let n = quat_norm(q);
    let drift = (n - S::one()).abs();
    ([q[0] / n, q[1] / n, q[2] / n, q[3] / n], drift)
}

/// Conjugate (inverse for unit quaternions).
pub fn quat_conj<S: Real>(q: &[S; 4]) -> [S; 4] {
    [q[0], -q[1], -q[2], -q[3]]
}

/// Rotation about the z-axis by `angle`, as a quaternion.
pub fn quat_about_z<S: Real>(angle: S) -> [S; 4] {
    let half = angle / S::of(2.0);
    [half.cos(), S::zero(), S::zero(), half.sin()]
}

/// Rotation about the x-axis by `angle`, as a quaternion.
pub fn quat_about_x<S: Real>(angle: S) -> [S; 4] {
    let half = angle / S::of(2.0);
    [half.cos(), half.sin(), S::zero(), S::zero()]
}

/// Apply the body-to-space rotation: `A(q) v`.
pub fn rotate<S: Real>(q: &[S; 4], v: &[S; 3]) -> [S; 3] {
    let p = [S::zero(), v[0], v[1], v[2]];
    let r = quat_mul(&quat_mul(q, &p), &quat_conj(q));
    [r[1], r[2], r[3]]
}

/// Apply the space-to-body rotation: `A(q)ᵀ v`.
pub fn rotate_inverse<S: Real>(q: &[S; 4], v: &[S; 3]) -> [S; 3] {
    rotate(&quat_conj(q), v)
}

/// The space vertical axis expressed in body coordinates: `A(q)ᵀ e₃`.
pub fn vertical_in_body<S: Real>(q: &[S; 4]) -> [S; 3] {
    // Closed form of A(q)ᵀ e₃, i.e. the third row of the rotation matrix.
    let two = S::of(2.0);
    [
        two * (q[1] * q[3] - q[0] * q[2]),
        two * (q[2] * q[3] + q[0] * q[1]),
        q[0] * q[0] - q[1] * q[1] - q[2] * q[2] + q[3] * q[3],
    ]
}

/// Quaternion of the Z-X-Z Euler rotation `Rz(phi) Rx(theta) Rz(psi)`.
pub fn quat_from_euler_zxz<S: Real>(phi: S, theta: S, psi: S) -> [S; 4] {
    quat_mul(
        &quat_mul(&quat_about_z(phi), &quat_about_x(theta)),
        &quat_about_z(psi),
    )
}

/// The space vertical in body coordinates for Z-X-Z angles:
/// `(sin θ sin ψ, sin θ cos ψ, cos θ)`.
pub fn vertical_from_euler_zxz<S: Real>(theta: S, psi: S) -> [S; 3] {
    [
        theta.sin() * psi.sin(),
        theta.sin() * psi.cos(),
        theta.cos(),
    ]
}

/// Body angular velocity matrix `B(θ, ψ)` of the Z-X-Z chart: for Euler rates
/// `(φ̇, θ̇, ψ̇)` the body angular velocity is `w = B · (φ̇, θ̇, ψ̇)` and the
/// conjugate momenta satisfy `p = Bᵀ Π`. Determinant `−sin θ`, so the chart
/// degenerates at the poles.
pub fn euler_zxz_velocity_matrix<S: Real>(theta: S, psi: S) -> [[S; 3]; 3] {
    let (st, ct) = (theta.sin(), theta.cos());
    let (sp, cp) = (psi.sin(), psi.cos());
    [
        [st * sp, cp, S::zero()],
        [st * cp, -sp, S::zero()],
        [ct, S::zero(), S::one()],
    ]
}

/// Partial derivative of `B(θ, ψ)` with respect to `θ`.
pub fn euler_zxz_velocity_matrix_dtheta<S: Real>(theta: S, psi: S) -> [[S; 3]; 3] {
    let (st, ct) = (theta.sin(), theta.cos());
    let (sp, cp) = (psi.sin(), psi.cos());
    let z = S::zero();
    [[ct * sp, z, z], [ct * cp, z, z], [-st, z, z]]
}

/// Partial derivative of `B(θ, ψ)` with respect to `ψ`.
pub fn euler_zxz_velocity_matrix_dpsi<S: Real>(theta: S, psi: S) -> [[S; 3]; 3] {
    let st = theta.sin();
    let (sp, cp) = (psi.sin(), psi.cos());
    let z = S::zero();
    [[st * cp, -sp, z], [-st * sp, -cp, z], [z, z, z]]
}

/// Solve the 3×3 system `M x = b` by explicit cofactors; returns `None` when
/// the determinant vanishes. Small enough that a dense LU would be overkill.
pub fn solve3<S: Real>(m: &[[S; 3]; 3], b: &[S; 3]) -> Option<[S; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det == S::zero() || !det.is_finite() {
        return None;
    }
    let inv_det = S::one() / det;
    let adj = [
        [
            m[1][1] * m[2][2] - m[1][2] * m[2][1],
            m[0][2] * m[2][1] - m[0][1] * m[2][2],
            m[0][1] * m[1][2] - m[0][2] * m[1][1],
        ],
        [
            m[1][2] * m[2][0] - m[1][0] * m[2][2],
            m[0][0] * m[2][2] - m[0][2] * m[2][0],
            m[0][2] * m[1][0] - m[0][0] * m[1][2],
        ],
        [
            m[1][0] * m[2][1] - m[1][1] * m[2][0],
            m[0][1] * m[2][0] - m[0][0] * m[2][1],
            m[0][0] * m[1][1] - m[0][1] * m[1][0],
        ],
    ];
    let mut x = [S::zero(); 3];
    for r in 0..3 {
        x[r] = (adj[r][0] * b[0] + adj[r][1] * b[1] + adj[r][2] * b[2]) * inv_det;
    }
    Some(x)
}

/// Transpose of a 3×3 array matrix.
pub fn transpose3<S: Real>(m: &[[S; 3]; 3]) -> [[S; 3]; 3] {
    let mut t = [[S::zero(); 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            t[r][c] = m[c][r];
        }
    }
    t
}

/// Matrix-vector product for 3×3 array matrices.
pub fn mat3_mul_vec<S: Real>(m: &[[S; 3]; 3], v: &[S; 3]) -> [S; 3] {
    let mut out = [S::zero(); 3];
    for r in 0..3 {
        out[r] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close3(a: &[f64; 3], b: &[f64; 3], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn cross_product_of_axes() {
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        assert_eq!(cross(&e1, &e2), [0.0, 0.0, 1.0]);
        assert_eq!(cross(&e2, &e1), [0.0, 0.0, -1.0]);
    }

    #[test]
    fn quaternion_rotation_about_z_moves_x_to_y() {
        let q = quat_about_z(std::f64::consts::FRAC_PI_2);
        let v = rotate(&q, &[1.0, 0.0, 0.0]);
        assert!(close3(&v, &[0.0, 1.0, 0.0], 1e-14));
        let back = rotate_inverse(&q, &v);
        assert!(close3(&back, &[1.0, 0.0, 0.0], 1e-14));
    }

    #[test]
    fn rotation_preserves_norm_and_composes() {
        let a = quat_from_euler_zxz(0.3_f64, 1.1, -0.4);
        let v = [0.2, -0.7, 0.5];
        let w = rotate(&a, &v);
        assert!((norm3(&w) - norm3(&v)).abs() < 1e-14);
        // Composition: rotating by a then by b equals rotating by b ⊗ a.
        let b = quat_about_x(0.8_f64);
        let w2 = rotate(&b, &w);
        let ba = quat_mul(&b, &a);
        assert!(close3(&w2, &rotate(&ba, &v), 1e-14));
    }

    #[test]
    fn vertical_in_body_matches_euler_closed_form() {
        let (phi, theta, psi) = (0.7_f64, 1.2, -0.5);
        let q = quat_from_euler_zxz(phi, theta, psi);
        let from_quat = vertical_in_body(&q);
        let from_euler = vertical_from_euler_zxz(theta, psi);
        assert!(close3(&from_quat, &from_euler, 1e-14));
        // And against the generic rotate path.
        let generic = rotate_inverse(&q, &[0.0, 0.0, 1.0]);
        assert!(close3(&from_quat, &generic, 1e-14));
    }

    #[test]
    fn velocity_matrix_matches_finite_difference_of_attitude() {
        // w_hat = A(q)ᵀ dA/dα for each Euler rate; check B columns via the
        // quaternion derivative: q̇ = ½ q ⊗ (0, w) ⇒ w = 2 (q* ⊗ q̇).vec.
        let (phi, theta, psi) = (0.4_f64, 0.9, 0.6);
        let h = 1e-6;
        let b = euler_zxz_velocity_matrix(theta, psi);
        for (col, delta) in [(0, [h, 0.0, 0.0]), (1, [0.0, h, 0.0]), (2, [0.0, 0.0, h])] {
            let qp = quat_from_euler_zxz(phi + delta[0], theta + delta[1], psi + delta[2]);
            let qm = quat_from_euler_zxz(phi - delta[0], theta - delta[1], psi - delta[2]);
            let q = quat_from_euler_zxz(phi, theta, psi);
            let dq = [
                (qp[0] - qm[0]) / (2.0 * h),
                (qp[1] - qm[1]) / (2.0 * h),
                (qp[2] - qm[2]) / (2.0 * h),
                (qp[3] - qm[3]) / (2.0 * h),
            ];
            let w = quat_mul(&quat_conj(&q), &dq);
            let w = [2.0 * w[1], 2.0 * w[2], 2.0 * w[3]];
            let expected = [b[0][col], b[1][col], b[2][col]];
            assert!(close3(&w, &expected, 1e-8), "column {col}: {w:?} vs {expected:?}");
        }
    }

    #[test]
    fn velocity_matrix_partials_match_finite_differences() {
        let (theta, psi) = (0.9_f64, 0.6);
        let h = 1e-6;
        let dt_analytic = euler_zxz_velocity_matrix_dtheta(theta, psi);
        let dp_analytic = euler_zxz_velocity_matrix_dpsi(theta, psi);
        let bp = euler_zxz_velocity_matrix(theta + h, psi);
        let bm = euler_zxz_velocity_matrix(theta - h, psi);
        let cp = euler_zxz_velocity_matrix(theta, psi + h);
        let cm = euler_zxz_velocity_matrix(theta, psi - h);
        for r in 0..3 {
            for c in 0..3 {
                assert!(((bp[r][c] - bm[r][c]) / (2.0 * h) - dt_analytic[r][c]).abs() < 1e-8);
                assert!(((cp[r][c] - cm[r][c]) / (2.0 * h) - dp_analytic[r][c]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn solve3_recovers_solution() {
        let m = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        let x = [0.5, -1.0, 2.0];
        let b = mat3_mul_vec(&m, &x);
        let got = solve3(&m, &b).unwrap();
        assert!(close3(&got, &x, 1e-13));
        let singular = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]];
        assert!(solve3(&singular, &[1.0, 1.0, 1.0]).is_none());
    }

    #[test]
    fn normalization_reports_drift() {
        let q = [1.001_f64, 0.0, 0.0, 0.0];
        let (unit, drift) = quat_normalize(&q);
        assert!((quat_norm(&unit) - 1.0).abs() < 1e-15);
        assert!((drift - 0.001).abs() < 1e-12);
    }
}
