//! Pointwise differential-geometry operators.
//!
//! Conventions, fixed once here and relied on everywhere else:
//! * 2-forms are coefficient matrices `W` with `ω(u, w) = uᵀ W w`, so
//!   `W[i][j]` multiplies `dxⁱ∧dxʲ`.
//! * the interior product contracts the *first* slot:
//!   `(i_X ω)_j = Σᵢ Xᵢ W[i][j]`.
//! * the vertical lift of a 2-form on configuration space places its
//!   coefficients, unchanged, at the conjugate-momentum slots of a
//!   cotangent-type chart (validated against brute-force inversion in the
//!   bundle tests).

use super::chart::Chart;
use super::fd::{central_scalar, FdConfig};
use super::field::{OneForm, ScalarField, TwoForm, VectorField};
use super::map::SmoothMap;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Real;

/// Differential of a scalar field at a point: analytic gradient when present,
/// central differences otherwise.
pub fn differential<S: Real>(
    f: &ScalarField<S>,
    x: &[S],
    fd: &FdConfig<S>,
) -> Result<Vec<S>> {
    f.gradient_or_fd(x, fd)
}

/// Max covariant-curl residual `|∂ᵢ ω_{jk} + ∂ⱼ ω_{ki} + ∂ₖ ω_{ij}|` over all
/// index triples — zero iff the 2-form is closed. Uses the coarse nested step
/// because the entries themselves may come from finite differences.
pub fn closedness_residual<S: Real>(
    omega: &TwoForm<S>,
    x: &[S],
    fd: &FdConfig<S>,
) -> Result<S> {
    omega.chart().expect_point(x, "2-form closedness")?;
    let n = x.len();
    // d(entry)/dx_i for every i, cached per direction.
    let mut grads: Vec<Mat<S>> = Vec::with_capacity(n);
    for i in 0..n {
        let step = fd.step2(x[i]);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] = xp[i] + step;
        xm[i] = xm[i] - step;
        let wp = omega.eval(&xp);
        let wm = omega.eval(&xm);
        if !wp.is_finite() || !wm.is_finite() {
            return Err(Error::NonFiniteEval {
                coord: omega.chart().coord(i).to_string(),
                point: crate::error::fmt_point(x),
            });
        }
        grads.push(wp.sub(&wm).scale(S::one() / (step + step)));
    }
    let mut worst = S::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let r = grads[i][(j, k)] + grads[j][(k, i)] + grads[k][(i, j)];
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// Max exterior-derivative residual `|∂ᵢ αⱼ − ∂ⱼ αᵢ|` of a 1-form — zero iff
/// the form is closed.
pub fn one_form_closedness_residual<S: Real>(
    alpha: &OneForm<S>,
    x: &[S],
    fd: &FdConfig<S>,
) -> Result<S> {
    alpha.chart().expect_point(x, "1-form closedness")?;
    let n = x.len();
    let mut grads: Vec<Vec<S>> = Vec::with_capacity(n);
    for i in 0..n {
        let step = fd.step2(x[i]);
        grads.push(super::fd::central_vector(
            &|y: &[S]| alpha.eval(y),
            x,
            i,
            step,
            alpha.chart().coord(i),
        )?);
    }
    let mut worst = S::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((grads[i][j] - grads[j][i]).abs());
        }
    }
    Ok(worst)
}

/// Pullback `φ*ω` evaluated at `x`: `Jᵀ W(φ(x)) J` with `J` the Jacobian of
/// `φ` at `x`.
pub fn pullback_two_form_at<S: Real>(
    phi: &SmoothMap<S>,
    omega: &TwoForm<S>,
    x: &[S],
    fd: &FdConfig<S>,
) -> Result<Mat<S>> {
    phi.target()
        .expect_same(omega.chart(), "2-form pullback")?;
    phi.source().expect_point(x, "2-form pullback")?;
    let j = phi.jacobian(x, fd)?;
    let w = omega.eval(&phi.apply(x));
    Ok(j.transpose().mul_mat(&w.mul_mat(&j)))
}

/// Pullback of a 2-form as a lazy 2-form on the source chart.
pub fn pullback_two_form<S: Real>(
    phi: &SmoothMap<S>,
    omega: &TwoForm<S>,
    fd: &FdConfig<S>,
) -> Result<TwoForm<S>> {
    phi.target()
        .expect_same(omega.chart(), "2-form pullback")?;
    let phi = phi.clone();
    let omega = omega.clone();
    let fd = *fd;
    Ok(TwoForm::new(phi.source().clone(), move |x| {
        match pullback_two_form_at(&phi, &omega, x, &fd) {
            Ok(m) => m,
            Err(_) => {
                let n = phi.source().dim();
                Mat::from_fn(n, n, |_, _| S::nan())
            }
        }
    }))
}

/// Pullback `φ*α` of a 1-form evaluated at `x`: `Jᵀ α(φ(x))`.
pub fn pullback_one_form_at<S: Real>(
    phi: &SmoothMap<S>,
    alpha: &OneForm<S>,
    x: &[S],
    fd: &FdConfig<S>,
) -> Result<Vec<S>> {
    phi.target()
        .expect_same(alpha.chart(), "1-form pullback")?;
    let j = phi.jacobian(x, fd)?;
    Ok(j.transpose().mul_vec(&alpha.eval(&phi.apply(x))))
}

/// Pullback of a 1-form as a lazy 1-form on the source chart.
pub fn pullback_one_form<S: Real>(
    phi: &SmoothMap<S>,
    alpha: &OneForm<S>,
    fd: &FdConfig<S>,
) -> Result<OneForm<S>> {
    phi.target()
        .expect_same(alpha.chart(), "1-form pullback")?;
    let phi = phi.clone();
    let alpha = alpha.clone();
    let fd = *fd;
    Ok(OneForm::new(phi.source().clone(), move |x| {
        pullback_one_form_at(&phi, &alpha, x, &fd)
            .unwrap_or_else(|_| vec![S::nan(); phi.source().dim()])
    }))
}

/// Interior product `i_X ω` at a point: the covector `v ↦ ω(X, v)`.
pub fn interior_product_at<S: Real>(
    xf: &VectorField<S>,
    omega: &TwoForm<S>,
    x: &[S],
) -> Result<Vec<S>> {
    xf.chart()
        .expect_same(omega.chart(), "interior product")?;
    xf.chart().expect_point(x, "interior product")?;
    Ok(omega.eval(x).vec_mul(&xf.eval(x)))
}

/// Interior product as a lazy 1-form.
pub fn interior_product<S: Real>(
    xf: &VectorField<S>,
    omega: &TwoForm<S>,
) -> Result<OneForm<S>> {
    xf.chart()
        .expect_same(omega.chart(), "interior product")?;
    let xf = xf.clone();
    let omega = omega.clone();
    Ok(OneForm::new(xf.chart().clone(), move |x| {
        omega.eval(x).vec_mul(&xf.eval(x))
    }))
}

/// Vertical lift of a 2-form `β` on configuration space into a bivector on a
/// cotangent-type chart: coefficient `β_{ab}` lands at the conjugate-momentum
/// slot pair of `(a, b)`. Requires the total chart to declare its cotangent
/// pairing and `β`'s chart to list the configuration coordinates in pair
/// order.
pub fn vertical_lift_at<S: Real>(
    beta: &TwoForm<S>,
    total: &Chart,
    x: &[S],
) -> Result<Mat<S>> {
    total.expect_point(x, "vertical lift")?;
    let pairs = total.cotangent_pairs().ok_or_else(|| Error::Chart {
        chart: total.name().to_string(),
        msg: "vertical lift requires a cotangent-type chart".to_string(),
    })?;
    if beta.chart().dim() != pairs.len() {
        return Err(Error::Dimension {
            context: "vertical lift configuration chart",
            expected: pairs.len(),
            got: beta.chart().dim(),
        });
    }
    let cfg = pairs.config_point(x);
    let b = beta.eval(&cfg);
    let n = total.dim();
    let mut lift = Mat::zeros(n, n);
    for (a, &(_, fa)) in pairs.pairs().iter().enumerate() {
        for (c, &(_, fc)) in pairs.pairs().iter().enumerate() {
            lift[(fa, fc)] = b[(a, c)];
        }
    }
    Ok(lift)
}

/// Vertical lift as a lazy bivector on the total chart.
pub fn vertical_lift<S: Real>(
    beta: &TwoForm<S>,
    total: &Chart,
) -> Result<super::field::Bivector<S>> {
    // Validate eagerly with a dummy dimension check.
    let pairs = total.cotangent_pairs().ok_or_else(|| Error::Chart {
        chart: total.name().to_string(),
        msg: "vertical lift requires a cotangent-type chart".to_string(),
    })?;
    if beta.chart().dim() != pairs.len() {
        return Err(Error::Dimension {
            context: "vertical lift configuration chart",
            expected: pairs.len(),
            got: beta.chart().dim(),
        });
    }
    let beta = beta.clone();
    let total = total.clone();
    let t2 = total.clone();
    Ok(super::field::Bivector::new(total, move |x| {
        vertical_lift_at(&beta, &t2, x)
            .unwrap_or_else(|_| Mat::from_fn(t2.dim(), t2.dim(), |_, _| S::nan()))
    }))
}

/// Coefficient matrix of the wedge `α ∧ β` of two covectors, in the same
/// convention as [`TwoForm`]: the result is `α βᵀ − β αᵀ`, so entry `(i, j)`
/// multiplies `dxⁱ∧dxʲ`.
pub fn wedge_covectors<S: Real>(alpha: &[S], beta: &[S]) -> Mat<S> {
    let n = alpha.len();
    Mat::from_fn(n, n, |i, j| alpha[i] * beta[j] - alpha[j] * beta[i])
}

/// Directional derivative `X(f)` at a point.
pub fn lie_derivative_scalar<S: Real>(
    xf: &VectorField<S>,
    f: &ScalarField<S>,
    x: &[S],
    fd: &FdConfig<S>,
) -> Result<S> {
    xf.chart()
        .expect_same(f.chart(), "directional derivative")?;
    let df = differential(f, x, fd)?;
    Ok(crate::scalar::dot(&df, &xf.eval(x)))
}

/// Leading-order closedness probe of a scalar function's differential (sanity
/// helper used in tests): d(df) should vanish, i.e. mixed partials commute.
pub fn mixed_partial_defect<S: Real>(
    f: &ScalarField<S>,
    x: &[S],
    i: usize,
    j: usize,
    fd: &FdConfig<S>,
) -> Result<S> {
    let fi = {
        let f = f.clone();
        let fd2 = *fd;
        let name = f.chart().coord(i).to_string();
        move |y: &[S]| {
            central_scalar(&|z: &[S]| f.eval(z), y, i, fd2.step2(y[i]), &name)
                .unwrap_or(S::nan())
        }
    };
    let fj = {
        let f = f.clone();
        let fd2 = *fd;
        let name = f.chart().coord(j).to_string();
        move |y: &[S]| {
            central_scalar(&|z: &[S]| f.eval(z), y, j, fd2.step2(y[j]), &name)
                .unwrap_or(S::nan())
        }
    };
    let dij = central_scalar(&fi, x, j, fd.step2(x[j]), f.chart().coord(j))?;
    let dji = central_scalar(&fj, x, i, fd.step2(x[i]), f.chart().coord(i))?;
    Ok((dij - dji).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::field::{const_term, fn_term, two_form_from_terms};

    fn total_chart() -> Chart {
        Chart::cotangent(
            "extended",
            &["t", "p", "q1", "p1"],
            vec![(0, 1), (2, 3)],
        )
        .unwrap()
    }

    #[test]
    fn differential_of_extended_function() {
        // f(t, p, q, p1) = p + q² at (0, 1, 2, 3) has differential (0, 1, 4, 0).
        let c = total_chart();
        let f = ScalarField::new(c, |x: &[f64]| x[1] + x[2] * x[2]);
        let d = differential(&f, &[0.0, 1.0, 2.0, 3.0], &FdConfig::default()).unwrap();
        let want = [0.0, 1.0, 4.0, 0.0];
        for (g, w) in d.iter().zip(want) {
            assert!((g - w).abs() < 1e-7, "{g} vs {w}");
        }
    }

    #[test]
    fn interior_product_of_fiber_direction() {
        // X = ∂/∂p against ω = dt∧dp on a 2-coordinate chart gives −dt.
        let c = Chart::new("tp", &["t", "p"]).unwrap();
        let omega = two_form_from_terms(c.clone(), vec![const_term(0, 1, 1.0)]).unwrap();
        let x = VectorField::coordinate(c, 1);
        let cov = interior_product_at(&x, &omega, &[0.3, -0.7]).unwrap();
        assert_eq!(cov, vec![-1.0, 0.0]);
    }

    #[test]
    fn closedness_constant_form_is_exact() {
        let c = total_chart();
        let omega =
            two_form_from_terms(c, vec![const_term(0, 1, 1.0), const_term(2, 3, 1.0)]).unwrap();
        let r = closedness_residual(&omega, &[0.1, 0.2, 0.3, 0.4], &FdConfig::default()).unwrap();
        assert!(r <= 1e-12, "residual {r}");
    }

    #[test]
    fn closedness_detects_non_closed_form() {
        // ω = q dt∧dp has dω = dq∧dt∧dp with unit coefficient: residual ≈ 1.
        let c = total_chart();
        let omega = two_form_from_terms(c, vec![fn_term(0, 1, |x: &[f64]| x[2])]).unwrap();
        let r = closedness_residual(&omega, &[0.0, 1.0, 1.0, 0.0], &FdConfig::default()).unwrap();
        assert!(r >= 0.5, "residual {r}");
        assert!((r - 1.0).abs() < 1e-5, "residual {r}");
    }

    #[test]
    fn one_form_closedness() {
        let c = Chart::new("xy", &["x", "y"]).unwrap();
        let exact = OneForm::new(c.clone(), |x: &[f64]| vec![x[1], x[0]]); // d(xy)
        let fd = FdConfig::default();
        assert!(one_form_closedness_residual(&exact, &[0.4, 1.2], &fd).unwrap() < 1e-8);
        let not = OneForm::new(c, |x: &[f64]| vec![-x[1], x[0]]); // rotational
        let r = one_form_closedness_residual(&not, &[0.4, 1.2], &fd).unwrap();
        assert!((r - 2.0).abs() < 1e-6, "residual {r}");
    }

    #[test]
    fn pullback_of_area_form_scales_by_jacobian_determinant() {
        // φ(u, v) = (2u, 3v) pulls dx∧dy back to 6 du∧dv.
        let src = Chart::new("uv", &["u", "v"]).unwrap();
        let dst = Chart::new("xy", &["x", "y"]).unwrap();
        let phi = SmoothMap::new(src, dst.clone(), |x: &[f64]| vec![2.0 * x[0], 3.0 * x[1]]);
        let omega = two_form_from_terms(dst, vec![const_term(0, 1, 1.0)]).unwrap();
        let w = pullback_two_form_at(&phi, &omega, &[0.5, 0.5], &FdConfig::default()).unwrap();
        assert!((w[(0, 1)] - 6.0).abs() < 1e-6);
        assert!((w[(1, 0)] + 6.0).abs() < 1e-6);
    }

    #[test]
    fn pullback_functoriality() {
        // (ψ∘φ)*ω = φ*(ψ*ω) at a point, all Jacobians by finite differences.
        let a = Chart::new("ab", &["a", "b"]).unwrap();
        let b = Chart::new("cd", &["c", "d"]).unwrap();
        let c = Chart::new("ef", &["e", "f"]).unwrap();
        let phi = SmoothMap::new(a.clone(), b.clone(), |x: &[f64]| {
            vec![x[0] + x[1] * x[1], x[0] * x[1]]
        });
        let psi = SmoothMap::new(b.clone(), c.clone(), |x: &[f64]| {
            vec![x[0].sin(), x[0] * x[1]]
        });
        let omega = two_form_from_terms(c, vec![fn_term(0, 1, |x: &[f64]| 1.0 + x[1] * x[1])])
            .unwrap();
        let fd = FdConfig::default();
        let x = [0.3, 0.8];
        let direct =
            pullback_two_form_at(&phi.then(&psi).unwrap(), &omega, &x, &fd).unwrap();
        let staged_form = pullback_two_form(&psi, &omega, &fd).unwrap();
        let staged = pullback_two_form_at(&phi, &staged_form, &x, &fd).unwrap();
        assert!(direct.sub(&staged).inf_norm() < 1e-5);
    }

    #[test]
    fn vertical_lift_places_coefficients_at_momentum_slots() {
        // β = c dq¹∧dq² on a 2-coordinate configuration chart lifts to ±c at
        // the (p₁, p₂) slots of the cotangent chart and zero elsewhere.
        let cfg = Chart::new("qq", &["q1", "q2"]).unwrap();
        let tot = Chart::cotangent(
            "cot",
            &["q1", "q2", "p1", "p2"],
            vec![(0, 2), (1, 3)],
        )
        .unwrap();
        let beta = two_form_from_terms(cfg, vec![const_term(0, 1, 2.5)]).unwrap();
        let lift = vertical_lift_at(&beta, &tot, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(lift[(2, 3)], 2.5);
        assert_eq!(lift[(3, 2)], -2.5);
        for r in 0..4 {
            for c in 0..4 {
                if (r, c) != (2, 3) && (r, c) != (3, 2) {
                    assert_eq!(lift[(r, c)], 0.0, "slot ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn vertical_lift_requires_cotangent_chart() {
        let cfg = Chart::new("qq", &["q1", "q2"]).unwrap();
        let plain = Chart::new("plain", &["a", "b", "c", "d"]).unwrap();
        let beta = two_form_from_terms(cfg, vec![const_term(0, 1, 1.0)]).unwrap();
        assert!(vertical_lift_at(&beta, &plain, &[0.0; 4]).is_err());
    }

    #[test]
    fn wedge_of_coordinate_covectors() {
        // dt∧dp on a 2-coordinate chart: +1 at (0,1), −1 at (1,0).
        let w = wedge_covectors(&[1.0, 0.0], &[0.0, 1.0]);
        assert_eq!(w[(0, 1)], 1.0);
        assert_eq!(w[(1, 0)], -1.0);
        assert_eq!(w[(0, 0)], 0.0);
        // Pairing against (u, v) matches α(u)β(v) − α(v)β(u).
        let a: [f64; 3] = [0.3, -0.7, 1.1];
        let b = [2.0, 0.5, -0.2];
        let w = wedge_covectors(&a, &b);
        let u = [1.0, 2.0, 3.0];
        let v = [-1.0, 0.0, 4.0];
        let au = crate::scalar::dot(&a, &u);
        let av = crate::scalar::dot(&a, &v);
        let bu = crate::scalar::dot(&b, &u);
        let bv = crate::scalar::dot(&b, &v);
        assert!((w.pair(&u, &v) - (au * bv - av * bu)).abs() < 1e-14);
    }

    #[test]
    fn mixed_partials_commute_for_smooth_function() {
        let c = Chart::new("xy", &["x", "y"]).unwrap();
        let f = ScalarField::new(c, |x: &[f64]| (x[0] * x[1]).sin());
        let d = mixed_partial_defect(&f, &[0.4, 0.9], 0, 1, &FdConfig::default()).unwrap();
        assert!(d < 1e-5, "defect {d}");
    }
}
