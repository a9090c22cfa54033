//! Smoke tests at single precision. Everything in the library is generic
//! over the scalar type; these tests pin that down by running the core
//! identities and a short integration at `f32` with correspondingly loose
//! tolerances and wider finite-difference steps.

use redbundle::geometry::FdConfig;
use redbundle::hamiltonian::{
    bracket_correspondence_residual, cosymplectic_from_section, omega_reconstruction_residual,
};
use redbundle::models::{HeavyTop, Oscillator};
use redbundle::integrate::{integrate, Method};
use redbundle::sample::rng_for;
use redbundle::symmetry::canonical_action_residuals;

/// Finite-difference steps sized for f32 (machine epsilon ~1.2e-7).
fn fd32() -> FdConfig<f32> {
    FdConfig { h1: 1e-3, h2: 5e-3 }
}

#[test]
fn single_precision_structure_identities_hold_loosely() {
    let model = Oscillator::standard();
    let cart = model.cartesian::<f32>().unwrap();
    let fd = fd32();
    let mut rng = rng_for(7, "f32/structure");
    let pts = cart.sample_box.samples(&mut rng, 25);

    let pair = cosymplectic_from_section(&cart.section, &fd).unwrap();
    let mut worst_recon = 0.0f32;
    let mut worst_reeb = 0.0f32;
    for a in &pts {
        worst_recon = worst_recon.max(omega_reconstruction_residual(&cart.section, &pair, a, &fd).unwrap());
        let v = cart.bundle.project(a);
        let (contraction, pairing) = pair.reeb_defect_at(&v).unwrap();
        worst_reeb = worst_reeb.max(contraction).max(pairing);
    }
    assert!(worst_recon <= 2e-3, "reconstruction residual {worst_recon:e}");
    assert!(worst_reeb <= 1e-4, "Reeb defect {worst_reeb:e}");
}

#[test]
fn single_precision_action_and_momentum_residuals_hold_loosely() {
    let model = Oscillator::standard();
    let cart = model.cartesian::<f32>().unwrap();
    let fd = fd32();
    let mut rng = rng_for(7, "f32/action");
    let pts = cart.sample_box.samples(&mut rng, 20);

    for a in &pts {
        let res = canonical_action_residuals(
            &cart.bundle,
            &cart.action,
            Some(&cart.momentum),
            a,
            0.4f32,
            -0.8f32,
            &fd,
        )
        .unwrap();
        assert!(res.symplectic <= 1e-3, "symplectic {:e}", res.symplectic);
        assert!(res.commutation <= 1e-3, "commutation {:e}", res.commutation);
        assert!(res.equivariance <= 1e-3, "equivariance {:e}", res.equivariance);
        assert!(res.momentum_field <= 1e-3, "momentum field {:e}", res.momentum_field);
        assert!(res.momentum_basicness <= 1e-3, "basicness {:e}", res.momentum_basicness);
    }
}

#[test]
fn single_precision_bracket_correspondence_holds_loosely() {
    let model = Oscillator::standard();
    let cart = model.cartesian::<f32>().unwrap();
    let fd = fd32();
    let mut rng = rng_for(7, "f32/bracket");
    let pts = cart.sample_box.samples(&mut rng, 15);

    let pair = cosymplectic_from_section(&cart.section, &fd).unwrap();
    let base = cart.bundle.base_chart().clone();
    let polys = redbundle::poly::polynomial_polys::<f32>(base.dim(), 4, &mut rng);
    let f = polys[0].field(&base);
    let g = polys[1].field(&base);
    let mut worst = 0.0f32;
    for a in &pts {
        worst = worst.max(bracket_correspondence_residual(&cart.section, &pair, &f, &g, a, &fd).unwrap());
    }
    assert!(worst <= 5e-3, "bracket correspondence residual {worst:e}");
}

#[test]
fn single_precision_flows_conserve_momentum_to_float_accuracy() {
    // Oscillator in the plane: angular momentum along an rk4 orbit.
    let model = Oscillator::standard();
    let rhs = model.cartesian_extended_rhs::<f32>();
    let y0: Vec<f32> = vec![0.0, 0.0, 1.0, 0.5, -0.3, 0.8];
    let traj = integrate(Method::Rk4, &rhs, &y0, 1e-3, 2_000, None).unwrap();
    let j = |y: &[f32]| y[3] * y[4] - y[2] * y[5];
    let j0 = j(&traj.states[0]);
    let drift = traj.states.iter().map(|y| (j(y) - j0).abs()).fold(0.0f32, f32::max);
    assert!(drift <= 1e-4, "angular momentum drifted by {drift:e}");

    // Rigid body with torque: the vertical momentum pairing along the
    // quaternion flow, with unit-norm projection each step.
    let top = HeavyTop::standard();
    let rhs = top.full_rhs::<f32>();
    let mut project = HeavyTop::full_projection::<f32>();
    let y0: Vec<f32> = vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.4, -0.3, 0.5, 0.0];
    let traj = integrate(Method::Rk4, &rhs, &y0, 1e-3, 2_000, Some(&mut project)).unwrap();
    let j0 = top.full_momentum(&traj.states[0]);
    let drift = traj
        .states
        .iter()
        .map(|y| (top.full_momentum(y) - j0).abs())
        .fold(0.0f32, f32::max);
    assert!(drift <= 1e-4, "vertical momentum drifted by {drift:e}");
    assert!(traj.max_projection_drift <= 1e-5);
}

#[test]
fn single_precision_reduction_tracks_the_full_flow() {
    let model = Oscillator::standard();
    let nu = 1.0f32;
    let red = model.reduced::<f32>(nu).unwrap();
    let full_rhs = model.polar_extended_rhs::<f32>();
    let red_rhs = model.reduced_extended_rhs::<f32>(nu);

    let y0: Vec<f32> = vec![0.0, 0.0, 1.2, 0.3, 0.4, nu];
    let z0 = red.reduction.project_total(&y0);
    let full = integrate(Method::Rk4, &full_rhs, &y0, 1e-3, 2_000, None).unwrap();
    let reduced = integrate(Method::Rk4, &red_rhs, &z0, 1e-3, 2_000, None).unwrap();
    let sup = full
        .states
        .iter()
        .zip(&reduced.states)
        .flat_map(|(a, b)| {
            let pa = red.reduction.project_total(a);
            pa.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).collect::<Vec<_>>()
        })
        .fold(0.0f32, f32::max);
    assert!(sup <= 1e-3, "reduced flow diverges from projected full flow by {sup:e}");
}
