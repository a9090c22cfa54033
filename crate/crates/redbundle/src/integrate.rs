//! Fixed-step ODE integrators over autonomous state vectors.
//!
//! Time is always a state component here (`ṫ = 1` for the flows in this
//! crate), so right-hand sides take only the state. Two methods are provided:
//! classical RK4 and the implicit midpoint rule (fixed-point iteration,
//! tolerance 1e−12, at most 50 sweeps). An optional per-step projection hook
//! re-imposes constraints (unit quaternions, sphere/tangency projections) and
//! reports the pre-projection drift.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Integration method selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Midpoint,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Rk4 => "rk4",
            Method::Midpoint => "midpoint",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "midpoint" => Ok(Method::Midpoint),
            other => Err(Error::Config(format!(
                "unknown integrator '{other}' (expected 'rk4' or 'midpoint')"
            ))),
        }
    }
}

/// Result of a fixed-step integration: `states[k]` is the state after `k`
/// steps; `max_projection_drift` is the largest pre-projection constraint
/// violation seen (zero when no projection hook is supplied).
#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub dt: S,
    pub states: Vec<Vec<S>>,
    pub max_projection_drift: S,
}

impl<S: Real> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &[S] {
        self.states.last().expect("trajectory has at least one state")
    }
}

fn axpy<S: Real>(y: &[S], a: S, x: &[S]) -> Vec<S> {
    y.iter().zip(x).map(|(&yi, &xi)| yi + a * xi).collect()
}

/// One classical RK4 step.
pub fn rk4_step<S: Real>(f: &dyn Fn(&[S]) -> Vec<S>, y: &[S], dt: S) -> Vec<S> {
    let half = S::of(0.5);
    let k1 = f(y);
    let k2 = f(&axpy(y, half * dt, &k1));
    let k3 = f(&axpy(y, half * dt, &k2));
    let k4 = f(&axpy(y, dt, &k3));
    let sixth = dt / S::of(6.0);
    y.iter()
        .enumerate()
        .map(|(i, &yi)| {
            yi + sixth * (k1[i] + S::of(2.0) * (k2[i] + k3[i]) + k4[i])
        })
        .collect()
}

/// One implicit-midpoint step: solve `y⁺ = y + dt·f((y + y⁺)/2)` by
/// fixed-point iteration.
pub fn midpoint_step<S: Real>(
    f: &dyn Fn(&[S]) -> Vec<S>,
    y: &[S],
    dt: S,
) -> Result<Vec<S>> {
    let tol = S::of(1e-12);
    let max_iters = 50;
    let half = S::of(0.5);
    let mut z = axpy(y, dt, &f(y));
    for _ in 0..max_iters {
        let mid: Vec<S> = y.iter().zip(&z).map(|(&a, &b)| half * (a + b)).collect();
        let next = axpy(y, dt, &f(&mid));
        let delta = crate::scalar::inf_norm_diff(&next, &z);
        z = next;
        if delta <= tol {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence { max_iters })
}

/// Integrate `nsteps` fixed steps of size `dt` from `y0`. The optional
/// `project` hook runs after every step; it may modify the state in place and
/// must return the pre-projection constraint drift it corrected.
pub fn integrate<S: Real>(
    method: Method,
    f: &dyn Fn(&[S]) -> Vec<S>,
    y0: &[S],
    dt: S,
    nsteps: usize,
    mut project: Option<&mut dyn FnMut(&mut Vec<S>) -> S>,
) -> Result<Trajectory<S>> {
    if !(dt > S::zero()) {
        return Err(Error::Config(format!(
            "step size must be positive, got {dt}"
        )));
    }
    let mut states = Vec::with_capacity(nsteps + 1);
    states.push(y0.to_vec());
    let mut drift = S::zero();
    let mut y = y0.to_vec();
    for step in 0..nsteps {
        let mut next = match method {
            Method::Rk4 => rk4_step(f, &y, dt),
            Method::Midpoint => midpoint_step(f, &y, dt)?,
        };
        if !crate::scalar::all_finite(&next) {
            return Err(Error::NonFiniteState { step: step + 1 });
        }
        if let Some(proj) = project.as_mut() {
            drift = drift.max(proj(&mut next));
        }
        states.push(next.clone());
        y = next;
    }
    Ok(Trajectory {
        dt,
        states,
        max_projection_drift: drift,
    })
}

/// Number of fixed steps covering `[t0, t1]` with step `dt`; errors unless
/// the span is an integer multiple of `dt` to within a part in 10⁶.
pub fn step_count<S: Real>(t0: S, t1: S, dt: S) -> Result<usize> {
    if !(dt > S::zero()) {
        return Err(Error::Config(format!(
            "step size must be positive, got {dt}"
        )));
    }
    if !(t1 > t0) {
        return Err(Error::Config(format!(
            "time span must be positive, got t0 = {t0}, t1 = {t1}"
        )));
    }
    let raw = ((t1 - t0) / dt).to_f64_lossy();
    let n = raw.round();
    if (raw - n).abs() > 1e-6 * n.max(1.0) {
        return Err(Error::Config(format!(
            "time span (t1 - t0) = {} is not an integer number of steps of dt = {dt}",
            t1 - t0
        )));
    }
    Ok(n as usize)
}

/// Largest deviation of trajectory first differences from the vector field:
/// `max_k ‖(y_{k+1} − y_{k−1})/(2 dt) − f(y_k)‖∞`. For a smooth field this is
/// O(dt²); it certifies that the discrete flow follows the claimed equations.
pub fn flow_residual<S: Real>(f: &dyn Fn(&[S]) -> Vec<S>, traj: &Trajectory<S>) -> S {
    let mut worst = S::zero();
    let two_dt = traj.dt + traj.dt;
    for k in 1..traj.states.len().saturating_sub(1) {
        let rhs = f(&traj.states[k]);
        for i in 0..rhs.len() {
            let slope = (traj.states[k + 1][i] - traj.states[k - 1][i]) / two_dt;
            worst = worst.max((slope - rhs[i]).abs());
        }
    }
    worst
}
