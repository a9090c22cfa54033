//! Deterministic sampling of chart boxes.
//!
//! All verification sampling draws from per-coordinate uniform boxes with a
//! ChaCha-seeded generator, so a fixed seed reproduces byte-identical
//! residuals on any platform. Sub-streams are derived from the master seed
//! and a label hash, making individual checks order-independent.

use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Per-coordinate sampling box.
#[derive(Clone, Debug)]
pub struct TestBox<S> {
    lo: Vec<S>,
    hi: Vec<S>,
}

impl<S: Real> TestBox<S> {
    pub fn new(bounds: &[(S, S)]) -> Self {
        TestBox {
            lo: bounds.iter().map(|b| b.0).collect(),
            hi: bounds.iter().map(|b| b.1).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<S> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&lo, &hi)| {
                let u = S::of(rng.gen::<f64>());
                lo + (hi - lo) * u
            })
            .collect()
    }

    pub fn samples(&self, rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<S>> {
        (0..count).map(|_| self.sample(rng)).collect()
    }

    /// A copy of the box with one coordinate pinned to an exact value
    /// (used to sample momentum level sets).
    pub fn pinned(&self, slot: usize, value: S) -> TestBox<S> {
        let mut b = self.clone();
        b.lo[slot] = value;
        b.hi[slot] = value;
        b
    }

    /// Sub-box of the listed coordinate slots, in order.
    pub fn project(&self, slots: &[usize]) -> TestBox<S> {
        TestBox {
            lo: slots.iter().map(|&i| self.lo[i]).collect(),
            hi: slots.iter().map(|&i| self.hi[i]).collect(),
        }
    }

    /// Insert a coordinate range at `slot` (inverse of dropping one slot).
    pub fn inserted(&self, slot: usize, lo: S, hi: S) -> TestBox<S> {
        let mut l = self.lo.clone();
        let mut h = self.hi.clone();
        l.insert(slot, lo);
        h.insert(slot, hi);
        TestBox { lo: l, hi: h }
    }
}

/// FNV-1a hash of a label, used to derive per-check RNG sub-streams and to
/// fingerprint configurations in reports.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Deterministic RNG for a (seed, label) pair.
pub fn rng_for(seed: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(label.as_bytes()))
}

/// Uniform scalar in `[lo, hi)`.
pub fn uniform<S: Real>(rng: &mut ChaCha8Rng, lo: S, hi: S) -> S {
    lo + (hi - lo) * S::of(rng.gen::<f64>())
}

/// A uniformly random unit quaternion `(w, x, y, z)`.
pub fn random_unit_quaternion<S: Real>(rng: &mut ChaCha8Rng) -> [S; 4] {
    // Marsaglia-style: normalize a 4-vector of Gaussians obtained by
    // Box-Muller; good enough for test sampling and fully deterministic.
    let mut g = [S::zero(); 4];
    for pair in 0..2 {
        let u1: f64 = rng.gen::<f64>().max(1e-12);
        let u2: f64 = rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let th = 2.0 * std::f64::consts::PI * u2;
        g[2 * pair] = S::of(r * th.cos());
        g[2 * pair + 1] = S::of(r * th.sin());
    }
    let n = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]).sqrt();
    [g[0] / n, g[1] / n, g[2] / n, g[3] / n]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic_per_seed_and_label() {
        let b = TestBox::new(&[(0.0, 1.0), (-2.0, 2.0)]);
        let a: Vec<Vec<f64>> = b.samples(&mut rng_for(7, "check"), 3);
        let c: Vec<Vec<f64>> = b.samples(&mut rng_for(7, "check"), 3);
        let d: Vec<Vec<f64>> = b.samples(&mut rng_for(8, "check"), 3);
        assert_eq!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn samples_respect_bounds_and_pinning() {
        let b = TestBox::new(&[(0.5, 2.0), (-1.0, 1.0)]);
        let mut rng = rng_for(1, "bounds");
        for x in b.samples(&mut rng, 100) {
            assert!((0.5..2.0).contains(&x[0]));
            assert!((-1.0..1.0).contains(&x[1]));
        }
        let pinned = b.pinned(1, 0.25);
        let x: Vec<f64> = pinned.sample(&mut rng);
        assert_eq!(x[1], 0.25);
    }

    #[test]
    fn box_surgery() {
        let b = TestBox::new(&[(0.0, 1.0), (2.0, 3.0), (4.0, 5.0)]);
        let p = b.project(&[0, 2]);
        assert_eq!(p.dim(), 2);
        let mut rng = rng_for(3, "proj");
        let x: Vec<f64> = p.sample(&mut rng);
        assert!((4.0..5.0).contains(&x[1]));
        let ins = p.inserted(1, -1.0, -0.5);
        let y: Vec<f64> = ins.sample(&mut rng);
        assert!((-1.0..-0.5).contains(&y[1]));
    }

    #[test]
    fn unit_quaternions_are_unit() {
        let mut rng = rng_for(11, "quat");
        for _ in 0..20 {
            let q: [f64; 4] = random_unit_quaternion(&mut rng);
            let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }
}
