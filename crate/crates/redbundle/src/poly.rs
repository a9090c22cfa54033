//! Sparse multivariate polynomials with exact gradients.
//!
//! The verification suites need families of smooth test functions whose
//! analytic gradients are beyond doubt (finite-difference-only functions
//! cannot support the nested differentiations in, e.g., the Jacobi identity
//! check). A term is `c · Π xᵢ^{eᵢ}`.

use crate::geometry::{Chart, ScalarField};
use crate::linalg::Mat;
use crate::scalar::Real;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One monomial term: coefficient and per-coordinate exponents.
#[derive(Clone, Debug)]
pub struct Term<S> {
    pub coeff: S,
    pub exponents: Vec<u32>,
}

/// Sparse polynomial in `dim` variables.
#[derive(Clone, Debug)]
pub struct Poly<S> {
    dim: usize,
    terms: Vec<Term<S>>,
}

impl<S: Real> Poly<S> {
    pub fn new(dim: usize, terms: Vec<Term<S>>) -> Self {
        for t in &terms {
            assert_eq!(t.exponents.len(), dim, "term arity mismatch");
        }
        Poly { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[S]) -> S {
        self.terms.iter().fold(S::zero(), |acc, t| {
            let m = t
                .exponents
                .iter()
                .zip(x)
                .fold(t.coeff, |m, (&e, &xi)| m * xi.powi(e as i32));
            acc + m
        })
    }

    pub fn gradient(&self, x: &[S]) -> Vec<S> {
        (0..self.dim)
            .map(|i| {
                self.terms.iter().fold(S::zero(), |acc, t| {
                    let e = t.exponents[i];
                    if e == 0 {
                        return acc;
                    }
                    let mut m = t.coeff * S::from_u32(e).expect("small exponent");
                    for (j, (&ej, &xj)) in t.exponents.iter().zip(x).enumerate() {
                        let pow = if j == i { ej - 1 } else { ej };
                        m = m * xj.powi(pow as i32);
                    }
                    acc + m
                })
            })
            .collect()
    }

    /// Wrap as a scalar field with the exact gradient attached.
    pub fn field(&self, chart: &Chart) -> ScalarField<S> {
        assert_eq!(chart.dim(), self.dim, "chart dimension mismatch");
        let p = self.clone();
        let g = self.clone();
        ScalarField::with_gradient(chart.clone(), move |x| p.eval(x), move |x| g.gradient(x))
    }

    /// Symbolic partial derivative with respect to coordinate `i`.
    pub fn derivative(&self, i: usize) -> Poly<S> {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exponents[i] > 0)
            .map(|t| {
                let mut exponents = t.exponents.clone();
                exponents[i] -= 1;
                Term {
                    coeff: t.coeff * S::from_u32(t.exponents[i]).expect("small exponent"),
                    exponents,
                }
            })
            .collect();
        Poly {
            dim: self.dim,
            terms,
        }
    }

    /// Symbolic product (terms are not combined; evaluation is unaffected).
    pub fn mul(&self, other: &Poly<S>) -> Poly<S> {
        assert_eq!(self.dim, other.dim, "polynomial arity mismatch");
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let exponents = a
                    .exponents
                    .iter()
                    .zip(&b.exponents)
                    .map(|(&x, &y)| x + y)
                    .collect();
                terms.push(Term {
                    coeff: a.coeff * b.coeff,
                    exponents,
                });
            }
        }
        Poly {
            dim: self.dim,
            terms,
        }
    }

    /// Symbolic sum.
    pub fn add(&self, other: &Poly<S>) -> Poly<S> {
        assert_eq!(self.dim, other.dim, "polynomial arity mismatch");
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Poly {
            dim: self.dim,
            terms,
        }
    }

    /// Symbolic scalar multiple.
    pub fn scale(&self, c: S) -> Poly<S> {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: t.coeff * c,
                exponents: t.exponents.clone(),
            })
            .collect();
        Poly {
            dim: self.dim,
            terms,
        }
    }

    /// Poisson bracket with respect to a *constant* bivector `Λ`:
    /// `{F, G} = Σᵢⱼ Λᵢⱼ ∂ᵢF ∂ⱼG`, computed symbolically so the result is
    /// again a polynomial with an exact gradient. This is what makes nested
    /// identities (Jacobi) checkable at roundoff tolerance.
    pub fn constant_bracket(&self, other: &Poly<S>, lambda: &Mat<S>) -> Poly<S> {
        let mut acc = Poly {
            dim: self.dim,
            terms: Vec::new(),
        };
        for i in 0..self.dim {
            let di = self.derivative(i);
            if di.terms.is_empty() {
                continue;
            }
            for j in 0..self.dim {
                let lij = lambda[(i, j)];
                if lij == S::zero() {
                    continue;
                }
                let dj = other.derivative(j);
                if dj.terms.is_empty() {
                    continue;
                }
                acc = acc.add(&di.mul(&dj).scale(lij));
            }
        }
        acc
    }
}

/// Deterministic family of low-degree polynomials on a chart: coefficients in
/// `[-1, 1]`, total degree ≤ 2, a couple of terms each. Used as the fixed
/// test-function family for bracket and cosymplectic identity checks.
pub fn polynomial_family<S: Real>(
    chart: &Chart,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<ScalarField<S>> {
    polynomial_polys(chart.dim(), count, rng)
        .iter()
        .map(|p| p.field(chart))
        .collect()
}

/// The same deterministic family as raw polynomials, for callers that need
/// symbolic operations (products, nested brackets) on the test functions.
pub fn polynomial_polys<S: Real>(
    dim: usize,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Poly<S>> {
    (0..count)
        .map(|_| {
            let n_terms = 2 + rng.gen_range(0..2usize);
            let terms: Vec<Term<S>> = (0..n_terms)
                .map(|_| {
                    let mut exponents = vec![0u32; dim];
                    // Total degree between 1 and 2, spread over ≤ 2 slots.
                    let deg = 1 + rng.gen_range(0..2u32);
                    for _ in 0..deg {
                        let slot = rng.gen_range(0..dim);
                        exponents[slot] += 1;
                    }
                    Term {
                        coeff: S::of(rng.gen_range(-1.0..1.0)),
                        exponents,
                    }
                })
                .collect();
            Poly::new(dim, terms)
        })
        .collect()
}
