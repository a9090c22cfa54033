//! Scalar coefficient functions of time with exact first derivatives.
//!
//! Model parameters that vary in time (stiffness laws, damping exponents,
//! gravity profiles) are described by small closed-form expressions parsed
//! from compact strings:
//!
//! * `const:c`            — the constant `c`
//! * `poly:c0,c1,...,ck`  — the polynomial `c0 + c1 t + … + ck t^k`
//! * `sin:a,w,phi`        — the wave `a · sin(w t + phi)`
//!
//! Terms may be summed with `+`, e.g. `const:1+sin:1,1,0` for `1 + sin t`.
//! A `+` that is part of an exponent (`1e+3`) is kept inside its number.
//! Coefficients are stored as `f64` and converted on evaluation so a single
//! parsed expression can drive systems at any scalar precision.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A closed-form scalar function of time with an exact derivative.
#[derive(Clone, Debug, PartialEq)]
pub enum Coeff {
    /// Constant value.
    Const(f64),
    /// Polynomial with coefficients in increasing degree order.
    Poly(Vec<f64>),
    /// `amp · sin(freq · t + phase)`.
    Sin { amp: f64, freq: f64, phase: f64 },
    /// Sum of simpler terms.
    Sum(Vec<Coeff>),
}

impl Coeff {
    /// Constant coefficient, the most common case.
    pub fn constant(c: f64) -> Coeff {
        Coeff::Const(c)
    }

    /// Parse an expression such as `poly:0,0.1` or `const:1+sin:1,1,0`.
    pub fn parse(text: &str) -> Result<Coeff> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(Error::Config("empty coefficient expression".into()));
        }
        let mut terms = Vec::new();
        for part in split_terms(trimmed) {
            terms.push(parse_term(part.trim())?);
        }
        if terms.len() == 1 {
            Ok(terms.pop().expect("one term"))
        } else {
            Ok(Coeff::Sum(terms))
        }
    }

    /// Value at time `t`.
    pub fn value<S: Real>(&self, t: S) -> S {
        match self {
            Coeff::Const(c) => S::of(*c),
            Coeff::Poly(coeffs) => {
                let mut acc = S::zero();
                for &c in coeffs.iter().rev() {
                    acc = acc * t + S::of(c);
                }
                acc
            }
            Coeff::Sin { amp, freq, phase } => {
                S::of(*amp) * (S::of(*freq) * t + S::of(*phase)).sin()
            }
            Coeff::Sum(terms) => {
                let mut acc = S::zero();
                for term in terms {
                    acc = acc + term.value(t);
                }
                acc
            }
        }
    }

    /// Exact derivative at time `t`.
    pub fn derivative<S: Real>(&self, t: S) -> S {
        match self {
            Coeff::Const(_) => S::zero(),
            Coeff::Poly(coeffs) => {
                let mut acc = S::zero();
                for (k, &c) in coeffs.iter().enumerate().skip(1).rev() {
                    acc = acc * t + S::of(c * k as f64);
                }
                acc
            }
            Coeff::Sin { amp, freq, phase } => {
                S::of(*amp * *freq) * (S::of(*freq) * t + S::of(*phase)).cos()
            }
            Coeff::Sum(terms) => {
                let mut acc = S::zero();
                for term in terms {
                    acc = acc + term.derivative(t);
                }
                acc
            }
        }
    }

    /// True when the expression is identically zero (used to detect
    /// autonomous special cases such as a gravity profile that vanishes).
    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Const(c) => *c == 0.0,
            Coeff::Poly(coeffs) => coeffs.iter().all(|c| *c == 0.0),
            Coeff::Sin { amp, .. } => *amp == 0.0,
            Coeff::Sum(terms) => terms.iter().all(Coeff::is_zero),
        }
    }

    /// True when the derivative is identically zero.
    pub fn is_constant(&self) -> bool {
        match self {
            Coeff::Const(_) => true,
            Coeff::Poly(coeffs) => coeffs.iter().skip(1).all(|c| *c == 0.0),
            Coeff::Sin { amp, freq, .. } => *amp == 0.0 || *freq == 0.0,
            Coeff::Sum(terms) => terms.iter().all(Coeff::is_constant),
        }
    }
}

/// Split on `+` separators between terms, keeping exponent signs such as
/// `1e+3` attached to their numbers.
fn split_terms(text: &str) -> Vec<&str> {
    let bytes = text.as_bytes();
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'+' && i > 0 {
            let prev = bytes[i - 1];
            if prev != b'e' && prev != b'E' {
                parts.push(&text[start..i]);
                start = i + 1;
            }
        }
    }
    parts.push(&text[start..]);
    parts
}

fn parse_term(part: &str) -> Result<Coeff> {
    let (kind, args) = part.split_once(':').ok_or_else(|| {
        Error::Config(format!(
            "coefficient term `{part}` must look like `kind:args` \
             (const:c, poly:c0,c1,..., sin:a,w,phi)"
        ))
    })?;
    let values = parse_floats(args, part)?;
    match kind.trim() {
        "const" => {
            if values.len() != 1 {
                return Err(Error::Config(format!(
                    "const term `{part}` takes exactly one value"
                )));
            }
            Ok(Coeff::Const(values[0]))
        }
        "poly" => {
            if values.is_empty() {
                return Err(Error::Config(format!(
                    "poly term `{part}` needs at least one coefficient"
                )));
            }
            Ok(Coeff::Poly(values))
        }
        "sin" => {
            if values.len() != 3 {
                return Err(Error::Config(format!(
                    "sin term `{part}` takes exactly three values: amp,freq,phase"
                )));
            }
            Ok(Coeff::Sin {
                amp: values[0],
                freq: values[1],
                phase: values[2],
            })
        }
        other => Err(Error::Config(format!(
            "unknown coefficient kind `{other}` in `{part}`; \
             expected const, poly, or sin"
        ))),
    }
}

fn parse_floats(args: &str, context: &str) -> Result<Vec<f64>> {
    args.split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| {
                Error::Config(format!("bad number `{}` in coefficient `{context}`", s.trim()))
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_parses_and_evaluates() {
        let c = Coeff::parse("const:0.5").unwrap();
        assert_eq!(c, Coeff::Const(0.5));
        assert_eq!(c.value(3.0_f64), 0.5);
        assert_eq!(c.derivative(3.0_f64), 0.0);
        assert!(c.is_constant());
        assert!(!c.is_zero());
    }

    #[test]
    fn polynomial_value_and_derivative_match_horner() {
        // 1 + 2t + 3t²  at t = 2: 1 + 4 + 12 = 17; derivative 2 + 6t = 14.
        let c = Coeff::parse("poly:1,2,3").unwrap();
        assert!((c.value(2.0_f64) - 17.0).abs() < 1e-15);
        assert!((c.derivative(2.0_f64) - 14.0).abs() < 1e-15);
        assert!(!c.is_constant());
    }

    #[test]
    fn sine_value_and_derivative() {
        let c = Coeff::parse("sin:2,3,0.5").unwrap();
        let t = 0.7_f64;
        assert!((c.value(t) - 2.0 * (3.0 * t + 0.5).sin()).abs() < 1e-15);
        assert!((c.derivative(t) - 6.0 * (3.0 * t + 0.5).cos()).abs() < 1e-15);
    }

    #[test]
    fn sums_combine_terms() {
        // 1 + sin t, the profile used by the time-dependent gravity tests.
        let c = Coeff::parse("const:1+sin:1,1,0").unwrap();
        let t = 1.3_f64;
        assert!((c.value(t) - (1.0 + t.sin())).abs() < 1e-15);
        assert!((c.derivative(t) - t.cos()).abs() < 1e-15);
    }

    #[test]
    fn exponent_plus_stays_inside_number() {
        let c = Coeff::parse("const:1e+2+const:5").unwrap();
        assert!((c.value(0.0_f64) - 105.0).abs() < 1e-12);
    }

    #[test]
    fn negative_coefficients_parse() {
        let c = Coeff::parse("poly:0,-0.1").unwrap();
        assert!((c.value(2.0_f64) + 0.2).abs() < 1e-15);
    }

    #[test]
    fn zero_detection() {
        assert!(Coeff::parse("const:0").unwrap().is_zero());
        assert!(Coeff::parse("poly:0,0").unwrap().is_zero());
        assert!(Coeff::parse("sin:0,1,0").unwrap().is_zero());
        assert!(!Coeff::parse("sin:1,1,0").unwrap().is_zero());
    }

    #[test]
    fn malformed_expressions_are_rejected() {
        assert!(Coeff::parse("").is_err());
        assert!(Coeff::parse("const").is_err());
        assert!(Coeff::parse("const:a").is_err());
        assert!(Coeff::parse("sin:1,2").is_err());
        assert!(Coeff::parse("cos:1,2,3").is_err());
        assert!(Coeff::parse("poly:").is_err());
    }

    #[test]
    fn single_precision_evaluation() {
        let c = Coeff::parse("poly:1,2").unwrap();
        let v: f32 = c.value(0.5_f32);
        assert!((v - 2.0).abs() < 1e-6);
    }
}
