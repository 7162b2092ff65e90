//! Exact polynomial interpolation of point counts.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("need {0} more primes")]
    NeedMorePrimes(usize),
}

/// Interpolated count polynomial. `coefficients[k]` multiplies `q^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountPolynomial {
    pub samples: BTreeMap<u32, u64>,
    #[serde(serialize_with = "as_strings")]
    pub coefficients: Vec<BigRational>,
    /// `None` for the zero polynomial.
    pub degree: Option<usize>,
    /// The polynomial through all but the last sample already hits the last
    /// one, and its coefficients are integers.
    pub exact_fit: bool,
}

fn as_strings<S: Serializer>(coeffs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(coeffs.iter().map(|c| c.to_string()))
}

impl CountPolynomial {
    pub fn evaluate(&self, q: u64) -> BigRational {
        horner(&self.coefficients, &BigRational::from_integer(BigInt::from(q)))
    }

    /// Human-readable form such as `3q + 1`.
    pub fn pretty(&self) -> String {
        let mut terms = Vec::new();
        for (k, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => "q".to_string(),
                _ => format!("q^{k}"),
            };
            let coeff = if c.is_one() && k > 0 { String::new() } else { c.to_string() };
            terms.push(format!("{coeff}{mono}"));
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ").replace("+ -", "- ")
        }
    }
}

fn horner(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Newton interpolation, expanded into the monomial basis.
fn interpolate(points: &[(BigRational, BigRational)]) -> Vec<BigRational> {
    let m = points.len();
    let xs: Vec<BigRational> = points.iter().map(|p| p.0.clone()).collect();
    let mut dd: Vec<BigRational> = points.iter().map(|p| p.1.clone()).collect();
    for level in 1..m {
        for k in (level..m).rev() {
            dd[k] = (&dd[k] - &dd[k - 1]) / (&xs[k] - &xs[k - level]);
        }
    }
    // P = dd[0] + (x - x0)(dd[1] + (x - x1)(dd[2] + ...)).
    let mut poly: Vec<BigRational> = Vec::new();
    for k in (0..m).rev() {
        let mut next = vec![BigRational::zero(); poly.len() + 1];
        for (j, c) in poly.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * &xs[k];
        }
        next[0] += &dd[k];
        poly = next;
    }
    while poly.last().is_some_and(Zero::is_zero) {
        poly.pop();
    }
    poly
}

/// Fits a polynomial in `q` to `samples` (prime ↦ count). At least two
/// samples are needed so that one of them can confirm the fit.
pub fn fit_count_polynomial(samples: &BTreeMap<u32, u64>) -> Result<CountPolynomial, FitError> {
    fit_with_spare(samples, 2)
}

/// As [`fit_count_polynomial`], requiring enough samples to confirm a
/// polynomial of the given degree.
pub fn fit_count_polynomial_expecting(
    samples: &BTreeMap<u32, u64>,
    expected_degree: usize,
) -> Result<CountPolynomial, FitError> {
    fit_with_spare(samples, expected_degree + 2)
}

fn fit_with_spare(samples: &BTreeMap<u32, u64>, needed: usize) -> Result<CountPolynomial, FitError> {
    if samples.len() < needed {
        return Err(FitError::NeedMorePrimes(needed - samples.len()));
    }
    let points: Vec<(BigRational, BigRational)> = samples
        .iter()
        .map(|(&q, &c)| (BigRational::from_integer(q.into()), BigRational::from_integer(c.into())))
        .collect();
    let (head, last) = points.split_at(points.len() - 1);
    let partial = interpolate(head);
    let exact_fit = horner(&partial, &last[0].0) == last[0].1 && partial.iter().all(BigRational::is_integer);
    let coefficients = if exact_fit { partial } else { interpolate(&points) };
    let degree = coefficients.len().checked_sub(1);
    Ok(CountPolynomial {
        samples: samples.clone(),
        coefficients,
        degree,
        exact_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(pairs: &[(u32, u64)]) -> BTreeMap<u32, u64> {
        pairs.iter().copied().collect()
    }

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn linear_count() {
        let p = fit_count_polynomial(&samples(&[(2, 7), (3, 10), (5, 16)])).unwrap();
        assert!(p.exact_fit);
        assert_eq!(p.degree, Some(1));
        assert_eq!(p.coefficients, vec![int(1), int(3)]);
        assert_eq!(p.pretty(), "3q + 1");
    }

    #[test]
    fn constant_count() {
        let p = fit_count_polynomial(&samples(&[(2, 1), (3, 1), (5, 1)])).unwrap();
        assert!(p.exact_fit);
        assert_eq!(p.degree, Some(0));
    }

    #[test]
    fn projective_line() {
        let p = fit_count_polynomial(&samples(&[(2, 3), (3, 4), (5, 6)])).unwrap();
        assert!(p.exact_fit);
        assert_eq!(p.degree, Some(1));
        assert_eq!(p.pretty(), "q + 1");
    }

    #[test]
    fn zero_counts() {
        let p = fit_count_polynomial(&samples(&[(2, 0), (3, 0)])).unwrap();
        assert!(p.exact_fit);
        assert_eq!(p.degree, None);
        assert_eq!(p.pretty(), "0");
    }

    #[test]
    fn quadratic_needs_a_spare_sample() {
        // q^2 + q + 1 sampled at three primes interpolates but is unconfirmed
        // only if the last sample disagrees; here it agrees.
        let good = fit_count_polynomial(&samples(&[(2, 7), (3, 13), (5, 31), (7, 57)])).unwrap();
        assert!(good.exact_fit);
        assert_eq!(good.degree, Some(2));
        let bad = fit_count_polynomial(&samples(&[(2, 7), (3, 13), (5, 31), (7, 58)])).unwrap();
        assert!(!bad.exact_fit);
        assert_eq!(bad.degree, Some(3));
    }

    #[test]
    fn non_integer_coefficients_are_not_exact() {
        // Through (2,1), (3,2) the line is q - 1; (5, 3) breaks it.
        let p = fit_count_polynomial(&samples(&[(2, 1), (3, 2), (5, 3)])).unwrap();
        assert!(!p.exact_fit);
        assert!(p.coefficients.iter().any(|c| !c.is_integer()));
    }

    #[test]
    fn too_few_samples() {
        assert_eq!(
            fit_count_polynomial(&samples(&[(2, 7)])),
            Err(FitError::NeedMorePrimes(1))
        );
        assert_eq!(
            fit_count_polynomial_expecting(&samples(&[(2, 7), (3, 10)]), 2),
            Err(FitError::NeedMorePrimes(2))
        );
        assert_eq!(FitError::NeedMorePrimes(2).to_string(), "need 2 more primes");
    }

    #[test]
    fn evaluation_reproduces_samples() {
        let s = samples(&[(2, 35), (3, 130), (5, 806), (7, 2850)]);
        let p = fit_count_polynomial(&s).unwrap();
        for (&q, &c) in &s {
            assert_eq!(p.evaluate(q.into()), int(c as i64));
        }
    }
}
