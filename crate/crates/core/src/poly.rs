//! Dense univariate polynomials in the Dowling argument `x`.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::ratcore::{int, Rational};

/// Coefficient `k` multiplies `x^k`. Trailing zeros are allowed and ignored
/// by equality and [`PolyX::degree`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PolyX {
    #[serde(with = "crate::ratcore::rational_vec")]
    coeffs: Vec<Rational>,
}

impl PolyX {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `c·x^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// Coefficients with trailing zeros stripped.
    pub fn trimmed(&self) -> &[Rational] {
        &self.coeffs[..self.degree().map_or(0, |d| d + 1)]
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self { coeffs: (0..len).map(|k| self.coeff(k) + other.coeff(k)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self { coeffs: (0..len).map(|k| self.coeff(k) - other.coeff(k)).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let (a, b) = (self.trimmed(), other.trimmed());
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                out[i + j] += ai * bj;
            }
        }
        Self { coeffs: out }
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn derivative(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        }
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }
}

impl PartialEq for PolyX {
    fn eq(&self, other: &Self) -> bool {
        self.trimmed() == other.trimmed()
    }
}

impl Eq for PolyX {}

impl From<Rational> for PolyX {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl fmt::Display for PolyX {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 if c.is_one() => f.write_str("x")?,
                1 => write!(f, "({c})x")?,
                _ if c.is_one() => write!(f, "x^{k}")?,
                _ => write!(f, "({c})x^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcore::frac;

    fn p(cs: &[(i64, i64)]) -> PolyX {
        PolyX::new(cs.iter().map(|&(n, d)| frac(n, d)).collect())
    }

    #[test]
    fn equality_ignores_trailing_zeros() {
        assert_eq!(p(&[(1, 1), (2, 1), (0, 1)]), p(&[(1, 1), (2, 1)]));
        assert_eq!(p(&[(0, 1)]).degree(), None);
        assert_eq!(p(&[(0, 1), (3, 1), (0, 1)]).degree(), Some(1));
    }

    #[test]
    fn arithmetic() {
        let a = p(&[(2, 3), (11, 3), (1, 1)]);
        assert_eq!(a.eval(&int(1)), frac(16, 3));
        assert_eq!(a.derivative(), p(&[(11, 3), (2, 1)]));
        assert_eq!(a.nth_derivative(3), PolyX::zero());
        let b = p(&[(1, 1), (1, 1)]);
        assert_eq!(b.mul(&b), p(&[(1, 1), (2, 1), (1, 1)]));
        assert_eq!(a.sub(&a), PolyX::zero());
        assert_eq!(b.shift(2), p(&[(0, 1), (0, 1), (1, 1), (1, 1)]));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[(2, 3), (11, 3), (1, 1)]).to_string(), "2/3 + (11/3)x + x^2");
        assert_eq!(PolyX::zero().to_string(), "0");
    }
}
