//! Truncated exponential generating functions over the rationals.
//!
//! An [`EgfSeries`] of order `N` stores `c_0..=c_N` and stands for
//! `Σ c_n t^n/n! + O(t^{N+1})`. Products are binomial convolutions, so every
//! identity between generating functions becomes a coefficient-wise check.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ratcore::{binom, degen_falling, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgfSeries {
    coeffs: Vec<Rational>,
}

impl EgfSeries {
    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    /// Builds a series from EGF coefficients; an empty vector becomes the
    /// order-0 zero series.
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        Self { coeffs }
    }

    /// `e_λ^x(t) = (1+λt)^{x/λ}`; coefficient `n` is `(x)_{n,λ}`.
    pub fn degen_exp(x: &Rational, lambda: &Rational, order: usize) -> Self {
        Self {
            coeffs: (0..=order).map(|n| degen_falling(x, n, lambda)).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Result<&Rational> {
        self.coeffs
            .get(n)
            .ok_or(Error::IndexOutOfRange { index: n, order: self.order() })
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch { left: self.order(), right: other.order() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Same series with the constant term replaced.
    pub fn with_constant(&self, c: Rational) -> Self {
        let mut s = self.clone();
        s.coeffs[0] = c;
        s
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let order = self.order();
        let mut out = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut acc = Rational::zero();
            for j in 0..=n {
                let (a, b) = (&self.coeffs[j], &other.coeffs[n - j]);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc += binom(n, j) * a * b;
            }
            out.push(acc);
        }
        Ok(Self { coeffs: out })
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("same order");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same order");
            }
        }
        result
    }

    /// `exp` of a series with zero constant term, via the complete Bell
    /// recurrence `B_{n+1} = Σ_j C(n,j) a_{j+1} B_{n-j}`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonZeroConstantTerm(self.coeffs[0].to_string()));
        }
        let order = self.order();
        let mut out = Vec::with_capacity(order + 1);
        out.push(Rational::one());
        for n in 0..order {
            let mut acc = Rational::zero();
            for j in 0..=n {
                let a = &self.coeffs[j + 1];
                if a.is_zero() {
                    continue;
                }
                acc += binom(n, j) * a * &out[n - j];
            }
            out.push(acc);
        }
        Ok(Self { coeffs: out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcore::{frac, int};
    use proptest::prelude::*;

    fn egf_e_t(order: usize) -> EgfSeries {
        EgfSeries::degen_exp(&int(1), &int(0), order)
    }

    #[test]
    fn degen_exp_coefficients() {
        let s = EgfSeries::degen_exp(&int(1), &frac(5, 7), 4);
        assert_eq!(s.coeff(0).unwrap(), &int(1));
        let s = EgfSeries::degen_exp(&int(2), &frac(1, 3), 3);
        assert_eq!(s.coeff(2).unwrap(), &frac(10, 3));
        assert_eq!(egf_e_t(3).coeffs(), &[int(1), int(1), int(1), int(1)]);
        let lam = frac(2, 5);
        let s = EgfSeries::degen_exp(&int(1), &lam, 3);
        assert_eq!(s.coeff(2).unwrap(), &(int(1) - &lam));
    }

    #[test]
    fn mul_examples() {
        let b = EgfSeries::from_coeffs(vec![int(3), frac(1, 2), int(-4)]);
        assert_eq!(EgfSeries::one(2).mul(&b).unwrap(), b);

        let sq = egf_e_t(6).mul(&egf_e_t(6)).unwrap();
        for n in 0..=6 {
            assert_eq!(sq.coeff(n).unwrap(), &int(1 << n));
        }

        let e1 = EgfSeries::degen_exp(&int(1), &int(1), 3);
        assert_eq!(e1.mul(&e1).unwrap().coeff(2).unwrap(), &int(2));
    }

    #[test]
    fn mul_rejects_order_mismatch() {
        let err = EgfSeries::one(2).mul(&EgfSeries::one(3)).unwrap_err();
        assert_eq!(err, Error::OrderMismatch { left: 2, right: 3 });
    }

    #[test]
    fn pow_examples() {
        let a = EgfSeries::from_coeffs(vec![int(2), int(1), int(7)]);
        assert_eq!(a.pow(0), EgfSeries::one(2));
        assert_eq!(a.pow(1), a);
        let e = EgfSeries::degen_exp(&int(1), &frac(1, 2), 4);
        assert_eq!(e.pow(3).coeff(1).unwrap(), &int(3));
        assert_eq!(e.pow(3), EgfSeries::degen_exp(&int(3), &frac(1, 2), 4));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(EgfSeries::zero(4).exp().unwrap(), EgfSeries::one(4));

        let (x1, x2) = (frac(3, 2), frac(-2, 7));
        let a = EgfSeries::from_coeffs(vec![int(0), x1.clone(), x2.clone(), int(0)]);
        assert_eq!(a.exp().unwrap().coeff(2).unwrap(), &(&x1 * &x1 + &x2));

        let a = egf_e_t(6).sub(&EgfSeries::one(6)).unwrap();
        let bell: Vec<_> = [1, 1, 2, 5, 15, 52, 203].map(int).to_vec();
        assert_eq!(a.exp().unwrap().coeffs(), bell.as_slice());
    }

    #[test]
    fn exp_rejects_constant_term() {
        assert!(matches!(EgfSeries::one(2).exp(), Err(Error::NonZeroConstantTerm(_))));
    }

    #[test]
    fn coeff_out_of_range() {
        assert_eq!(
            EgfSeries::one(2).coeff(3).unwrap_err(),
            Error::IndexOutOfRange { index: 3, order: 2 }
        );
        let a = EgfSeries::from_coeffs(vec![int(1), int(2)]);
        let b = EgfSeries::from_coeffs(vec![int(5), frac(1, 3)]);
        assert_eq!(a.add(&b).unwrap().coeff(1).unwrap(), &frac(7, 3));
    }

    fn series(order: usize, zero_const: bool) -> impl Strategy<Value = EgfSeries> {
        prop::collection::vec((-9i64..9, 1i64..5), order + 1).prop_map(move |v| {
            let mut c: Vec<Rational> = v.into_iter().map(|(n, d)| frac(n, d)).collect();
            if zero_const {
                c[0] = int(0);
            }
            EgfSeries::from_coeffs(c)
        })
    }

    proptest! {
        #[test]
        fn mul_commutes_and_associates(a in series(5, false), b in series(5, false), c in series(5, false)) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn exp_turns_sums_into_products(a in series(6, true), b in series(6, true)) {
            let lhs = a.add(&b).unwrap().exp().unwrap();
            let rhs = a.exp().unwrap().mul(&b.exp().unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn degen_exp_matches_falling(x in (-9i64..9, 1i64..4), l in (-5i64..5, 1i64..4)) {
            let (x, l) = (frac(x.0, x.1), frac(l.0, l.1));
            let s = EgfSeries::degen_exp(&x, &l, 7);
            for n in 0..=7 {
                prop_assert_eq!(s.coeff(n).unwrap(), &degen_falling(&x, n, &l));
            }
        }
    }
}
