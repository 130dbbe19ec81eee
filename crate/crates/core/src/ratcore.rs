//! Exact rational scalars and the factorial-family primitives.
//!
//! Everything downstream works over [`Rational`], an arbitrary-precision
//! fraction kept in lowest terms with a positive denominator.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num/den`, reduced. Panics on a zero denominator.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"` or an integer literal. Whitespace around the parts is ignored.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidParams(format!("cannot parse rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::InvalidParams(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad()),
    }
}

/// Formats as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

pub fn to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn pow(x: &Rational, e: usize) -> Rational {
    num_traits::pow(x.clone(), e)
}

pub fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, i| acc * int(i))
}

/// Falling factorial `x(x-1)...(x-n+1)`.
pub fn falling(x: &Rational, n: usize) -> Rational {
    degen_falling(x, n, &Rational::one())
}

/// Degenerate falling factorial `x(x-λ)(x-2λ)...(x-(n-1)λ)`.
pub fn degen_falling(x: &Rational, n: usize, lambda: &Rational) -> Rational {
    let mut acc = Rational::one();
    let mut shift = Rational::zero();
    for _ in 0..n {
        acc *= x - &shift;
        if acc.is_zero() {
            return acc;
        }
        shift += lambda;
    }
    acc
}

pub fn binom(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

/// Generalized binomial coefficient with rational upper argument.
pub fn binom_general(x: &Rational, k: usize) -> Rational {
    falling(x, k) / factorial(k)
}

/// Rows `0..=max_n` of the ordinary Stirling numbers of the second kind,
/// built from `S(n+1,k) = S(n,k-1) + k S(n,k)`.
pub fn stirling2_rows(max_n: usize) -> Vec<Vec<Rational>> {
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(max_n + 1);
    rows.push(vec![Rational::one()]);
    for n in 0..max_n {
        let prev = &rows[n];
        let mut next = vec![Rational::zero(); n + 2];
        for k in 1..=n + 1 {
            let mut v = prev[k - 1].clone();
            if k <= n {
                v += &prev[k] * int(k as i64);
            }
            next[k] = v;
        }
        rows.push(next);
    }
    rows
}

pub fn stirling2(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    stirling2_rows(n)[n][k].clone()
}

/// The parameter triple shared by every Whitney/Dowling object.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    /// Group order, at least one.
    pub m: u32,
    #[serde(with = "rational_str")]
    pub lambda: Rational,
    pub r: u32,
}

impl Params {
    pub fn new(m: u32, lambda: Rational, r: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParams("m must be at least 1".into()));
        }
        Ok(Self { m, lambda, r })
    }

    pub fn with_r(&self, r: u32) -> Self {
        Self { r, ..self.clone() }
    }

    pub fn m_rat(&self) -> Rational {
        int(self.m as i64)
    }

    pub fn r_rat(&self) -> Rational {
        int(self.r as i64)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={} lambda={} r={}", self.m, self.lambda, self.r)
    }
}

/// Serde adapter writing a rational as a `"num/den"` string.
pub mod rational_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a list of `"num/den"` strings.
pub mod rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format_rational(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn falling_examples() {
        assert_eq!(falling(&int(5), 0), int(1));
        assert_eq!(falling(&int(5), 3), int(60));
        assert_eq!(falling(&frac(1, 2), 2), frac(-1, 4));
    }

    #[test]
    fn degen_falling_examples() {
        assert_eq!(degen_falling(&int(3), 0, &int(7)), int(1));
        assert_eq!(degen_falling(&int(3), 2, &frac(1, 2)), frac(15, 2));
        assert_eq!(degen_falling(&int(2), 3, &int(0)), int(8));
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(4, 2), int(6));
        assert_eq!(binom(3, 0), int(1));
        assert_eq!(binom(2, 5), int(0));
        assert_eq!(binom_general(&frac(1, 2), 2), frac(-1, 8));
        assert_eq!(binom_general(&frac(-7, 3), 0), int(1));
        assert_eq!(binom_general(&int(4), 2), binom(4, 2));
    }

    #[test]
    fn stirling_rows() {
        assert_eq!(stirling2(0, 0), int(1));
        assert_eq!(stirling2(4, 2), int(7));
        assert_eq!(stirling2(3, 5), int(0));
        let row: Vec<_> = stirling2_rows(5)[5].clone();
        assert_eq!(row, [0, 1, 15, 25, 10, 1].map(int).to_vec());
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/4").unwrap(), frac(3, 2));
        assert_eq!(parse_rational(" -1/3 ").unwrap(), frac(-1, 3));
        assert_eq!(parse_rational("12").unwrap(), int(12));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
        assert_eq!(format_rational(&frac(4, 6)), "2/3");
        assert_eq!(format_rational(&int(-5)), "-5");
    }

    #[test]
    fn params_reject_zero_m() {
        assert!(Params::new(0, int(1), 0).is_err());
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-30i64..30, 1i64..8).prop_map(|(n, d)| frac(n, d))
    }

    proptest! {
        #[test]
        fn degen_falling_specializations(x in small_rat(), n in 0usize..9) {
            prop_assert_eq!(degen_falling(&x, n, &int(1)), falling(&x, n));
            prop_assert_eq!(degen_falling(&x, n, &int(0)), pow(&x, n));
        }

        #[test]
        fn degen_falling_product_recurrence(x in small_rat(), lambda in small_rat(), n in 1usize..9) {
            let step = &x - &lambda * int(n as i64 - 1);
            prop_assert_eq!(
                degen_falling(&x, n, &lambda),
                degen_falling(&x, n - 1, &lambda) * step
            );
        }

        #[test]
        fn results_are_canonical(a in small_rat(), b in small_rat(), n in 0usize..6) {
            use num_integer::Integer;
            let v = degen_falling(&(&a + &b), n, &(&a * &b));
            prop_assert!(v.denom() > &BigInt::zero());
            prop_assert!(v.numer().gcd(v.denom()).is_one());
        }
    }
}
