//! Exact moment oracles for a random variable `Y` and its i.i.d. sums
//! `S_k = Y_1 + ... + Y_k`.

use std::fmt;
use std::sync::RwLock;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratcore::{binom, factorial, int, pow, rational_str, rational_vec, stirling2_rows, Rational};
use crate::series::EgfSeries;

/// The distributions with closed-form rational moments, plus an explicit
/// moment list. JSON form: `{"kind": "bernoulli", "p": "1/2"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelKind {
    PointMass {
        #[serde(with = "rational_str")]
        value: Rational,
    },
    Bernoulli {
        #[serde(with = "rational_str")]
        p: Rational,
    },
    Binomial {
        trials: u32,
        #[serde(with = "rational_str")]
        p: Rational,
    },
    /// Uniform on `{0, 1, ..., max}`.
    DiscreteUniform { max: u32 },
    Poisson {
        #[serde(with = "rational_str")]
        rate: Rational,
    },
    /// Failures before the first success, supported on `{0, 1, 2, ...}`.
    Geometric {
        #[serde(with = "rational_str")]
        p: Rational,
    },
    /// `moments[n] = E[Y^n]`; entry 0 must be 1.
    Custom {
        #[serde(with = "rational_vec")]
        moments: Vec<Rational>,
    },
}

impl ModelKind {
    pub fn validate(&self) -> Result<()> {
        let unit = |p: &Rational| *p >= Rational::zero() && *p <= Rational::one();
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        match self {
            ModelKind::PointMass { .. } | ModelKind::DiscreteUniform { .. } => Ok(()),
            ModelKind::Bernoulli { p } if !unit(p) => bad(format!("bernoulli p={p} not in [0,1]")),
            ModelKind::Binomial { trials: 0, .. } => bad("binomial needs at least one trial".into()),
            ModelKind::Binomial { p, .. } if !unit(p) => bad(format!("binomial p={p} not in [0,1]")),
            ModelKind::Poisson { rate } if *rate < Rational::zero() => {
                bad(format!("poisson rate={rate} is negative"))
            }
            ModelKind::Geometric { p } if !(unit(p) && !p.is_zero()) => {
                bad(format!("geometric p={p} not in (0,1]"))
            }
            ModelKind::Custom { moments } if moments.first().is_none_or(|m0| !m0.is_one()) => {
                bad("custom moment list must start with E[Y^0] = 1".into())
            }
            _ => Ok(()),
        }
    }

    pub fn is_custom(&self) -> bool {
        matches!(self, ModelKind::Custom { .. })
    }

    /// The six built-in models used by the test batteries.
    pub fn builtins() -> Vec<ModelKind> {
        use crate::ratcore::frac;
        vec![
            ModelKind::PointMass { value: int(1) },
            ModelKind::Bernoulli { p: frac(1, 2) },
            ModelKind::Binomial { trials: 3, p: frac(1, 3) },
            ModelKind::DiscreteUniform { max: 2 },
            ModelKind::Poisson { rate: int(1) },
            ModelKind::Geometric { p: frac(1, 2) },
        ]
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::PointMass { value } => write!(f, "point_mass({value})"),
            ModelKind::Bernoulli { p } => write!(f, "bernoulli({p})"),
            ModelKind::Binomial { trials, p } => write!(f, "binomial({trials},{p})"),
            ModelKind::DiscreteUniform { max } => write!(f, "discrete_uniform(0..={max})"),
            ModelKind::Poisson { rate } => write!(f, "poisson({rate})"),
            ModelKind::Geometric { p } => write!(f, "geometric({p})"),
            ModelKind::Custom { moments } => write!(f, "custom({} moments)", moments.len()),
        }
    }
}

/// A random variable given by its raw moments, with a memo of the moments
/// computed so far. Cloning copies the memo.
#[derive(Debug)]
pub struct MomentModel {
    kind: ModelKind,
    memo: RwLock<Vec<Rational>>,
}

impl Clone for MomentModel {
    fn clone(&self) -> Self {
        Self {
            kind: self.kind.clone(),
            memo: RwLock::new(self.memo.read().unwrap().clone()),
        }
    }
}

impl MomentModel {
    pub fn new(kind: ModelKind) -> Result<Self> {
        kind.validate()?;
        Ok(Self { kind, memo: RwLock::new(vec![Rational::one()]) })
    }

    pub fn point_mass(value: Rational) -> Self {
        Self::new(ModelKind::PointMass { value }).expect("always valid")
    }

    pub fn bernoulli(p: Rational) -> Result<Self> {
        Self::new(ModelKind::Bernoulli { p })
    }

    pub fn binomial(trials: u32, p: Rational) -> Result<Self> {
        Self::new(ModelKind::Binomial { trials, p })
    }

    pub fn discrete_uniform(max: u32) -> Self {
        Self::new(ModelKind::DiscreteUniform { max }).expect("always valid")
    }

    pub fn poisson(rate: Rational) -> Result<Self> {
        Self::new(ModelKind::Poisson { rate })
    }

    pub fn geometric(p: Rational) -> Result<Self> {
        Self::new(ModelKind::Geometric { p })
    }

    pub fn custom(moments: Vec<Rational>) -> Result<Self> {
        Self::new(ModelKind::Custom { moments })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// Highest moment order the model can supply, `None` when unbounded.
    pub fn max_order(&self) -> Option<usize> {
        match &self.kind {
            ModelKind::Custom { moments } => Some(moments.len() - 1),
            _ => None,
        }
    }

    pub fn ensure_order(&self, n: usize) -> Result<()> {
        match self.max_order() {
            Some(avail) if n > avail => Err(Error::MomentUnavailable { required: n, available: avail }),
            _ => Ok(()),
        }
    }

    /// `E[Y^n]`.
    pub fn raw_moment(&self, n: usize) -> Result<Rational> {
        Ok(self.raw_moments(n)?.swap_remove(n))
    }

    /// `E[Y^0], ..., E[Y^n]`.
    pub fn raw_moments(&self, n: usize) -> Result<Vec<Rational>> {
        self.ensure_order(n)?;
        {
            let memo = self.memo.read().unwrap();
            if memo.len() > n {
                return Ok(memo[..=n].to_vec());
            }
        }
        let mut memo = self.memo.write().unwrap();
        let start = memo.len();
        if start <= n {
            let fresh = self.compute_moments(start, n);
            memo.extend(fresh);
        }
        Ok(memo[..=n].to_vec())
    }

    fn compute_moments(&self, from: usize, to: usize) -> Vec<Rational> {
        match &self.kind {
            ModelKind::PointMass { value } => (from..=to).map(|n| pow(value, n)).collect(),
            ModelKind::Bernoulli { p } => (from..=to)
                .map(|n| if n == 0 { Rational::one() } else { p.clone() })
                .collect(),
            ModelKind::Binomial { trials, p } => {
                let t = *trials as usize;
                let q = Rational::one() - p;
                let weights: Vec<Rational> =
                    (0..=t).map(|j| binom(t, j) * pow(p, j) * pow(&q, t - j)).collect();
                (from..=to).map(|n| power_sum(&weights, n)).collect()
            }
            ModelKind::DiscreteUniform { max } => {
                let w = Rational::new(1.into(), (*max as i64 + 1).into());
                let weights = vec![w; *max as usize + 1];
                (from..=to).map(|n| power_sum(&weights, n)).collect()
            }
            ModelKind::Poisson { rate } => {
                // Touchard: E[Y^n] = Σ_k S(n,k) rate^k.
                let s2 = stirling2_rows(to);
                (from..=to)
                    .map(|n| (0..=n).map(|k| &s2[n][k] * pow(rate, k)).sum())
                    .collect()
            }
            ModelKind::Geometric { p } => {
                // E[(Y)_k] = k! q^k with q = (1-p)/p.
                let q = (Rational::one() - p) / p;
                let s2 = stirling2_rows(to);
                (from..=to)
                    .map(|n| (0..=n).map(|k| &s2[n][k] * factorial(k) * pow(&q, k)).sum())
                    .collect()
            }
            ModelKind::Custom { moments } => moments[from..=to].to_vec(),
        }
    }

    /// `E[(Y)_{n,λ}]`.
    pub fn degen_moment(&self, n: usize, lambda: &Rational) -> Result<Rational> {
        let raw = self.raw_moments(n)?;
        let poly = degen_falling_expansion(n, lambda);
        Ok(poly.iter().zip(&raw).map(|(c, m)| c * m).sum())
    }

    /// EGF of `E[e_λ^{scale·Y}(t)]`: coefficient `n` is `E[(scale·Y)_{n,λ}]`.
    pub fn mgf_degen(&self, scale: u32, lambda: &Rational, order: usize) -> Result<EgfSeries> {
        let raw = self.raw_moments(order)?;
        let scale = int(scale as i64);
        let scaled: Vec<Rational> = raw
            .iter()
            .enumerate()
            .map(|(j, m)| pow(&scale, j) * m)
            .collect();
        let mut poly = vec![Rational::one()];
        let mut coeffs = Vec::with_capacity(order + 1);
        for n in 0..=order {
            if n > 0 {
                poly = mul_linear(&poly, &(lambda * int(n as i64 - 1)));
            }
            coeffs.push(poly.iter().zip(&scaled).map(|(c, m)| c * m).sum());
        }
        Ok(EgfSeries::from_coeffs(coeffs))
    }

    /// EGF whose coefficient `n` is `E[(scale·S_k + shift)_{n,λ}]`, i.e.
    /// `(E[e_λ^{scale·Y}(t)])^k e_λ^{shift}(t)`.
    pub fn sum_degen_series(
        &self,
        k: usize,
        scale: u32,
        shift: u32,
        lambda: &Rational,
        order: usize,
    ) -> Result<EgfSeries> {
        let shift_series = EgfSeries::degen_exp(&int(shift as i64), lambda, order);
        if k == 0 {
            return Ok(shift_series);
        }
        let mgf = self.mgf_degen(scale, lambda, order)?;
        mgf.pow(k).mul(&shift_series)
    }

    /// `E[(scale·S_k + shift)_{n,λ}]`.
    pub fn sum_degen_moment(
        &self,
        k: usize,
        scale: u32,
        shift: u32,
        n: usize,
        lambda: &Rational,
    ) -> Result<Rational> {
        let s = self.sum_degen_series(k, scale, shift, lambda, n)?;
        Ok(s.coeff(n)?.clone())
    }

    /// `E[(scale·S_k + shift)_j]` with the ordinary falling factorial.
    pub fn sum_plain_falling_moment(&self, k: usize, scale: u32, shift: u32, j: usize) -> Result<Rational> {
        self.sum_degen_moment(k, scale, shift, j, &Rational::one())
    }
}

fn power_sum(weights: &[Rational], n: usize) -> Rational {
    weights
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(j, w)| w * pow(&int(j as i64), n))
        .sum()
}

/// Multiplies a polynomial in `Y` (ascending coefficients) by `(Y - a)`.
fn mul_linear(poly: &[Rational], a: &Rational) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); poly.len() + 1];
    for (i, c) in poly.iter().enumerate() {
        out[i + 1] += c;
        out[i] -= c * a;
    }
    out
}

/// Coefficients of `Π_{i<n}(Y - iλ)` as a polynomial in `Y`.
pub fn degen_falling_expansion(n: usize, lambda: &Rational) -> Vec<Rational> {
    (0..n).fold(vec![Rational::one()], |p, i| mul_linear(&p, &(lambda * int(i as i64))))
}
