//! Stirling, Whitney and Dowling objects associated with a random variable.
//!
//! The probabilistic degenerate `r`-Whitney numbers `W^{(Y,r)}_{m,λ}(n,k)` are
//! the EGF coefficients of
//!
//! ```text
//!   (1/k!) ((E[e_λ^{mY}(t)] - 1)/m)^k · e_λ^r(t)
//! ```
//!
//! and the Dowling polynomials are their row polynomials in `x`. The
//! un-shifted family is `r = 1`. Four independent [`Route`]s compute the same
//! triangle.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bell::bell_partial_series;
use crate::error::{Error, Result};
use crate::moments::{ModelKind, MomentModel};
use crate::poly::PolyX;
use crate::ratcore::{binom, degen_falling, factorial, int, pow, to_f64, Params, Rational};
use crate::series::EgfSeries;

pub use crate::ratcore::stirling2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Coefficient extraction from the defining generating function.
    Egf,
    /// Alternating sum over expectations of `(mS_j + r)_{n,λ}`.
    AltSum,
    /// Degenerate Stirling numbers against ordinary falling-factorial moments.
    StirlingExpand,
    /// Partial Bell polynomials in `E[(Y)_{j,λ/m}] m^j`.
    BellForm,
}

impl Route {
    pub const ALL: [Route; 4] = [Route::Egf, Route::AltSum, Route::StirlingExpand, Route::BellForm];
}

/// Lower-triangular table of `W^{(Y,r)}_{m,λ}(n,k)` for `n ≤ max_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhitneyTriangle {
    params: Params,
    model: ModelKind,
    rows: Vec<Vec<Rational>>,
}

impl WhitneyTriangle {
    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn model(&self) -> &ModelKind {
        &self.model
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn row(&self, n: usize) -> &[Rational] {
        &self.rows[n]
    }

    /// Zero above the diagonal. Panics if `n > max_n`.
    pub fn get(&self, n: usize, k: usize) -> Rational {
        self.rows[n].get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// Test hook: adds `delta` to one entry.
    pub fn perturb(&mut self, n: usize, k: usize, delta: &Rational) {
        if let Some(e) = self.rows.get_mut(n).and_then(|r| r.get_mut(k)) {
            *e += delta;
        }
    }

    pub fn dowling_poly(&self, n: usize) -> PolyX {
        PolyX::new(self.rows[n].clone())
    }

    pub fn dowling_polys(&self) -> Vec<PolyX> {
        self.rows.iter().map(|r| PolyX::new(r.clone())).collect()
    }
}

fn minus_one(s: &EgfSeries) -> EgfSeries {
    s.with_constant(s.coeffs()[0].clone() - Rational::one())
}

/// Triangle of `{n k}` given the EGF `base` (zero constant term):
/// entry `(n,k)` is coefficient `n` of `base^k / k!`.
fn power_triangle(base: &EgfSeries) -> Vec<Vec<Rational>> {
    let max_n = base.order();
    let mut rows: Vec<Vec<Rational>> = (0..=max_n).map(|n| vec![Rational::zero(); n + 1]).collect();
    let mut pw = EgfSeries::one(max_n);
    for k in 0..=max_n {
        let inv = Rational::one() / factorial(k);
        for (n, row) in rows.iter_mut().enumerate().skip(k) {
            row[k] = &pw.coeffs()[n] * &inv;
        }
        if k < max_n {
            pw = pw.mul(base).expect("same order");
        }
    }
    rows
}

/// Degenerate Stirling numbers of the second kind, rows `0..=max_n`.
pub fn stirling2_degen_rows(max_n: usize, lambda: &Rational) -> Vec<Vec<Rational>> {
    power_triangle(&minus_one(&EgfSeries::degen_exp(&int(1), lambda, max_n)))
}

/// `{n k}_λ`.
pub fn stirling2_degen(n: usize, k: usize, lambda: &Rational) -> Rational {
    if k > n {
        return Rational::zero();
    }
    stirling2_degen_rows(n, lambda)[n][k].clone()
}

/// Probabilistic degenerate Stirling numbers `{n k}_{Y,λ}`, rows `0..=max_n`.
pub fn stirling2_prob_rows(y: &MomentModel, max_n: usize, lambda: &Rational) -> Result<Vec<Vec<Rational>>> {
    Ok(power_triangle(&minus_one(&y.mgf_degen(1, lambda, max_n)?)))
}

pub fn stirling2_prob(y: &MomentModel, n: usize, k: usize, lambda: &Rational) -> Result<Rational> {
    if k > n {
        y.ensure_order(n)?;
        return Ok(Rational::zero());
    }
    Ok(stirling2_prob_rows(y, n, lambda)?[n][k].clone())
}

/// `W^{(Y,r)}_{m,λ}(n,k)` for all `k ≤ n ≤ max_n`, with `r = params.r`.
pub fn whitney_triangle(y: &MomentModel, params: &Params, max_n: usize, route: Route) -> Result<WhitneyTriangle> {
    y.ensure_order(max_n)?;
    let rows = match route {
        Route::Egf => egf_rows(y, params, max_n)?,
        Route::AltSum => alt_sum_rows(y, params, max_n)?,
        Route::StirlingExpand => stirling_expand_rows(y, params, max_n)?,
        Route::BellForm => bell_form_rows(y, params, max_n)?,
    };
    Ok(WhitneyTriangle { params: params.clone(), model: y.kind().clone(), rows })
}

fn empty_rows(max_n: usize) -> Vec<Vec<Rational>> {
    (0..=max_n).map(|n| vec![Rational::zero(); n + 1]).collect()
}

fn egf_rows(y: &MomentModel, params: &Params, max_n: usize) -> Result<Vec<Vec<Rational>>> {
    let lambda = &params.lambda;
    let m = params.m_rat();
    let base = minus_one(&y.mgf_degen(params.m, lambda, max_n)?).scale(&(Rational::one() / &m));
    let shift = EgfSeries::degen_exp(&params.r_rat(), lambda, max_n);
    let mut rows = empty_rows(max_n);
    let mut pw = EgfSeries::one(max_n);
    for k in 0..=max_n {
        let term = pw.mul(&shift)?;
        let inv = Rational::one() / factorial(k);
        for (n, row) in rows.iter_mut().enumerate().skip(k) {
            row[k] = &term.coeffs()[n] * &inv;
        }
        pw = pw.mul(&base)?;
    }
    Ok(rows)
}

/// Normalizer `1/(m^k k!)` for the alternating-sum routes.
fn alt_norm(m: &Rational, k: usize) -> Rational {
    Rational::one() / (pow(m, k) * factorial(k))
}

/// `Σ_j C(k,j) (-1)^{k-j} values[j]`.
fn alternating(values: &[Rational], k: usize) -> Rational {
    (0..=k)
        .map(|j| {
            let t = binom(k, j) * &values[j];
            if (k - j).is_multiple_of(2) { t } else { -t }
        })
        .sum()
}

fn alt_sum_rows(y: &MomentModel, params: &Params, max_n: usize) -> Result<Vec<Vec<Rational>>> {
    // expect[j][n] = E[(mS_j + r)_{n,λ}]
    let expect = sum_moment_table(y, params.m, params.r, &params.lambda, max_n, max_n)?;
    let m = params.m_rat();
    let mut rows = empty_rows(max_n);
    for (n, row) in rows.iter_mut().enumerate() {
        let column: Vec<Rational> = expect.iter().map(|e| e[n].clone()).collect();
        for (k, entry) in row.iter_mut().enumerate() {
            *entry = alternating(&column, k) * alt_norm(&m, k);
        }
    }
    Ok(rows)
}

/// `table[j][n] = E[(scale·S_j + shift)_{n,λ}]` for `j ≤ max_j`, `n ≤ max_n`,
/// by repeated multiplication with `E[e_λ^{scale·Y}(t)]`.
pub fn sum_moment_table(
    y: &MomentModel,
    scale: u32,
    shift: u32,
    lambda: &Rational,
    max_j: usize,
    max_n: usize,
) -> Result<Vec<Vec<Rational>>> {
    let mgf = y.mgf_degen(scale, lambda, max_n)?;
    let shift = EgfSeries::degen_exp(&int(shift as i64), lambda, max_n);
    let mut out = Vec::with_capacity(max_j + 1);
    let mut pw = EgfSeries::one(max_n);
    for j in 0..=max_j {
        out.push(pw.mul(&shift)?.into_coeffs());
        if j < max_j {
            pw = pw.mul(&mgf)?;
        }
    }
    Ok(out)
}

fn stirling_expand_rows(y: &MomentModel, params: &Params, max_n: usize) -> Result<Vec<Vec<Rational>>> {
    // plain[l][j] = E[(mS_l + r)_j]
    let plain = sum_moment_table(y, params.m, params.r, &Rational::one(), max_n, max_n)?;
    let s_lambda = stirling2_degen_rows(max_n, &params.lambda);
    let m = params.m_rat();
    let mut rows = empty_rows(max_n);
    for k in 0..=max_n {
        let norm = alt_norm(&m, k);
        // inner[j] = Σ_l C(k,l)(-1)^{k-l} E[(mS_l + r)_j]
        let inner: Vec<Rational> = (0..=max_n)
            .map(|j| {
                let column: Vec<Rational> = plain.iter().map(|e| e[j].clone()).collect();
                alternating(&column, k)
            })
            .collect();
        for (n, row) in rows.iter_mut().enumerate().skip(k) {
            let s: Rational = (0..=n).map(|j| &s_lambda[n][j] * &inner[j]).sum();
            row[k] = s * &norm;
        }
    }
    Ok(rows)
}

fn bell_form_rows(y: &MomentModel, params: &Params, max_n: usize) -> Result<Vec<Vec<Rational>>> {
    let m = params.m_rat();
    let mu = &params.lambda / &m;
    let mut args = vec![Rational::zero(); max_n + 1];
    for (j, a) in args.iter_mut().enumerate().skip(1) {
        *a = y.degen_moment(j, &mu)? * pow(&m, j);
    }
    let inner = EgfSeries::from_coeffs(args);
    let shift: Vec<Rational> = (0..=max_n)
        .map(|i| degen_falling(&params.r_rat(), i, &params.lambda))
        .collect();
    let mut rows = empty_rows(max_n);
    for k in 0..=max_n {
        let bell = bell_partial_series(k, &inner)?;
        let norm = Rational::one() / pow(&m, k);
        for (n, row) in rows.iter_mut().enumerate().skip(k) {
            let s: Rational = (k..=n)
                .map(|l| binom(n, l) * &bell.coeffs()[l] * &shift[n - l])
                .sum();
            row[k] = s * &norm;
        }
    }
    Ok(rows)
}

/// `W^Y_{m,λ}(n,k)`; `params.r` is ignored (the un-shifted family has `r = 1`).
pub fn whitney_prob(y: &MomentModel, params: &Params, n: usize, k: usize, route: Route) -> Result<Rational> {
    whitney_prob_r(y, &params.with_r(1), n, k, route)
}

/// `W^{(Y,r)}_{m,λ}(n,k)` with `r = params.r`. Zero when `k > n`.
pub fn whitney_prob_r(y: &MomentModel, params: &Params, n: usize, k: usize, route: Route) -> Result<Rational> {
    let t = whitney_triangle(y, params, n, route)?;
    Ok(t.get(n, k))
}

/// `D^Y_{m,λ}(n,x)`; `params.r` is ignored.
pub fn dowling_poly(y: &MomentModel, params: &Params, n: usize) -> Result<PolyX> {
    dowling_poly_r(y, &params.with_r(1), n)
}

/// `D^{(Y,r)}_{m,λ}(n,x)` with `r = params.r`.
pub fn dowling_poly_r(y: &MomentModel, params: &Params, n: usize) -> Result<PolyX> {
    Ok(whitney_triangle(y, params, n, Route::Egf)?.dowling_poly(n))
}

pub const DOBINSKI_MAX_TERMS: usize = 400;

/// Evaluates `e^{-x/m} Σ_k x^k/(m^k k!) E[(mS_k + r)_{n,λ}]` numerically.
///
/// Stops once `k > n` and three consecutive terms are at most `rel_tol`
/// times the running sum in magnitude.
pub fn dobinski_eval(y: &MomentModel, params: &Params, n: usize, x: &Rational, rel_tol: f64) -> Result<f64> {
    dobinski_eval_capped(y, params, n, x, rel_tol, DOBINSKI_MAX_TERMS)
}

pub fn dobinski_eval_capped(
    y: &MomentModel,
    params: &Params,
    n: usize,
    x: &Rational,
    rel_tol: f64,
    max_terms: usize,
) -> Result<f64> {
    if x < &Rational::zero() {
        return Err(Error::Domain(format!("Dobinski series needs x >= 0, got {x}")));
    }
    if rel_tol.is_nan() || rel_tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be positive, got {rel_tol}")));
    }
    if n == 0 {
        // Every expectation is 1 and the series collapses to e^{-x/m} e^{x/m}.
        return Ok(1.0);
    }
    let mgf = y.mgf_degen(params.m, &params.lambda, n)?;
    let shift = EgfSeries::degen_exp(&params.r_rat(), &params.lambda, n);
    let ratio = to_f64(x) / params.m as f64;

    let mut pw = EgfSeries::one(n);
    let mut weight = 1.0f64;
    let mut sum = 0.0f64;
    let mut small_run = 0;
    let mut last = f64::NAN;
    for k in 0..max_terms {
        if k > 0 {
            weight *= ratio / k as f64;
            pw = pw.mul(&mgf)?;
        }
        // Only coefficient n of pw · e_λ^r(t) is needed.
        let expect: Rational = (0..=n)
            .map(|j| binom(n, j) * &pw.coeffs()[j] * &shift.coeffs()[n - j])
            .sum();
        let term = weight * to_f64(&expect);
        sum += term;
        last = term.abs();
        if last <= rel_tol * sum.abs() {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 && k > n {
            return Ok((-ratio).exp() * sum);
        }
    }
    Err(Error::NonConvergence { terms: max_terms, last_term: last })
}

/// Right-hand side of the higher-derivative formula:
/// `k! Σ_{j=0}^{n-k} C(n,j) D(j,x) {n-j k}_{Y,λ/m} m^{n-k-j}`.
pub fn dowling_derivative_formula(y: &MomentModel, params: &Params, n: usize, k: usize) -> Result<PolyX> {
    if k > n {
        y.ensure_order(n)?;
        return Ok(PolyX::zero());
    }
    let params = params.with_r(1);
    let m = params.m_rat();
    let tri = whitney_triangle(y, &params, n, Route::Egf)?;
    let s = stirling2_prob_rows(y, n, &(&params.lambda / &m))?;
    let mut acc = PolyX::zero();
    for j in 0..=n - k {
        let c = binom(n, j) * &s[n - j][k] * pow(&m, n - k - j);
        acc = acc.add(&tri.dowling_poly(j).scale(&c));
    }
    Ok(acc.scale(&factorial(k)))
}

/// `(d/dx)^k D^Y(n,x)` by formal differentiation, cross-checked against
/// [`dowling_derivative_formula`].
pub fn dowling_derivative(y: &MomentModel, params: &Params, n: usize, k: usize) -> Result<PolyX> {
    let formal = dowling_poly(y, params, n)?.nth_derivative(k);
    let formula = dowling_derivative_formula(y, params, n, k)?;
    if formal != formula {
        return Err(Error::Inconsistent(format!(
            "derivative of order {k} at n={n}: formal {formal} vs formula {formula}"
        )));
    }
    Ok(formal)
}
