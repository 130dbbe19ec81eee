//! Executable identity checks for Whitney numbers and Dowling polynomials.
//!
//! Each check computes both sides of a relation through different code paths
//! and compares them exactly. Reports keep both sides so a failure can be
//! inspected without rerunning anything.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bell::bell_partial;
use crate::dowling::{stirling2_prob_rows, sum_moment_table, whitney_triangle, Route, WhitneyTriangle};
use crate::error::Result;
use crate::moments::MomentModel;
use crate::poly::PolyX;
use crate::ratcore::{
    binom, binom_general, degen_falling, factorial, frac, int, pow, rational_str, rational_vec, stirling2_rows,
    Params, Rational,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// `Σ_{k≤N} E[(mS_k+1)_{n,λ}] = Σ_l l! m^l C(N+1,l+1) W(n,l)`.
    SumIdentity,
    /// Dowling polynomial as a sum of partial Bell polynomials.
    BellExpansion,
    /// Recurrence for `D(n+1,x)` in terms of `D(k,x)`, `k ≤ n`.
    Recurrence,
    /// Convolution identity in `x + y`.
    Convolution,
    /// `Σ C(n,k)(x-1)_{n-k,λ} D(k,x) = Σ C(x,k) k! B_{n,k}(D(1), D(2), ...)`.
    BinomBell,
    /// Partial Bell polynomial in `j·D(j-1,x)` against `r`-Whitney numbers with `r = k`.
    BellRWhitney,
    /// Partial Bell polynomial in `D(j,x) - (1)_{j,λ}` against Stirling-weighted `r`-Whitney numbers.
    StirlingBell,
    /// Higher `x`-derivatives of `D(n,x)`.
    Derivative,
    /// Round trip through the binomial transform and its inverse.
    BinomialInversion,
}

/// A bivariate polynomial in `x, y`; `coeffs[i][j]` multiplies `x^i y^j`.
#[derive(Debug, Clone)]
pub struct BiPoly {
    coeffs: Vec<Vec<Rational>>,
}

impl BiPoly {
    fn zero(deg: usize) -> Self {
        Self { coeffs: vec![vec![Rational::zero(); deg + 1]; deg + 1] }
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.coeffs
            .get(i)
            .and_then(|row| row.get(j))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    fn dim(&self) -> usize {
        self.coeffs.len()
    }
}

impl PartialEq for BiPoly {
    fn eq(&self, other: &Self) -> bool {
        let d = self.dim().max(other.dim());
        (0..d).all(|i| (0..d).all(|j| self.get(i, j) == other.get(i, j)))
    }
}

/// One side of an identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Side {
    Scalar(#[serde(with = "rational_str")] Rational),
    Poly(PolyX),
    Bivariate(#[serde(serialize_with = "ser_bipoly")] BiPoly),
    Sequence(#[serde(with = "rational_vec")] Vec<Rational>),
}

fn ser_bipoly<S: serde::Serializer>(p: &BiPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(p.coeffs.len()))?;
    for row in &p.coeffs {
        let row: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Indices {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub big_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_rational")]
    pub x: Option<Rational>,
}

fn ser_opt_rational<S: serde::Serializer>(x: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub theorem: Theorem,
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<Params>,
    pub indices: Indices,
    pub lhs: Side,
    pub rhs: Side,
    /// Second right-hand side, for checks with a specialised closed form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alt_rhs: Option<Side>,
    pub pass: bool,
}

/// Runs identity checks for one model and one `(m, λ)` pair, caching the
/// Whitney triangles it needs. The `r` field of the parameters is unused:
/// each check picks the shift its identity calls for.
pub struct Checker<'a> {
    model: &'a MomentModel,
    params: Params,
    triangles: RefCell<HashMap<u32, Rc<WhitneyTriangle>>>,
    faults: Vec<(u32, usize, usize, Rational)>,
}

impl<'a> Checker<'a> {
    pub fn new(model: &'a MomentModel, params: &Params) -> Self {
        Self {
            model,
            params: params.with_r(1),
            triangles: RefCell::new(HashMap::new()),
            faults: Vec::new(),
        }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Test hook: every triangle with shift `r` built from now on has
    /// `delta` added at `(n, k)`.
    pub fn inject_fault(&mut self, r: u32, n: usize, k: usize, delta: Rational) {
        self.triangles.borrow_mut().remove(&r);
        self.faults.push((r, n, k, delta));
    }

    /// `W^{(Y,r)}` triangle covering at least rows `0..=max_n`.
    fn triangle(&self, r: u32, max_n: usize) -> Result<Rc<WhitneyTriangle>> {
        if let Some(t) = self.triangles.borrow().get(&r) {
            if t.max_n() >= max_n {
                return Ok(Rc::clone(t));
            }
        }
        let mut t = whitney_triangle(self.model, &self.params.with_r(r), max_n, Route::Egf)?;
        for (fr, n, k, delta) in &self.faults {
            if *fr == r && *n <= max_n {
                t.perturb(*n, *k, delta);
            }
        }
        let t = Rc::new(t);
        self.triangles.borrow_mut().insert(r, Rc::clone(&t));
        Ok(t)
    }

    /// `D(0,x), ..., D(max_n,x)`.
    fn dowling(&self, max_n: usize) -> Result<Vec<PolyX>> {
        let t = self.triangle(1, max_n)?;
        Ok((0..=max_n).map(|n| t.dowling_poly(n)).collect())
    }

    fn m(&self) -> Rational {
        self.params.m_rat()
    }

    fn lambda(&self) -> &Rational {
        &self.params.lambda
    }

    fn report(&self, theorem: Theorem, indices: Indices, lhs: Side, rhs: Side) -> IdentityReport {
        let pass = lhs == rhs;
        IdentityReport {
            theorem,
            model: self.model.kind().to_string(),
            params: Some(self.params.clone()),
            indices,
            lhs,
            rhs,
            alt_rhs: None,
            pass,
        }
    }

    /// `Σ_{k=0}^{N} E[(mS_k+1)_{n,λ}] = Σ_{l=0}^{N} l! m^l C(N+1,l+1) W(n,l)`.
    pub fn sum_identity(&self, n: usize, big_n: usize) -> Result<IdentityReport> {
        let table = sum_moment_table(self.model, self.params.m, 1, self.lambda(), big_n, n)?;
        let lhs: Rational = table.iter().map(|row| row[n].clone()).sum();
        let tri = self.triangle(1, n)?;
        let m = self.m();
        let rhs: Rational = (0..=big_n.min(n))
            .map(|l| factorial(l) * pow(&m, l) * binom(big_n + 1, l + 1) * tri.get(n, l))
            .sum();
        Ok(self.report(
            Theorem::SumIdentity,
            Indices { n: Some(n), big_n: Some(big_n), ..Default::default() },
            Side::Scalar(lhs),
            Side::Scalar(rhs),
        ))
    }

    /// `D(n,x) = Σ_l Σ_{k≤l} C(n,l) (1)_{n-l,λ} B_{l,k}((x/m)E[(mY)_{1,λ}], ...)`,
    /// with `x` pulled out of each Bell term by homogeneity.
    pub fn bell_expansion(&self, n: usize) -> Result<IdentityReport> {
        let lhs = self.dowling(n)?.swap_remove(n);
        let m = self.m();
        let mgf = self.model.mgf_degen(self.params.m, self.lambda(), n)?;
        let args: Vec<Rational> = mgf.coeffs()[1..].iter().map(|c| c / &m).collect();
        let mut coeffs = vec![Rational::zero(); n + 1];
        for l in 0..=n {
            let w = binom(n, l) * degen_falling(&int(1), n - l, self.lambda());
            for (k, c) in coeffs.iter_mut().enumerate().take(l + 1) {
                *c += &w * bell_partial(l, k, &args)?;
            }
        }
        Ok(self.report(
            Theorem::BellExpansion,
            Indices { n: Some(n), ..Default::default() },
            Side::Poly(lhs),
            Side::Poly(PolyX::new(coeffs)),
        ))
    }

    /// `D(n+1,x) = Σ_k (-λ)^{n-k} (n!/k!) D(k,x) + (x/m) Σ_k C(n,k) D(k,x) E[(mY)_{n-k+1,λ}]`.
    pub fn recurrence(&self, n: usize) -> Result<IdentityReport> {
        let d = self.dowling(n + 1)?;
        let m = self.m();
        let neg_lambda = -self.lambda().clone();
        let mgf = self.model.mgf_degen(self.params.m, self.lambda(), n + 1)?;
        let mut first = PolyX::zero();
        let mut second = PolyX::zero();
        for (k, dk) in d.iter().enumerate().take(n + 1) {
            let c = pow(&neg_lambda, n - k) * factorial(n) / factorial(k);
            first = first.add(&dk.scale(&c));
            let c = binom(n, k) * &mgf.coeffs()[n - k + 1];
            second = second.add(&dk.scale(&c));
        }
        let rhs = first.add(&second.shift(1).scale(&(Rational::one() / m)));
        Ok(self.report(
            Theorem::Recurrence,
            Indices { n: Some(n), ..Default::default() },
            Side::Poly(d[n + 1].clone()),
            Side::Poly(rhs),
        ))
    }

    /// `Σ_k C(n,k)(1)_{n-k,λ} D(k,x+y) = Σ_k C(n,k) D(n-k,x) D(k,y)` as a
    /// polynomial identity in two variables.
    pub fn convolution(&self, n: usize) -> Result<IdentityReport> {
        let d = self.dowling(n)?;
        let mut lhs = BiPoly::zero(n);
        for (k, dk) in d.iter().enumerate() {
            let w = binom(n, k) * degen_falling(&int(1), n - k, self.lambda());
            for (i, c) in dk.coeffs().iter().enumerate() {
                // c (x+y)^i
                for a in 0..=i {
                    lhs.coeffs[a][i - a] += &w * c * binom(i, a);
                }
            }
        }
        let mut rhs = BiPoly::zero(n);
        for k in 0..=n {
            let w = binom(n, k);
            for (i, a) in d[n - k].coeffs().iter().enumerate() {
                for (j, b) in d[k].coeffs().iter().enumerate() {
                    rhs.coeffs[i][j] += &w * a * b;
                }
            }
        }
        Ok(self.report(
            Theorem::Convolution,
            Indices { n: Some(n), ..Default::default() },
            Side::Bivariate(lhs),
            Side::Bivariate(rhs),
        ))
    }

    /// `Σ_k C(n,k)(x-1)_{n-k,λ} D(k,x) = Σ_k C(x,k) k! B_{n,k}(D(1), ..., D(n-k+1))`
    /// where `D(j) = D(j,1)`.
    pub fn binom_bell(&self, n: usize, x: &Rational) -> Result<IdentityReport> {
        let d = self.dowling(n)?;
        let xm1 = x - Rational::one();
        let lhs: Rational = (0..=n)
            .map(|k| binom(n, k) * degen_falling(&xm1, n - k, self.lambda()) * d[k].eval(x))
            .sum();
        let numbers: Vec<Rational> = d.iter().skip(1).map(|p| p.eval(&Rational::one())).collect();
        let mut rhs = Rational::zero();
        for k in 0..=n {
            rhs += binom_general(x, k) * factorial(k) * bell_partial(n, k, &numbers)?;
        }
        Ok(self.report(
            Theorem::BinomBell,
            Indices { n: Some(n), x: Some(x.clone()), ..Default::default() },
            Side::Scalar(lhs),
            Side::Scalar(rhs),
        ))
    }

    /// `Σ_{j≤n-k} C(n,k) k^j x^j W^{(Y,k)}(n-k,j) = B_{n,k}(D(0,x), 2D(1,x), ..., (n-k+1)D(n-k,x))`.
    pub fn bell_rwhitney(&self, n: usize, k: usize, x: &Rational) -> Result<IdentityReport> {
        assert!(k <= n, "bell_rwhitney needs k <= n");
        let shifted = self.triangle(k as u32, n - k)?;
        let kx = int(k as i64) * x;
        let lhs: Rational = (0..=n - k)
            .map(|j| binom(n, k) * pow(&kx, j) * shifted.get(n - k, j))
            .sum();
        let d = self.dowling(n - k)?;
        let args: Vec<Rational> = d
            .iter()
            .enumerate()
            .map(|(j, p)| int(j as i64 + 1) * p.eval(x))
            .collect();
        let rhs = bell_partial(n, k, &args)?;
        Ok(self.report(
            Theorem::BellRWhitney,
            Indices { n: Some(n), k: Some(k), x: Some(x.clone()), ..Default::default() },
            Side::Scalar(lhs),
            Side::Scalar(rhs),
        ))
    }

    /// `B_{n,k}(D(1,x) - (1)_{1,λ}, ..., D(n-k+1,x) - (1)_{n-k+1,λ}) = Σ_{j=k}^{n} S(j,k) W^{(Y,k)}(n,j) x^j`.
    pub fn stirling_bell(&self, n: usize, k: usize, x: &Rational) -> Result<IdentityReport> {
        assert!(k <= n, "stirling_bell needs k <= n");
        let d = self.dowling(n)?;
        let one = Rational::one();
        let args: Vec<Rational> = (1..=n)
            .map(|j| d[j].eval(x) - degen_falling(&one, j, self.lambda()))
            .collect();
        let lhs = bell_partial(n, k, &args)?;
        let shifted = self.triangle(k as u32, n)?;
        let s2 = stirling2_rows(n);
        let rhs: Rational = (k..=n)
            .map(|j| &s2[j][k] * shifted.get(n, j) * pow(x, j))
            .sum();
        Ok(self.report(
            Theorem::StirlingBell,
            Indices { n: Some(n), k: Some(k), x: Some(x.clone()), ..Default::default() },
            Side::Scalar(lhs),
            Side::Scalar(rhs),
        ))
    }

    /// `(d/dx)^k D(n,x) = k! Σ_j C(n,j) D(j,x) {n-j k}_{Y,λ/m} m^{n-k-j}`, plus
    /// the `k = 1` form `Σ_j C(n,j) E[(Y)_{n-j,λ/m}] D(j,x) m^{n-j-1}`.
    pub fn derivative(&self, n: usize, k: usize) -> Result<IdentityReport> {
        let d = self.dowling(n)?;
        let lhs = d[n].nth_derivative(k);
        let m = self.m();
        let mu = self.lambda() / &m;
        let mut rhs = PolyX::zero();
        if k <= n {
            let s = stirling2_prob_rows(self.model, n, &mu)?;
            for j in 0..=n - k {
                let c = binom(n, j) * &s[n - j][k] * pow(&m, n - k - j);
                rhs = rhs.add(&d[j].scale(&c));
            }
            rhs = rhs.scale(&factorial(k));
        }
        let alt = if k == 1 && n >= 1 {
            let mut acc = PolyX::zero();
            for j in 0..n {
                let c = binom(n, j) * self.model.degen_moment(n - j, &mu)? * pow(&m, n - j - 1);
                acc = acc.add(&d[j].scale(&c));
            }
            Some(acc)
        } else {
            None
        };
        let mut report = self.report(
            Theorem::Derivative,
            Indices { n: Some(n), k: Some(k), ..Default::default() },
            Side::Poly(lhs.clone()),
            Side::Poly(rhs),
        );
        if let Some(alt) = alt {
            report.pass &= alt == lhs;
            report.alt_rhs = Some(Side::Poly(alt));
        }
        Ok(report)
    }
}

/// `b_k = Σ_l (-1)^{k-l} C(k,l) a_l`.
pub fn binomial_transform_inverse(a: &[Rational]) -> Vec<Rational> {
    (0..a.len())
        .map(|k| {
            (0..=k)
                .map(|l| {
                    let t = binom(k, l) * &a[l];
                    if (k - l) % 2 == 0 { t } else { -t }
                })
                .sum()
        })
        .collect()
}

/// `a_k = Σ_l C(k,l) b_l`.
pub fn binomial_transform(b: &[Rational]) -> Vec<Rational> {
    (0..b.len())
        .map(|k| (0..=k).map(|l| binom(k, l) * &b[l]).sum())
        .collect()
}

pub fn check_binomial_inversion(a: &[Rational]) -> IdentityReport {
    let recovered = binomial_transform(&binomial_transform_inverse(a));
    IdentityReport {
        theorem: Theorem::BinomialInversion,
        model: "none".into(),
        params: None,
        indices: Indices { n: Some(a.len()), ..Default::default() },
        pass: recovered == a,
        lhs: Side::Sequence(a.to_vec()),
        rhs: Side::Sequence(recovered),
        alt_rhs: None,
    }
}

/// `count` distinct rational evaluation points, deterministic.
pub fn sample_points(count: usize) -> Vec<Rational> {
    let head = [
        int(1),
        int(2),
        frac(1, 2),
        frac(-1, 3),
        int(3),
        int(0),
        frac(5, 2),
        int(-2),
        frac(7, 3),
        frac(-3, 4),
    ];
    let mut out: Vec<Rational> = head.into_iter().take(count).collect();
    let mut i = 1i64;
    while out.len() < count {
        let p = frac(4 * i + 1, 5);
        if !out.contains(&p) {
            out.push(p);
        }
        i += 1;
    }
    out
}

/// Bounds for [`run_suite`].
#[derive(Debug, Clone)]
pub struct SuiteBounds {
    /// Largest `n` for the univariate and scalar checks.
    pub max_n: usize,
    /// Largest `N` for the summation identity.
    pub max_big_n: usize,
    /// Largest `n` for the bivariate convolution check.
    pub convolution_max_n: usize,
    /// Minimum number of `x` points per scalar check; raised to `n + 1`
    /// where needed so agreement pins down the polynomial identity.
    pub min_points: usize,
}

impl Default for SuiteBounds {
    fn default() -> Self {
        Self { max_n: 8, max_big_n: 6, convolution_max_n: 6, min_points: 5 }
    }
}

/// Every model-dependent check for one `(model, m, λ)`.
pub fn run_suite(checker: &Checker<'_>, bounds: &SuiteBounds) -> Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    let max_n = bounds.max_n;
    for n in 0..=max_n {
        for big_n in 0..=bounds.max_big_n {
            out.push(checker.sum_identity(n, big_n)?);
        }
    }
    for n in 0..=max_n {
        out.push(checker.bell_expansion(n)?);
        out.push(checker.recurrence(n)?);
    }
    for n in 0..=bounds.convolution_max_n {
        out.push(checker.convolution(n)?);
    }
    for n in 0..=max_n {
        let points = sample_points(bounds.min_points.max(n + 1));
        for x in &points {
            out.push(checker.binom_bell(n, x)?);
            for k in 0..=n {
                out.push(checker.bell_rwhitney(n, k, x)?);
                out.push(checker.stirling_bell(n, k, x)?);
            }
        }
    }
    for n in 1..=max_n {
        for k in 1..=n {
            out.push(checker.derivative(n, k)?);
        }
    }
    Ok(out)
}

/// `count` random rational sequences of length `len`, pushed through the
/// binomial inversion round trip.
pub fn run_inversion_battery(count: usize, len: usize, seed: u64) -> Vec<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a: Vec<Rational> = (0..len)
                .map(|_| frac(rng.random_range(-1000..=1000), rng.random_range(1..=97)))
                .collect();
            check_binomial_inversion(&a)
        })
        .collect()
}
