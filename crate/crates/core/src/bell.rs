//! Partial and complete Bell polynomials evaluated at rational arguments.
//!
//! Argument slices are 1-based in the mathematical sense: `args[0]` is `x_1`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ratcore::{factorial, int, pow, Rational};
use crate::series::EgfSeries;

/// `B_{n,k}(x_1, ..., x_{n-k+1})` by direct enumeration of the block-count
/// vectors `(l_1, ..., l_{n-k+1})` with `Σ l_i = k` and `Σ i·l_i = n`.
pub fn bell_partial(n: usize, k: usize, args: &[Rational]) -> Result<Rational> {
    if k > n {
        return Ok(Rational::zero());
    }
    if n == 0 {
        return Ok(Rational::one());
    }
    if k == 0 {
        return Ok(Rational::zero());
    }
    let width = n - k + 1;
    if args.len() < width {
        return Err(Error::InsufficientArgs { required: width, supplied: args.len() });
    }
    // x_i / i!, precomputed.
    let scaled: Vec<Rational> = (1..=width).map(|i| &args[i - 1] / factorial(i)).collect();
    let mut total = Rational::zero();
    let mut counts = vec![0usize; width];
    enumerate(&scaled, width, k, n, &mut counts, &mut total);
    Ok(total * factorial(n))
}

// Assigns counts for block sizes `1..=size` with `blocks` blocks covering
// `weight` elements still to place. Leaves contribute Π (x_i/i!)^{l_i} / l_i!.
fn enumerate(
    scaled: &[Rational],
    size: usize,
    blocks: usize,
    weight: usize,
    counts: &mut [usize],
    total: &mut Rational,
) {
    if size == 0 {
        if blocks == 0 && weight == 0 {
            let mut term = Rational::one();
            for (i, &l) in counts.iter().enumerate() {
                if l > 0 {
                    term *= pow(&scaled[i], l) / factorial(l);
                }
            }
            *total += term;
        }
        return;
    }
    if size == 1 {
        // Forced: the remaining blocks are singletons.
        if blocks == weight {
            counts[0] = blocks;
            enumerate(scaled, 0, 0, 0, counts, total);
            counts[0] = 0;
        }
        return;
    }
    let max_l = (weight / size).min(blocks);
    for l in 0..=max_l {
        let (b, w) = (blocks - l, weight - l * size);
        // Each remaining block holds between 1 and size-1 elements.
        if w < b || w > b * (size - 1) {
            continue;
        }
        counts[size - 1] = l;
        enumerate(scaled, size - 1, b, w, counts, total);
    }
    counts[size - 1] = 0;
}

/// `(1/k!) (inner)^k`; coefficient `n` is `B_{n,k}(inner_1, ..., inner_{n-k+1})`.
pub fn bell_partial_series(k: usize, inner: &EgfSeries) -> Result<EgfSeries> {
    let c0 = inner.coeff(0)?;
    if !c0.is_zero() {
        return Err(Error::NonZeroConstantTerm(c0.to_string()));
    }
    Ok(inner.pow(k).scale(&(Rational::one() / factorial(k))))
}

/// The EGF `Σ_{i≥1} x_i t^i/i!` of order `order`, zero-padded.
pub fn bell_inner(args: &[Rational], order: usize) -> EgfSeries {
    let mut coeffs = vec![Rational::zero(); order + 1];
    for (i, x) in args.iter().take(order).enumerate() {
        coeffs[i + 1] = x.clone();
    }
    EgfSeries::from_coeffs(coeffs)
}

/// `B_{n,k}` evaluated through the series route.
pub fn bell_partial_via_series(n: usize, k: usize, args: &[Rational]) -> Result<Rational> {
    if k <= n && k > 0 && args.len() < n - k + 1 {
        return Err(Error::InsufficientArgs { required: n - k + 1, supplied: args.len() });
    }
    let s = bell_partial_series(k, &bell_inner(args, n))?;
    Ok(s.coeff(n)?.clone())
}

/// `B_n(x_1, ..., x_n) = Σ_k B_{n,k}`.
pub fn bell_complete(n: usize, args: &[Rational]) -> Result<Rational> {
    if args.len() < n {
        return Err(Error::InsufficientArgs { required: n, supplied: args.len() });
    }
    (0..=n).map(|k| bell_partial(n, k, args)).sum()
}

/// Classical Bell numbers `B_0..=B_n`, for quick sanity checks.
pub fn bell_numbers(n: usize) -> Vec<Rational> {
    let ones = vec![int(1); n.max(1)];
    (0..=n).map(|i| bell_complete(i, &ones).expect("enough args")).collect()
}
