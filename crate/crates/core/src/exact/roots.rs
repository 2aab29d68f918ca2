//! Real-rootedness of probability generating functions.
//!
//! Coefficients are stored lowest degree first. A PGF has non-negative
//! coefficients, so all of its real roots are `≤ 0`; the variable is rescaled
//! so that the product of the root moduli is one before any arithmetic.

use crate::error::{Error, Result};

/// A Sturm remainder below this fraction of its dividend terminates the chain
/// (the previous element is then the approximate gcd of `p` and `p'`).
const REMAINDER_TOL: f64 = 1e-9;

/// `p` with leading/trailing negligible coefficients removed and the number of
/// removed low-order coefficients (roots at the origin).
pub(crate) struct Prepared {
    pub low_zeros: usize,
    pub high_zeros: usize,
    /// Coefficients of `p(s w) / z^low_zeros`, normalised to max 1.
    pub poly: Vec<f64>,
    /// Scale `s`; roots of the original are `s · (roots of poly)`.
    pub scale: f64,
}

pub(crate) fn prepare(coeffs: &[f64]) -> Result<Prepared> {
    let max = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if max == 0.0 || !max.is_finite() {
        return Err(Error::Domain("zero or non-finite polynomial".into()));
    }
    // Only exact zeros are trimmed: a PGF may have genuinely tiny extreme
    // coefficients (p^n), which the rescaling below brings to order one.
    let small = |c: &f64| *c == 0.0;
    let low_zeros = coeffs.iter().take_while(|c| small(c)).count();
    let high_zeros = coeffs.iter().rev().take_while(|c| small(c)).count();
    let core = &coeffs[low_zeros..coeffs.len() - high_zeros];
    let d = core.len() - 1;
    let scale = if d == 0 {
        1.0
    } else {
        ((core[0].abs().ln() - core[d].abs().ln()) / d as f64).exp()
    };
    let ln_s = scale.ln();
    let mut poly: Vec<f64> = core
        .iter()
        .enumerate()
        .map(|(k, &c)| if c == 0.0 { 0.0 } else { c.signum() * (c.abs().ln() + k as f64 * ln_s).exp() })
        .collect();
    normalise(&mut poly);
    Ok(Prepared { low_zeros, high_zeros, poly, scale })
}

fn normalise(p: &mut [f64]) {
    let max = p.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if max > 0.0 {
        p.iter_mut().for_each(|c| *c /= max);
    }
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect()
}

/// Remainder of `a / b` (`b` with non-zero leading coefficient).
fn remainder(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db];
    while r.len() > db {
        let q = r[r.len() - 1] / lead;
        let shift = r.len() - 1 - db;
        for (k, &bk) in b.iter().enumerate() {
            r[shift + k] -= q * bk;
        }
        r.pop();
    }
    r
}

fn sign_at_infinity(p: &[f64], negative: bool) -> f64 {
    let lead = p[p.len() - 1].signum();
    if negative && (p.len() - 1) % 2 == 1 {
        -lead
    } else {
        lead
    }
}

/// Sturm chain `p, p', -rem(p, p'), …`, terminated at the first negligible
/// remainder.
pub(crate) fn sturm_chain(p: &[f64]) -> Vec<Vec<f64>> {
    let mut chain = vec![p.to_vec()];
    let mut d = derivative(p);
    normalise(&mut d);
    chain.push(d);
    loop {
        let k = chain.len();
        let mut r: Vec<f64> = remainder(&chain[k - 2], &chain[k - 1]).iter().map(|c| -c).collect();
        let scale = chain[k - 2].iter().fold(0.0f64, |m, c| m.max(c.abs()));
        while r.last().is_some_and(|c| c.abs() <= REMAINDER_TOL * scale) {
            r.pop();
        }
        if r.is_empty() {
            break;
        }
        normalise(&mut r);
        chain.push(r);
        if chain.last().map(Vec::len) == Some(1) {
            break;
        }
    }
    chain
}

/// Number of distinct real roots and number of distinct roots overall.
pub(crate) fn root_counts(p: &[f64]) -> (usize, usize) {
    let d = p.len() - 1;
    if d == 0 {
        return (0, 0);
    }
    let chain = sturm_chain(p);
    let changes = |negative: bool| {
        let signs: Vec<f64> = chain.iter().map(|q| sign_at_infinity(q, negative)).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let real = changes(true) - changes(false);
    let gcd_deg = chain.last().map_or(0, |g| g.len() - 1);
    (real, d - gcd_deg)
}

/// True iff every root of `Σ coeffs[k] z^k` is real.
pub fn is_real_rooted(coeffs: &[f64]) -> Result<bool> {
    let prep = prepare(coeffs)?;
    let (real, distinct) = root_counts(&prep.poly);
    Ok(real == distinct)
}

fn eval3(p: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for &c in p.iter().rev() {
        d2 = d2 * x + 2.0 * d1;
        d1 = d1 * x + v;
        v = v * x + c;
    }
    (v, d1, d2)
}

/// Largest real root of a real-rooted polynomial by Laguerre's method, which
/// converges monotonically when started to the right of every root.
fn laguerre_from(p: &[f64], mut x: f64) -> f64 {
    let d = (p.len() - 1) as f64;
    for _ in 0..500 {
        let (v, d1, d2) = eval3(p, x);
        if v == 0.0 {
            return x;
        }
        let g = d1 / v;
        let h = g * g - d2 / v;
        let disc = ((d - 1.0) * (d * h - g * g)).max(0.0).sqrt();
        let denom = if g >= 0.0 { g + disc } else { g - disc };
        if denom == 0.0 {
            return x;
        }
        let step = d / denom;
        x -= step;
        if step.abs() <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

fn deflate(p: &[f64], root: f64) -> Vec<f64> {
    let d = p.len() - 1;
    let mut q = vec![0.0; d];
    let mut carry = 0.0;
    for k in (1..=d).rev() {
        carry = carry * root + p[k];
        q[k - 1] = carry;
    }
    q
}

/// Real roots (with multiplicity) of a real-rooted polynomial with
/// non-negative coefficients, largest first.
pub(crate) fn real_roots(prep: &Prepared) -> Vec<f64> {
    let mut work = prep.poly.clone();
    let mut roots = Vec::new();
    while work.len() > 1 {
        let r = laguerre_from(&work, 1.0);
        let r = laguerre_from(&prep.poly, r);
        roots.push(r * prep.scale);
        work = deflate(&work, r);
    }
    roots
}
