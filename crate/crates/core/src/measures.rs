//! Finitely supported signed measures on the non-negative integers.
//!
//! Poisson laws have infinite support, so every measure built here records the
//! total absolute mass discarded by truncation in `tail_bound`, and every norm
//! carries a matching `truncation_error`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::csum;

/// Default upper-tail mass left out of a Poisson truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-14;

/// Point masses `weights[i]` at `offset + i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedPmf {
    pub offset: usize,
    pub weights: Vec<f64>,
    /// Absolute mass known to be missing beyond the stored support.
    pub tail_bound: f64,
}

/// A norm or distance together with its certified truncation error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Norm {
    pub value: f64,
    pub truncation_error: f64,
}

impl SignedPmf {
    pub fn new(offset: usize, weights: Vec<f64>) -> Self {
        Self { offset, weights, tail_bound: 0.0 }
    }

    pub fn with_tail(mut self, tail_bound: f64) -> Self {
        self.tail_bound = tail_bound;
        self
    }

    /// `δ_k`.
    pub fn dirac(k: usize) -> Self {
        Self::new(k, vec![1.0])
    }

    pub fn zero() -> Self {
        Self::new(0, Vec::new())
    }

    /// One past the largest stored point.
    pub fn end(&self) -> usize {
        self.offset + self.weights.len()
    }

    pub fn weight(&self, k: usize) -> f64 {
        if k < self.offset {
            return 0.0;
        }
        self.weights.get(k - self.offset).copied().unwrap_or(0.0)
    }

    pub fn mass(&self) -> f64 {
        csum(self.weights.iter().copied())
    }

    /// Dense weights on `0..len` (zero-padded on both sides, truncated above).
    pub fn dense(&self, len: usize) -> Vec<f64> {
        (0..len).map(|k| self.weight(k)).collect()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            offset: self.offset,
            weights: self.weights.iter().map(|w| c * w).collect(),
            tail_bound: c.abs() * self.tail_bound,
        }
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        if self.weights.is_empty() {
            return other.scale(sign).with_tail(other.tail_bound + self.tail_bound);
        }
        if other.weights.is_empty() {
            return self.clone().with_tail(self.tail_bound + other.tail_bound);
        }
        let lo = self.offset.min(other.offset);
        let hi = self.end().max(other.end());
        let weights = (lo..hi).map(|k| self.weight(k) + sign * other.weight(k)).collect();
        Self { offset: lo, weights, tail_bound: self.tail_bound + other.tail_bound }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    /// Convolution with another finitely supported measure.
    pub fn convolve(&self, other: &Self) -> Self {
        if self.weights.is_empty() || other.weights.is_empty() {
            return Self::zero();
        }
        let mut w = vec![0.0; self.weights.len() + other.weights.len() - 1];
        for (i, a) in self.weights.iter().enumerate() {
            for (j, b) in other.weights.iter().enumerate() {
                w[i + j] += a * b;
            }
        }
        let ma = self.weights.iter().map(|x| x.abs()).sum::<f64>();
        let mb = other.weights.iter().map(|x| x.abs()).sum::<f64>();
        let tail = self.tail_bound * (mb + other.tail_bound) + other.tail_bound * ma;
        Self { offset: self.offset + other.offset, weights: w, tail_bound: tail }
    }
}

/// Mean and truncation tolerance of a Poisson law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonParams {
    pub t: f64,
    pub tail_tol: f64,
}

impl PoissonParams {
    pub fn new(t: f64) -> Self {
        Self { t, tail_tol: DEFAULT_TAIL_TOL }
    }

    pub fn with_tail_tol(t: f64, tail_tol: f64) -> Self {
        Self { t, tail_tol }
    }
}

/// Upper bound on `P(Po(t) > m)` from `po(m+1, t)`, valid once `m + 2 > t`:
/// the ratios `po(k+1)/po(k) = t/(k+1)` are at most `t/(m+2)` beyond `m+1`.
fn geometric_tail(po_next: f64, t: f64, m: usize) -> f64 {
    let q = t / (m as f64 + 2.0);
    if q >= 1.0 {
        f64::INFINITY
    } else {
        po_next / (1.0 - q)
    }
}

fn ln_factorial(k: usize) -> f64 {
    csum((2..=k).map(|i| (i as f64).ln()))
}

/// `Po(t)` truncated at the smallest `M` whose certified upper tail is below
/// `tail_tol`.
pub fn poisson_pmf(p: &PoissonParams) -> Result<SignedPmf> {
    let t = p.t;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("Poisson mean must be positive and finite, got {t}")));
    }
    if !(p.tail_tol > 0.0) {
        return Err(Error::Domain(format!("tail tolerance must be positive, got {}", p.tail_tol)));
    }
    let mut w = Vec::new();
    if t <= 700.0 {
        let mut cur = (-t).exp();
        let mut k = 0usize;
        loop {
            w.push(cur);
            let next = cur * t / (k as f64 + 1.0);
            if k as f64 + 2.0 > t && geometric_tail(next, t, k) < p.tail_tol {
                return Ok(SignedPmf::new(0, w).with_tail(geometric_tail(next, t, k)));
            }
            cur = next;
            k += 1;
        }
    }
    // Large means: start at the mode in log space and recurse both ways.
    let mode = t.floor() as usize;
    let at_mode = (-t + mode as f64 * t.ln() - ln_factorial(mode)).exp();
    w.resize(mode + 1, 0.0);
    w[mode] = at_mode;
    for k in (0..mode).rev() {
        w[k] = w[k + 1] * (k as f64 + 1.0) / t;
    }
    let mut k = mode;
    loop {
        let next = w[k] * t / (k as f64 + 1.0);
        if k as f64 + 2.0 > t && geometric_tail(next, t, k) < p.tail_tol {
            return Ok(SignedPmf::new(0, w).with_tail(geometric_tail(next, t, k)));
        }
        w.push(next);
        k += 1;
    }
}

/// Upper bound on `P(Po(t) > m)` for an `m` inside or past a truncation.
fn poisson_tail_above(po: &SignedPmf, m: usize) -> f64 {
    if m + 1 >= po.end() {
        return po.tail_bound;
    }
    let stored = csum(po.weights[m + 1 - po.offset..].iter().copied());
    stored + po.tail_bound
}

/// `Q₂ = Po(λ) − ½(λ − var)(δ₁ − δ₀)^{*2} * Po(λ)`, evaluated pointwise as
/// `po(k, λ)(1 − (λ − var)(λ² − 2kλ + k(k−1)) / (2λ²))`.
pub fn q2_measure(lambda: f64, var: f64, p: &PoissonParams) -> Result<SignedPmf> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("λ must be positive, got {lambda}")));
    }
    let po = poisson_pmf(&PoissonParams { t: lambda, tail_tol: p.tail_tol })?;
    let delta = lambda - var;
    let l2 = lambda * lambda;
    let weights = po
        .weights
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let k = k as f64;
            w * (1.0 - delta * (l2 - 2.0 * k * lambda + k * (k - 1.0)) / (2.0 * l2))
        })
        .collect();
    // Σ_{k>M} po(k)|λ² − 2kλ + k(k−1)| ≤ λ²(T(M) + 2T(M−1) + T(M−2)) with T the
    // Poisson upper tail, since Σ_{k>M} k po(k) = λT(M−1) and so on.
    let m = po.end() - 1;
    let tails = [m, m.saturating_sub(1), m.saturating_sub(2)].map(|i| poisson_tail_above(&po, i));
    let tail = po.tail_bound + delta.abs() / 2.0 * (tails[0] + 2.0 * tails[1] + tails[2]);
    Ok(SignedPmf::new(0, weights).with_tail(tail))
}

/// `(δ₁ − δ₀)^{*order} * Q`.
pub fn diff_convolve(q: &SignedPmf, order: usize) -> SignedPmf {
    let mut cur = q.clone();
    for _ in 0..order {
        let lo = cur.offset;
        let hi = cur.end() + 1;
        let weights = (lo..hi)
            .map(|k| {
                let prev = if k == 0 { 0.0 } else { cur.weight(k - 1) };
                prev - cur.weight(k)
            })
            .collect();
        cur = SignedPmf { offset: lo, weights, tail_bound: 2.0 * cur.tail_bound };
    }
    cur
}

/// `‖Q‖_TV = Σ_k |Q({k})|`.
pub fn tv_norm(q: &SignedPmf) -> Norm {
    Norm { value: csum(q.weights.iter().map(|w| w.abs())), truncation_error: q.tail_bound }
}

/// `d_TV(Q₁, Q₂) = sup_A |Q₁(A) − Q₂(A)|`; equals `½‖Q₁ − Q₂‖_TV` when the
/// total masses agree.
pub fn tv_distance(a: &SignedPmf, b: &SignedPmf) -> Norm {
    let d = a.sub(b);
    let value = if (a.mass() - b.mass()).abs() <= 1e-12 {
        0.5 * csum(d.weights.iter().map(|w| w.abs()))
    } else {
        let pos = csum(d.weights.iter().map(|&w| w.max(0.0)));
        let neg = csum(d.weights.iter().map(|&w| (-w).max(0.0)));
        pos.max(neg)
    };
    Norm { value, truncation_error: d.tail_bound }
}

/// `‖Q‖_W = Σ_m |Q({0, …, m})|` for a measure of total mass zero.
pub fn wasserstein_norm(q: &SignedPmf) -> Result<Norm> {
    let mass = q.mass();
    if mass.abs() > 1e-10 {
        return Err(Error::Domain(format!(
            "Wasserstein norm needs total mass 0, got {mass:e}"
        )));
    }
    let mut cum = crate::numeric::Neumaier::new();
    let mut acc = crate::numeric::Neumaier::new();
    for &w in &q.weights {
        cum.add(w);
        acc.add(cum.value().abs());
    }
    Ok(Norm { value: acc.value(), truncation_error: q.tail_bound * q.end().max(1) as f64 })
}

/// Wasserstein distance of two probability measures.
pub fn wasserstein_distance(a: &SignedPmf, b: &SignedPmf) -> Result<Norm> {
    wasserstein_norm(&a.sub(b))
}

/// `‖Q‖_loc = sup_k |Q({k})|`.
pub fn local_norm(q: &SignedPmf) -> Norm {
    let value = q.weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    Norm { value, truncation_error: q.tail_bound }
}

pub fn local_distance(a: &SignedPmf, b: &SignedPmf) -> Norm {
    local_norm(&a.sub(b))
}

/// The three norms of `(δ₁ − δ₀)^{*2} * Po(t)` by direct summation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffPoissonNorms {
    pub t: f64,
    pub tv: f64,
    pub w: f64,
    pub loc: f64,
}

pub fn second_difference_norms(t: f64, tail_tol: f64) -> Result<DiffPoissonNorms> {
    let d = diff_convolve(&poisson_pmf(&PoissonParams::with_tail_tol(t, tail_tol))?, 2);
    Ok(DiffPoissonNorms {
        t,
        tv: tv_norm(&d).value,
        w: wasserstein_norm(&d)?.value,
        loc: local_norm(&d).value,
    })
}

/// Explicit upper bounds `min{4, 3/(te)}`, `min{2, √(2/(te))}` and
/// `min{2, (3/(2te))^{3/2}}` for the norms above.
pub fn second_difference_bounds(t: f64) -> DiffPoissonNorms {
    let te = t * std::f64::consts::E;
    DiffPoissonNorms {
        t,
        tv: (3.0 / te).min(4.0),
        w: (2.0 / te).sqrt().min(2.0),
        loc: (1.5 / te).powf(1.5).min(2.0),
    }
}

/// Large-`t` leading terms `4/(t√(2πe))`, `√(2/(πt))`, `1/(√(2π) t^{3/2})`.
pub fn second_difference_asymptotics(t: f64) -> DiffPoissonNorms {
    use std::f64::consts::PI;
    DiffPoissonNorms {
        t,
        tv: 4.0 / (t * crate::numeric::sqrt_2pi_e()),
        w: (2.0 / (PI * t)).sqrt(),
        loc: 1.0 / ((2.0 * PI).sqrt() * t.powf(1.5)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn po(t: f64) -> SignedPmf {
        poisson_pmf(&PoissonParams::new(t)).unwrap()
    }

    #[test]
    fn poisson_values() {
        assert!((po(1.0).weights[0] - (-1.0f64).exp()).abs() < 1e-16);
        assert!((po(2.0).weights[2] - 2.0 * (-2.0f64).exp()).abs() < 1e-16);
        for t in [0.01, 0.5, 3.0, 40.0, 900.0] {
            let p = po(t);
            let mass = p.mass();
            assert!(mass <= 1.0 + 1e-12 && mass >= 1.0 - 1e-12, "t={t} mass={mass}");
            assert!(p.tail_bound < DEFAULT_TAIL_TOL);
        }
        assert!(matches!(poisson_pmf(&PoissonParams::new(0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn large_mean_matches_upward_recursion() {
        let a = po(650.0);
        let mode = 650;
        let direct = (-650.0 + 650.0 * 650f64.ln() - ln_factorial(mode)).exp();
        assert!((a.weights[mode] - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn q2_examples() {
        let p = PoissonParams::new(1.0);
        let same = q2_measure(1.0, 1.0, &p).unwrap();
        assert_eq!(same.weights, po(1.0).weights);
        let q = q2_measure(1.0, 0.9, &p).unwrap();
        assert!((q.weights[0] - 0.95 * (-1.0f64).exp()).abs() < 1e-16);
        for (l, v) in [(0.3, 0.2), (2.0, 1.1), (7.5, 3.0)] {
            let q = q2_measure(l, v, &p).unwrap();
            assert!((q.mass() - 1.0).abs() < 1e-12, "λ={l}");
        }
        assert!(q2_measure(0.0, 0.0, &p).is_err());
    }

    #[test]
    fn q2_matches_difference_form() {
        let (l, v) = (2.5, 1.7);
        let p = PoissonParams::new(l);
        let q = q2_measure(l, v, &p).unwrap();
        let alt = po(l).sub(&diff_convolve(&po(l), 2).scale(0.5 * (l - v)));
        for k in 0..q.end() {
            assert!((q.weight(k) - alt.weight(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn diff_convolve_examples() {
        let d = diff_convolve(&SignedPmf::dirac(0), 1);
        assert_eq!((d.weight(0), d.weight(1)), (-1.0, 1.0));
        let t = 3.0;
        let p = po(t);
        let d2 = diff_convolve(&p, 2);
        for k in 0..p.end() {
            let want = if k >= 2 { p.weight(k - 2) } else { 0.0 } - 2.0 * if k >= 1 { p.weight(k - 1) } else { 0.0 }
                + p.weight(k);
            assert!((d2.weight(k) - want).abs() < 1e-16);
        }
        assert!(d2.mass().abs() < 1e-15);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(local_norm(&SignedPmf::dirac(0)).value, 1.0);
        assert_eq!(local_distance(&po(4.0), &po(4.0)).value, 0.0);
        assert_eq!(tv_distance(&po(4.0), &po(4.0)).value, 0.0);
        assert!((tv_norm(&po(4.0)).value - 1.0).abs() < 1e-12);
        assert_eq!(wasserstein_norm(&SignedPmf::zero()).unwrap().value, 0.0);
        let d = SignedPmf::dirac(2).sub(&SignedPmf::dirac(0));
        assert!((wasserstein_norm(&d).unwrap().value - 2.0).abs() < 1e-15);
        assert!(matches!(wasserstein_norm(&SignedPmf::dirac(0)), Err(Error::Domain(_))));
        let loc = second_difference_norms(4.0, DEFAULT_TAIL_TOL).unwrap().loc;
        assert!(loc <= second_difference_bounds(4.0).loc);
    }

    #[test]
    fn tv_binomial_against_direct_sum() {
        let bin = SignedPmf::new(0, crate::numeric::bernoulli_convolution(&[0.1; 10]));
        let p = po(1.0);
        let direct = 0.5 * (0..40).map(|k| (bin.weight(k) - p.weight(k)).abs()).sum::<f64>();
        assert!((tv_distance(&bin, &p).value - direct).abs() < 1e-14);
    }

    #[test]
    fn unequal_masses_use_set_form() {
        let a = SignedPmf::new(0, vec![0.5, 0.5]);
        let b = SignedPmf::new(0, vec![0.5]);
        assert!((tv_distance(&a, &b).value - 0.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn difference_identity(offset in 0usize..5, w in prop::collection::vec(-1.0f64..1.0, 1..30)) {
            let q = SignedPmf::new(offset, w);
            let lhs = wasserstein_norm(&diff_convolve(&q, 1)).unwrap().value;
            prop_assert!((lhs - tv_norm(&q).value).abs() < 1e-12);
        }

        #[test]
        fn poisson_mass_within_tolerance(t in 0.01f64..200.0) {
            let p = po(t);
            prop_assert!(p.mass() <= 1.0 + 1e-12);
            prop_assert!(p.mass() >= 1.0 - 1e-12);
        }
    }
}
