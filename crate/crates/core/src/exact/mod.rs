//! Exact distributions of `S_n` and of its leave-out / injection variants.
//!
//! The probability generating function of a sub-model of size `m` is the
//! permanent of the polynomial matrix `(1 + p_{j,r}(z - 1))` divided by `m!`.
//! Rows that are matched but contribute no summand enter as the constant
//! polynomial 1.

mod enumerate;
mod roots;
mod ryser;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{select, BernoulliMatrix, IndexSelection, SubModel};
use crate::numeric::{bernoulli_convolution, csum, factorial};

pub use enumerate::{brute_force_pmf, for_each_permutation};
pub use roots::is_real_rooted;

/// Largest sub-model size the permanent engine accepts by default.
pub const DEFAULT_EXACT_CAP: usize = 20;
/// Largest `n` for which κ is computed exactly by default.
pub const DEFAULT_KAPPA_CAP: usize = 7;

/// Round-off slack allowed below zero before a coefficient is declared bad.
const NEGATIVE_SLACK: f64 = 1e-12;

/// `coeffs[k] = P(W = k)`; the coefficient vector of the PGF of `W`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmfPolynomial {
    coeffs: Vec<f64>,
}

impl PmfPolynomial {
    /// Wraps a coefficient vector after checking it is a probability vector.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::Domain("PMF coefficients must be finite and non-negative".into()));
        }
        let total = csum(coeffs.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("PMF sums to {total}, not 1")));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Largest value the variable can take (`len - 1`).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mean(&self) -> f64 {
        csum(self.coeffs.iter().enumerate().map(|(k, p)| k as f64 * p))
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        csum(self.coeffs.iter().enumerate().map(|(k, p)| (k as f64 - mu).powi(2) * p))
    }

    /// `Σ_k coeffs[k] h(k)`.
    pub fn expect<F: Fn(usize) -> f64>(&self, h: F) -> f64 {
        csum(self.coeffs.iter().enumerate().map(|(k, p)| p * h(k)))
    }

    /// As a [`crate::SignedPmf`] with offset 0 and no truncation.
    pub fn to_signed(&self) -> crate::SignedPmf {
        crate::SignedPmf::new(0, self.coeffs.clone())
    }
}

/// Turns raw permanent coefficients into a PMF. Negative values within the
/// round-off envelope are clamped to zero and the vector is renormalised.
fn finish_pmf(m: usize, raw: ryser::PermanentPoly) -> Result<PmfPolynomial> {
    let fact = factorial(m);
    let eps = f64::EPSILON;
    let mut coeffs = Vec::with_capacity(raw.coeffs.len());
    for (k, (&c, &abs)) in raw.coeffs.iter().zip(&raw.abs_sum).enumerate() {
        let v = c / fact;
        let slack = NEGATIVE_SLACK.max(8.0 * (m as f64 + 1.0) * eps * abs / fact);
        if v < -slack {
            return Err(Error::Numerical(format!(
                "coefficient {k} = {v:e} is negative beyond round-off ({slack:e})"
            )));
        }
        coeffs.push(v.max(0.0));
    }
    let total = csum(coeffs.iter().copied());
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::Numerical(format!("permanent PMF sums to {total}")));
    }
    coeffs.iter_mut().for_each(|c| *c /= total);
    Ok(PmfPolynomial { coeffs })
}

/// Exact PMF of a sub-model by Ryser's formula.
pub fn pmf_submodel(sub: &SubModel, cap: usize) -> Result<PmfPolynomial> {
    let m = sub.size();
    if m > cap {
        return Err(Error::Capacity(format!(
            "exact PMF of a {m}x{m} model exceeds the cap {cap}; use the montecarlo module"
        )));
    }
    finish_pmf(m, ryser::permanent_poly(sub))
}

/// Exact PMF of `Σ_{i ∈ active ∖ ones} X_{i,σ(i)}` for a uniform bijection `σ`.
pub fn pmf_exact(m: &BernoulliMatrix, sel: &IndexSelection) -> Result<PmfPolynomial> {
    pmf_exact_with_cap(m, sel, DEFAULT_EXACT_CAP)
}

pub fn pmf_exact_with_cap(
    m: &BernoulliMatrix,
    sel: &IndexSelection,
    cap: usize,
) -> Result<PmfPolynomial> {
    pmf_submodel(&select(m, sel)?, cap)
}

/// PMF of `S_n`.
pub fn pmf_full(m: &BernoulliMatrix) -> Result<PmfPolynomial> {
    pmf_exact(m, &IndexSelection::full(m.n()))
}

/// PMF of `S_n^{(j)}` or `S_n^{(j,k)}`.
pub fn pmf_leave_out(m: &BernoulliMatrix, exclude: &[usize]) -> Result<PmfPolynomial> {
    if !(1..=2).contains(&exclude.len()) {
        return Err(Error::Precondition(format!(
            "leave-out takes one or two rows, got {}",
            exclude.len()
        )));
    }
    pmf_exact(m, &IndexSelection::leave_out(m.n(), exclude))
}

/// One-point concentration `c(W) = max_k P(W = k)`.
pub fn concentration(p: &PmfPolynomial) -> f64 {
    p.coeffs.iter().copied().fold(0.0, f64::max)
}

fn argmax(p: &PmfPolynomial) -> usize {
    let c = concentration(p);
    p.coeffs.iter().position(|&v| v == c).unwrap_or(0)
}

/// Where a maximal one-point concentration was attained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationWitness {
    pub deleted_rows: Vec<usize>,
    pub deleted_cols: Vec<usize>,
    pub ones_rows: Vec<usize>,
    pub mass_point: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaReport {
    pub eta1: f64,
    pub eta2: f64,
    pub eta1_witness: ConcentrationWitness,
    pub eta2_witness: ConcentrationWitness,
}

/// `η₁ = max_j c(S_n^{(j)})` and `η₂ = max_{j≠k} c(S_n^{(j,k)})`.
///
/// For `n = 2` the double leave-out is the zero variable, so `η₂ = 1`.
pub fn etas(m: &BernoulliMatrix) -> Result<EtaReport> {
    let n = m.n();
    let best = |sets: Vec<Vec<usize>>| -> Result<(f64, ConcentrationWitness)> {
        let pmfs: Vec<Result<PmfPolynomial>> =
            sets.par_iter().map(|ex| pmf_leave_out(m, ex)).collect();
        let mut out: Option<(f64, ConcentrationWitness)> = None;
        for (ex, pmf) in sets.iter().zip(pmfs) {
            let pmf = pmf?;
            let c = concentration(&pmf);
            if out.as_ref().is_none_or(|(v, _)| c > *v) {
                out = Some((
                    c,
                    ConcentrationWitness {
                        deleted_rows: vec![],
                        deleted_cols: vec![],
                        ones_rows: ex.clone(),
                        mass_point: argmax(&pmf),
                    },
                ));
            }
        }
        Ok(out.expect("at least one leave-out set"))
    };
    let singles: Vec<Vec<usize>> = (0..n).map(|j| vec![j]).collect();
    let pairs: Vec<Vec<usize>> =
        (0..n).flat_map(|j| (j + 1..n).map(move |k| vec![j, k])).collect();
    let (eta1, eta1_witness) = best(singles)?;
    let (eta2, eta2_witness) = best(pairs)?;
    Ok(EtaReport { eta1, eta2, eta1_witness, eta2_witness })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaReport {
    pub value: f64,
    /// False when `n` exceeded the cap and the trivial bound 1 was returned.
    pub exact: bool,
    pub witness: Option<ConcentrationWitness>,
}

fn subsets_one_or_two(pool: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = pool.iter().map(|&b| vec![b]).collect();
    for (i, &a) in pool.iter().enumerate() {
        for &b in &pool[i + 1..] {
            out.push(vec![a, b]);
        }
    }
    out
}

/// κ: the largest one-point concentration of `(T'_{j,r})^B` and
/// `(T''_{j,k,r,s})^B` over every `(j,r)`, `(j,k,r,s)` and `1 ≤ |B| ≤ 2`.
pub fn kappa(m: &BernoulliMatrix) -> Result<KappaReport> {
    kappa_with_cap(m, DEFAULT_KAPPA_CAP)
}

pub fn kappa_with_cap(m: &BernoulliMatrix, cap: usize) -> Result<KappaReport> {
    let n = m.n();
    if n < 4 {
        return Err(Error::Precondition(format!("κ needs n ≥ 4, got {n}")));
    }
    if n > cap {
        return Ok(KappaReport { value: 1.0, exact: false, witness: None });
    }
    let mut jobs: Vec<(Vec<usize>, Vec<usize>, Vec<usize>)> = Vec::new();
    for j in 0..n {
        let pool: Vec<usize> = (0..n).filter(|&i| i != j).collect();
        for r in 0..n {
            for b in subsets_one_or_two(&pool) {
                jobs.push((vec![j], vec![r], b));
            }
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            let pool: Vec<usize> = (0..n).filter(|&i| i != j && i != k).collect();
            let bs = subsets_one_or_two(&pool);
            for r in 0..n {
                for s in r + 1..n {
                    for b in &bs {
                        jobs.push((vec![j, k], vec![r, s], b.clone()));
                    }
                }
            }
        }
    }
    let results: Vec<Result<(f64, usize)>> = jobs
        .par_iter()
        .map(|(rows, cols, ones)| {
            let pmf = pmf_exact(m, &IndexSelection::injection(n, rows, cols, ones))?;
            Ok((concentration(&pmf), argmax(&pmf)))
        })
        .collect();
    let mut best: Option<(f64, ConcentrationWitness)> = None;
    for ((rows, cols, ones), res) in jobs.into_iter().zip(results) {
        let (c, at) = res?;
        if best.as_ref().is_none_or(|(v, _)| c > *v) {
            best = Some((
                c,
                ConcentrationWitness { deleted_rows: rows, deleted_cols: cols, ones_rows: ones, mass_point: at },
            ));
        }
    }
    let (value, witness) = best.expect("n ≥ 4 gives at least one selection");
    Ok(KappaReport { value, exact: true, witness: Some(witness) })
}

/// η₁, η₂ and κ together.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub etas: EtaReport,
    pub kappa: Option<KappaReport>,
}

pub fn concentrations(m: &BernoulliMatrix, kappa_cap: usize) -> Result<ConcentrationReport> {
    let etas = etas(m)?;
    let kappa = if m.n() >= 4 { Some(kappa_with_cap(m, kappa_cap)?) } else { None };
    Ok(ConcentrationReport { etas, kappa })
}

/// True iff the PGF `Σ_k P(W=k) z^k` has only real roots.
pub fn real_rooted(p: &PmfPolynomial) -> Result<bool> {
    is_real_rooted(&p.coeffs)
}

/// Success probabilities `q_1, …, q_m` with `P^W = Be(q_1) * … * Be(q_m)`,
/// recovered from the roots of the PGF. Fails if the PGF is not real-rooted.
pub fn bernoulli_decomposition(p: &PmfPolynomial) -> Result<Vec<f64>> {
    if !real_rooted(p)? {
        return Err(Error::Domain("PGF has non-real roots".into()));
    }
    let prep = roots::prepare(&p.coeffs)?;
    let mut probs = vec![1.0; prep.low_zeros];
    for z in roots::real_roots(&prep) {
        if z > 1e-9 {
            return Err(Error::Domain(format!("PGF has a positive root {z}")));
        }
        probs.push(1.0 / (1.0 - z.min(0.0)));
    }
    probs.extend(std::iter::repeat_n(0.0, prep.high_zeros));
    Ok(probs)
}

/// Rebuilds a PMF from Bernoulli success probabilities.
pub fn from_bernoulli(probs: &[f64]) -> Vec<f64> {
    bernoulli_convolution(probs)
}
