//! Explicit Poisson and `Q₂` approximation bounds for `S_n`, the ε machinery
//! behind the second-order bounds, injection-model bounds, and a report that
//! pairs every bound with the exactly computed distance when one is available.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::check::Check;
use crate::error::{Error, Result};
use crate::exact::{self, concentration, ConcentrationReport};
use crate::matrix::{select, BernoulliMatrix, IndexSelection};
use crate::measures::{
    local_distance, poisson_pmf, q2_measure, tv_distance, wasserstein_distance, PoissonParams,
    DEFAULT_TAIL_TOL,
};
use crate::moments::{self, compute_moments, MomentReport};
use crate::numeric::{csum, min1_four_thirds_sqrt_2_te, min1_sqrt_2_te, one_minus_exp_over, Neumaier};

/// Slack allowed when comparing an exact distance with a bound.
pub const HOLDS_TOL: f64 = 1e-10;

/// Largest `n` for which the `O(n⁶)` λ′/λ″ tables are cross-checked in a report.
pub const LAMBDA_TABLE_CAP: usize = 16;

/// The three algebraically equal forms of the first-order total variation
/// bound (`ε₀`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderForms {
    /// `ratio · (λ − Var + γ′)`.
    pub via_gamma_p: f64,
    /// `ratio · (Σ p̄_{j,·}² + γ″)`.
    pub via_gamma_pp: f64,
    /// `ratio · (Σ p²/n − γ‴)`.
    pub via_gamma_ppp: f64,
}

impl FirstOrderForms {
    pub fn value(&self) -> f64 {
        self.via_gamma_p
    }

    pub fn max_gap(&self) -> f64 {
        let v = [self.via_gamma_p, self.via_gamma_pp, self.via_gamma_ppp];
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    }
}

/// `d_TV(P^{S_n}, Po(λ)) ≤ (1 − e^{−λ})/λ · (λ − Var S_n + γ′)` in its three forms.
pub fn tv_bound_thm1(rep: &MomentReport) -> FirstOrderForms {
    let r = one_minus_exp_over(rep.lambda);
    let n = rep.n as f64;
    FirstOrderForms {
        via_gamma_p: r * (rep.deficit() + rep.gamma_p),
        via_gamma_pp: r * (rep.sum_row_means_sq + rep.gamma_pp),
        via_gamma_ppp: r * (rep.sum_sq / n - rep.gamma_ppp),
    }
}

/// `(A, B)` with `A = λ − Var + γ′` and `B = (n−2)/n (λ − Var) + 2λ²/n`;
/// `A ≤ B ≤ (3 − 2/n) A`.
pub fn lemma_sandwich(rep: &MomentReport) -> (f64, f64) {
    let n = rep.n as f64;
    let a = rep.deficit() + rep.gamma_p;
    let b = (n - 2.0) / n * rep.deficit() + 2.0 * rep.lambda * rep.lambda / n;
    (a, b)
}

/// `(1 − e^{−λ})/λ · B`, the earlier bound that the first-order bound improves.
pub fn tv_bound_bhj(rep: &MomentReport) -> f64 {
    one_minus_exp_over(rep.lambda) * lemma_sandwich(rep).1
}

/// `(3/2)(1 − e^{−λ})/λ · (Σ p̄_{j,·}² + Σ p̄_{·,r}² − (2/(3n²)) Σ p²)`.
pub fn remark_bound(rep: &MomentReport) -> f64 {
    let n = rep.n as f64;
    1.5 * one_minus_exp_over(rep.lambda)
        * (rep.sum_row_means_sq + rep.sum_col_means_sq - 2.0 / (3.0 * n * n) * rep.sum_sq)
}

/// `λ′_{j,r} = (n(λ − p̄_{j,·} − p̄_{·,r}) + p_{j,r})/(n − 1)`.
pub fn lambda_prime(m: &BernoulliMatrix, rep: &MomentReport, j: usize, r: usize) -> f64 {
    let n = rep.n as f64;
    (n * (rep.lambda - rep.row_means[j] - rep.col_means[r]) + m.get(j, r)) / (n - 1.0)
}

/// `λ′_{j,r}` as `(1/(n−1)) Σ_{u≠j} Σ_{v≠r} p_{u,v}`.
pub fn lambda_prime_sum(m: &BernoulliMatrix, j: usize, r: usize) -> f64 {
    let n = m.n();
    let s = csum((0..n).filter(|&u| u != j).flat_map(|u| (0..n).filter(move |&v| v != r).map(move |v| (u, v))).map(|(u, v)| m.get(u, v)));
    s / (n as f64 - 1.0)
}

/// `λ″_{j,k,r,s}` in closed form.
pub fn lambda_double(m: &BernoulliMatrix, rep: &MomentReport, j: usize, k: usize, r: usize, s: usize) -> f64 {
    let n = rep.n as f64;
    let means = rep.row_means[j] + rep.row_means[k] + rep.col_means[r] + rep.col_means[s];
    (n * (rep.lambda - means) + m.get(j, r) + m.get(k, r) + m.get(j, s) + m.get(k, s)) / (n - 2.0)
}

/// `λ″_{j,k,r,s}` as `(1/(n−2)) Σ_{u∉{j,k}} Σ_{v∉{r,s}} p_{u,v}`.
pub fn lambda_double_sum(m: &BernoulliMatrix, j: usize, k: usize, r: usize, s: usize) -> f64 {
    let n = m.n();
    let mut acc = Neumaier::new();
    for u in (0..n).filter(|&u| u != j && u != k) {
        for v in (0..n).filter(|&v| v != r && v != s) {
            acc.add(m.get(u, v));
        }
    }
    acc.value() / (n as f64 - 2.0)
}

/// Extremes of `λ′`, `λ″` and the largest disagreement between their two forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaPrimeReport {
    pub prime_min: f64,
    pub prime_max: f64,
    pub prime_max_gap: f64,
    pub double_min: f64,
    pub double_max: f64,
    pub double_max_gap: f64,
}

/// Evaluates every `λ′_{j,r}` and `λ″_{j,k,r,s}` in both forms (`O(n⁶)`).
pub fn lambda_primes(m: &BernoulliMatrix, rep: &MomentReport) -> Result<LambdaPrimeReport> {
    let n = m.n();
    if n < 3 {
        return Err(Error::Precondition(format!("λ″ needs n ≥ 3, got {n}")));
    }
    let mut out = LambdaPrimeReport {
        prime_min: f64::INFINITY,
        prime_max: f64::NEG_INFINITY,
        prime_max_gap: 0.0,
        double_min: f64::INFINITY,
        double_max: f64::NEG_INFINITY,
        double_max_gap: 0.0,
    };
    for j in 0..n {
        for r in 0..n {
            let c = lambda_prime(m, rep, j, r);
            out.prime_min = out.prime_min.min(c);
            out.prime_max = out.prime_max.max(c);
            out.prime_max_gap = out.prime_max_gap.max((c - lambda_prime_sum(m, j, r)).abs());
        }
    }
    for j in 0..n {
        for k in (0..n).filter(|&k| k != j) {
            for r in 0..n {
                for s in (0..n).filter(|&s| s != r) {
                    let c = lambda_double(m, rep, j, k, r, s);
                    out.double_min = out.double_min.min(c);
                    out.double_max = out.double_max.max(c);
                    out.double_max_gap = out.double_max_gap.max((c - lambda_double_sum(m, j, k, r, s)).abs());
                }
            }
        }
    }
    Ok(out)
}

/// ε₁, ε₂, ε₃, ε and their crude upper bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Epsilons {
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps: f64,
    /// The first-order bound.
    pub eps0: f64,
    pub p_max_row: f64,
    pub p_max_col: f64,
    /// `2(p̄_{max,·} + p̄_{·,max}) Σ p̄_{j,·}²`.
    pub crude1: f64,
    /// `4(p̄_{max,·} + p̄_{·,max}) γ″`.
    pub crude2: f64,
    /// `((1 − e^{−λ})/λ)² ε₃`.
    pub ratio_sq_eps3: f64,
    /// `2n²(n−1)/((n−2)²(n−3)) ε₀²`.
    pub crude3: f64,
}

pub fn epsilons(m: &BernoulliMatrix, rep: &MomentReport) -> Result<Epsilons> {
    let n = m.n();
    if n < 4 {
        return Err(Error::Precondition(format!("the Q₂ bounds need n ≥ 4, got {n}")));
    }
    let nf = n as f64;
    let lambda = rep.lambda;
    let mut e1 = Neumaier::new();
    for j in 0..n {
        for r in 0..n {
            e1.add(rep.row_means[j] * m.get(j, r) * (lambda - lambda_prime(m, rep, j, r)).abs());
        }
    }
    let eps1 = 2.0 / nf * e1.value();
    let e2 = moments::pair_sum(n, |j, k| {
        let (rj, rk) = (m.row(j), m.row(k));
        let mut acc = Neumaier::new();
        for r in 0..n {
            for s in 0..n {
                if r == s {
                    continue;
                }
                let w = (rj[r] - rj[s]).abs() * (rk[r] - rk[s]).abs();
                if w != 0.0 {
                    acc.add(w * (lambda - lambda_double(m, rep, j, k, r, s)).abs());
                }
            }
        }
        acc.value()
    });
    let eps2 = e2 / (nf * nf * (nf - 1.0));
    let inner = (nf - 2.0) / (nf - 1.0) * rep.sum_row_means_sq + ((nf - 1.0) / (nf - 3.0)).sqrt() * rep.gamma_pp;
    let eps3 = 2.0 * nf * nf / ((nf - 2.0) * (nf - 2.0)) * inner * inner;
    let ratio = one_minus_exp_over(lambda);
    let eps = min1_sqrt_2_te(lambda) * (eps1 + eps2) + ratio * eps3;
    let eps0 = tv_bound_thm1(rep).value();
    let p_max_row = rep.row_means.iter().copied().fold(0.0, f64::max);
    let p_max_col = rep.col_means.iter().copied().fold(0.0, f64::max);
    let pm = p_max_row + p_max_col;
    Ok(Epsilons {
        eps1,
        eps2,
        eps3,
        eps,
        eps0,
        p_max_row,
        p_max_col,
        crude1: 2.0 * pm * rep.sum_row_means_sq,
        crude2: 4.0 * pm * rep.gamma_pp,
        ratio_sq_eps3: ratio * ratio * eps3,
        crude3: 2.0 * nf * nf * (nf - 1.0) / ((nf - 2.0).powi(2) * (nf - 3.0)) * eps0 * eps0,
    })
}

/// `d_TV(P^{S_n}, Q₂) ≤ (1 − e^{−λ})/λ · ε`.
pub fn tv_bound_thm2(rep: &MomentReport, e: &Epsilons) -> f64 {
    one_minus_exp_over(rep.lambda) * e.eps
}

/// `d_TV(P^{S_n}, Po(λ)) ≤ min{1, 3/(4λe)}(λ − Var) + (1 − e^{−λ})/λ · ε`.
pub fn tv_bound_cor(rep: &MomentReport, e: &Epsilons) -> f64 {
    (3.0 / (4.0 * rep.lambda * E)).min(1.0) * rep.deficit() + tv_bound_thm2(rep, e)
}

/// The cruder corollary bound obtained from the ε₁, ε₂, ε₃ estimates:
/// `min{1, 3/(4λe)}(λ − Var) + 4ε₀(min{1, √(2/(λe))}(p̄_{max,·} + p̄_{·,max}) + n²(n−1)/(2(n−2)²(n−3)) ε₀)`.
pub fn tv_bound_cor_crude(rep: &MomentReport, e: &Epsilons) -> f64 {
    let n = rep.n as f64;
    let c = n * n * (n - 1.0) / (2.0 * (n - 2.0).powi(2) * (n - 3.0));
    (3.0 / (4.0 * rep.lambda * E)).min(1.0) * rep.deficit()
        + 4.0 * e.eps0 * (min1_sqrt_2_te(rep.lambda) * (e.p_max_row + e.p_max_col) + c * e.eps0)
}

/// Wasserstein and local bounds against `Po(λ)` through η₁, η₂.
pub fn w_loc_bounds_thm3(rep: &MomentReport, eta1: f64, eta2: f64) -> (f64, f64) {
    let w = min1_four_thirds_sqrt_2_te(rep.lambda) * (rep.sum_row_means_sq + rep.gamma_pp);
    let loc = 2.0 * one_minus_exp_over(rep.lambda) * (eta1 * rep.sum_row_means_sq + eta2 * rep.gamma_pp);
    (w, loc)
}

/// Wasserstein and local bounds against `Q₂` through ε and κ.
pub fn w_loc_bounds_thm4(rep: &MomentReport, e: &Epsilons, kappa: f64) -> (f64, f64) {
    let r = one_minus_exp_over(rep.lambda);
    let w = min1_four_thirds_sqrt_2_te(rep.lambda) * e.eps;
    let loc = 2.0 * r * r * (e.eps1 + e.eps2 + kappa * e.eps3);
    (w, loc)
}

/// Wasserstein and local bounds against `Po(λ)` with the explicit first term.
pub fn w_loc_bounds_cor(rep: &MomentReport, e: &Epsilons, kappa: f64) -> (f64, f64) {
    let l = rep.lambda;
    let (w4, loc4) = w_loc_bounds_thm4(rep, e, kappa);
    let w = (1.0 / (2.0 * l * E).sqrt()).min(1.0) * rep.deficit() + w4;
    let loc = (0.5 * (1.5 / (l * E)).powf(1.5)).min(1.0) * rep.deficit() + loc4;
    (w, loc)
}

/// `(1 − e^{−λ})(1 − Var/λ)`, valid for monotone (row or column) matrices.
pub fn tv_bound_monotone(rep: &MomentReport) -> f64 {
    -(-rep.lambda).exp_m1() * (1.0 - rep.var_gamma / rep.lambda)
}

/// `(1/14) min{1, 1/λ}(λ − Var)`, a lower bound for monotone matrices.
pub fn tv_lower_bound_monotone(rep: &MomentReport) -> f64 {
    (1.0 / rep.lambda).min(1.0) * rep.deficit() / 14.0
}

/// Bounds for an injection model `W = Σ_{j∈F} X_{j,ρ(j)}`, `ρ` uniform on
/// bijections `F → G`, approximated by `Po(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InjectionBounds {
    pub size: usize,
    pub t: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub tv: f64,
    pub w: f64,
    /// Needs the exact concentrations below; absent beyond the exact cap.
    pub loc: Option<f64>,
    pub max_c_single: Option<f64>,
    pub max_c_pair: Option<f64>,
}

pub fn injection_bounds(m: &BernoulliMatrix, sel: &IndexSelection, t: f64, exact_cap: usize) -> Result<InjectionBounds> {
    if !sel.ones_rows.is_empty() {
        return Err(Error::Precondition("injection bounds need a selection without ones rows".into()));
    }
    let sub = select(m, sel)?;
    let size = sub.size();
    if size < 2 {
        return Err(Error::Precondition(format!("injection bounds need |F| ≥ 2, got {size}")));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let rows: Vec<&Vec<f64>> = sub.rows.iter().map(|r| r.as_ref().expect("no ones rows")).collect();
    let mf = size as f64;
    let means: Vec<f64> = rows.iter().map(|r| csum(r.iter().copied()) / mf).collect();
    let mu = csum(means.iter().copied());
    let alpha = csum(means.iter().map(|x| x * x));
    let mut acc = Neumaier::new();
    for j in 0..size {
        for k in (0..size).filter(|&k| k != j) {
            for r in 0..size {
                for s in (0..size).filter(|&s| s != r) {
                    acc.add((rows[j][r] - rows[j][s]).abs() * (rows[k][r] - rows[k][s]).abs());
                }
            }
        }
    }
    let beta = acc.value() / (2.0 * mf * mf * (mf - 1.0));
    let ratio = one_minus_exp_over(t);
    let gap = (t - mu).abs();
    let tv = gap * min1_sqrt_2_te(t) + ratio * (alpha + beta);
    let w = gap + min1_four_thirds_sqrt_2_te(t) * (alpha + beta);
    let (mut loc, mut c1, mut c2) = (None, None, None);
    if size <= exact_cap {
        let leave = |ones: &[usize]| -> Result<f64> {
            let mut s = sel.clone();
            s.ones_rows = ones.to_vec();
            s.ones_rows.sort_unstable();
            Ok(concentration(&exact::pmf_exact_with_cap(m, &s, exact_cap)?))
        };
        let f = &sel.active_rows;
        let mut best1 = 0.0f64;
        let mut best2 = 0.0f64;
        for (a, &j) in f.iter().enumerate() {
            best1 = best1.max(leave(&[j])?);
            for &k in &f[a + 1..] {
                best2 = best2.max(leave(&[j, k])?);
            }
        }
        loc = Some(2.0 * ratio * (gap + best1 * alpha + best2 * beta));
        c1 = Some(best1);
        c2 = Some(best2);
    }
    Ok(InjectionBounds { size, t, mu, alpha, beta, tv, w, loc, max_c_single: c1, max_c_pair: c2 })
}

/// Exact TV, Wasserstein and local distances of `P^{S_n}` to `Po(λ)` and `Q₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactDistances {
    pub tv_po: f64,
    pub w_po: f64,
    pub loc_po: f64,
    pub tv_q2: f64,
    pub w_q2: f64,
    pub loc_q2: f64,
    /// Largest truncation error among the six values.
    pub truncation_error: f64,
}

pub fn exact_distances_from_pmf(pmf: &exact::PmfPolynomial, rep: &MomentReport, tail_tol: f64) -> Result<ExactDistances> {
    let p = pmf.to_signed();
    let params = PoissonParams::with_tail_tol(rep.lambda, tail_tol);
    let po = poisson_pmf(&params)?;
    let q2 = q2_measure(rep.lambda, rep.var_gamma, &params)?;
    let tv_po = tv_distance(&p, &po);
    let w_po = wasserstein_distance(&p, &po)?;
    let loc_po = local_distance(&p, &po);
    let tv_q2 = tv_distance(&p, &q2);
    let w_q2 = wasserstein_distance(&p, &q2)?;
    let loc_q2 = local_distance(&p, &q2);
    let err = [tv_po, w_po, loc_po, tv_q2, w_q2, loc_q2]
        .iter()
        .map(|n| n.truncation_error)
        .fold(0.0, f64::max);
    Ok(ExactDistances {
        tv_po: tv_po.value,
        w_po: w_po.value,
        loc_po: loc_po.value,
        tv_q2: tv_q2.value,
        w_q2: w_q2.value,
        loc_q2: loc_q2.value,
        truncation_error: err,
    })
}

/// `LHS / bracket` for one of the asymptotic-expansion inequalities with an
/// unspecified constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioEntry {
    pub lhs: f64,
    pub bracket: f64,
    pub ratio: Option<f64>,
    /// Bracket zero while the left-hand side is not.
    pub anomaly: bool,
}

impl RatioEntry {
    fn new(lhs: f64, bracket: f64) -> Self {
        if bracket > 0.0 {
            Self { lhs, bracket, ratio: Some(lhs / bracket), anomaly: false }
        } else {
            Self { lhs, bracket, ratio: None, anomaly: lhs > 1e-12 }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRatios {
    pub tv: RatioEntry,
    pub w: RatioEntry,
    pub loc: RatioEntry,
}

impl EmpiricalRatios {
    pub fn max_ratio(&self) -> Option<f64> {
        [self.tv, self.w, self.loc].iter().filter_map(|r| r.ratio).reduce(f64::max)
    }

    pub fn any_anomaly(&self) -> bool {
        self.tv.anomaly || self.w.anomaly || self.loc.anomaly
    }
}

/// Implied constants of the three leading-term expansions. Never asserted.
pub fn empirical_ratio_report(rep: &MomentReport, e: &Epsilons, kappa: f64, d: &ExactDistances) -> EmpiricalRatios {
    let l = rep.lambda;
    let dv = rep.deficit();
    let inv = (1.0 / l).min(1.0);
    let tv_lead = dv / ((2.0 * PI * E).sqrt() * l);
    let w_lead = dv / (2.0 * PI * l).sqrt();
    let loc_lead = dv / (2.0 * (2.0 * PI).sqrt() * l.powf(1.5));
    let e123 = e.eps1 + e.eps2 + kappa * e.eps3;
    EmpiricalRatios {
        tv: RatioEntry::new((d.tv_po - tv_lead).abs(), inv * (dv / l + e.eps)),
        w: RatioEntry::new((d.w_po - w_lead).abs(), (1.0 / l.sqrt()).min(1.0) * (dv / l.sqrt() + e.eps)),
        loc: RatioEntry::new((d.loc_po - loc_lead).abs(), inv * (dv / l.powf(1.5) + inv * e123)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// `distance ≤ value`.
    Upper,
    /// `value ≤ distance`.
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub kind: BoundKind,
    pub value: f64,
    pub distance_exact: Option<f64>,
    pub holds: Option<bool>,
    /// Value at or above the largest possible distance (1 for TV and local).
    pub trivial: bool,
    pub components: BTreeMap<String, f64>,
}

impl BoundEntry {
    fn new(name: &str, kind: BoundKind, value: f64, distance: Option<f64>, cap: Option<f64>) -> Self {
        let holds = distance.map(|d| match kind {
            BoundKind::Upper => d <= value + HOLDS_TOL,
            BoundKind::Lower => value <= d + HOLDS_TOL,
        });
        Self {
            name: name.into(),
            kind,
            value,
            distance_exact: distance,
            holds,
            trivial: kind == BoundKind::Upper && cap.is_some_and(|c| value >= c),
            components: BTreeMap::new(),
        }
    }

    fn with(mut self, items: &[(&str, f64)]) -> Self {
        for (k, v) in items {
            self.components.insert((*k).to_string(), *v);
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixMeta {
    pub n: usize,
    pub lambda: f64,
    pub var: f64,
    pub exact_distribution: bool,
    pub kappa_exact: Option<bool>,
    pub decreasing_rows: bool,
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bounds: Vec<BoundEntry>,
    /// Identities and sandwich inequalities checked on the way.
    pub checks: Vec<Check>,
    pub empirical_ratios: Option<EmpiricalRatios>,
    pub matrix_meta: MatrixMeta,
    pub seed: Option<u64>,
}

impl BoundReport {
    /// Entries whose exact distance violates the bound.
    pub fn violations(&self) -> Vec<&BoundEntry> {
        self.bounds.iter().filter(|b| b.holds == Some(false)).collect()
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }

    pub fn get(&self, name: &str) -> Option<&BoundEntry> {
        self.bounds.iter().find(|b| b.name == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundOptions {
    /// Largest `n` for which the exact PMF (and hence exact distances) is computed.
    pub exact_cap: usize,
    /// Largest `n` for which η₁, η₂ are computed (`n(n+1)/2` permanents).
    pub eta_cap: usize,
    /// Largest `n` for which κ is computed exactly.
    pub kappa_cap: usize,
    pub tail_tol: f64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self { exact_cap: 16, eta_cap: 12, kappa_cap: exact::DEFAULT_KAPPA_CAP, tail_tol: DEFAULT_TAIL_TOL }
    }
}

/// Computes every bound applicable to `m` and, within the caps, the exact
/// distances they control.
pub fn bound_report(m: &BernoulliMatrix, opts: &BoundOptions, seed: Option<u64>) -> Result<BoundReport> {
    let n = m.n();
    let rep = compute_moments(m);
    let flags = moments::monotonicity_flags(m);
    let monotone = flags.decreasing_rows || flags.increasing_rows || flags.decreasing_cols || flags.increasing_cols;
    let pmf = if n <= opts.exact_cap { Some(exact::pmf_exact_with_cap(m, &IndexSelection::full(n), opts.exact_cap)?) } else { None };
    let dist = pmf.as_ref().map(|p| exact_distances_from_pmf(p, &rep, opts.tail_tol)).transpose()?;
    let conc: Option<ConcentrationReport> = if n <= opts.eta_cap.min(opts.exact_cap) {
        Some(exact::concentrations(m, opts.kappa_cap.min(opts.exact_cap))?)
    } else {
        None
    };
    let tv_po = dist.map(|d| d.tv_po);
    let w_po = dist.map(|d| d.w_po);
    let loc_po = dist.map(|d| d.loc_po);
    let one = Some(1.0);

    let mut bounds = Vec::new();
    let mut checks = Vec::new();
    let t1 = tv_bound_thm1(&rep);
    let (a, b) = lemma_sandwich(&rep);
    let nf = n as f64;
    checks.push(Check::le("first-order forms agree", t1.max_gap(), 1e-12, 0.0));
    checks.push(Check::le("A ≤ B", a, b, 1e-12));
    checks.push(Check::le("B ≤ (3 − 2/n)A", b, (3.0 - 2.0 / nf) * a, 1e-12));
    checks.push(Check::le("first-order ≤ BHJ", t1.value(), tv_bound_bhj(&rep), 1e-12));
    checks.push(Check::le("first-order ≤ 1 − e^{−λ}", t1.value(), -(-rep.lambda).exp_m1(), 1e-12));
    checks.push(Check::le("BHJ ≤ remark form", tv_bound_bhj(&rep), remark_bound(&rep), 1e-12));
    checks.push(Check::le("λ(1 − m) ≤ Var", rep.lambda * (1.0 - rep.m), rep.var_gamma, 1e-12));
    checks.push(Check::le("Var ≤ λ", rep.var_gamma, rep.lambda, 1e-12));
    checks.push(Check::le("m ≤ min{λ, 2n/(n−1)}", rep.m, rep.lambda.min(2.0 * nf / (nf - 1.0)), 1e-12));
    let (l, r) = moments::gamma_prime_variance_bounds(m, &rep);
    checks.push(Check::le("γ′ ≤ min{L, R}", rep.gamma_p, l.min(r), 1e-12));
    checks.push(Check::le("γ′ ≤ product form", rep.gamma_p, moments::gamma_prime_product_bound(m), 1e-12));

    bounds.push(
        BoundEntry::new("thm1_tv", BoundKind::Upper, t1.value(), tv_po, one)
            .with(&[("A", a), ("gamma_p", rep.gamma_p), ("gamma_pp", rep.gamma_pp), ("gamma_ppp", rep.gamma_ppp)]),
    );
    bounds.push(BoundEntry::new("bhj_tv", BoundKind::Upper, tv_bound_bhj(&rep), tv_po, one).with(&[("A", a), ("B", b)]));
    bounds.push(BoundEntry::new("remark_tv", BoundKind::Upper, remark_bound(&rep), tv_po, one));
    if monotone {
        bounds.push(BoundEntry::new("monotone_tv", BoundKind::Upper, tv_bound_monotone(&rep), tv_po, one));
        bounds.push(BoundEntry::new("monotone_tv_lower", BoundKind::Lower, tv_lower_bound_monotone(&rep), tv_po, None));
    }
    let (w3, _) = w_loc_bounds_thm3(&rep, 1.0, 1.0);
    bounds.push(BoundEntry::new("thm3_w", BoundKind::Upper, w3, w_po, None));
    if let Some(c) = &conc {
        let (_, loc3) = w_loc_bounds_thm3(&rep, c.etas.eta1, c.etas.eta2);
        checks.push(Check::le("η₁ ≤ 2η₂", c.etas.eta1, 2.0 * c.etas.eta2, 1e-12));
        bounds.push(
            BoundEntry::new("thm3_loc", BoundKind::Upper, loc3, loc_po, one)
                .with(&[("eta1", c.etas.eta1), ("eta2", c.etas.eta2)]),
        );
    }

    let mut ratios = None;
    let mut kappa_exact = None;
    if n >= 4 {
        let e = epsilons(m, &rep)?;
        checks.push(Check::le("ε₁ ≤ crude bound", e.eps1, e.crude1, 1e-12));
        checks.push(Check::le("ε₂ ≤ crude bound", e.eps2, e.crude2, 1e-12));
        checks.push(Check::le("ratio²·ε₃ ≤ crude bound", e.ratio_sq_eps3, e.crude3, 1e-12));
        let mut eps_items = vec![("eps", e.eps), ("eps0", e.eps0), ("eps1", e.eps1), ("eps2", e.eps2), ("eps3", e.eps3)];
        if n <= LAMBDA_TABLE_CAP {
            let lp = lambda_primes(m, &rep)?;
            checks.push(Check::le("λ′ forms agree", lp.prime_max_gap, 1e-12, 0.0));
            checks.push(Check::le("λ″ forms agree", lp.double_max_gap, 1e-12, 0.0));
            eps_items.extend([
                ("lambda_prime_min", lp.prime_min),
                ("lambda_prime_max", lp.prime_max),
                ("lambda_double_min", lp.double_min),
                ("lambda_double_max", lp.double_max),
            ]);
        }
        let tv_q2 = dist.map(|d| d.tv_q2);
        bounds.push(BoundEntry::new("thm2_tv_q2", BoundKind::Upper, tv_bound_thm2(&rep, &e), tv_q2, None).with(&eps_items));
        bounds.push(BoundEntry::new("cor_tv", BoundKind::Upper, tv_bound_cor(&rep, &e), tv_po, one).with(&eps_items));
        bounds.push(BoundEntry::new("cor_tv_crude", BoundKind::Upper, tv_bound_cor_crude(&rep, &e), tv_po, one));
        let kappa = conc.as_ref().and_then(|c| c.kappa.clone());
        kappa_exact = kappa.as_ref().map(|k| k.exact);
        let kv = kappa.as_ref().map_or(1.0, |k| k.value);
        let (w4, loc4) = w_loc_bounds_thm4(&rep, &e, kv);
        let (wc, locc) = w_loc_bounds_cor(&rep, &e, kv);
        let k_items = [("kappa", kv), ("kappa_exact", kappa.as_ref().map_or(0.0, |k| k.exact as u8 as f64))];
        bounds.push(BoundEntry::new("thm4_w_q2", BoundKind::Upper, w4, dist.map(|d| d.w_q2), None).with(&eps_items));
        bounds.push(BoundEntry::new("thm4_loc_q2", BoundKind::Upper, loc4, dist.map(|d| d.loc_q2), None).with(&k_items));
        bounds.push(BoundEntry::new("cor_w", BoundKind::Upper, wc, w_po, None).with(&eps_items));
        bounds.push(BoundEntry::new("cor_loc", BoundKind::Upper, locc, loc_po, one).with(&k_items));
        if let Some(d) = &dist {
            ratios = Some(empirical_ratio_report(&rep, &e, kv, d));
        }
    }

    Ok(BoundReport {
        bounds,
        checks,
        empirical_ratios: ratios,
        matrix_meta: MatrixMeta {
            n,
            lambda: rep.lambda,
            var: rep.var_gamma,
            exact_distribution: dist.is_some(),
            kappa_exact,
            decreasing_rows: flags.decreasing_rows,
            monotone,
        },
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn first_order_examples() {
        let (n, p) = (6, 0.3);
        let rep = compute_moments(&BernoulliMatrix::constant(n, p).unwrap());
        let t1 = tv_bound_thm1(&rep);
        close(t1.value(), -(-1.8f64).exp_m1() * p, 1e-14);
        assert!(t1.max_gap() < 1e-14);
        let nf = n as f64;
        close(tv_bound_bhj(&rep), (3.0 - 2.0 / nf) * t1.value(), 1e-14);
        let (a, b) = lemma_sandwich(&rep);
        close(b, (3.0 - 2.0 / nf) * a, 1e-14);

        let id = compute_moments(&BernoulliMatrix::identity(5).unwrap());
        close(tv_bound_thm1(&id).value(), -(-1.0f64).exp_m1() * 0.4, 1e-14);

        let (d, blocks) = (2usize, 4usize);
        let mm = BernoulliMatrix::matching_uniform(d, blocks).unwrap();
        let rep = compute_moments(&mm);
        let (df, nf) = (d as f64, (d * blocks) as f64);
        let closed = -(-df).exp_m1() * ((3.0 * df - 1.0) / nf - (df - 1.0) * (2.0 * df - 1.0) / (nf * (nf - 1.0)));
        close(tv_bound_thm1(&rep).value(), closed, 1e-13);
    }

    #[test]
    fn all_ones_sandwich() {
        let n = 5;
        let rep = compute_moments(&BernoulliMatrix::constant(n, 1.0).unwrap());
        let (a, b) = lemma_sandwich(&rep);
        close(a, n as f64, 1e-12);
        close(b, 3.0 * n as f64 - 2.0, 1e-12);
        assert!(remark_bound(&rep) >= tv_bound_bhj(&rep));
    }

    #[test]
    fn lambda_prime_forms() {
        let id = BernoulliMatrix::identity(3).unwrap();
        let rep = compute_moments(&id);
        close(lambda_prime(&id, &rep, 0, 0), 1.0, 1e-15);
        close(lambda_prime_sum(&id, 0, 0), 1.0, 1e-15);
        let m = BernoulliMatrix::random(6, 9, false).unwrap();
        let lp = lambda_primes(&m, &compute_moments(&m)).unwrap();
        assert!(lp.prime_max_gap < 1e-13 && lp.double_max_gap < 1e-13);
    }

    #[test]
    fn epsilons_need_four() {
        let m = BernoulliMatrix::identity(3).unwrap();
        assert!(matches!(epsilons(&m, &compute_moments(&m)), Err(Error::Precondition(_))));
    }

    #[test]
    fn constant_crude_bound() {
        let (n, p) = (7, 0.2);
        let m = BernoulliMatrix::constant(n, p).unwrap();
        let e = epsilons(&m, &compute_moments(&m)).unwrap();
        assert!(e.eps1 <= 4.0 * n as f64 * p.powi(3) + 1e-14);
        assert_eq!(e.eps2, 0.0);
    }

    #[test]
    fn report_holds_for_small_families() {
        for m in [
            BernoulliMatrix::constant(6, 0.3).unwrap(),
            BernoulliMatrix::identity(5).unwrap(),
            BernoulliMatrix::constant(4, 1.0).unwrap(),
            BernoulliMatrix::matching_uniform(2, 3).unwrap(),
            BernoulliMatrix::random(6, 2, true).unwrap(),
        ] {
            let r = bound_report(&m, &BoundOptions::default(), None).unwrap();
            assert!(r.violations().is_empty(), "{:?}", r.violations());
            assert!(r.failed_checks().is_empty(), "{:?}", r.failed_checks());
        }
    }

    #[test]
    fn injection_full_selection_is_first_order_form() {
        let m = BernoulliMatrix::random(5, 4, false).unwrap();
        let rep = compute_moments(&m);
        let inj = injection_bounds(&m, &IndexSelection::full(5), rep.lambda, 20).unwrap();
        close(inj.mu, rep.lambda, 1e-14);
        close(inj.tv, tv_bound_thm1(&rep).via_gamma_pp, 1e-14);
    }

    #[test]
    fn injection_prime_selection_uses_lambda_prime() {
        let m = BernoulliMatrix::random(6, 5, false).unwrap();
        let rep = compute_moments(&m);
        let sel = IndexSelection::injection(6, &[1], &[4], &[]);
        let inj = injection_bounds(&m, &sel, rep.lambda, 20).unwrap();
        close(inj.mu, lambda_prime(&m, &rep, 1, 4), 1e-14);
    }

    #[test]
    fn injection_two_by_two_against_enumeration() {
        let m = BernoulliMatrix::from_rows(vec![vec![0.9, 0.2, 0.4], vec![0.1, 0.6, 0.3], vec![0.5, 0.7, 0.8]]).unwrap();
        let sel = IndexSelection::injection(3, &[2], &[0], &[]);
        let sub = select(&m, &sel).unwrap();
        let w = exact::PmfPolynomial::new(exact::brute_force_pmf(&sub)).unwrap();
        for t in [0.3, 1.0, 2.5] {
            let inj = injection_bounds(&m, &sel, t, 20).unwrap();
            let po = poisson_pmf(&PoissonParams::new(t)).unwrap();
            let ws = w.to_signed();
            assert!(tv_distance(&ws, &po).value <= inj.tv + 1e-12);
            assert!(wasserstein_distance(&ws, &po).unwrap().value <= inj.w + 1e-12);
            assert!(local_distance(&ws, &po).value <= inj.loc.unwrap() + 1e-12);
        }
        let bad = IndexSelection::injection(3, &[0, 1], &[0, 1], &[]);
        assert!(matches!(injection_bounds(&m, &bad, 1.0, 20), Err(Error::Precondition(_))));
    }
}
