//! Solutions of the Poisson Stein equation `f(m) = t g(m+1) − m g(m)`,
//! `g(0) = 0`, and numerical checks of the identities built on them.
//!
//! `g` is tabulated with the forward recursion below the mean and the backward
//! (tail) recursion above it; each is contractive in its own range.

use serde::{Deserialize, Serialize};

pub use crate::check::Check;
use crate::error::{Error, Result};
use crate::matrix::BernoulliMatrix;
use crate::measures::{diff_convolve, poisson_pmf, PoissonParams, DEFAULT_TAIL_TOL};
use crate::numeric::{bernoulli_convolution, csum, min1_four_thirds_sqrt_2_te, min1_sqrt_2_te, one_minus_exp_over};

/// Extra points tabulated beyond the Poisson truncation and the support of `h`.
pub const TABULATION_MARGIN: usize = 30;

/// `h(k) = values[k]` for `k < values.len()`, `h(k) = tail` beyond.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub values: Vec<f64>,
    pub tail: f64,
}

impl TestFunction {
    pub fn new(values: Vec<f64>, tail: f64) -> Self {
        Self { values, tail }
    }

    /// `1_A` for a finite set `A`.
    pub fn indicator(set: &[usize]) -> Self {
        let len = set.iter().max().map_or(0, |&a| a + 1);
        let mut values = vec![0.0; len];
        for &a in set {
            values[a] = 1.0;
        }
        Self { values, tail: 0.0 }
    }

    /// `1_{ℤ₊ ∖ {0, …, start−1}}`.
    pub fn indicator_from(start: usize) -> Self {
        Self { values: vec![0.0; start], tail: 1.0 }
    }

    pub fn point(a: usize) -> Self {
        Self::indicator(&[a])
    }

    pub fn constant(c: f64) -> Self {
        Self { values: Vec::new(), tail: c }
    }

    pub fn eval(&self, k: usize) -> f64 {
        self.values.get(k).copied().unwrap_or(self.tail)
    }

    /// Largest `|h(k+1) − h(k)|`.
    pub fn lipschitz_constant(&self) -> f64 {
        (0..=self.values.len()).map(|k| (self.eval(k + 1) - self.eval(k)).abs()).fold(0.0, f64::max)
    }
}

/// `g` solving the Stein equation for `f = h − E h(Y)`, `Y ~ Po(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinSolution {
    pub t: f64,
    /// `f(0), …, f(M)`.
    pub f: Vec<f64>,
    /// `g(0), …, g(M+1)`.
    pub g: Vec<f64>,
    /// `E h(Y)`.
    pub mean_h: f64,
}

impl SteinSolution {
    /// Largest tabulated `m`.
    pub fn range(&self) -> usize {
        self.f.len() - 1
    }

    /// `Δg(m) = g(m+1) − g(m)` for `m ≤ M`.
    pub fn delta(&self, m: usize) -> f64 {
        self.g[m + 1] - self.g[m]
    }

    /// `max_m |f(m) − (t g(m+1) − m g(m))|`.
    pub fn residual(&self) -> f64 {
        (0..self.f.len())
            .map(|m| (self.f[m] - (self.t * self.g[m + 1] - m as f64 * self.g[m])).abs())
            .fold(0.0, f64::max)
    }

    /// `sup_{m ≥ 1} |g(m)|`.
    pub fn sup_g(&self) -> f64 {
        self.g[1..].iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// `sup_{m ≥ 1} |Δg(m)|`.
    pub fn sup_delta(&self) -> f64 {
        (1..self.f.len()).map(|m| self.delta(m).abs()).fold(0.0, f64::max)
    }
}

/// Tabulation range for a given `t` and test function.
pub fn tabulation_range(t: f64, h: &TestFunction) -> Result<usize> {
    let po = poisson_pmf(&PoissonParams::new(t))?;
    Ok(po.end().max(h.values.len()) + TABULATION_MARGIN)
}

fn prepare(t: f64, h: &TestFunction) -> Result<(usize, Vec<f64>, f64, f64)> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("Stein parameter t must be positive, got {t}")));
    }
    let po = poisson_pmf(&PoissonParams::new(t))?;
    let len = h.values.len();
    let head = csum((0..len).map(|k| po.weight(k) * h.eval(k)));
    let head_mass = csum((0..len).map(|k| po.weight(k)));
    let mean_h = head + h.tail * (1.0 - head_mass);
    let big_m = po.end().max(len) + TABULATION_MARGIN;
    let f: Vec<f64> = (0..=big_m + 1).map(|k| h.eval(k) - mean_h).collect();
    let tail_f = h.tail - mean_h;
    Ok((big_m, f, mean_h, tail_f))
}

/// `Σ_{j>m} po(j)/po(m) = t/(m+1) + t²/((m+1)(m+2)) + …`.
fn tail_ratio_sum(t: f64, m: usize) -> f64 {
    let mut term = 1.0;
    let mut acc = 0.0;
    let mut i = m + 1;
    loop {
        term *= t / i as f64;
        acc += term;
        if term <= 1e-18 * acc || term == 0.0 {
            return acc;
        }
        i += 1;
    }
}

/// `g(m+1)` for every `m ≤ M` by the forward recursion
/// `F(m) = f(m) + (m/t) F(m−1)`, `g(m+1) = F(m)/t`.
fn forward(t: f64, f: &[f64], big_m: usize) -> Vec<f64> {
    let mut g = vec![0.0; big_m + 2];
    let mut acc = 0.0;
    for m in 0..=big_m {
        acc = f[m] + m as f64 / t * acc;
        g[m + 1] = acc / t;
    }
    g
}

/// `g(m+1)` for every `m ≤ M` by the backward recursion
/// `S(m) = (t/(m+1))(f(m+1) + S(m+1))`, `g(m+1) = −S(m)/t`, seeded with the
/// exact tail of a function that is constant beyond `M`.
fn backward(t: f64, f: &[f64], big_m: usize, tail_f: f64) -> Vec<f64> {
    let mut g = vec![0.0; big_m + 2];
    let mut s = tail_f * tail_ratio_sum(t, big_m);
    g[big_m + 1] = -s / t;
    for m in (0..big_m).rev() {
        s = t / (m as f64 + 1.0) * (f[m + 1] + s);
        g[m + 1] = -s / t;
    }
    g
}

/// Solves the Stein equation for `h`, using the forward form for `m < t` and
/// the backward form for `m ≥ t`.
pub fn stein_solve(t: f64, h: &TestFunction) -> Result<SteinSolution> {
    let (big_m, f, mean_h, tail_f) = prepare(t, h)?;
    let fw = forward(t, &f, big_m);
    let bw = backward(t, &f, big_m, tail_f);
    let g = (0..=big_m + 1)
        .map(|k| if k == 0 { 0.0 } else if ((k - 1) as f64) < t { fw[k] } else { bw[k] })
        .collect();
    Ok(SteinSolution { t, f: f[..=big_m].to_vec(), g, mean_h })
}

/// Largest difference between the forward and backward forms over
/// `|m − t| ≤ 3√t + 2`, where both are accurate.
pub fn forward_backward_gap(t: f64, h: &TestFunction) -> Result<f64> {
    let (big_m, f, _, tail_f) = prepare(t, h)?;
    let fw = forward(t, &f, big_m);
    let bw = backward(t, &f, big_m, tail_f);
    let w = 3.0 * t.sqrt() + 2.0;
    let lo = (t - w).max(0.0) as usize;
    let hi = ((t + w) as usize).min(big_m);
    Ok((lo..=hi).map(|m| (fw[m + 1] - bw[m + 1]).abs()).fold(0.0, f64::max))
}

/// Which family of test functions a bound applies to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TestKind {
    Set,
    Lipschitz,
    Point(usize),
}

/// The sup-norm bounds on `g` and `Δg` for one `(t, h)` pair.
pub fn g_bound_checks(t: f64, h: &TestFunction, kind: &TestKind) -> Result<Vec<Check>> {
    const SLACK: f64 = 1e-12;
    let sol = stein_solve(t, h)?;
    let ratio = one_minus_exp_over(t);
    let mut out = vec![Check::le("stein residual", sol.residual(), 1e-10, 0.0)];
    match kind {
        TestKind::Set => {
            out.push(Check::le("set: sup|g|", sol.sup_g(), min1_sqrt_2_te(t), SLACK));
            out.push(Check::le("set: sup|Δg|", sol.sup_delta(), ratio, SLACK));
        }
        TestKind::Lipschitz => {
            out.push(Check::le("lipschitz: sup|g|", sol.sup_g(), 1.0, SLACK));
            out.push(Check::le("lipschitz: sup|Δg|", sol.sup_delta(), min1_four_thirds_sqrt_2_te(t), SLACK));
        }
        TestKind::Point(_) => {
            out.push(Check::le("point: sup|g|", sol.sup_g(), 2.0 * ratio, SLACK));
            out.push(Check::le("set: sup|g|", sol.sup_g(), min1_sqrt_2_te(t), SLACK));
            out.push(Check::le("set: sup|Δg|", sol.sup_delta(), ratio, SLACK));
        }
    }
    Ok(out)
}

/// `E|Δg_{t,{a}}(Z)| ≤ min{1, 2c(Z)}(1 − e^{−t})/t` for a PMF of `Z`.
pub fn point_expectation_check(t: f64, a: usize, pmf: &[f64]) -> Result<Check> {
    let sol = stein_solve(t, &TestFunction::point(a))?;
    if pmf.len() > sol.range() + 1 {
        return Err(Error::Capacity(format!(
            "PMF of length {} exceeds the Stein tabulation range {}",
            pmf.len(),
            sol.range()
        )));
    }
    let lhs = csum(pmf.iter().enumerate().map(|(k, p)| p * sol.delta(k).abs()));
    let c = pmf.iter().copied().fold(0.0, f64::max);
    Ok(Check::le("point: E|Δg(Z)|", lhs, (2.0 * c).min(1.0) * one_minus_exp_over(t), 1e-12))
}

/// `(Σ_{m≥0} |Δg_{t,{a}}(m)|, 2Δg_{t,{a}}(a))`.
///
/// Beyond the tabulation range `f` is the constant `−po(a, t)`, so `g` decays
/// monotonically (like `1/m`) to zero there and the remaining sum is exactly
/// `|g(M+1)|`.
pub fn point_difference_identity(t: f64, a: usize) -> Result<(f64, f64)> {
    let sol = stein_solve(t, &TestFunction::point(a))?;
    let head = csum((0..=sol.range()).map(|m| sol.delta(m).abs()));
    let lhs = head + sol.g[sol.range() + 1].abs();
    Ok((lhs, 2.0 * sol.delta(a)))
}

/// The three sides of `E(μh(W+1) − Wh(W)) = D₁ + D₂`, by enumerating every
/// permutation of the full model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropIdentity {
    pub lhs: f64,
    pub d1: f64,
    pub d2: f64,
}

impl PropIdentity {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.d1 - self.d2).abs()
    }
}

/// Largest `n` handled by [`prop_identity`].
pub const PROP_IDENTITY_CAP: usize = 6;

fn expect_on(pmf: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    csum(pmf.iter().enumerate().map(|(k, p)| p * f(k)))
}

pub fn prop_identity(m: &BernoulliMatrix, h: &TestFunction) -> Result<PropIdentity> {
    let n = m.n();
    if n > PROP_IDENTITY_CAP {
        return Err(Error::Capacity(format!(
            "permutation enumeration is limited to n ≤ {PROP_IDENTITY_CAP}, got {n}"
        )));
    }
    let nf = n as f64;
    let row_mean: Vec<f64> = (0..n).map(|j| csum(m.row(j).iter().copied()) / nf).collect();
    let mu = csum(row_mean.iter().copied());
    let hv = |k: usize| h.eval(k);
    let dh = |k: usize| h.eval(k + 1) - h.eval(k);
    let (mut lhs, mut d1, mut d2) = (Vec::new(), Vec::new(), Vec::new());
    crate::exact::for_each_permutation(n, |rho| {
        let probs: Vec<f64> = (0..n).map(|j| m.get(j, rho[j])).collect();
        let w = bernoulli_convolution(&probs);
        lhs.push(expect_on(&w, |k| mu * hv(k + 1) - k as f64 * hv(k)));
        for j in 0..n {
            let rest: Vec<f64> = (0..n).filter(|&i| i != j).map(|i| probs[i]).collect();
            let wj = bernoulli_convolution(&rest);
            d1.push(row_mean[j] * probs[j] * expect_on(&wj, |k| dh(k + 1)));
            for k in 0..n {
                if k == j {
                    continue;
                }
                let coef = (m.get(j, rho[j]) - m.get(j, rho[k])) * (m.get(k, rho[j]) - m.get(k, rho[k]));
                if coef == 0.0 {
                    continue;
                }
                let rest: Vec<f64> = (0..n).filter(|&i| i != j && i != k).map(|i| probs[i]).collect();
                let wjk = bernoulli_convolution(&rest);
                d2.push(coef / (2.0 * nf) * expect_on(&wjk, |x| dh(x + 1)));
            }
        }
    });
    let perms = crate::numeric::factorial(n);
    Ok(PropIdentity {
        lhs: csum(lhs) / perms,
        d1: csum(d1) / perms,
        d2: csum(d2) / perms,
    })
}

/// `(∫h d((δ₁−δ₀)^{*2} * Po(t)), −2E Δg(Y+1))`.
pub fn q2_stein_link(t: f64, h: &TestFunction) -> Result<(f64, f64)> {
    let po = poisson_pmf(&PoissonParams::with_tail_tol(t, DEFAULT_TAIL_TOL))?;
    let d = diff_convolve(&po, 2);
    let lhs = csum((d.offset..d.end()).map(|k| d.weight(k) * h.eval(k)));
    let sol = stein_solve(t, h)?;
    let rhs = -2.0 * csum((0..po.end()).map(|k| po.weight(k) * sol.delta(k + 1)));
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_functions_give_zero() {
        for h in [TestFunction::indicator(&[]), TestFunction::constant(1.0), TestFunction::indicator_from(0)] {
            let sol = stein_solve(3.0, &h).unwrap();
            assert!(sol.g.iter().all(|v| v.abs() < 1e-15), "{h:?}");
        }
    }

    #[test]
    fn one_term_forward_sum() {
        let sol = stein_solve(1.0, &TestFunction::point(0)).unwrap();
        assert!((sol.g[1] - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!(sol.residual() < 1e-12);
    }

    #[test]
    fn forms_agree() {
        for t in [0.1, 0.7, 3.0, 12.5, 50.0] {
            for h in [TestFunction::point(2), TestFunction::indicator(&[0, 3, 4, 9]), TestFunction::indicator_from(5)] {
                assert!(forward_backward_gap(t, &h).unwrap() < 1e-9, "t={t} {h:?}");
            }
        }
    }

    #[test]
    fn point_identity() {
        for (t, a) in [(1.0, 0), (5.0, 5), (20.0, 3)] {
            let (l, r) = point_difference_identity(t, a).unwrap();
            assert!((l - r).abs() < 1e-9, "t={t} a={a}: {l} vs {r}");
        }
    }

    #[test]
    fn singleton_bounds() {
        for a in 0..=20 {
            for c in g_bound_checks(1.0, &TestFunction::point(a), &TestKind::Point(a)).unwrap() {
                assert!(c.holds, "{c:?}");
            }
        }
        for c in g_bound_checks(0.1, &TestFunction::indicator(&[1]), &TestKind::Set).unwrap() {
            assert!(c.holds, "{c:?}");
        }
    }

    #[test]
    fn lipschitz_bound_on_linear_ramp() {
        let ramp = TestFunction::new((0..60).map(|k| k as f64).collect(), 60.0);
        for t in [0.5, 4.0, 30.0] {
            for c in g_bound_checks(t, &ramp, &TestKind::Lipschitz).unwrap() {
                assert!(c.holds, "t={t} {c:?}");
            }
        }
    }

    #[test]
    fn proposition_examples() {
        let h = TestFunction::new((0..7).map(|k| k as f64).collect(), 7.0);
        let c = prop_identity(&BernoulliMatrix::constant(4, 0.3).unwrap(), &h).unwrap();
        assert!(c.gap() < 1e-12);
        let sq = TestFunction::new(vec![0.3, -1.0, 2.0, 0.5, 0.0, 1.5, -0.7], 0.2);
        let ones = prop_identity(&BernoulliMatrix::constant(4, 1.0).unwrap(), &sq).unwrap();
        assert_eq!(ones.d2, 0.0);
        assert!((ones.lhs - ones.d1).abs() < 1e-12);
        let id = prop_identity(&BernoulliMatrix::identity(4).unwrap(), &sq).unwrap();
        assert!(id.gap() < 1e-12);
        assert!(matches!(
            prop_identity(&BernoulliMatrix::identity(7).unwrap(), &sq),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn link_examples() {
        let (l, r) = q2_stein_link(2.0, &TestFunction::constant(1.0)).unwrap();
        assert!(l.abs() < 1e-14 && r.abs() < 1e-14);
        let lin = TestFunction::new((0..80).map(|k| k as f64).collect(), 80.0);
        let (l, r) = q2_stein_link(2.0, &lin).unwrap();
        assert!(l.abs() < 1e-8 && r.abs() < 1e-8, "{l} {r}");
        let (l, r) = q2_stein_link(1.0, &TestFunction::point(3)).unwrap();
        assert!((l - r).abs() < 1e-8);
    }
}
