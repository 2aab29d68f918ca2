//! First and second moment quantities of `S_n` and the γ family.
//!
//! The γ quantities are literal quadruple sums over `j ≠ k`, `r ≠ s`; they are
//! the reference values the closed-form identities are checked against.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matrix::BernoulliMatrix;
use crate::numeric::{csum, pos, Neumaier};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub n: usize,
    pub lambda: f64,
    pub row_means: Vec<f64>,
    pub col_means: Vec<f64>,
    /// `λ / n`.
    pub p_bar: f64,
    /// `λ − Σ p̄_{j,·}² − γ`.
    pub var_gamma: f64,
    /// `λ − n/(n−1)(Σ p̄_{j,·}² + Σ p̄_{·,r}² − Σ p²/n² − λ²/n)`.
    pub var_counts: f64,
    pub gamma: f64,
    pub gamma_p: f64,
    pub gamma_pp: f64,
    pub gamma_ppp: f64,
    pub m: f64,
    pub sum_row_means_sq: f64,
    pub sum_col_means_sq: f64,
    /// `Σ_{j,r} p_{j,r}²`.
    pub sum_sq: f64,
}

impl MomentReport {
    /// The variance used downstream (the γ route).
    pub fn var(&self) -> f64 {
        self.var_gamma
    }

    /// `λ − Var S_n`.
    pub fn deficit(&self) -> f64 {
        self.lambda - self.var_gamma
    }
}

/// Deterministic parallel sum over ordered pairs `j ≠ k` of `f(j, k)`.
pub(crate) fn pair_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let parts: Vec<Neumaier> = (0..n)
        .into_par_iter()
        .map(|j| (0..n).filter(|&k| k != j).map(|k| f(j, k)).collect())
        .collect();
    let mut acc = Neumaier::new();
    for p in &parts {
        acc.merge(p);
    }
    acc.value()
}

/// `Σ_{j≠k} Σ_{r≠s} term(a, b)` with `a = (p_{j,r}, p_{j,s})`, `b = (p_{k,r}, p_{k,s})`.
fn quad_sum<F>(m: &BernoulliMatrix, term: F) -> f64
where
    F: Fn(f64, f64, f64, f64) -> f64 + Sync,
{
    let n = m.n();
    pair_sum(n, |j, k| {
        let (rj, rk) = (m.row(j), m.row(k));
        let mut acc = Neumaier::new();
        for r in 0..n {
            for s in 0..n {
                if r != s {
                    acc.add(term(rj[r], rj[s], rk[r], rk[s]));
                }
            }
        }
        acc.value()
    })
}

fn norm_2(n: usize) -> f64 {
    let n = n as f64;
    n * n * (n - 1.0)
}

/// `γ`.
pub fn gamma(m: &BernoulliMatrix) -> f64 {
    quad_sum(m, |jr, js, kr, ks| (jr - js) * (kr - ks)) / (2.0 * norm_2(m.n()))
}

/// `γ′ = 2/(n²(n−1)) Σ (p_{j,r} − p_{j,s})₊ (p_{k,s} − p_{k,r})₊`.
pub fn gamma_prime(m: &BernoulliMatrix) -> f64 {
    2.0 * quad_sum(m, |jr, js, kr, ks| pos(jr - js) * pos(ks - kr)) / norm_2(m.n())
}

/// `γ″ = 1/(2n²(n−1)) Σ |p_{j,r} − p_{j,s}| |p_{k,r} − p_{k,s}|`.
pub fn gamma_double_prime(m: &BernoulliMatrix) -> f64 {
    quad_sum(m, |jr, js, kr, ks| (jr - js).abs() * (kr - ks).abs()) / (2.0 * norm_2(m.n()))
}

/// `γ‴ = 1/(4n²(n−1)) Σ (|p_{j,r} − p_{j,s}| − |p_{k,r} − p_{k,s}|)²`.
pub fn gamma_triple_prime(m: &BernoulliMatrix) -> f64 {
    quad_sum(m, |jr, js, kr, ks| ((jr - js).abs() - (kr - ks).abs()).powi(2)) / (4.0 * norm_2(m.n()))
}

pub fn row_means(m: &BernoulliMatrix) -> Vec<f64> {
    let n = m.n() as f64;
    m.rows().map(|r| csum(r.iter().copied()) / n).collect()
}

pub fn col_means(m: &BernoulliMatrix) -> Vec<f64> {
    let n = m.n();
    (0..n).map(|r| csum((0..n).map(|j| m.get(j, r))) / n as f64).collect()
}

pub fn compute_moments(m: &BernoulliMatrix) -> MomentReport {
    let n = m.n();
    let nf = n as f64;
    let rows = row_means(m);
    let cols = col_means(m);
    let lambda = m.lambda();
    let p_bar = lambda / nf;
    let sum_row_means_sq = csum(rows.iter().map(|x| x * x));
    let sum_col_means_sq = csum(cols.iter().map(|x| x * x));
    let sum_sq = csum(m.as_slice().iter().map(|x| x * x));
    let gamma = gamma(m);
    let var_gamma = lambda - sum_row_means_sq - gamma;
    let var_counts = lambda
        - nf / (nf - 1.0)
            * (sum_row_means_sq + sum_col_means_sq - sum_sq / (nf * nf) - lambda * lambda / nf);
    let mut mmax = f64::NEG_INFINITY;
    for j in 0..n {
        for r in 0..n {
            mmax = mmax.max(rows[j] + cols[r] - m.get(j, r) / nf - p_bar);
        }
    }
    MomentReport {
        n,
        lambda,
        row_means: rows,
        col_means: cols,
        p_bar,
        var_gamma,
        var_counts,
        gamma,
        gamma_p: gamma_prime(m),
        gamma_pp: gamma_double_prime(m),
        gamma_ppp: gamma_triple_prime(m),
        m: nf / (nf - 1.0) * mmax,
        sum_row_means_sq,
        sum_col_means_sq,
        sum_sq,
    }
}

/// `γ′` of the transposed matrix.
pub fn gamma_prime_transpose(m: &BernoulliMatrix) -> f64 {
    gamma_prime(&m.transpose())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityFlags {
    pub decreasing_rows: bool,
    pub increasing_rows: bool,
    pub decreasing_cols: bool,
    pub increasing_cols: bool,
}

fn monotone(xs: impl Iterator<Item = f64> + Clone) -> (bool, bool) {
    let v: Vec<f64> = xs.collect();
    let dec = v.windows(2).all(|w| w[0] >= w[1]);
    let inc = v.windows(2).all(|w| w[0] <= w[1]);
    (dec, inc)
}

/// Whether every row (column) is weakly decreasing or increasing along its
/// index.
pub fn monotonicity_flags(m: &BernoulliMatrix) -> MonotonicityFlags {
    let n = m.n();
    let mut f = MonotonicityFlags {
        decreasing_rows: true,
        increasing_rows: true,
        decreasing_cols: true,
        increasing_cols: true,
    };
    for j in 0..n {
        let (d, i) = monotone(m.row(j).iter().copied());
        f.decreasing_rows &= d;
        f.increasing_rows &= i;
    }
    for r in 0..n {
        let (d, i) = monotone((0..n).map(|j| m.get(j, r)));
        f.decreasing_cols &= d;
        f.increasing_cols &= i;
    }
    f
}

/// `2/(n²(n−1)) Σ p_{j,r}(1 − p_{j,s}) p_{k,s}(1 − p_{k,r})`, an upper bound
/// on `γ′` that is exact for 0/1 matrices and invariant under transposition.
pub fn gamma_prime_product_bound(m: &BernoulliMatrix) -> f64 {
    2.0 * quad_sum(m, |jr, js, kr, ks| jr * (1.0 - js) * ks * (1.0 - kr)) / norm_2(m.n())
}

/// The two entries `(L, R)` of the bound `γ′ ≤ min{L, R}` with
/// `L = Var − Σ p(1−p)/n` and `R = (2/n)(Var − λ + λ²)`.
pub fn gamma_prime_variance_bounds(m: &BernoulliMatrix, rep: &MomentReport) -> (f64, f64) {
    let nf = m.n() as f64;
    let var = rep.var_gamma;
    let l = var - csum(m.as_slice().iter().map(|p| p * (1.0 - p))) / nf;
    let r = 2.0 / nf * (var - rep.lambda + rep.lambda * rep.lambda);
    (l, r)
}

/// Column-pair expression
/// `2/(n−1) Σ_{r≠s} (p̄_{·,r} − c_{r,s})(p̄_{·,s} − c_{r,s})`, `c_{r,s} = Σ_j p_{j,r}p_{j,s}/n`,
/// which equals `γ′` for 0/1 matrices.
pub fn gamma_prime_column_pair_form(m: &BernoulliMatrix) -> f64 {
    let n = m.n();
    let nf = n as f64;
    let cols = col_means(m);
    let mut acc = Neumaier::new();
    for r in 0..n {
        for s in 0..n {
            if r != s {
                let c = csum((0..n).map(|j| m.get(j, r) * m.get(j, s))) / nf;
                acc.add((cols[r] - c) * (cols[s] - c));
            }
        }
    }
    2.0 / (nf - 1.0) * acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn constant_matrix() {
        let r = compute_moments(&BernoulliMatrix::constant(6, 0.3).unwrap());
        close(r.lambda, 1.8, 1e-14);
        close(r.var_gamma, 1.8 * 0.7, 1e-14);
        close(r.var_counts, 1.8 * 0.7, 1e-14);
        for g in [r.gamma, r.gamma_p, r.gamma_pp, r.gamma_ppp] {
            assert_eq!(g, 0.0);
        }
    }

    #[test]
    fn identity_matrix() {
        for n in 2..7 {
            let r = compute_moments(&BernoulliMatrix::identity(n).unwrap());
            let nf = n as f64;
            close(r.lambda, 1.0, 1e-14);
            close(r.var_gamma, 1.0, 1e-14);
            close(r.var_counts, 1.0, 1e-14);
            close(r.gamma, -1.0 / nf, 1e-14);
            close(r.gamma_p, 2.0 / nf, 1e-14);
            close(r.gamma_pp, 1.0 / nf, 1e-14);
        }
    }

    #[test]
    fn uniform_matching() {
        let (d, k) = (2usize, 3usize);
        let m = BernoulliMatrix::matching_uniform(d, k).unwrap();
        let n = m.n() as f64;
        let df = d as f64;
        let r = compute_moments(&m);
        close(r.lambda, df, 1e-13);
        close(r.var_gamma, df - df * (df - 1.0) / (n - 1.0), 1e-13);
        close(r.gamma_p, 2.0 * df * df * (n - df) / (n * (n - 1.0)), 1e-13);
    }

    #[test]
    fn transpose_example() {
        let m = BernoulliMatrix::from_rows(vec![vec![1.0, 0.25], vec![0.75, 0.5]]).unwrap();
        assert_eq!(gamma_prime(&m), 0.0);
        close(gamma_prime_transpose(&m), 1.0 / 16.0, 1e-15);
        let c = BernoulliMatrix::constant(4, 0.2).unwrap();
        assert_eq!(gamma_prime_transpose(&c), 0.0);
    }

    #[test]
    fn flags() {
        let id = monotonicity_flags(&BernoulliMatrix::identity(3).unwrap());
        assert_eq!(id, MonotonicityFlags::default());
        let cm = monotonicity_flags(&BernoulliMatrix::random(5, 3, true).unwrap());
        assert!(cm.decreasing_cols);
    }

    #[test]
    fn variance_bound_examples() {
        let ones = BernoulliMatrix::constant(5, 1.0).unwrap();
        let (l, r) = gamma_prime_variance_bounds(&ones, &compute_moments(&ones));
        close(l, 0.0, 1e-13);
        close(r, 8.0, 1e-13);
        let id = BernoulliMatrix::identity(5).unwrap();
        let (l, r) = gamma_prime_variance_bounds(&id, &compute_moments(&id));
        close(l, 1.0, 1e-13);
        close(r, 0.4, 1e-13);
    }

    fn matrix(n: usize) -> impl Strategy<Value = BernoulliMatrix> {
        prop::collection::vec(0.0f64..=1.0, n * n)
            .prop_filter_map("non-zero", move |p| BernoulliMatrix::from_flat(n, p).ok())
    }

    fn any_matrix() -> impl Strategy<Value = BernoulliMatrix> {
        (2usize..7).prop_flat_map(matrix)
    }

    fn zero_one_matrix() -> impl Strategy<Value = BernoulliMatrix> {
        (2usize..7).prop_flat_map(|n| {
            prop::collection::vec(prop::bool::ANY, n * n).prop_filter_map("non-zero", move |b| {
                BernoulliMatrix::from_flat(n, b.into_iter().map(|x| x as u8 as f64).collect()).ok()
            })
        })
    }

    proptest! {
        #[test]
        fn moment_identities(m in any_matrix()) {
            let r = compute_moments(&m);
            let nf = m.n() as f64;
            prop_assert!((r.var_gamma - r.var_counts).abs() < 1e-10);
            prop_assert!((r.gamma + r.gamma_p - r.gamma_pp).abs() < 1e-12);
            prop_assert!((r.gamma_pp + r.gamma_ppp - (r.sum_sq / nf - r.sum_row_means_sq)).abs() < 1e-12);
            prop_assert!((csum(r.row_means.iter().copied()) - r.lambda).abs() < 1e-12);
            prop_assert!((csum(r.col_means.iter().copied()) - r.lambda).abs() < 1e-12);
            prop_assert!(r.lambda * (1.0 - r.m) <= r.var_gamma + 1e-12);
            prop_assert!(r.var_gamma <= r.lambda + 1e-12);
            prop_assert!(r.m <= r.lambda.min(2.0 * nf / (nf - 1.0)) + 1e-12);
            prop_assert!(r.gamma_p >= 0.0 && r.gamma_pp >= 0.0 && r.gamma_ppp >= 0.0);
            prop_assert!(r.gamma_pp + 1e-15 >= r.gamma.abs());
            // γ′ ≤ γ″ fails for the identity matrix (γ′ = 2/n, γ″ = 1/n); the
            // pairing of (r,s) with (s,r) gives γ′ ≤ 2γ″.
            prop_assert!(2.0 * r.gamma_pp + 1e-15 >= r.gamma_p);
            prop_assert!(r.lambda - r.var_gamma <= r.lambda * r.lambda + 1e-12);
        }

        #[test]
        fn gamma_prime_bounds(m in any_matrix()) {
            let r = compute_moments(&m);
            let (l, rr) = gamma_prime_variance_bounds(&m, &r);
            prop_assert!(r.gamma_p <= l.min(rr) + 1e-12);
            let a = gamma_prime_product_bound(&m);
            prop_assert!(r.gamma_p <= a + 1e-12);
            prop_assert!((a - gamma_prime_product_bound(&m.transpose())).abs() < 1e-12);
        }

        #[test]
        fn decreasing_rows_kill_gamma_prime(m in any_matrix()) {
            let n = m.n();
            let rows: Vec<Vec<f64>> = m.rows().map(|r| {
                let mut v = r.to_vec();
                v.sort_by(|a, b| b.total_cmp(a));
                v
            }).collect();
            let sorted = BernoulliMatrix::from_flat(n, rows.concat()).unwrap();
            prop_assert!(monotonicity_flags(&sorted).decreasing_rows);
            prop_assert_eq!(gamma_prime(&sorted), 0.0);
        }

        #[test]
        fn zero_one_forms(m in zero_one_matrix()) {
            let g = gamma_prime(&m);
            prop_assert!((g - gamma_prime_product_bound(&m)).abs() < 1e-12);
            prop_assert!((g - gamma_prime_column_pair_form(&m)).abs() < 1e-12);
        }
    }
}
