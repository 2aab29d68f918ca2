//! Small numerical helpers shared across modules.

use std::f64::consts::{E, PI};

/// Neumaier's variant of Kahan compensated summation.
///
/// Unlike plain Kahan summation it stays accurate when an added term is larger
/// in magnitude than the running sum, which is the normal situation in the
/// alternating inclusion-exclusion sums of the permanent engine.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator into this one.
    pub fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator of floats.
pub fn csum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<Neumaier>().value()
}

/// `(1 - e^{-t}) / t`, evaluated without cancellation for small `t`.
pub fn one_minus_exp_over(t: f64) -> f64 {
    -(-t).exp_m1() / t
}

/// `min{1, sqrt(2 / (t e))}`.
pub fn min1_sqrt_2_te(t: f64) -> f64 {
    (2.0 / (t * E)).sqrt().min(1.0)
}

/// `min{1, (4/3) sqrt(2 / (t e))}`.
pub fn min1_four_thirds_sqrt_2_te(t: f64) -> f64 {
    (4.0 / 3.0 * (2.0 / (t * E)).sqrt()).min(1.0)
}

/// `sqrt(2 π e)`.
pub fn sqrt_2pi_e() -> f64 {
    (2.0 * PI * E).sqrt()
}

/// Positive part `max{0, x}`.
#[inline]
pub fn pos(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// `k!` as a float; exact up to `k = 22`.
pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// Sequential convolution of Bernoulli laws: coefficient `k` is `P(sum = k)`.
pub fn bernoulli_convolution(probs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; probs.len() + 1];
    out[0] = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        for k in (0..=i + 1).rev() {
            let stay = out[k] * (1.0 - p);
            let step = if k > 0 { out[k - 1] * p } else { 0.0 };
            out[k] = stay + step;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(csum(xs), 2.0);
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 1e-3 - 0.05).collect();
        let mut a: Neumaier = xs[..400].iter().copied().collect();
        let b: Neumaier = xs[400..].iter().copied().collect();
        a.merge(&b);
        assert!((a.value() - csum(xs.iter().copied())).abs() < 1e-15);
    }

    #[test]
    fn one_minus_exp_small_argument() {
        assert!((one_minus_exp_over(1e-12) - 1.0).abs() < 1e-12);
        assert!((one_minus_exp_over(1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn bernoulli_convolution_is_binomial() {
        let pmf = bernoulli_convolution(&[0.5; 4]);
        let expect = [1.0, 4.0, 6.0, 4.0, 1.0].map(|c| c / 16.0);
        for (a, b) in pmf.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
