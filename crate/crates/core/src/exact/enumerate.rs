//! Brute-force enumeration of all bijections, the reference against which the
//! permanent engine is checked. Cost is `m!`, so keep `m ≤ 8`.

use crate::matrix::SubModel;
use crate::numeric::bernoulli_convolution;

/// Calls `f` once for every permutation of `0..m` (Heap's algorithm).
pub fn for_each_permutation<F: FnMut(&[usize])>(m: usize, mut f: F) {
    let mut perm: Vec<usize> = (0..m).collect();
    let mut c = vec![0usize; m];
    f(&perm);
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// PMF of the sub-model obtained by averaging, over all `m!` bijections, the
/// convolution of the Bernoulli laws picked out by the bijection.
pub fn brute_force_pmf(sub: &SubModel) -> Vec<f64> {
    let m = sub.size();
    let deg = sub.summand_count();
    let mut acc = vec![0.0; deg + 1];
    let mut count = 0usize;
    let mut probs = Vec::with_capacity(deg);
    for_each_permutation(m, |perm| {
        probs.clear();
        for (i, row) in sub.rows.iter().enumerate() {
            if let Some(row) = row {
                probs.push(row[perm[i]]);
            }
        }
        for (a, v) in acc.iter_mut().zip(bernoulli_convolution(&probs)) {
            *a += v;
        }
        count += 1;
    });
    acc.iter().map(|v| v / count as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn visits_every_permutation_once() {
        for m in 0..=6 {
            let mut seen = HashSet::new();
            for_each_permutation(m, |p| {
                assert!(seen.insert(p.to_vec()));
            });
            assert_eq!(seen.len(), crate::numeric::factorial(m) as usize);
        }
    }
}
