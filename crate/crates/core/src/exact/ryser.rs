//! Ryser's inclusion-exclusion formula for permanents whose entries are the
//! linear polynomials `(1 - p) + p z`.
//!
//! `per(A) = Σ_{S ⊆ cols} (-1)^{m-|S|} Π_rows Σ_{c ∈ S} a_{row,c}`. Subsets are
//! visited in Gray-code order so every step adds or removes one column. The
//! subset range is cut into fixed blocks; each block restarts its row sums
//! from scratch and the per-block compensated sums are merged in block order,
//! so the result does not depend on the thread count.

use rayon::prelude::*;

use crate::matrix::SubModel;
use crate::numeric::Neumaier;

const BLOCK_BITS: u32 = 12;

/// Raw permanent coefficients together with `Σ |term|` per coefficient, which
/// bounds the cancellation error of the alternating sum.
pub(crate) struct PermanentPoly {
    pub coeffs: Vec<f64>,
    pub abs_sum: Vec<f64>,
}

struct Block {
    sums: Vec<Neumaier>,
    abs: Vec<f64>,
}

pub(crate) fn permanent_poly(sub: &SubModel) -> PermanentPoly {
    let m = sub.size();
    if m == 0 {
        return PermanentPoly { coeffs: vec![1.0], abs_sum: vec![1.0] };
    }
    let prob_rows: Vec<&[f64]> = sub.rows.iter().filter_map(|r| r.as_deref()).collect();
    let ones = (m - prob_rows.len()) as i32;
    let deg = prob_rows.len();
    let total: u64 = 1u64 << m;
    let block_len: u64 = 1u64 << BLOCK_BITS.min(m as u32);
    let nblocks = total / block_len;

    let run_block = |b: u64| -> Block {
        let lo = b * block_len;
        let hi = lo + block_len;
        let mut sp = vec![0.0; deg];
        let mut sq = vec![0.0; deg];
        let mut poly = vec![0.0; deg + 1];
        let mut out = Block { sums: vec![Neumaier::new(); deg + 1], abs: vec![0.0; deg + 1] };

        let mut gray = lo ^ (lo >> 1);
        let mut card = gray.count_ones() as usize;
        for c in 0..m {
            if gray >> c & 1 == 1 {
                for (i, row) in prob_rows.iter().enumerate() {
                    sp[i] += row[c];
                    sq[i] += 1.0 - row[c];
                }
            }
        }
        let mut accumulate = |card: usize, sp: &[f64], sq: &[f64], out: &mut Block| {
            if card == 0 {
                return;
            }
            poly.iter_mut().for_each(|c| *c = 0.0);
            poly[0] = (card as f64).powi(ones);
            if (m - card) % 2 == 1 {
                poly[0] = -poly[0];
            }
            for i in 0..deg {
                let (a, b) = (sq[i], sp[i]);
                for k in (1..=i + 1).rev() {
                    poly[k] = poly[k] * a + poly[k - 1] * b;
                }
                poly[0] *= a;
            }
            for k in 0..=deg {
                out.sums[k].add(poly[k]);
                out.abs[k] += poly[k].abs();
            }
        };
        if lo > 0 {
            accumulate(card, &sp, &sq, &mut out);
        }
        for idx in lo + 1..hi {
            let c = idx.trailing_zeros() as usize;
            gray ^= 1 << c;
            let sign = if gray >> c & 1 == 1 { 1.0 } else { -1.0 };
            if sign > 0.0 {
                card += 1;
            } else {
                card -= 1;
            }
            for (i, row) in prob_rows.iter().enumerate() {
                sp[i] += sign * row[c];
                sq[i] += sign * (1.0 - row[c]);
            }
            accumulate(card, &sp, &sq, &mut out);
        }
        out
    };

    let blocks: Vec<Block> = if nblocks > 1 {
        (0..nblocks).into_par_iter().map(run_block).collect()
    } else {
        vec![run_block(0)]
    };

    let mut sums = vec![Neumaier::new(); deg + 1];
    let mut abs_sum = vec![0.0; deg + 1];
    for b in &blocks {
        for k in 0..=deg {
            sums[k].merge(&b.sums[k]);
            abs_sum[k] += b.abs[k];
        }
    }
    PermanentPoly { coeffs: sums.iter().map(Neumaier::value).collect(), abs_sum }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_sub(rows: &[&[f64]]) -> SubModel {
        SubModel { rows: rows.iter().map(|r| Some(r.to_vec())).collect() }
    }

    #[test]
    fn permanent_at_z_equals_one_is_factorial() {
        // Every entry is 1 at z = 1, so the coefficient sum is m!.
        let sub = scalar_sub(&[&[0.1, 0.9, 0.4], &[0.3, 0.2, 0.5], &[0.7, 0.6, 0.8]]);
        let per = permanent_poly(&sub);
        assert!((per.coeffs.iter().sum::<f64>() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn two_by_two() {
        // per = a11 a22 + a12 a21 with a = (1-p) + p z.
        let sub = scalar_sub(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let per = permanent_poly(&sub);
        // identity: z*z + 1*1
        assert_eq!(per.coeffs.len(), 3);
        assert!((per.coeffs[0] - 1.0).abs() < 1e-15);
        assert!(per.coeffs[1].abs() < 1e-15);
        assert!((per.coeffs[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ones_rows_count_matches() {
        // One summand row, one ones row: per = Σ_c (1 - p_c + p_c z) * 1.
        let sub = SubModel { rows: vec![Some(vec![0.2, 0.6]), None] };
        let per = permanent_poly(&sub);
        assert!((per.coeffs[0] - 1.2).abs() < 1e-15);
        assert!((per.coeffs[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn blocked_path_matches_factorial() {
        let m = 14;
        let rows: Vec<Option<Vec<f64>>> = (0..m)
            .map(|i| Some((0..m).map(|c| ((i * 7 + c * 3) % 11) as f64 / 10.0).collect()))
            .collect();
        let per = permanent_poly(&SubModel { rows });
        let total: f64 = per.coeffs.iter().sum();
        let fact = crate::numeric::factorial(m);
        assert!((total / fact - 1.0).abs() < 1e-10);
    }
}
