//! Oracles built from plain integer arithmetic, sharing no code with the
//! crate's log-domain paths.

#![allow(dead_code)]

use cdlab_core::model::{build_rank1, GrowthSpec, TruncatedTupleModel, WeightProfile};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, j| acc * j)
}

pub fn index_factorial(alpha: &[u32]) -> BigUint {
    alpha
        .iter()
        .fold(BigUint::one(), |acc, &a| acc * factorial(a as u64))
}

/// `(|α|!)^{α!}`, the reciprocal of `ξ_α`.
pub fn xi_denominator(alpha: &[u32]) -> BigUint {
    let deg: u64 = alpha.iter().map(|&a| a as u64).sum();
    let e = index_factorial(alpha).to_u32().expect("exponent fits in u32");
    factorial(deg).pow(e)
}

/// `α!·ln(|α|!)` in doubles, only for ranking candidate terms.
pub fn approx_ln_denominator(alpha: &[u32]) -> f64 {
    let deg: u32 = alpha.iter().sum();
    let ln_deg_fact: f64 = (2..=deg).map(|j| (j as f64).ln()).sum();
    let ln_mi: f64 = alpha
        .iter()
        .map(|&a| (2..=a).map(|j| (j as f64).ln()).sum::<f64>())
        .sum();
    ln_mi.exp() * ln_deg_fact
}

/// `log10 n` from the top 64 bits.
pub fn log10_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().unwrap() as f64).log10();
    }
    let top = (n >> (bits - 64)).to_u64().unwrap() as f64;
    top.log10() + (bits - 64) as f64 * 2f64.log10()
}

/// `log10 Σ 10^{x_i}`.
pub fn log10_sum(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| 10f64.powf(x - max)).sum::<f64>().log10()
}

pub fn add(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// All `α ∈ Z_+^m` with `|α| ≤ n`.
pub fn indices_up_to(m: usize, n: u32) -> Vec<Vec<u32>> {
    fn rec(m: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == m - 1 {
            for last in 0..=left {
                let mut v = cur.clone();
                v.push(last);
                out.push(v);
            }
            return;
        }
        for a in 0..=left {
            cur.push(a);
            rec(m, left - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, n, &mut Vec::new(), &mut out);
    out
}

/// `log10‖A − a_α‖` for the exact-corrections approximant of a rank-one
/// model with weights `c`: the surviving terms are `γ ≠ α` with `|γ| ≥ |α|`
/// in the support, each weighted by `ξ_{γ+s}/ξ_K` with `a_γ ⟂ a_γ'`.
pub fn exact_mode_error_log10(
    m: usize,
    degree: u32,
    alpha: &[u32],
    k: u32,
    weight: impl Fn(&[u32]) -> f64,
) -> f64 {
    let layer: u32 = alpha.iter().sum();
    let anchor = vec![k + layer + 1; m];
    let s: Vec<u32> = anchor.iter().zip(alpha).map(|(a, b)| a - b).collect();
    let candidates: Vec<(Vec<u32>, f64)> = indices_up_to(m, degree)
        .into_iter()
        .filter(|g| g.iter().sum::<u32>() >= layer && g.as_slice() != alpha)
        .map(|g| {
            let ln = approx_ln_denominator(&add(&g, &s));
            (g, ln)
        })
        .collect();
    let Some(best) = candidates.iter().map(|c| c.1).reduce(f64::min) else {
        return f64::NEG_INFINITY;
    };
    let den_k = xi_denominator(&anchor);
    let log_den_k = log10_big(&den_k);
    // Terms more than 60 decades below the largest do not move the result.
    let cutoff = best + 60.0 * std::f64::consts::LN_10;
    let logs: Vec<f64> = candidates
        .iter()
        .filter(|c| c.1 <= cutoff)
        .map(|(g, _)| {
            let den = xi_denominator(&add(g, &s));
            let log_ratio = log_den_k - log10_big(&den);
            2.0 * (log_ratio + weight(g).abs().log10())
        })
        .collect();
    0.5 * log10_sum(&logs)
}

pub fn hardy(m: usize, degree: u32) -> TruncatedTupleModel {
    build_rank1(
        &WeightProfile::Hardy,
        m,
        degree,
        &vec![0.5; m],
        &GrowthSpec::new(vec![1.0; m], Some(1.0)),
    )
    .unwrap()
}

pub const P61: u64 = (1 << 61) - 1;

pub fn mod_mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P61 as u128) as u64
}

pub fn mod_pow(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    b %= P61;
    while e > 0 {
        if e & 1 == 1 {
            r = mod_mul(r, b);
        }
        b = mod_mul(b, b);
        e >>= 1;
    }
    r
}

pub fn mod_inv(a: u64) -> u64 {
    assert!(a % P61 != 0, "not invertible mod p");
    mod_pow(a, P61 - 2)
}

/// Rank over `F_p`; a lower bound for the rank over `Q`.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = mod_inv(rows[rank][col]);
        for c in 0..ncols {
            rows[rank][c] = mod_mul(rows[rank][c], inv);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let f = rows[r][col];
                for c in 0..ncols {
                    let sub = mod_mul(f, rows[rank][c]);
                    rows[r][c] = (rows[r][c] + P61 - sub) % P61;
                }
            }
        }
        rank += 1;
    }
    rank
}
