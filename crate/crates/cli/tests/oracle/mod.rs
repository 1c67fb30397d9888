//! Integer and rational reference computations. Nothing here calls into the
//! crate's log-domain arithmetic.

#![allow(dead_code)]

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, j| acc * j)
}

pub fn index_factorial(alpha: &[u32]) -> BigUint {
    alpha
        .iter()
        .fold(BigUint::one(), |acc, &a| acc * factorial(a as u64))
}

/// `(|α|!)^{α!}`.
pub fn xi_denominator(alpha: &[u32]) -> BigUint {
    let deg: u64 = alpha.iter().map(|&a| a as u64).sum();
    let e = index_factorial(alpha)
        .to_u32()
        .expect("exponent fits in u32");
    factorial(deg).pow(e)
}

pub fn log10_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().unwrap() as f64).log10();
    }
    let top = (n >> (bits - 64)).to_u64().unwrap() as f64;
    top.log10() + (bits - 64) as f64 * 2f64.log10()
}

/// `log10 (|α|!)^{α!}` without forming the power, which for `α = (7,7)`
/// would have about 9·10^8 bits.
pub fn log10_xi_denominator(alpha: &[u32]) -> f64 {
    let deg: u64 = alpha.iter().map(|&a| a as u64).sum();
    let e = index_factorial(alpha)
        .to_f64()
        .expect("exponent fits in f64");
    e * log10_big(&factorial(deg))
}

fn log10_sum(xs: &[f64]) -> f64 {
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

pub fn layer(m: usize, l: u32) -> Vec<Vec<u32>> {
    indices_up_to(m, l)
        .into_iter()
        .filter(|a| a.iter().sum::<u32>() == l)
        .collect()
}

fn approx_ln_denominator(alpha: &[u32]) -> f64 {
    let deg: u32 = alpha.iter().sum();
    let ln_deg_fact: f64 = (2..=deg).map(|j| (j as f64).ln()).sum();
    let ln_mi: f64 = alpha
        .iter()
        .map(|&a| (2..=a).map(|j| (j as f64).ln()).sum::<f64>())
        .sum();
    ln_mi.exp() * ln_deg_fact
}

/// `log10‖A − a_α‖` for the exact-corrections approximant on the Hardy
/// model (orthonormal `a_γ`) with support degree `degree` and no truncation
/// of `f`: the residual is `Σ_{γ≠α, |γ|≥|α|} (ξ_{γ+s}/ξ_K) e_γ`.
pub fn hardy_error_log10(m: usize, degree: u32, alpha: &[u32], k: u32) -> f64 {
    let l: u32 = alpha.iter().sum();
    let anchor = vec![k + l + 1; m];
    let s: Vec<u32> = anchor.iter().zip(alpha).map(|(a, b)| a - b).collect();
    let cands: Vec<(Vec<u32>, f64)> = indices_up_to(m, degree)
        .into_iter()
        .filter(|g| g.iter().sum::<u32>() >= l && g.as_slice() != alpha)
        .map(|g| {
            let ln = approx_ln_denominator(&add(&g, &s));
            (g, ln)
        })
        .collect();
    let Some(best) = cands.iter().map(|c| c.1).reduce(f64::min) else {
        return f64::NEG_INFINITY;
    };
    let log_den_k = log10_xi_denominator(&anchor);
    let cutoff = best + 60.0 * std::f64::consts::LN_10;
    let logs: Vec<f64> = cands
        .iter()
        .filter(|c| c.1 <= cutoff)
        .map(|(g, _)| 2.0 * (log_den_k - log10_xi_denominator(&add(g, &s))))
        .collect();
    0.5 * log10_sum(&logs)
}

pub const P61: u64 = (1 << 61) - 1;

fn mod_mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P61 as u128) as u64
}

fn mod_inv(a: u64) -> u64 {
    let (mut b, mut e, mut r) = (a % P61, P61 - 2, 1);
    while e > 0 {
        if e & 1 == 1 {
            r = mod_mul(r, b);
        }
        b = mod_mul(b, b);
        e >>= 1;
    }
    r
}

/// Rank over `F_p` of an integer matrix given by rows.
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

/// Rank of `{a_α}` for the two-copy Hardy direct sum with sections
/// `(1, z_1^e)`: `a_α = e_α ⊕ e_{α − e·ε_1}`, coordinates restricted to the
/// window `|ρ| ≤ N` of each copy.
pub fn two_copy_section_rank(degree: u32, e: u32) -> (usize, usize) {
    let window = indices_up_to(2, degree);
    let w = window.len();
    let pos = |r: &[u32]| window.iter().position(|x| x.as_slice() == r);
    let mut rows = Vec::new();
    for alpha in indices_up_to(2, degree + e) {
        let mut v = vec![0u64; 2 * w];
        if let Some(p) = pos(&alpha) {
            v[p] = 1;
        }
        if alpha[0] >= e {
            if let Some(p) = pos(&[alpha[0] - e, alpha[1]]) {
                v[w + p] = 1;
            }
        }
        rows.push(v);
    }
    (rank_mod_p(rows), 2 * w)
}

/// `dim ∩ ker(T_i − w_i)` for the truncated Hardy shifts by exact rational
/// elimination. `T_i e_ρ = e_{ρ−ε_i}`.
pub fn hardy_kernel_dim(m: usize, degree: u32, w: &[BigRational]) -> usize {
    let window = indices_up_to(m, degree);
    let d = window.len();
    let pos = |r: &[u32]| window.iter().position(|x| x.as_slice() == r);
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for (i, wi) in w.iter().enumerate() {
        // Row ρ' of T_i − w_i: coefficient 1 at e_{ρ'+ε_i}, −w_i at e_{ρ'}.
        for (r, rho) in window.iter().enumerate() {
            let mut row = vec![BigRational::zero(); d];
            row[r] = -wi.clone();
            let mut up = rho.clone();
            up[i] += 1;
            if let Some(c) = pos(&up) {
                row[c] = BigRational::one();
            }
            rows.push(row);
        }
    }
    let mut rank = 0;
    for col in 0..d {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = BigRational::one() / rows[rank][col].clone();
        let pivot: Vec<BigRational> = rows[rank].iter().map(|x| x * &inv).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= &f * p;
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    d - rank
}
