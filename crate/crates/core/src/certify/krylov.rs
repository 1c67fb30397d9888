//! Numerical rank of the shift orbit `{T^β g : |β| ≤ D}`.
//!
//! The raw columns span hundreds of thousands of orders of magnitude, so the
//! entries are formed in the log domain in the model's unrotated
//! coordinates, balanced by a two-sided diagonal scaling taken from the dual
//! potentials of a maximum-weight matching on the log-magnitudes, column
//! normalized, and only then handed to an SVD. Diagonal scalings leave the
//! rank unchanged.

use astro_float::BigFloat;
use nalgebra::{Complex, DMatrix};

use crate::logweight::{bigfloat_from_f64, bigfloat_to_f64, LogScalar, RM};
use crate::model::linalg::singular_values;
use crate::model::{TruncatedTupleModel, C64};
use crate::multiindex::{enumerate_up_to, MultiIndex};
use crate::synth::WeightedSeries;
use crate::Result;

/// Nonzero complex number `exp(log)·phase` with `|phase| = 1`.
#[derive(Debug, Clone)]
pub(crate) struct LogComplex {
    pub log: BigFloat,
    pub phase: C64,
}

fn sum_log_complex(terms: Vec<(LogScalar, C64)>, p: usize) -> Option<LogComplex> {
    let live: Vec<_> = terms
        .into_iter()
        .filter(|(s, z)| !s.is_zero() && z.norm() != 0.0)
        .collect();
    let anchor = live
        .iter()
        .max_by(|a, b| a.0.cmp_magnitude(&b.0))?
        .0
        .abs();
    let mut acc = Complex::new(0.0, 0.0);
    for (s, z) in &live {
        let r = s.div(&anchor).to_f64().value;
        acc += z * r;
    }
    let n = acc.norm();
    if n == 0.0 {
        return None;
    }
    let log = anchor
        .mul(&LogScalar::from_f64(n, p))
        .log_magnitude()
        .clone();
    Some(LogComplex {
        log,
        phase: acc / n,
    })
}

/// Entries of `P T^β g` in unrotated coordinates, one column per `β`.
pub(crate) fn orbit_entries(
    model: &TruncatedTupleModel,
    series: &WeightedSeries,
    shifts: &[MultiIndex],
) -> Result<Vec<Vec<Option<LogComplex>>>> {
    let p = series.precision();
    let w = model.window().len();
    let d = model.ambient_dim();
    let mut cols = Vec::with_capacity(shifts.len());
    for beta in shifts {
        let g = series.shift_by(beta)?;
        let mut col = vec![None; d];
        for (j, (comp, sec)) in model.components().iter().zip(model.sections()).enumerate() {
            for (pos, rho) in model.window().iter().enumerate() {
                let c = comp.weights[pos];
                let terms: Vec<(LogScalar, C64)> = sec
                    .terms()
                    .map(|(tau, phi)| (g.coefficient(&rho.add(tau)), phi * c))
                    .collect();
                col[j * w + pos] = sum_log_complex(terms, p);
            }
        }
        cols.push(col);
    }
    Ok(cols)
}

pub(crate) struct Assignment {
    pub row_potential: Vec<f64>,
    pub col_potential: Vec<f64>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub row_to_col: Vec<usize>,
}

/// Minimum-cost assignment of every row to a distinct column
/// (`rows ≤ cols`), with dual potentials satisfying `u_i + v_j ≤ cost_ij`
/// and equality on the assignment.
pub(crate) fn assign(cost: &[Vec<f64>]) -> Assignment {
    let n = cost.len();
    let m = cost.first().map_or(0, Vec::len);
    assert!(n <= m, "assignment needs rows ≤ cols");
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    Assignment {
        row_potential: u[1..].to_vec(),
        col_potential: v[1..].to_vec(),
        row_to_col,
    }
}

/// Balanced, column-normalized orbit matrix.
pub(crate) fn balanced_matrix(
    entries: &[Vec<Option<LogComplex>>],
    d: usize,
    p: usize,
) -> DMatrix<C64> {
    let ncols = entries.len();
    let logs: Vec<Vec<Option<f64>>> = entries
        .iter()
        .map(|col| {
            col.iter()
                .map(|e| e.as_ref().map(|z| bigfloat_to_f64(&z.log)))
                .collect()
        })
        .collect();
    let finite: Vec<f64> = logs.iter().flatten().flatten().copied().collect();
    let mut out = DMatrix::from_element(d, ncols, Complex::new(0.0, 0.0));
    if finite.is_empty() {
        return out;
    }
    let hi = finite.iter().copied().fold(f64::MIN, f64::max);
    let lo = finite.iter().copied().fold(f64::MAX, f64::min);
    let forbidden = (hi - lo + 1.0) * (d.max(ncols) as f64 + 1.0) - lo;
    // Cost in rows-as-agents orientation; transpose when columns are fewer.
    let cost_rc = |i: usize, j: usize| logs[j][i].map_or(forbidden, |l| -l);
    let (row_pot, col_pot) = if d <= ncols {
        let cost: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..ncols).map(|j| cost_rc(i, j)).collect())
            .collect();
        let a = assign(&cost);
        (a.row_potential, a.col_potential)
    } else {
        let cost: Vec<Vec<f64>> = (0..ncols)
            .map(|j| (0..d).map(|i| cost_rc(i, j)).collect())
            .collect();
        let a = assign(&cost);
        (a.col_potential, a.row_potential)
    };
    for (j, col) in entries.iter().enumerate() {
        for (i, e) in col.iter().enumerate() {
            if let Some(z) = e {
                // Added separately so the scaling stays exactly separable.
                let shift =
                    bigfloat_from_f64(row_pot[i], p).add(&bigfloat_from_f64(col_pot[j], p), p, RM);
                let scaled = bigfloat_to_f64(&z.log.add(&shift, p, RM));
                out[(i, j)] = z.phase * scaled.exp();
            }
        }
    }
    for mut col in out.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col /= Complex::new(n, 0.0);
        }
    }
    out
}

/// Shifts `β` with `|β| ≤ max_degree`.
pub(crate) fn krylov_shifts(m: usize, max_degree: u32) -> Vec<MultiIndex> {
    enumerate_up_to(m, max_degree)
}

/// Singular values of the balanced orbit matrix, largest first.
pub(crate) fn orbit_singular_values(
    model: &TruncatedTupleModel,
    series: &WeightedSeries,
    max_degree: u32,
) -> Result<(usize, Vec<f64>)> {
    let shifts = krylov_shifts(model.dimension(), max_degree);
    let entries = orbit_entries(model, series, &shifts)?;
    let a = balanced_matrix(&entries, model.ambient_dim(), series.precision());
    Ok((shifts.len(), singular_values(&a)))
}
