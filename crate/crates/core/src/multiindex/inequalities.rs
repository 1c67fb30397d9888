//! Exhaustive exact checks of the two factorial inequalities behind the
//! layer-by-layer extraction.
//!
//! With `|η| = l` and `k ≥ 1`:
//! * layer inequality: for `β = (k+1+l)ε − η`, `(β+α)! > (β+η)!` for every
//!   `α ≠ η` in the same layer;
//! * offset inequality: for `β = (k+1+l)ε`, `(β+α−η)! > β!` for every
//!   `α ≠ η` with `|α| ≥ l` (checked up to a bounded extra degree);
//! * offset induction: one more unit step never breaks the offset inequality.

use rayon::prelude::*;
use serde::Serialize;

use super::{enumerate_layer, BigNat, FactorialTable, MultiIndex};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityKind {
    Layer,
    Offset,
    OffsetInduction,
}

impl InequalityKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Layer => "layer",
            Self::Offset => "offset",
            Self::OffsetInduction => "offset-induction",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub alpha: MultiIndex,
    /// Unit step for induction checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityVerdict {
    pub kind: InequalityKind,
    pub m: usize,
    pub l: u32,
    pub k: u32,
    pub eta: MultiIndex,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_extra_degree: Option<u32>,
    pub checked_count: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl InequalityVerdict {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

fn check_params(m: usize, l: u32, k: u32, eta: &MultiIndex) -> Result<()> {
    if eta.dim() != m {
        return Err(Error::DimensionMismatch(format!(
            "η = {eta} has {} entries, expected {m}",
            eta.dim()
        )));
    }
    if eta.degree() != l {
        return Err(Error::DimensionMismatch(format!(
            "|η| = {} but the layer is {l}",
            eta.degree()
        )));
    }
    if l < 1 || k < 1 {
        return Err(Error::InvalidParameter(format!(
            "need l ≥ 1 and k ≥ 1, got l = {l}, k = {k}"
        )));
    }
    Ok(())
}

/// `∏ (v_i)!` for a vector that is known to be non-negative.
fn signed_factorial(v: &[i64], table: &mut FactorialTable) -> BigNat {
    v.iter().fold(BigNat::one(), |acc, &x| {
        debug_assert!(x >= 0);
        &acc * table.get(x as u32)
    })
}

fn shifted(base: &[i64], plus: &MultiIndex, minus: Option<&MultiIndex>) -> Vec<i64> {
    base.iter()
        .enumerate()
        .map(|(i, &b)| {
            b + plus.get(i) as i64 - minus.map_or(0, |mi| mi.get(i) as i64)
        })
        .collect()
}

/// `(β+α)! > (β+η)!` with `β = (k+1+l)ε − η`, over `|α| = l, α ≠ η`.
pub fn verify_layer_inequality(
    m: usize,
    l: u32,
    k: u32,
    eta: &MultiIndex,
) -> Result<InequalityVerdict> {
    check_params(m, l, k, eta)?;
    let mut table = FactorialTable::new();
    let top = (k + 1 + l) as i64;
    let beta: Vec<i64> = eta.entries().iter().map(|&e| top - e as i64).collect();
    let rhs = signed_factorial(&shifted(&beta, eta, None), &mut table);
    let mut checked = 0;
    let mut counterexamples = Vec::new();
    for alpha in enumerate_layer(m, l) {
        if &alpha == eta {
            continue;
        }
        checked += 1;
        let lhs = signed_factorial(&shifted(&beta, &alpha, None), &mut table);
        if lhs <= rhs {
            counterexamples.push(Counterexample {
                alpha,
                step: None,
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
    }
    Ok(InequalityVerdict {
        kind: InequalityKind::Layer,
        m,
        l,
        k,
        eta: eta.clone(),
        max_extra_degree: None,
        checked_count: checked,
        counterexamples,
    })
}

fn offset_range(m: usize, l: u32, max_extra: u32) -> impl Iterator<Item = MultiIndex> {
    (l..=l + max_extra).flat_map(move |d| enumerate_layer(m, d))
}

/// `(β+α−η)! > β!` with `β = (k+1+l)ε`, over `l ≤ |α| ≤ l + max_extra_degree,
/// α ≠ η`.
pub fn verify_offset_inequality(
    m: usize,
    l: u32,
    k: u32,
    eta: &MultiIndex,
    max_extra_degree: u32,
) -> Result<InequalityVerdict> {
    check_params(m, l, k, eta)?;
    let mut table = FactorialTable::new();
    let beta = vec![(k + 1 + l) as i64; m];
    let rhs = signed_factorial(&beta, &mut table);
    let mut checked = 0;
    let mut counterexamples = Vec::new();
    for alpha in offset_range(m, l, max_extra_degree) {
        if &alpha == eta {
            continue;
        }
        checked += 1;
        let lhs = signed_factorial(&shifted(&beta, &alpha, Some(eta)), &mut table);
        if lhs <= rhs {
            counterexamples.push(Counterexample {
                alpha,
                step: None,
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
    }
    Ok(InequalityVerdict {
        kind: InequalityKind::Offset,
        m,
        l,
        k,
        eta: eta.clone(),
        max_extra_degree: Some(max_extra_degree),
        checked_count: checked,
        counterexamples,
    })
}

/// Whenever `(β+α−η)! > β!` holds on the bounded range, `(β+α+ε_i−η)! > β!`
/// holds for every `i`.
pub fn verify_offset_induction(
    m: usize,
    l: u32,
    k: u32,
    eta: &MultiIndex,
    max_extra_degree: u32,
) -> Result<InequalityVerdict> {
    check_params(m, l, k, eta)?;
    let mut table = FactorialTable::new();
    let beta = vec![(k + 1 + l) as i64; m];
    let base = signed_factorial(&beta, &mut table);
    let mut checked = 0;
    let mut counterexamples = Vec::new();
    for alpha in offset_range(m, l, max_extra_degree) {
        let before = signed_factorial(&shifted(&beta, &alpha, Some(eta)), &mut table);
        if before <= base {
            continue;
        }
        for i in 0..m {
            checked += 1;
            let next = alpha.add_unit(i);
            let after = signed_factorial(&shifted(&beta, &next, Some(eta)), &mut table);
            if after <= base {
                counterexamples.push(Counterexample {
                    alpha: alpha.clone(),
                    step: Some(i),
                    lhs: after.to_string(),
                    rhs: base.to_string(),
                });
            }
        }
    }
    Ok(InequalityVerdict {
        kind: InequalityKind::OffsetInduction,
        m,
        l,
        k,
        eta: eta.clone(),
        max_extra_degree: Some(max_extra_degree),
        checked_count: checked,
        counterexamples,
    })
}

/// Parameter grid for the exhaustive checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaGrid {
    pub dimensions: Vec<usize>,
    pub layers: Vec<u32>,
    pub ks: Vec<u32>,
    pub max_extra_degree: u32,
}

impl Default for LemmaGrid {
    fn default() -> Self {
        Self {
            dimensions: vec![2, 3],
            layers: (1..=4).collect(),
            ks: (1..=4).collect(),
            max_extra_degree: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridReport {
    pub grid: LemmaGrid,
    pub total_checked: u64,
    pub total_counterexamples: u64,
    pub verdicts: Vec<InequalityVerdict>,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        self.total_counterexamples == 0
    }

    pub fn checked_for(&self, kind: InequalityKind) -> u64 {
        self.verdicts
            .iter()
            .filter(|v| v.kind == kind)
            .map(|v| v.checked_count)
            .sum()
    }
}

/// Runs all three checks over the grid in parallel. The verdict order is the
/// grid order regardless of scheduling.
pub fn verify_grid(grid: &LemmaGrid) -> Result<GridReport> {
    if grid.dimensions.contains(&0) {
        return Err(Error::InvalidParameter("dimension 0 in grid".into()));
    }
    let mut points = Vec::new();
    for &m in &grid.dimensions {
        for &l in &grid.layers {
            for &k in &grid.ks {
                for eta in enumerate_layer(m, l) {
                    for kind in [
                        InequalityKind::Layer,
                        InequalityKind::Offset,
                        InequalityKind::OffsetInduction,
                    ] {
                        points.push((kind, m, l, k, eta.clone()));
                    }
                }
            }
        }
    }
    let extra = grid.max_extra_degree;
    let verdicts = points
        .into_par_iter()
        .map(|(kind, m, l, k, eta)| match kind {
            InequalityKind::Layer => verify_layer_inequality(m, l, k, &eta),
            InequalityKind::Offset => verify_offset_inequality(m, l, k, &eta, extra),
            InequalityKind::OffsetInduction => verify_offset_induction(m, l, k, &eta, extra),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridReport {
        grid: grid.clone(),
        total_checked: verdicts.iter().map(|v| v.checked_count).sum(),
        total_counterexamples: verdicts.iter().map(|v| v.counterexamples.len() as u64).sum(),
        verdicts,
    })
}
