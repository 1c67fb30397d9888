//! Multi-indices in graded-lexicographic order, exact factorials and the
//! factorial inequalities the extraction argument relies on.

mod bignat;
mod inequalities;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use bignat::{BigNat, FactorialTable};
pub use inequalities::{
    verify_grid, verify_layer_inequality, verify_offset_induction, verify_offset_inequality,
    Counterexample, GridReport, InequalityKind, InequalityVerdict, LemmaGrid,
};

use crate::error::{Error, Result};

/// A multi-index `α ∈ ℕ^m`.
///
/// Ordering is graded: by total degree first, then lexicographically
/// descending inside a layer, so layer 2 for `m = 2` reads
/// `(2,0) < (1,1) < (0,2)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter(
                "multi-index must have at least one entry".into(),
            ));
        }
        Ok(Self(entries))
    }

    pub fn zero(m: usize) -> Self {
        Self(vec![0; m])
    }

    /// `c·ε` with `ε = (1,…,1)`.
    pub fn uniform(m: usize, c: u32) -> Self {
        Self(vec![c; m])
    }

    pub fn ones(m: usize) -> Self {
        Self::uniform(m, 1)
    }

    /// The unit vector `ε_i`.
    pub fn unit(m: usize, i: usize) -> Self {
        let mut v = vec![0; m];
        v[i] = 1;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Entrywise `self ≥ other`.
    pub fn dominates(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self − other`, or `None` when some entry would go negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if !self.dominates(other) {
            return None;
        }
        Some(Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn add_unit(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v[i] += 1;
        Self(v)
    }

    pub fn sub_unit(&self, i: usize) -> Option<Self> {
        if self.0[i] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[i] -= 1;
        Some(Self(v))
    }

    /// `α! = ∏ α_i!`, exactly.
    pub fn factorial(&self) -> BigNat {
        self.0
            .iter()
            .fold(BigNat::one(), |acc, &a| &acc * &BigNat::factorial(a))
    }

    pub fn factorial_with(&self, table: &mut FactorialTable) -> BigNat {
        self.0
            .iter()
            .fold(BigNat::one(), |acc, &a| &acc * table.get(a))
    }

    /// `w^α` for a real point.
    pub fn monomial(&self, w: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(w)
            .map(|(&a, &x)| x.powi(a as i32))
            .product()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All `α ∈ ℕ^m` with `|α| = l`, in graded-lex order.
pub fn enumerate_layer(m: usize, l: u32) -> Vec<MultiIndex> {
    assert!(m >= 1, "dimension must be positive");
    let mut out = Vec::with_capacity(layer_size(m, l) as usize);
    let mut cur = vec![0u32; m];
    fill_layer(&mut cur, 0, l, &mut out);
    out
}

fn fill_layer(cur: &mut Vec<u32>, pos: usize, rest: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = rest;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for a in (0..=rest).rev() {
        cur[pos] = a;
        fill_layer(cur, pos + 1, rest - a, out);
    }
}

/// All `α` with `|α| ≤ n`, layer by layer.
pub fn enumerate_up_to(m: usize, n: u32) -> Vec<MultiIndex> {
    (0..=n).flat_map(|l| enumerate_layer(m, l)).collect()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `C(l+m−1, m−1)`.
pub fn layer_size(m: usize, l: u32) -> u64 {
    binomial(l as u64 + m as u64 - 1, m as u64 - 1)
}

/// `C(n+m, m)`.
pub fn count_up_to(m: usize, n: u32) -> u64 {
    binomial(n as u64 + m as u64, m as u64)
}

/// Exact `α!`.
pub fn mi_factorial(alpha: &MultiIndex) -> BigNat {
    alpha.factorial()
}
