use std::collections::BTreeMap;

use nalgebra::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::C64;
use crate::error::{Error, Result};
use crate::multiindex::{enumerate_layer, MultiIndex};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionTerm {
    pub index: MultiIndex,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Polynomial multiplier `φ(z) = Σ φ_β z^β` applied to a rank-one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionPolynomial {
    m: usize,
    terms: BTreeMap<MultiIndex, C64>,
}

impl SectionPolynomial {
    pub fn new(m: usize, terms: impl IntoIterator<Item = (MultiIndex, C64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, c) in terms {
            if idx.dim() != m {
                return Err(Error::DimensionMismatch(format!(
                    "section term {idx} in dimension {m}"
                )));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::NonFinite(format!("section coefficient at {idx}")));
            }
            if c != Complex::new(0.0, 0.0) {
                *map.entry(idx).or_insert(Complex::new(0.0, 0.0)) += c;
            }
        }
        if map.is_empty() {
            return Err(Error::InvalidModel("section polynomial is zero".into()));
        }
        Ok(Self { m, terms: map })
    }

    pub fn constant(m: usize) -> Self {
        Self::monomial(MultiIndex::zero(m))
    }

    pub fn monomial(index: MultiIndex) -> Self {
        let m = index.dim();
        Self {
            m,
            terms: BTreeMap::from([(index, Complex::new(1.0, 0.0))]),
        }
    }

    pub fn from_terms(m: usize, terms: &[SectionTerm]) -> Result<Self> {
        Self::new(
            m,
            terms
                .iter()
                .map(|t| (t.index.clone(), Complex::new(t.re, t.im))),
        )
    }

    pub fn to_terms(&self) -> Vec<SectionTerm> {
        self.terms
            .iter()
            .map(|(i, c)| SectionTerm {
                index: i.clone(),
                re: c.re,
                im: c.im,
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.terms.iter()
    }

    pub fn eval(&self, w: &[C64]) -> C64 {
        self.terms
            .iter()
            .map(|(idx, c)| {
                idx.entries()
                    .iter()
                    .zip(w)
                    .fold(*c, |acc, (&a, &x)| acc * x.powu(a))
            })
            .sum()
    }
}

/// `φ_i = z_1^{(i−1)(N+1)}`: each component's coefficients land beyond the
/// previous component's window, so the direct sum spans.
pub fn spanning_sections(m: usize, degree: u32, n: usize) -> Vec<SectionPolynomial> {
    (0..n as u32)
        .map(|i| {
            let mut e = vec![0; m];
            e[0] = i * (degree + 1);
            SectionPolynomial::monomial(MultiIndex::new(e).expect("nonempty index"))
        })
        .collect()
}

/// `φ_1 = 1` and, for `i ≥ 2`, a homogeneous polynomial of degree
/// `(i−1)(N+1)` with standard complex Gaussian coefficients.
pub fn random_sections<R: Rng + ?Sized>(
    m: usize,
    degree: u32,
    n: usize,
    rng: &mut R,
) -> Vec<SectionPolynomial> {
    let mut out = vec![SectionPolynomial::constant(m)];
    for i in 1..n as u32 {
        let terms: Vec<(MultiIndex, C64)> = enumerate_layer(m, i * (degree + 1))
            .into_iter()
            .map(|idx| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                (idx, Complex::new(re, im))
            })
            .collect();
        out.push(SectionPolynomial::new(m, terms).expect("Gaussian coefficients are nonzero"));
    }
    out
}
