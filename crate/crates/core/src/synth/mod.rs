//! The weighted series `f = Σ ξ_α a_α` and the layer-by-layer recovery of
//! the frame coefficients from shifts of `f`.

mod extract;
mod naive;

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{Complex, DVector};
use serde::{Deserialize, Serialize};

pub use extract::{
    anchor_index, extract_all, layer0_approximant, layer_approximant, max_feasible_k,
    Approximant, BoundPolicy, CorrectionMode, ExtractionOptions, ExtractionReport, ExtractionRow,
    KSchedule, LayerPlan,
};
pub use naive::{naive_layer0, NaiveLayer0};

use crate::error::{Error, Result};
use crate::logweight::{sum_exact, xi, xi_ratio, LogScalar, Saturation, DEFAULT_PRECISION};
use crate::model::{TruncatedTupleModel, C64};
use crate::multiindex::MultiIndex;

/// How far the coefficients of the synthesized series are kept.
///
/// `Truncated(R)` cuts `f` at total degree `R`, so `T^β f` loses every term
/// that would come from beyond `R`. `Unbounded` keeps every `ξ_γ`: the
/// projection of `T^β f` onto the window is then exact, because `a_γ` outside
/// the support projects to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reach {
    Truncated(u32),
    Unbounded,
}

#[derive(Debug, Clone)]
enum Source {
    /// Explicit coefficients, zero off the table.
    Table,
    /// `scale · T^offset f` for the synthesized `f`.
    Xi {
        offset: MultiIndex,
        scale: LogScalar,
        reach: Reach,
    },
}

/// `Σ c_α a_α` with log-domain coefficients, tracked on the model support.
#[derive(Debug, Clone)]
pub struct WeightedSeries {
    m: usize,
    precision: usize,
    domain: Arc<Vec<MultiIndex>>,
    terms: BTreeMap<MultiIndex, LogScalar>,
    source: Source,
}

/// `anchor · direction`, with the direction accumulated in doubles relative
/// to the largest term.
#[derive(Debug, Clone)]
pub struct Materialized {
    pub anchor: LogScalar,
    pub direction: DVector<C64>,
}

impl Materialized {
    pub fn norm(&self) -> LogScalar {
        let n = self.direction.norm();
        if n == 0.0 || self.anchor.is_zero() {
            return LogScalar::zero(self.anchor.precision());
        }
        self.anchor
            .abs()
            .mul(&LogScalar::from_f64(n, self.anchor.precision()))
    }

    /// Plain doubles; entries below the double range flush to zero.
    pub fn to_vector(&self) -> DVector<C64> {
        let a = self.anchor.to_f64().value;
        self.direction.map(|z| z * a)
    }
}

impl WeightedSeries {
    fn xi_terms(
        domain: &[MultiIndex],
        offset: &MultiIndex,
        scale: &LogScalar,
        reach: Reach,
        precision: usize,
    ) -> Result<BTreeMap<MultiIndex, LogScalar>> {
        let mut terms = BTreeMap::new();
        if scale.is_zero() {
            return Ok(terms);
        }
        for g in domain {
            let idx = g.add(offset);
            if let Reach::Truncated(r) = reach {
                if idx.degree() > r {
                    continue;
                }
            }
            terms.insert(g.clone(), xi(&idx, precision)?.mul(scale));
        }
        Ok(terms)
    }

    /// `f = Σ ξ_α a_α`.
    pub fn cyclic(model: &TruncatedTupleModel, reach: Reach, precision: usize) -> Result<Self> {
        let domain = Arc::new(model.support().to_vec());
        let offset = MultiIndex::zero(model.dimension());
        let scale = LogScalar::one(precision);
        let terms = Self::xi_terms(&domain, &offset, &scale, reach, precision)?;
        Ok(Self {
            m: model.dimension(),
            precision,
            domain,
            terms,
            source: Source::Xi {
                offset,
                scale,
                reach,
            },
        })
    }

    /// Explicit coefficients; indices off the model support are dropped.
    pub fn from_terms<I>(model: &TruncatedTupleModel, terms: I, precision: usize) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, LogScalar)>,
    {
        let domain = Arc::new(model.support().to_vec());
        let terms = terms
            .into_iter()
            .filter(|(i, c)| !c.is_zero() && model.coefficient(i).is_some())
            .collect();
        Self {
            m: model.dimension(),
            precision,
            domain,
            terms,
            source: Source::Table,
        }
    }

    pub fn zero(model: &TruncatedTupleModel, precision: usize) -> Self {
        Self::from_terms(model, std::iter::empty(), precision)
    }

    /// The single frame coefficient `a_α`.
    pub fn unit(model: &TruncatedTupleModel, alpha: &MultiIndex, precision: usize) -> Self {
        Self::from_terms(
            model,
            [(alpha.clone(), LogScalar::one(precision))],
            precision,
        )
    }

    fn table_like(&self, terms: BTreeMap<MultiIndex, LogScalar>) -> Self {
        Self {
            m: self.m,
            precision: self.precision,
            domain: Arc::clone(&self.domain),
            terms,
            source: Source::Table,
        }
    }

    pub fn dimension(&self) -> usize {
        self.m
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn reach(&self) -> Option<Reach> {
        match &self.source {
            Source::Xi { reach, .. } => Some(*reach),
            Source::Table => None,
        }
    }

    /// Accumulated shift of a synthesized series.
    pub fn offset(&self) -> Option<&MultiIndex> {
        match &self.source {
            Source::Xi { offset, .. } => Some(offset),
            Source::Table => None,
        }
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> LogScalar {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| LogScalar::zero(self.precision))
    }

    /// Nonzero coefficients in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &LogScalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Series of `T^β g`, reindexed through `T^β a_α = a_{α−β}`.
    pub fn shift_by(&self, beta: &MultiIndex) -> Result<Self> {
        if beta.dim() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "shift {beta} on a series in dimension {}",
                self.m
            )));
        }
        match &self.source {
            Source::Xi {
                offset,
                scale,
                reach,
            } => {
                let offset = offset.add(beta);
                let terms = Self::xi_terms(&self.domain, &offset, scale, *reach, self.precision)?;
                Ok(Self {
                    terms,
                    source: Source::Xi {
                        offset,
                        scale: scale.clone(),
                        reach: *reach,
                    },
                    ..self.clone()
                })
            }
            Source::Table => {
                let terms = self
                    .domain
                    .iter()
                    .filter_map(|g| {
                        self.terms
                            .get(&g.add(beta))
                            .map(|c| (g.clone(), c.clone()))
                    })
                    .collect();
                Ok(self.table_like(terms))
            }
        }
    }

    pub fn scaled(&self, c: &LogScalar) -> Result<Self> {
        match &self.source {
            Source::Xi {
                offset,
                scale,
                reach,
            } => {
                let scale = scale.mul(c);
                let terms = Self::xi_terms(&self.domain, offset, &scale, *reach, self.precision)?;
                Ok(Self {
                    terms,
                    source: Source::Xi {
                        offset: offset.clone(),
                        scale,
                        reach: *reach,
                    },
                    ..self.clone()
                })
            }
            Source::Table => Ok(self.table_like(
                self.terms
                    .iter()
                    .map(|(i, v)| (i.clone(), v.mul(c)))
                    .filter(|(_, v)| !v.is_zero())
                    .collect(),
            )),
        }
    }

    /// `(1/ξ_K) T^s g`. For a synthesized series each coefficient is formed
    /// as `ξ_{γ+s}/ξ_K` times the scale, the same expression the correction
    /// terms use, so matching terms cancel exactly.
    pub fn divided_shift(&self, s: &MultiIndex, anchor: &MultiIndex) -> Result<Self> {
        match &self.source {
            Source::Xi {
                offset,
                scale,
                reach,
            } => {
                let mut terms = BTreeMap::new();
                if !scale.is_zero() {
                    for g in self.domain.iter() {
                        let idx = g.add(s).add(offset);
                        if let Reach::Truncated(r) = reach {
                            if idx.degree() > *r {
                                continue;
                            }
                        }
                        terms.insert(g.clone(), xi_ratio(&idx, anchor, self.precision)?.mul(scale));
                    }
                }
                Ok(self.table_like(terms))
            }
            Source::Table => {
                let inv = xi(anchor, self.precision)?.recip();
                Ok(self.shift_by(s)?.scaled(&inv)?)
            }
        }
    }

    /// `Σ_j λ_j g_j`, each coefficient summed with exact cancellation.
    pub fn linear_combination(&self, parts: &[(LogScalar, &WeightedSeries)]) -> Self {
        let mut buckets: BTreeMap<MultiIndex, Vec<LogScalar>> = BTreeMap::new();
        for (lambda, g) in parts {
            if lambda.is_zero() {
                continue;
            }
            for (i, c) in g.terms() {
                buckets.entry(i.clone()).or_default().push(c.mul(lambda));
            }
        }
        let p = self.precision;
        let terms = buckets
            .into_iter()
            .map(|(i, v)| (i, sum_exact(v, p)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        self.table_like(terms)
    }

    pub fn sub(&self, other: &WeightedSeries) -> Self {
        let one = LogScalar::one(self.precision);
        self.linear_combination(&[(one.clone(), self), (one.neg(), other)])
    }

    /// `Σ c_γ P a_γ`, largest term first.
    pub fn materialize(&self, model: &TruncatedTupleModel) -> Materialized {
        let d = model.ambient_dim();
        let mut live: Vec<(&LogScalar, &DVector<C64>)> = self
            .terms
            .iter()
            .filter_map(|(i, c)| {
                model
                    .coefficient(i)
                    .filter(|v| v.iter().any(|z| z.norm() != 0.0))
                    .map(|v| (c, v))
            })
            .collect();
        let zero = Materialized {
            anchor: LogScalar::zero(self.precision),
            direction: DVector::from_element(d, Complex::new(0.0, 0.0)),
        };
        if live.is_empty() {
            return zero;
        }
        live.sort_by(|a, b| b.0.cmp_magnitude(a.0));
        let anchor = live[0].0.abs();
        let mut direction = DVector::from_element(d, Complex::new(0.0, 0.0));
        for (c, v) in live {
            let r = c.div(&anchor).to_f64();
            if r.saturation == Saturation::Underflow && r.value == 0.0 {
                break;
            }
            direction.axpy(Complex::new(r.value, 0.0), v, Complex::new(1.0, 0.0));
        }
        Materialized { anchor, direction }
    }

    /// `‖Σ c_γ P a_γ‖`.
    pub fn norm(&self, model: &TruncatedTupleModel) -> LogScalar {
        self.materialize(model).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthOptions {
    pub precision: usize,
    pub reach: Reach,
}

impl SynthOptions {
    /// Default precision, unbounded reach.
    pub fn unbounded() -> Self {
        Self {
            precision: DEFAULT_PRECISION,
            reach: Reach::Unbounded,
        }
    }

    /// Default precision, `f` cut at the model's support degree.
    pub fn truncated(model: &TruncatedTupleModel) -> Self {
        Self {
            precision: DEFAULT_PRECISION,
            reach: Reach::Truncated(model.support_degree()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub series: WeightedSeries,
    /// `‖P f‖`.
    pub norm: LogScalar,
    /// `M·e^{Σ1/δ_i}`.
    pub norm_bound: LogScalar,
}

/// Builds `f = Σ ξ_α a_α` and checks `‖P f‖ ≤ M·e^{Σ1/δ_i}`.
pub fn synthesize(model: &TruncatedTupleModel, options: &SynthOptions) -> Result<Synthesis> {
    let series = WeightedSeries::cyclic(model, options.reach, options.precision)?;
    let norm = series.norm(model);
    let norm_bound = model.growth().norm_bound(options.precision);
    if norm.cmp_magnitude(&norm_bound).is_gt() {
        return Err(Error::NormBoundViolation {
            log10_norm: norm.log10_f64(),
            log10_bound: norm_bound.log10_f64(),
        });
    }
    Ok(Synthesis {
        series,
        norm,
        norm_bound,
    })
}
