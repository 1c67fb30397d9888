//! Layer-by-layer recovery of `a_α` from shifts of the synthesized series.
//!
//! For a target `α` in layer `L = |α|` and a parameter `k ≥ 1`, the anchor
//! is `K = (k+L+1)ε` and the shift `s = K − α`. The approximant
//!
//! ```text
//! A = (1/ξ_K) T^s f − Σ_{|β|<L} (ξ_{β+s}/ξ_K) â_β
//! ```
//!
//! differs from `a_α` by at most `M·e^{Σ1/δ_i}/(k+1)!`.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Reach, WeightedSeries};
use crate::error::{Error, Result};
use crate::logweight::{xi_ratio, LogScalar};
use crate::model::TruncatedTupleModel;
use crate::multiindex::{enumerate_layer, enumerate_up_to, MultiIndex};

/// Which lower-layer coefficients the correction sum uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrectionMode {
    /// The model's true `a_β`: isolates the error of one layer.
    Exact,
    /// Previously recovered `â_β`: end-to-end reconstruction from `f` alone.
    Recovered,
}

/// `k` per layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum KSchedule {
    Constant { k: u32 },
    PerLayer { ks: Vec<u32> },
    /// `k_L = top + step·(target − L)`: lower layers get larger anchors so
    /// that their recovery error stays below what the upper corrections
    /// amplify.
    Descending { top: u32, step: u32 },
}

impl Default for KSchedule {
    fn default() -> Self {
        Self::Constant { k: 2 }
    }
}

impl KSchedule {
    pub fn k_for(&self, layer: u32, target_degree: u32) -> Result<u32> {
        let k = match self {
            Self::Constant { k } => *k,
            Self::PerLayer { ks } => *ks.get(layer as usize).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "per-layer schedule has {} entries, layer {layer} requested",
                    ks.len()
                ))
            })?,
            Self::Descending { top, step } => top + step * (target_degree - layer),
        };
        if k == 0 {
            return Err(Error::InvalidParameter(format!(
                "schedule gives k = 0 for layer {layer}"
            )));
        }
        Ok(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundPolicy {
    /// A measured error above the bound is an error.
    Enforce,
    /// Record measured/bound and carry on.
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractionOptions {
    pub schedule: KSchedule,
    pub mode: CorrectionMode,
    pub target_degree: u32,
    /// Largest accepted `‖â_α − a_α‖/‖a_α‖`.
    pub tolerance: f64,
    pub policy: BoundPolicy,
}

/// `(k+L+1)ε`.
pub fn anchor_index(m: usize, layer: u32, k: u32) -> MultiIndex {
    MultiIndex::uniform(m, k + layer + 1)
}

/// Largest `k` whose anchor stays within a truncated series, `None` when the
/// series is unbounded. `Some(0)` means no `k ≥ 1` fits.
pub fn max_feasible_k(series: &WeightedSeries, layer: u32) -> Option<u32> {
    let offset = series.offset().map_or(0, MultiIndex::degree);
    match series.reach()? {
        Reach::Unbounded => None,
        Reach::Truncated(r) => {
            let m = series.dimension() as u32;
            let per = r.saturating_sub(offset) / m;
            Some(per.saturating_sub(layer + 1))
        }
    }
}

fn check_reach(series: &WeightedSeries, anchor: &MultiIndex) -> Result<()> {
    if let Some(Reach::Truncated(r)) = series.reach() {
        let needed = anchor.degree() + series.offset().map_or(0, MultiIndex::degree);
        if needed > r {
            return Err(Error::TruncationExhausted {
                anchor: anchor.clone(),
                needed,
                reach: r,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Approximant {
    pub target: MultiIndex,
    pub k: u32,
    pub anchor: MultiIndex,
    pub shift: MultiIndex,
    /// The approximant as a combination of frame coefficients.
    pub combination: WeightedSeries,
    /// `‖A − a_α‖`.
    pub error: LogScalar,
    /// `M·e^{Σ1/δ_i}/(k+1)!`.
    pub bound: LogScalar,
}

fn approximant(
    series: &WeightedSeries,
    model: &TruncatedTupleModel,
    alpha: &MultiIndex,
    k: u32,
    known: &BTreeMap<MultiIndex, WeightedSeries>,
) -> Result<Approximant> {
    let m = model.dimension();
    if alpha.dim() != m || series.dimension() != m {
        return Err(Error::DimensionMismatch(format!(
            "target {alpha} on a model of dimension {m}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be ≥ 1".into()));
    }
    let layer = alpha.degree();
    let anchor = anchor_index(m, layer, k);
    check_reach(series, &anchor)?;
    let shift = anchor
        .checked_sub(alpha)
        .expect("anchor dominates every index of its layer");
    let p = series.precision();

    let lead = series.divided_shift(&shift, &anchor)?;
    let mut ratios = Vec::new();
    if layer > 0 {
        for beta in enumerate_up_to(m, layer - 1) {
            let g = known.get(&beta).ok_or_else(|| Error::MissingLowerLayer {
                index: alpha.clone(),
                missing: beta.clone(),
            })?;
            ratios.push((xi_ratio(&beta.add(&shift), &anchor, p)?.neg(), g));
        }
    }
    let mut parts = Vec::with_capacity(ratios.len() + 1);
    parts.push((LogScalar::one(p), &lead));
    parts.extend(ratios.iter().map(|(r, g)| (r.clone(), *g)));
    let combination = series.linear_combination(&parts);

    let residual = combination.sub(&WeightedSeries::unit(model, alpha, p));
    let error = residual.norm(model);
    let bound = model.growth().extraction_bound(k, p);
    Ok(Approximant {
        target: alpha.clone(),
        k,
        anchor,
        shift,
        combination,
        error,
        bound,
    })
}

/// `(1/ξ_{(k+1)ε}) T^{(k+1)ε} f`, approximating `a_0`.
pub fn layer0_approximant(
    series: &WeightedSeries,
    model: &TruncatedTupleModel,
    k: u32,
) -> Result<Approximant> {
    approximant(
        series,
        model,
        &MultiIndex::zero(model.dimension()),
        k,
        &BTreeMap::new(),
    )
}

/// Approximant of `a_α` given every coefficient below layer `|α|`.
pub fn layer_approximant(
    series: &WeightedSeries,
    model: &TruncatedTupleModel,
    alpha: &MultiIndex,
    k: u32,
    known: &BTreeMap<MultiIndex, WeightedSeries>,
) -> Result<Approximant> {
    approximant(series, model, alpha, k, known)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtractionRow {
    pub degree: u32,
    pub index: MultiIndex,
    pub k: u32,
    pub error: LogScalar,
    pub relative_error: LogScalar,
    pub bound: LogScalar,
    /// `log10(error/bound)`, `null` for an exact recovery.
    pub log10_bound_ratio: Option<f64>,
    pub within_bound: bool,
    pub within_tolerance: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LayerPlan {
    pub layer: u32,
    pub k: u32,
    pub anchor: MultiIndex,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtractionReport {
    pub mode: CorrectionMode,
    pub policy: BoundPolicy,
    pub target_degree: u32,
    pub tolerance: f64,
    pub schedule: Vec<LayerPlan>,
    pub rows: Vec<ExtractionRow>,
    /// Recovered combinations, one per target.
    #[serde(skip)]
    pub recovered: BTreeMap<MultiIndex, WeightedSeries>,
    /// Wall time per layer; excluded from serialized output.
    #[serde(skip)]
    pub timing: Vec<Duration>,
}

impl ExtractionReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn first_failure(&self) -> Option<&ExtractionRow> {
        self.rows.iter().find(|r| !r.passed)
    }

    pub fn worst_relative(&self) -> Option<&ExtractionRow> {
        self.rows
            .iter()
            .max_by(|a, b| a.relative_error.cmp_magnitude(&b.relative_error))
    }

    pub fn row(&self, index: &MultiIndex) -> Option<&ExtractionRow> {
        self.rows.iter().find(|r| &r.index == index)
    }
}

/// Recovers every `a_α` with `|α| ≤ target_degree`, layer by layer.
pub fn extract_all(
    series: &WeightedSeries,
    model: &TruncatedTupleModel,
    options: &ExtractionOptions,
) -> Result<ExtractionReport> {
    let m = model.dimension();
    let target = options.target_degree;
    if target > model.support_degree() {
        return Err(Error::InvalidParameter(format!(
            "target degree {target} exceeds the model support degree {}",
            model.support_degree()
        )));
    }
    if !(options.tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            options.tolerance
        )));
    }
    let p = series.precision();
    let mut schedule = Vec::new();
    for layer in 0..=target {
        let k = options.schedule.k_for(layer, target)?;
        let anchor = anchor_index(m, layer, k);
        check_reach(series, &anchor)?;
        schedule.push(LayerPlan { layer, k, anchor });
    }

    let mut known: BTreeMap<MultiIndex, WeightedSeries> = BTreeMap::new();
    let mut recovered = BTreeMap::new();
    let mut rows = Vec::new();
    let mut timing = Vec::new();
    for plan in &schedule {
        let started = Instant::now();
        let targets = enumerate_layer(m, plan.layer);
        let results = targets
            .par_iter()
            .map(|alpha| approximant(series, model, alpha, plan.k, &known))
            .collect::<Result<Vec<_>>>()?;
        for a in results {
            let norm = model.coefficient_norm(&a.target);
            let relative = if norm > 0.0 {
                a.error.div(&LogScalar::from_f64(norm, p))
            } else {
                a.error.clone()
            };
            let within_bound = a.error.cmp_magnitude(&a.bound).is_le();
            if !within_bound && options.policy == BoundPolicy::Enforce {
                return Err(Error::BoundViolation {
                    index: a.target.clone(),
                    k: a.k,
                    log10_error: a.error.log10_f64(),
                    log10_bound: a.bound.log10_f64(),
                });
            }
            let within_tolerance = relative.is_zero() || relative.ln_f64() <= options.tolerance.ln();
            let log10_bound_ratio = (!a.error.is_zero()).then(|| a.error.div(&a.bound).log10_f64());
            rows.push(ExtractionRow {
                degree: plan.layer,
                index: a.target.clone(),
                k: a.k,
                error: a.error.clone(),
                relative_error: relative,
                bound: a.bound.clone(),
                log10_bound_ratio,
                within_bound,
                within_tolerance,
                passed: within_bound && within_tolerance,
            });
            let next = match options.mode {
                CorrectionMode::Exact => WeightedSeries::unit(model, &a.target, p),
                CorrectionMode::Recovered => a.combination.clone(),
            };
            known.insert(a.target.clone(), next);
            recovered.insert(a.target, a.combination);
        }
        timing.push(started.elapsed());
    }
    Ok(ExtractionReport {
        mode: options.mode,
        policy: options.policy,
        target_degree: target,
        tolerance: options.tolerance,
        schedule,
        rows,
        recovered,
        timing,
    })
}
