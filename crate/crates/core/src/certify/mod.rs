//! Cyclicity certificates for truncated models.
//!
//! The extraction certificate recovers the frame coefficients from shifts of
//! `f` and is the primary verdict. The Krylov certificate measures the
//! numerical rank of the balanced orbit matrix and serves as a cross-check.

pub mod fixtures;
mod krylov;
mod structure;

use nalgebra::DVector;
use serde::Serialize;

pub use structure::{
    expected_kernel_dim, run_structure_suite, CheckResult, StructureOptions, SuiteReport,
};

use crate::error::Result;
use crate::model::linalg::{column_matrix, numerical_rank, singular_values};
use crate::model::{TruncatedTupleModel, C64};
use crate::multiindex::MultiIndex;
use crate::synth::{
    extract_all, BoundPolicy, CorrectionMode, ExtractionOptions, ExtractionRow, KSchedule, Reach,
    WeightedSeries,
};

pub const CERTIFICATE_SCHEMA: &str = "cdlab.certificate/v1";

/// Relative SVD tolerance used when none is configured.
pub const DEFAULT_SVD_TOLERANCE: f64 = 1e-8;

/// Singular values within this factor of the rank threshold trigger a
/// conditioning warning.
const WARNING_MARGIN: f64 = 100.0;

const SCOPE: &str = "Statements concern the truncated model only: the span of the shift \
orbit inside the finite-dimensional space of total degree at most N. Nothing is claimed \
about the untruncated operator tuple.";

/// Run provenance copied into every certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateMeta {
    pub tool_version: String,
    /// Hex SHA-256 of the effective configuration.
    pub config_hash: String,
    pub seed: u64,
}

impl CertificateMeta {
    pub fn new(config_hash: impl Into<String>, seed: u64) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash.into(),
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VectorKind {
    /// `Σ ξ_α a_α`, possibly scaled and shifted.
    Synthesized,
    Zero,
    /// `a_0` alone.
    ConstantTerm,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorDescription {
    pub kind: VectorKind,
    pub reach: Option<Reach>,
    pub precision_bits: usize,
    pub nonzero_terms: usize,
}

impl VectorDescription {
    pub fn of(series: &WeightedSeries) -> Self {
        let kind = if series.reach().is_some() {
            VectorKind::Synthesized
        } else if series.is_empty() {
            VectorKind::Zero
        } else if series.len() == 1 && series.terms().all(|(i, _)| i.is_zero()) {
            VectorKind::ConstantTerm
        } else {
            VectorKind::Custom
        };
        Self {
            kind,
            reach: series.reach(),
            precision_bits: series.precision(),
            nonzero_terms: series.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Evidence {
    Extraction {
        schedule: KSchedule,
        target_degree: u32,
        tolerance: f64,
        /// Index with the largest relative error.
        worst_index: Option<MultiIndex>,
        log10_worst_relative_error: Option<f64>,
        first_failure: Option<MultiIndex>,
        /// Rows whose error exceeds the factorial bound; reported, not fatal.
        bound_exceedances: usize,
        /// Numerical rank of the recovered family at the SVD tolerance.
        recovered_family_rank: usize,
        /// Same for the true coefficients `{a_α : |α| ≤ target}`.
        coefficient_family_rank: usize,
        /// Whether the targets reach every coefficient the model has.
        covers_support: bool,
        rows: Vec<ExtractionRow>,
    },
    KrylovRank {
        max_degree: u32,
        column_count: usize,
        svd_tolerance: f64,
        numerical_rank: usize,
        ambient_dimension: usize,
        log10_singular_values: Vec<f64>,
        warning: Option<String>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct CyclicityCertificate {
    pub schema: String,
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub model_id: String,
    pub ambient_dimension: usize,
    pub scope: String,
    pub vector: VectorDescription,
    pub evidence: Evidence,
    pub verdict: Verdict,
}

impl CyclicityCertificate {
    fn new(
        meta: &CertificateMeta,
        model: &TruncatedTupleModel,
        series: &WeightedSeries,
        evidence: Evidence,
        verdict: Verdict,
    ) -> Self {
        Self {
            schema: CERTIFICATE_SCHEMA.into(),
            tool_version: meta.tool_version.clone(),
            config_hash: meta.config_hash.clone(),
            seed: meta.seed,
            model_id: model.id().into(),
            ambient_dimension: model.ambient_dim(),
            scope: SCOPE.into(),
            vector: VectorDescription::of(series),
            evidence,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn family_rank(columns: &[DVector<C64>], rows: usize, tol: f64) -> usize {
    let normalized: Vec<DVector<C64>> = columns
        .iter()
        .filter(|c| c.norm() > 0.0)
        .map(|c| c.normalize())
        .collect();
    if normalized.is_empty() {
        return 0;
    }
    let refs: Vec<&DVector<C64>> = normalized.iter().collect();
    numerical_rank(&singular_values(&column_matrix(rows, &refs)), tol)
}

/// Recovers `a_α` for `|α| ≤ target_degree` from `series` with recovered
/// corrections and passes when every relative error is within `tolerance`.
pub fn certify_extraction(
    model: &TruncatedTupleModel,
    series: &WeightedSeries,
    schedule: &KSchedule,
    target_degree: u32,
    tolerance: f64,
    meta: &CertificateMeta,
) -> Result<CyclicityCertificate> {
    let options = ExtractionOptions {
        schedule: schedule.clone(),
        mode: CorrectionMode::Recovered,
        target_degree,
        tolerance,
        policy: BoundPolicy::Report,
    };
    let report = extract_all(series, model, &options)?;
    let d = model.ambient_dim();
    let recovered: Vec<DVector<C64>> = report
        .recovered
        .values()
        .map(|s| s.materialize(model).direction)
        .collect();
    let truth: Vec<DVector<C64>> = report
        .recovered
        .keys()
        .filter_map(|a| model.coefficient(a).cloned())
        .collect();
    let worst = report.worst_relative();
    let ok = report.rows.iter().all(|r| r.within_tolerance);
    let evidence = Evidence::Extraction {
        schedule: schedule.clone(),
        target_degree,
        tolerance,
        worst_index: worst.map(|r| r.index.clone()),
        log10_worst_relative_error: worst
            .filter(|r| !r.relative_error.is_zero())
            .map(|r| r.relative_error.log10_f64()),
        first_failure: report
            .rows
            .iter()
            .find(|r| !r.within_tolerance)
            .map(|r| r.index.clone()),
        bound_exceedances: report.rows.iter().filter(|r| !r.within_bound).count(),
        recovered_family_rank: family_rank(&recovered, d, DEFAULT_SVD_TOLERANCE),
        coefficient_family_rank: family_rank(&truth, d, DEFAULT_SVD_TOLERANCE),
        covers_support: target_degree >= model.support_degree(),
        rows: report.rows,
    };
    Ok(CyclicityCertificate::new(
        meta,
        model,
        series,
        evidence,
        Verdict::from_bool(ok),
    ))
}

/// Numerical rank of `{T^β f : |β| ≤ max_degree}` after balancing and
/// column normalization; passes when the rank equals the ambient dimension.
pub fn certify_krylov(
    model: &TruncatedTupleModel,
    series: &WeightedSeries,
    max_degree: u32,
    svd_tolerance: f64,
    meta: &CertificateMeta,
) -> Result<CyclicityCertificate> {
    let (column_count, sv) = krylov::orbit_singular_values(model, series, max_degree)?;
    let d = model.ambient_dim();
    let rank = numerical_rank(&sv, svd_tolerance);
    let mut warnings = Vec::new();
    if column_count < d {
        warnings.push(format!(
            "{column_count} columns cannot reach dimension {d}"
        ));
    }
    if let Some(&top) = sv.first() {
        let threshold = svd_tolerance * top;
        let near = sv
            .iter()
            .filter(|&&s| s > threshold / WARNING_MARGIN && s < threshold * WARNING_MARGIN)
            .count();
        if near > 0 {
            warnings.push(format!(
                "{near} singular values within a factor {WARNING_MARGIN} of the rank threshold"
            ));
        }
    }
    let evidence = Evidence::KrylovRank {
        max_degree,
        column_count,
        svd_tolerance,
        numerical_rank: rank,
        ambient_dimension: d,
        log10_singular_values: sv.iter().map(|s| s.log10()).collect(),
        warning: (!warnings.is_empty()).then(|| warnings.join("; ")),
    };
    Ok(CyclicityCertificate::new(
        meta,
        model,
        series,
        evidence,
        Verdict::from_bool(rank == d),
    ))
}

