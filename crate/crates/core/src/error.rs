use thiserror::Error;

use crate::multiindex::MultiIndex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error(
        "precision exhausted at {precision} bits: log-magnitude needs {integer_bits} integer bits, \
         leaving fewer than {required} fraction bits"
    )]
    PrecisionExhausted {
        precision: usize,
        integer_bits: i64,
        required: i64,
    },

    #[error("growth condition violated at {index}: {detail}")]
    GrowthViolation { index: MultiIndex, detail: String },

    #[error("point {point:?} lies outside the polydisc of radii {radii:?}")]
    PointOutsideDomain { point: Vec<f64>, radii: Vec<f64> },

    #[error("coefficient family spans only {rank} of {ambient} dimensions")]
    SpanningFailure { rank: usize, ambient: usize },

    #[error(
        "shift anchor {anchor} has degree {needed} but the series is truncated at degree {reach}"
    )]
    TruncationExhausted {
        anchor: MultiIndex,
        needed: u32,
        reach: u32,
    },

    #[error("approximant for {index} needs the recovered coefficient {missing}")]
    MissingLowerLayer {
        index: MultiIndex,
        missing: MultiIndex,
    },

    #[error(
        "error bound violated at {index} with k = {k}: log10 error {log10_error:.3} > log10 bound {log10_bound:.3}"
    )]
    BoundViolation {
        index: MultiIndex,
        k: u32,
        log10_error: f64,
        log10_bound: f64,
    },

    #[error("synthesized norm exceeds its bound: log10 norm {log10_norm:.6} > log10 bound {log10_bound:.6}")]
    NormBoundViolation { log10_norm: f64, log10_bound: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
