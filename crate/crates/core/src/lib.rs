//! Numerical laboratory for cyclic vectors of commuting weighted multi-shift
//! tuples at finite truncation.
//!
//! The pipeline: build a truncated model ([`model`]), synthesize the
//! weighted series `f = Σ ξ_α a_α` in the log domain ([`synth`]), recover the
//! frame coefficients from shifts of `f` layer by layer, and certify the
//! result ([`certify`]).

pub mod certify;
pub mod error;
pub mod logweight;
pub mod model;
pub mod multiindex;
pub mod synth;

pub use error::{Error, Result};
