//! Negative controls: inputs that a correct certifier must reject.

use crate::error::Result;
use crate::model::{
    build_rank1_with_weights, build_rank_n_unchecked, GrowthSpec, SectionPolynomial,
    TruncatedTupleModel, WeightProfile,
};
use crate::multiindex::{enumerate_up_to, MultiIndex};
use crate::synth::WeightedSeries;

pub fn zero_vector(model: &TruncatedTupleModel, precision: usize) -> WeightedSeries {
    WeightedSeries::zero(model, precision)
}

/// `a_0` alone; every backward shift annihilates it.
pub fn constant_term(model: &TruncatedTupleModel, precision: usize) -> WeightedSeries {
    WeightedSeries::unit(model, &MultiIndex::zero(model.dimension()), precision)
}

/// Rank-one model whose weight at `flip` has its sign reversed.
pub fn sign_corrupted_model(
    profile: &WeightProfile,
    m: usize,
    degree: u32,
    radii: &[f64],
    growth: &GrowthSpec,
    flip: &MultiIndex,
) -> Result<TruncatedTupleModel> {
    let window = enumerate_up_to(m, degree);
    let mut weights = profile.weights_on(&window)?;
    let pos = window.iter().position(|a| a == flip).ok_or_else(|| {
        crate::Error::InvalidParameter(format!("{flip} is outside the window"))
    })?;
    weights[pos] = -weights[pos];
    build_rank1_with_weights(profile.clone(), weights, m, degree, radii, growth)
}

/// `n` copies of `base` with identical constant sections; spans only `d/n`.
pub fn diagonal_section_model(base: &TruncatedTupleModel, n: usize) -> Result<TruncatedTupleModel> {
    let models = vec![base.clone(); n];
    let sections = vec![SectionPolynomial::constant(base.dimension()); n];
    build_rank_n_unchecked(&models, &sections)
}
