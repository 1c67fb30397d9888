use nalgebra::{Complex, DVector};
use serde::Serialize;

use crate::logweight::xi_naive;
use crate::model::{TruncatedTupleModel, C64};
use crate::multiindex::MultiIndex;

/// The layer-0 approximant computed entirely in doubles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NaiveLayer0 {
    pub k: u32,
    /// `‖A₀(k) − a_0‖` in doubles; NaN when the computation broke down.
    pub error: f64,
    pub bound: f64,
    pub violated: bool,
}

/// Materializes `f` on the window in doubles, applies `T^{(k+1)ε}` by matrix
/// products and divides by `ξ_{(k+1)ε}`.
pub fn naive_layer0(model: &TruncatedTupleModel, k: u32) -> NaiveLayer0 {
    let m = model.dimension();
    let d = model.ambient_dim();
    let mut f = DVector::<C64>::from_element(d, Complex::new(0.0, 0.0));
    for (alpha, a) in model.coefficients() {
        if alpha.degree() <= model.degree() {
            f += a * Complex::new(xi_naive(alpha).value, 0.0);
        }
    }
    let anchor = MultiIndex::uniform(m, k + 1);
    let shifted = model.apply_shift(&anchor, &f);
    let approx = shifted / Complex::new(xi_naive(&anchor).value, 0.0);
    let a0 = model
        .coefficient(&MultiIndex::zero(m))
        .expect("origin is always in the support");
    let error = (approx - a0).norm();
    let bound = (model.growth().ln_norm_bound() - ln_factorial_f64(k + 1)).exp();
    NaiveLayer0 {
        k,
        error,
        bound,
        violated: !(error <= bound),
    }
}

fn ln_factorial_f64(n: u32) -> f64 {
    (2..=n).map(|j| (j as f64).ln()).sum()
}
