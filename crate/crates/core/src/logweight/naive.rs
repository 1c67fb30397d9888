use crate::multiindex::MultiIndex;

/// `ξ_α` evaluated directly in `f64`, for demonstrating why the log domain is
/// needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveXi {
    pub value: f64,
    /// The double result is zero, infinite or NaN although `ξ_α > 0`.
    pub broken: bool,
}

pub fn xi_naive(alpha: &MultiIndex) -> NaiveXi {
    let fact = |n: u32| (2..=n).fold(1f64, |acc, j| acc * j as f64);
    let exponent: f64 = alpha.entries().iter().map(|&a| fact(a)).product();
    let base = fact(alpha.degree());
    let value = 1.0 / base.powf(exponent);
    NaiveXi {
        value,
        broken: !(value.is_finite() && value > 0.0),
    }
}
