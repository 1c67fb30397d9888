use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightEntry {
    pub index: MultiIndex,
    pub value: f64,
}

/// Rule for the weights `c_α` of a rank-one model, `a_α = c_α e_α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "name", content = "table")]
pub enum WeightProfile {
    /// `c_α = 1`.
    Hardy,
    /// `c_α = ∏ (α_i + 1)`.
    Bergman,
    /// Explicit table; indices outside it have no weight.
    Custom(Vec<WeightEntry>),
}

impl WeightProfile {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Hardy => "hardy",
            Self::Bergman => "bergman",
            Self::Custom(_) => "custom",
        }
    }

    /// Resolves the rule into a lookup usable for any index.
    pub fn resolver(&self) -> WeightLookup {
        match self {
            Self::Hardy => WeightLookup::Hardy,
            Self::Bergman => WeightLookup::Bergman,
            Self::Custom(t) => {
                WeightLookup::Table(t.iter().map(|e| (e.index.clone(), e.value)).collect())
            }
        }
    }

    /// Weights on `window`, checked for `c_0 = 1` and positivity.
    pub fn weights_on(&self, window: &[MultiIndex]) -> Result<Vec<f64>> {
        let lookup = self.resolver();
        let mut out = Vec::with_capacity(window.len());
        for alpha in window {
            let c = lookup.get(alpha).ok_or_else(|| {
                Error::InvalidModel(format!("custom weight table has no entry for {alpha}"))
            })?;
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::InvalidModel(format!(
                    "weight at {alpha} must be positive and finite, got {c}"
                )));
            }
            if alpha.is_zero() && c != 1.0 {
                return Err(Error::InvalidModel(format!(
                    "weight at the origin must be 1, got {c}"
                )));
            }
            out.push(c);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub enum WeightLookup {
    Hardy,
    Bergman,
    Table(HashMap<MultiIndex, f64>),
}

impl WeightLookup {
    pub fn get(&self, alpha: &MultiIndex) -> Option<f64> {
        match self {
            Self::Hardy => Some(1.0),
            Self::Bergman => Some(alpha.entries().iter().map(|&a| (a + 1) as f64).product()),
            Self::Table(t) => t.get(alpha).copied(),
        }
    }
}
