use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every certificate. All must be positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// A gap of index `i` exists when `sigma_i / sigma_{i+1} > 1 + gap_tol`.
    pub gap_tol: f64,
    pub alpha_min: f64,
    pub c_max: f64,
    pub flat_tol: f64,
    pub rank_tol: f64,
    pub det_tol: f64,
    /// Principal-angle threshold for deduplicating limit-set samples.
    pub dedup_tol: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            alpha_min: 0.05,
            c_max: 50.0,
            flat_tol: 1e-6,
            rank_tol: 1e-8,
            det_tol: 1e-10,
            dedup_tol: 1e-6,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("gap_tol", self.gap_tol),
            ("alpha_min", self.alpha_min),
            ("c_max", self.c_max),
            ("flat_tol", self.flat_tol),
            ("rank_tol", self.rank_tol),
            ("det_tol", self.det_tol),
            ("dedup_tol", self.dedup_tol),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Invalid(format!("thresholds.{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}
