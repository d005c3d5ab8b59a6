//! Numerical tolerance policy.

use serde::{Deserialize, Serialize};

use crate::error::{MaslovError, Result};

/// Thresholds used throughout the crate.
///
/// `residual_tol` bounds invariant residuals, `rank_tol` truncates singular values and
/// `phase_tol` (radians, or index units after division by π) gates every rounding to an integer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub residual_tol: f64,
    pub rank_tol: f64,
    pub phase_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { residual_tol: 1e-9, rank_tol: 1e-8, phase_tol: 1e-6 }
    }
}

impl Tolerances {
    /// Check positivity and that `rank_tol` is meaningful for matrices of size `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        for (name, v) in
            [("residual_tol", self.residual_tol), ("rank_tol", self.rank_tol), ("phase_tol", self.phase_tol)]
        {
            if !(v.is_finite() && v > 0.0) {
                return Err(MaslovError::InvalidInput(format!("{name} must be finite and positive, got {v}")));
            }
        }
        if self.rank_tol < f64::EPSILON * dim.max(1) as f64 {
            return Err(MaslovError::InvalidInput(format!(
                "rank_tol {} below machine epsilon times dimension {dim}",
                self.rank_tol
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let t = Tolerances::default();
        assert!(t.validate(6).is_ok());
        assert_eq!(t.residual_tol, 1e-9);
        assert_eq!(t.rank_tol, 1e-8);
        assert_eq!(t.phase_tol, 1e-6);
    }

    #[test]
    fn rejects_nonpositive_and_tiny_rank() {
        assert!(Tolerances { phase_tol: 0.0, ..Tolerances::default() }.validate(2).is_err());
        assert!(Tolerances { rank_tol: 1e-17, ..Tolerances::default() }.validate(4).is_err());
        assert!(Tolerances { residual_tol: f64::NAN, ..Tolerances::default() }.validate(2).is_err());
    }
}
