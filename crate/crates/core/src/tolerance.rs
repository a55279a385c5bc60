use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every operation.
///
/// `psd_tol` is a relative base: Loewner comparisons allow a slack of
/// `psd_tol * (1 + |x| + |y|)`, projection comparisons allow `10 * psd_tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Eigenvalues closer than this are merged into one breakpoint.
    pub cluster_tol: f64,
    pub psd_tol: f64,
    /// Base of the Cauchy stopping test for power-mean iterations.
    pub conv_tol: f64,
    pub max_power_doublings: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cluster_tol: 1e-9,
            psd_tol: 1e-9,
            conv_tol: 1e-9,
            max_power_doublings: 48,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.cluster_tol, self.psd_tol, self.conv_tol]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidTolerances("non-finite value".into()));
        }
        if self.cluster_tol <= 0.0 {
            return Err(Error::InvalidTolerances("cluster_tol must be > 0".into()));
        }
        if self.psd_tol < 0.0 {
            return Err(Error::InvalidTolerances("psd_tol must be >= 0".into()));
        }
        if self.conv_tol <= 0.0 {
            return Err(Error::InvalidTolerances("conv_tol must be > 0".into()));
        }
        if self.max_power_doublings == 0 || self.max_power_doublings > 62 {
            return Err(Error::InvalidTolerances(
                "max_power_doublings must be in 1..=62".into(),
            ));
        }
        Ok(())
    }

    /// Loewner slack for comparing matrices of the given operator norms.
    pub fn psd_slack(&self, norm_x: f64, norm_y: f64) -> f64 {
        self.psd_tol * (1.0 + norm_x + norm_y)
    }

    /// Threshold on `|p - qp|` for deciding `p <= q` between projections.
    pub fn projection_slack(&self) -> f64 {
        10.0 * self.psd_tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        Tolerances::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_fields() {
        let bad = Tolerances {
            cluster_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = Tolerances {
            psd_tol: -1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let ok = Tolerances {
            psd_tol: 0.0,
            ..Default::default()
        };
        assert!(ok.validate().is_ok());
        let bad = Tolerances {
            max_power_doublings: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
