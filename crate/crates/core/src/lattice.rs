//! Suprema and infima of finite sets in the spectral order.
//!
//! The supremum's spectral family is the pointwise meet of the input
//! families; the infimum's is the pointwise join. With finitely many step
//! families both are constant between merged breakpoints, so evaluating on the
//! merged grid is exact and the right-continuous regularization of the join is
//! the identity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{operator_norm, HermitianMatrix};
use crate::projection::{proj_join, proj_leq, proj_meet, Projection};
use crate::spectral::{merged_grid, spectral_family_of, spectral_leq, SpectralFamily};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bound {
    Sup,
    Inf,
}

fn check_set(ms: &[HermitianMatrix]) -> Result<usize> {
    let first = ms.first().ok_or(Error::EmptySet)?;
    for m in ms {
        Error::dims(first.dim(), m.dim())?;
    }
    Ok(first.dim())
}

fn bound_family(ms: &[HermitianMatrix], tol: &Tolerances, bound: Bound) -> Result<SpectralFamily> {
    let dim = check_set(ms)?;
    let families = ms
        .iter()
        .map(|m| spectral_family_of(m, tol))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&SpectralFamily> = families.iter().collect();
    let grid = merged_grid(&refs, tol);

    let mut breakpoints = Vec::new();
    let mut projections: Vec<Projection> = Vec::new();
    for (i, g) in grid.iter().enumerate() {
        #[cfg(debug_assertions)]
        if let Some(next) = grid.get(i + 1) {
            let mid = 0.5 * (g.probe + next.probe);
            for f in &families {
                debug_assert_eq!(
                    f.at(g.probe).map(Projection::rank),
                    f.at(mid).map(Projection::rank),
                    "family not constant on a grid interval"
                );
            }
        }
        let evaluated: Vec<Option<&Projection>> = families.iter().map(|f| f.at(g.probe)).collect();
        let current = match bound {
            Bound::Sup => {
                if evaluated.iter().any(Option::is_none) {
                    continue;
                }
                let ps: Vec<Projection> = evaluated.into_iter().flatten().cloned().collect();
                proj_meet(&ps, tol)?
            }
            Bound::Inf => {
                let ps: Vec<Projection> = evaluated.into_iter().flatten().cloned().collect();
                if ps.is_empty() {
                    continue;
                }
                proj_join(&ps, tol)?
            }
        };
        let previous_rank = projections.last().map_or(0, Projection::rank);
        if let Some(previous) = projections.last() {
            if !proj_leq(previous, &current, tol)? {
                return Err(Error::InternalLattice(format!(
                    "{bound:?} family decreases at grid point {i} (lambda = {})",
                    g.value
                )));
            }
        }
        if current.rank() > previous_rank {
            breakpoints.push(g.value);
            projections.push(current);
        } else if current.rank() < previous_rank {
            return Err(Error::InternalLattice(format!(
                "{bound:?} family loses rank at grid point {i}"
            )));
        }
    }
    match projections.last() {
        Some(last) if last.rank() == dim => {}
        _ => {
            return Err(Error::InternalLattice(format!(
                "{bound:?} family does not reach the identity"
            )))
        }
    }
    Ok(SpectralFamily::from_steps_unchecked(breakpoints, projections))
}

/// Spectral family of the supremum: `lambda -> meet_x E^x_lambda`.
pub fn spectral_sup_family(ms: &[HermitianMatrix], tol: &Tolerances) -> Result<SpectralFamily> {
    bound_family(ms, tol, Bound::Sup)
}

/// Spectral family of the infimum: `lambda -> join_x E^x_lambda`.
pub fn spectral_inf_family(ms: &[HermitianMatrix], tol: &Tolerances) -> Result<SpectralFamily> {
    bound_family(ms, tol, Bound::Inf)
}

pub fn spectral_sup(ms: &[HermitianMatrix], tol: &Tolerances) -> Result<HermitianMatrix> {
    Ok(spectral_sup_family(ms, tol)?.reconstruct())
}

pub fn spectral_inf(ms: &[HermitianMatrix], tol: &Tolerances) -> Result<HermitianMatrix> {
    Ok(spectral_inf_family(ms, tol)?.reconstruct())
}

/// Which bound to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeMode {
    Sup,
    Inf,
}

impl LatticeMode {
    pub fn name(self) -> &'static str {
        match self {
            LatticeMode::Sup => "sup",
            LatticeMode::Inf => "inf",
        }
    }

    pub fn apply(self, ms: &[HermitianMatrix], tol: &Tolerances) -> Result<HermitianMatrix> {
        match self {
            LatticeMode::Sup => spectral_sup(ms, tol),
            LatticeMode::Inf => spectral_inf(ms, tol),
        }
    }
}

impl fmt::Display for LatticeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sup" => Ok(LatticeMode::Sup),
            "inf" => Ok(LatticeMode::Inf),
            _ => Err(format!("unknown mode `{s}` (expected sup or inf)")),
        }
    }
}

/// Subsets of `M_sa` that are closed under spectral suprema and infima.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixClass {
    Positive,
    UnitBall,
    Effect,
    Projection,
}

impl MatrixClass {
    pub const ALL: [MatrixClass; 4] = [
        MatrixClass::Positive,
        MatrixClass::UnitBall,
        MatrixClass::Effect,
        MatrixClass::Projection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MatrixClass::Positive => "positive",
            MatrixClass::UnitBall => "unit_ball",
            MatrixClass::Effect => "effect",
            MatrixClass::Projection => "projection",
        }
    }

    /// `Err` carries the reason for non-membership.
    pub fn check(self, h: &HermitianMatrix, tol: &Tolerances) -> Result<std::result::Result<(), String>> {
        let eig = h.eigen()?;
        let (lo, hi) = (eig.min(), eig.max());
        let positive = || {
            if lo >= -tol.psd_tol {
                Ok(())
            } else {
                Err(format!("smallest eigenvalue {lo:e}"))
            }
        };
        let ball = || {
            let norm = lo.abs().max(hi.abs());
            if norm <= 1.0 + tol.psd_tol {
                Ok(())
            } else {
                Err(format!("operator norm {norm}"))
            }
        };
        Ok(match self {
            MatrixClass::Positive => positive(),
            MatrixClass::UnitBall => ball(),
            MatrixClass::Effect => positive().and_then(|_| ball()),
            MatrixClass::Projection => {
                let defect = eig
                    .eigenvalues
                    .iter()
                    .map(|&l| l.abs().min((l - 1.0).abs()))
                    .fold(0.0, f64::max);
                if defect <= tol.cluster_tol {
                    Ok(())
                } else {
                    Err(format!("spectrum deviates from {{0,1}} by {defect:e}"))
                }
            }
        })
    }
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MatrixClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        MatrixClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown class `{s}`"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosureReport {
    pub class: MatrixClass,
    pub passed: bool,
    pub sup_violation: Option<String>,
    pub inf_violation: Option<String>,
}

/// Checks that the supremum and infimum of members of `class` stay in `class`.
pub fn membership_closure_check(
    ms: &[HermitianMatrix],
    class: MatrixClass,
    tol: &Tolerances,
) -> Result<ClosureReport> {
    check_set(ms)?;
    for (index, m) in ms.iter().enumerate() {
        if let Err(reason) = class.check(m, tol)? {
            return Err(Error::ClassViolation {
                index,
                class: class.to_string(),
                reason,
            });
        }
    }
    let sup_violation = class.check(&spectral_sup(ms, tol)?, tol)?.err();
    let inf_violation = class.check(&spectral_inf(ms, tol)?, tol)?.err();
    Ok(ClosureReport {
        class,
        passed: sup_violation.is_none() && inf_violation.is_none(),
        sup_violation,
        inf_violation,
    })
}

/// `(-K I, K I)` with `K` the largest operator norm in the set.
pub fn order_bounds(ms: &[HermitianMatrix], tol: &Tolerances) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let dim = check_set(ms)?;
    let k = ms.iter().map(operator_norm).fold(0.0, f64::max);
    let lower = HermitianMatrix::scaled_identity(dim, -k);
    let upper = HermitianMatrix::scaled_identity(dim, k);
    for (i, m) in ms.iter().enumerate() {
        if !spectral_leq(&lower, m, tol)?.holds || !spectral_leq(m, &upper, tol)?.holds {
            return Err(Error::InternalLattice(format!(
                "element {i} escapes the norm bounds {k}"
            )));
        }
    }
    Ok((lower, upper))
}

/// `{alpha x + beta I}`.
pub fn affine_image(ms: &[HermitianMatrix], alpha: f64, beta: f64) -> Result<Vec<HermitianMatrix>> {
    if !(alpha > 0.0) {
        return Err(Error::NonPositiveScale(alpha));
    }
    Ok(ms.iter().map(|m| m.affine(alpha, beta)).collect())
}
