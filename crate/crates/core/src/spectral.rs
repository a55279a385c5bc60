//! Spectral families of Hermitian matrices and the spectral order.
//!
//! A family is stored as a right-continuous step function: on
//! `[breakpoints[i], breakpoints[i + 1])` it equals `projections[i]`, below the
//! first breakpoint it is zero and from the last breakpoint on it is the
//! identity.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{HermitianMatrix, C64};
use crate::projection::{containment_defect, proj_leq, Projection};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone)]
pub struct SpectralFamily {
    breakpoints: Vec<f64>,
    projections: Vec<Projection>,
}

/// Outcome of a spectral-order comparison `x ⪯ y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderVerdict {
    pub holds: bool,
    /// Smallest breakpoint where `E^y <= E^x` fails.
    pub witness_lambda: Option<f64>,
    /// `|E^y - E^x E^y|` at the witness.
    pub defect: Option<f64>,
    /// Some eigenvalue gap lies in `(cluster_tol, 10 * cluster_tol)`, so the
    /// verdict depends on the clustering threshold.
    pub borderline: bool,
}

impl SpectralFamily {
    /// Builds a family from ascending breakpoints and cumulative projections,
    /// checking monotonicity and that the last projection is the identity.
    pub fn new(breakpoints: Vec<f64>, projections: Vec<Projection>, tol: &Tolerances) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != projections.len() {
            return Err(Error::InvalidFamily(format!(
                "{} breakpoints for {} projections",
                breakpoints.len(),
                projections.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidFamily("breakpoints must be strictly ascending".into()));
        }
        let dim = projections[0].dim();
        if projections.iter().any(|p| p.dim() != dim) {
            return Err(Error::InvalidFamily("projections of different dimensions".into()));
        }
        if projections[0].rank() == 0 {
            return Err(Error::InvalidFamily("first projection is zero".into()));
        }
        for (i, w) in projections.windows(2).enumerate() {
            if !proj_leq(&w[0], &w[1], tol)? {
                return Err(Error::InvalidFamily(format!("not monotone at breakpoint {i}")));
            }
        }
        let last = projections.last().expect("non-empty");
        let gap = last.matrix().distance(&HermitianMatrix::identity(dim))?;
        if gap > tol.projection_slack() {
            return Err(Error::InvalidFamily(format!(
                "last projection differs from the identity by {gap:e}"
            )));
        }
        Ok(SpectralFamily {
            breakpoints,
            projections,
        })
    }

    /// Skips validation; callers guarantee the family invariants.
    pub(crate) fn from_steps_unchecked(breakpoints: Vec<f64>, projections: Vec<Projection>) -> Self {
        SpectralFamily {
            breakpoints,
            projections,
        }
    }

    pub fn dim(&self) -> usize {
        self.projections[0].dim()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn projections(&self) -> &[Projection] {
        &self.projections
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.projections.iter().map(Projection::rank).collect()
    }

    /// The projection at `lambda`, or `None` for the zero projection.
    pub(crate) fn at(&self, lambda: f64) -> Option<&Projection> {
        let idx = self.breakpoints.partition_point(|&b| b <= lambda);
        idx.checked_sub(1).map(|i| &self.projections[i])
    }

    pub fn evaluate_at(&self, lambda: f64) -> Projection {
        self.at(lambda)
            .cloned()
            .unwrap_or_else(|| Projection::zero(self.dim()))
    }

    /// `sum_i lambda_i (P_i - P_{i-1})`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        let dim = self.dim();
        let mut acc = DMatrix::<C64>::zeros(dim, dim);
        let mut previous = DMatrix::<C64>::zeros(dim, dim);
        for (lambda, p) in self.breakpoints.iter().zip(&self.projections) {
            let current = p.matrix().as_matrix();
            acc += (current - &previous).scale(*lambda);
            previous = current.clone();
        }
        HermitianMatrix::from_matrix_unchecked(acc)
    }
}

pub fn spectral_family_of(h: &HermitianMatrix, tol: &Tolerances) -> Result<SpectralFamily> {
    let eig = h.eigen()?;
    let dim = h.dim();
    let mut breakpoints = Vec::new();
    let mut projections = Vec::new();
    for (start, end) in clusters(&eig.eigenvalues, tol.cluster_tol) {
        let mean = eig.eigenvalues[start..end].iter().sum::<f64>() / (end - start) as f64;
        breakpoints.push(mean);
        projections.push(if end == dim {
            Projection::identity(dim)
        } else {
            Projection::from_orthonormal(&eig.eigenvectors.columns(0, end).into_owned())
        });
    }
    Ok(SpectralFamily {
        breakpoints,
        projections,
    })
}

pub fn evaluate_at(sf: &SpectralFamily, lambda: f64) -> Projection {
    sf.evaluate_at(lambda)
}

pub fn reconstruct(sf: &SpectralFamily) -> HermitianMatrix {
    sf.reconstruct()
}

/// Index ranges of sorted values chained together when neighbours are within `tol`.
pub(crate) fn clusters(sorted: &[f64], tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > tol {
            out.push((start, i));
            start = i;
        }
    }
    out
}

/// A point of the merged breakpoint grid of several families.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GridPoint {
    /// Mean of the clustered breakpoints; the value assigned to the result.
    pub value: f64,
    /// Largest clustered breakpoint; families are evaluated here so that
    /// breakpoints differing only by roundoff switch on together.
    pub probe: f64,
}

pub(crate) fn merged_grid(families: &[&SpectralFamily], tol: &Tolerances) -> Vec<GridPoint> {
    let mut all: Vec<f64> = families
        .iter()
        .flat_map(|f| f.breakpoints.iter().copied())
        .collect();
    all.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    clusters(&all, tol.cluster_tol)
        .into_iter()
        .map(|(s, e)| GridPoint {
            value: all[s..e].iter().sum::<f64>() / (e - s) as f64,
            probe: all[e - 1],
        })
        .collect()
}

fn borderline(x: &HermitianMatrix, y: &HermitianMatrix, tol: &Tolerances) -> Result<bool> {
    let mut values: Vec<f64> = x.eigen()?.eigenvalues.clone();
    values.extend_from_slice(&y.eigen()?.eigenvalues);
    let (lo, hi) = (tol.cluster_tol, 10.0 * tol.cluster_tol);
    Ok(values.iter().enumerate().any(|(i, a)| {
        values[i + 1..].iter().any(|b| {
            let gap = (a - b).abs();
            gap > lo && gap < hi
        })
    }))
}

/// Decides `x ⪯ y`, i.e. `E^y_lambda <= E^x_lambda` for every `lambda`.
///
/// Both families are step functions, so checking the merged breakpoints is exact.
pub fn spectral_leq(x: &HermitianMatrix, y: &HermitianMatrix, tol: &Tolerances) -> Result<OrderVerdict> {
    Error::dims(x.dim(), y.dim())?;
    let fx = spectral_family_of(x, tol)?;
    let fy = spectral_family_of(y, tol)?;
    let borderline = borderline(x, y, tol)?;
    for g in merged_grid(&[&fx, &fy], tol) {
        let (p, q) = match (fy.at(g.probe), fx.at(g.probe)) {
            (None, _) => continue,
            (Some(_), None) => {
                return Ok(OrderVerdict {
                    holds: false,
                    witness_lambda: Some(g.value),
                    defect: Some(1.0),
                    borderline,
                })
            }
            (Some(p), Some(q)) => (p, q),
        };
        if q.rank() == q.dim() {
            continue;
        }
        let defect = containment_defect(p, q)?;
        if defect > tol.projection_slack() {
            return Ok(OrderVerdict {
                holds: false,
                witness_lambda: Some(g.value),
                defect: Some(defect),
                borderline,
            });
        }
    }
    Ok(OrderVerdict {
        holds: true,
        witness_lambda: None,
        defect: None,
        borderline,
    })
}
