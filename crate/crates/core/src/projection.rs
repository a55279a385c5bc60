//! Orthogonal projections and the lattice operations of `(P(M), <=)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{general_operator_norm, HermitianMatrix, C64};
use crate::tolerance::Tolerances;

/// A Hermitian idempotent matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    matrix: HermitianMatrix,
    rank: usize,
}

impl Projection {
    /// Validates that the spectrum of `matrix` lies within `cluster_tol` of `{0, 1}`.
    pub fn new(matrix: HermitianMatrix, tol: &Tolerances) -> Result<Self> {
        let eig = matrix.eigen()?;
        let defect = eig
            .eigenvalues
            .iter()
            .map(|&l| l.abs().min((l - 1.0).abs()))
            .fold(0.0, f64::max);
        if defect > tol.cluster_tol {
            return Err(Error::NotProjection { defect });
        }
        let rank = eig.eigenvalues.iter().filter(|&&l| l > 0.5).count();
        Ok(Projection { matrix, rank })
    }

    /// Projection onto the span of the given orthonormal columns.
    pub(crate) fn from_orthonormal(columns: &DMatrix<C64>) -> Self {
        let matrix = HermitianMatrix::from_matrix_unchecked(columns * columns.adjoint());
        Projection {
            matrix,
            rank: columns.ncols(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Projection {
            matrix: HermitianMatrix::zeros(dim),
            rank: 0,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Projection {
            matrix: HermitianMatrix::identity(dim),
            rank: dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.matrix
    }

    /// `I - p`.
    pub fn complement(&self) -> Projection {
        Projection {
            matrix: self.matrix.affine(-1.0, 1.0),
            rank: self.dim() - self.rank,
        }
    }
}

/// `|p - qp|` in operator norm; zero exactly when `range(p)` lies in `range(q)`.
pub fn containment_defect(p: &Projection, q: &Projection) -> Result<f64> {
    Error::dims(p.dim(), q.dim())?;
    let qp = q.matrix.product(&p.matrix);
    Ok(general_operator_norm(&(p.matrix.as_matrix() - qp)))
}

pub fn proj_leq(p: &Projection, q: &Projection, tol: &Tolerances) -> Result<bool> {
    Ok(containment_defect(p, q)? <= tol.projection_slack())
}

fn check_family(ps: &[Projection]) -> Result<usize> {
    let first = ps.first().ok_or(Error::EmptySet)?;
    for p in ps {
        Error::dims(first.dim(), p.dim())?;
    }
    Ok(first.dim())
}

/// Projection onto the intersection of the ranges.
///
/// The intersection is the eigenspace of `sum p_i` for the eigenvalue `k`,
/// the number of inputs.
pub fn proj_meet(ps: &[Projection], tol: &Tolerances) -> Result<Projection> {
    let dim = check_family(ps)?;
    if ps.len() == 1 {
        return Ok(ps[0].clone());
    }
    if ps.iter().any(|p| p.rank == 0) {
        return Ok(Projection::zero(dim));
    }
    let full: Vec<&Projection> = ps.iter().filter(|p| p.rank < dim).collect();
    match full.len() {
        0 => return Ok(Projection::identity(dim)),
        1 => return Ok(full[0].clone()),
        _ => {}
    }
    let k = full.len() as f64;
    let mut sum = DMatrix::<C64>::zeros(dim, dim);
    for p in &full {
        sum += p.matrix.as_matrix();
    }
    let sum = HermitianMatrix::from_matrix_unchecked(sum);
    let eig = sum.eigen()?;
    let threshold = k - (k * tol.cluster_tol).min(0.5);
    let keep: Vec<usize> = (0..dim).filter(|&j| eig.eigenvalues[j] > threshold).collect();
    let mut columns = DMatrix::<C64>::zeros(dim, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        columns.column_mut(dst).copy_from(&eig.eigenvectors.column(src));
    }
    Ok(Projection::from_orthonormal(&columns))
}

/// Projection onto the span of the ranges, `I - meet(I - p_i)`.
pub fn proj_join(ps: &[Projection], tol: &Tolerances) -> Result<Projection> {
    check_family(ps)?;
    let complements: Vec<Projection> = ps.iter().map(Projection::complement).collect();
    Ok(proj_meet(&complements, tol)?.complement())
}

/// Independent meet oracle: `(pqp)^(2^j)` by repeated squaring.
///
/// Stops once successive iterates differ by less than `conv_tol` in operator
/// norm; `max_squarings` caps `j`.
pub fn alternating_meet_oracle(
    p: &Projection,
    q: &Projection,
    max_squarings: u32,
    tol: &Tolerances,
) -> Result<HermitianMatrix> {
    Error::dims(p.dim(), q.dim())?;
    let pm = p.matrix.as_matrix();
    let qm = q.matrix.as_matrix();
    let mut current = HermitianMatrix::from_matrix_unchecked(pm * qm * pm);
    let mut residual = f64::INFINITY;
    for j in 0..max_squarings {
        let m = current.as_matrix();
        let next = HermitianMatrix::from_matrix_unchecked(m * m);
        residual = next.distance(&current)?;
        current = next;
        if residual < tol.conv_tol {
            return Ok(current);
        }
        if j + 1 == max_squarings {
            break;
        }
    }
    Err(Error::NoConvergence {
        exponent: 1u64 << max_squarings.min(63),
        residual,
        last_iterate: Box::new(current),
    })
}
