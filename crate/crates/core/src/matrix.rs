//! Dense Hermitian matrices, their eigensystems, the Loewner order and
//! functional calculus.

use std::fmt;
use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type C64 = Complex64;

/// A self-adjoint `d x d` complex matrix.
///
/// Construction symmetrizes the entries, so the stored matrix is exactly
/// Hermitian. The eigensystem is computed lazily and cached.
pub struct HermitianMatrix {
    data: DMatrix<C64>,
    eigen: OnceLock<Result<EigenSystem>>,
}

impl Clone for HermitianMatrix {
    fn clone(&self) -> Self {
        let eigen = OnceLock::new();
        if let Some(cached) = self.eigen.get() {
            let _ = eigen.set(cached.clone());
        }
        HermitianMatrix {
            data: self.data.clone(),
            eigen,
        }
    }
}

impl PartialEq for HermitianMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermitianMatrix")
            .field("dim", &self.dim())
            .field("data", &self.data)
            .finish()
    }
}

/// Eigenvalues in ascending order with the matching unitary eigenvector matrix
/// (eigenvectors are the columns).
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `U diag(f(lambda)) U*`.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> HermitianMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let value = f(lambda);
            scaled.column_mut(j).scale_mut(value);
        }
        HermitianMatrix::from_matrix_unchecked(&scaled * self.eigenvectors.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|lambda| lambda)
    }
}

impl HermitianMatrix {
    /// Symmetrizes `(m + m*)/2` without checking how far `m` was from Hermitian.
    pub(crate) fn from_matrix_unchecked(m: DMatrix<C64>) -> Self {
        let adjoint = m.adjoint();
        let data = (m + adjoint).scale(0.5);
        HermitianMatrix {
            data,
            eigen: OnceLock::new(),
        }
    }

    /// Real symmetric input given row by row, checked with default tolerances.
    pub fn from_real<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut m = DMatrix::<C64>::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::NonSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = C64::new(v, 0.0);
            }
        }
        make_hermitian(&m, &Tolerances::default())
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = DMatrix::<C64>::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        HermitianMatrix {
            data: m,
            eigen: OnceLock::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn zeros(dim: usize) -> Self {
        Self::scaled_identity(dim, 0.0)
    }

    pub fn scaled_identity(dim: usize, value: f64) -> Self {
        Self::diag(&vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn eigen(&self) -> Result<&EigenSystem> {
        self.eigen
            .get_or_init(|| compute_eigensystem(&self.data))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Error::dims(self.dim(), other.dim())?;
        Ok(Self::from_matrix_unchecked(&self.data + &other.data))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Error::dims(self.dim(), other.dim())?;
        Ok(Self::from_matrix_unchecked(&self.data - &other.data))
    }

    pub fn neg(&self) -> Self {
        self.affine(-1.0, 0.0)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        self.affine(alpha, 0.0)
    }

    pub fn shift(&self, beta: f64) -> Self {
        self.affine(1.0, beta)
    }

    /// `alpha * self + beta * I`.
    pub fn affine(&self, alpha: f64, beta: f64) -> Self {
        let mut m = self.data.scale(alpha);
        for i in 0..self.dim() {
            m[(i, i)] += C64::new(beta, 0.0);
        }
        HermitianMatrix {
            data: m,
            eigen: OnceLock::new(),
        }
    }

    /// Plain matrix product; the result is generally not Hermitian.
    pub fn product(&self, other: &Self) -> DMatrix<C64> {
        &self.data * &other.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    /// Operator-norm distance `|self - other|`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(operator_norm(&self.sub(other)?))
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.data[(i, j)].norm() <= tol))
    }
}

fn compute_eigensystem(m: &DMatrix<C64>) -> Result<EigenSystem> {
    let n = m.nrows();
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigenFailure("matrix has non-finite entries".into()));
    }
    let decomposition = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 1000 * n.max(1))
        .ok_or_else(|| Error::EigenFailure(format!("QR iteration did not converge (dim {n})")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        decomposition.eigenvalues[a]
            .partial_cmp(&decomposition.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let eigenvalues = order.iter().map(|&i| decomposition.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::<C64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors
            .column_mut(dst)
            .copy_from(&decomposition.eigenvectors.column(src));
    }
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Validates near-Hermitian input and returns its symmetrization.
pub fn make_hermitian(raw: &DMatrix<C64>, tol: &Tolerances) -> Result<HermitianMatrix> {
    let (rows, cols) = raw.shape();
    if rows != cols {
        return Err(Error::NonSquare { rows, cols });
    }
    if rows == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut worst = (0, 0, 0.0_f64);
    for i in 0..rows {
        for j in i..cols {
            let gap = (raw[(i, j)] - raw[(j, i)].conj()).norm();
            if gap.is_nan() || gap > worst.2 {
                worst = (i, j, if gap.is_nan() { f64::INFINITY } else { gap });
            }
        }
    }
    if worst.2 > tol.cluster_tol {
        return Err(Error::NotHermitian {
            row: worst.0,
            col: worst.1,
            asymmetry: worst.2,
        });
    }
    Ok(HermitianMatrix::from_matrix_unchecked(raw.clone()))
}

pub fn eigensystem(h: &HermitianMatrix) -> Result<EigenSystem> {
    h.eigen().cloned()
}

/// `x <= y` in the Loewner order: `lambda_min(y - x) >= -slack`.
pub fn loewner_leq(x: &HermitianMatrix, y: &HermitianMatrix, tol: &Tolerances) -> Result<bool> {
    let diff = y.sub(x)?;
    let slack = tol.psd_slack(operator_norm(x), operator_norm(y));
    Ok(diff.eigen()?.min() >= -slack)
}

pub fn functional_calculus<F: Fn(f64) -> f64>(h: &HermitianMatrix, f: F) -> Result<HermitianMatrix> {
    Ok(h.eigen()?.map(f))
}

pub fn positive_part(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    functional_calculus(h, |s| s.max(0.0))
}

pub fn negative_part(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    functional_calculus(h, |s| (-s).max(0.0))
}

/// `max |lambda_i|`. Falls back to the Frobenius norm (an upper bound) if the
/// eigensolver fails.
pub fn operator_norm(h: &HermitianMatrix) -> f64 {
    match h.eigen() {
        Ok(eig) => eig.min().abs().max(eig.max().abs()),
        Err(_) => h.frobenius_norm(),
    }
}

/// Operator norm of an arbitrary square matrix (largest singular value).
pub(crate) fn general_operator_norm(m: &DMatrix<C64>) -> f64 {
    let gram = HermitianMatrix::from_matrix_unchecked(m.adjoint() * m);
    operator_norm(&gram).max(0.0).sqrt()
}
