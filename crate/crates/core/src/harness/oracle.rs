//! Lattice operations on commuting families by joint diagonalization.
//!
//! For commuting matrices the spectral order coincides with the Loewner
//! order, and both bounds are the entrywise max/min of the joint eigenvalues.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::harness::generate::case_rng;
use crate::lattice::LatticeMode;
use crate::matrix::{general_operator_norm, operator_norm, HermitianMatrix, C64};
use crate::spectral::clusters;

const WEIGHT_SEED: u64 = 0x5eed_c0de;

fn compress(x: &HermitianMatrix, basis: &DMatrix<C64>) -> HermitianMatrix {
    HermitianMatrix::from_matrix_unchecked(basis.adjoint() * x.as_matrix() * basis)
}

/// Splits `basis` into eigenspaces of `m`, the compression of some family
/// combination, with eigenvalues closer than `gap` kept together.
fn split(basis: &DMatrix<C64>, m: &HermitianMatrix, gap: f64) -> Result<Vec<DMatrix<C64>>> {
    let eig = m.eigen()?;
    Ok(clusters(&eig.eigenvalues, gap)
        .into_iter()
        .map(|(s, e)| basis * eig.eigenvectors.columns(s, e - s))
        .collect())
}

/// Refines `basis` until every family member is scalar on each piece.
fn refine(ms: &[HermitianMatrix], basis: DMatrix<C64>, gap: f64, out: &mut Vec<DMatrix<C64>>) -> Result<()> {
    if basis.ncols() > 1 {
        for x in ms {
            let c = compress(x, &basis);
            let eig = c.eigen()?;
            if eig.max() - eig.min() > gap {
                for piece in split(&basis, &c, gap)? {
                    refine(ms, piece, gap, out)?;
                }
                return Ok(());
            }
        }
    }
    out.push(basis);
    Ok(())
}

fn check_commuting(ms: &[HermitianMatrix]) -> Result<f64> {
    let first = ms.first().ok_or(Error::EmptySet)?;
    for m in ms {
        Error::dims(first.dim(), m.dim())?;
    }
    let scale = ms.iter().map(operator_norm).fold(0.0, f64::max);
    let limit = 1e-10 * (1.0 + scale).powi(2);
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            let comm = ms[i].product(&ms[j]) - ms[j].product(&ms[i]);
            let norm = general_operator_norm(&comm);
            if norm > limit {
                return Err(Error::NotCommuting { i, j, norm });
            }
        }
    }
    Ok(scale)
}

/// Supremum or infimum of a commuting family via a joint eigenbasis.
pub fn commuting_oracle(ms: &[HermitianMatrix], mode: LatticeMode) -> Result<HermitianMatrix> {
    let scale = check_commuting(ms)?;
    let dim = ms[0].dim();
    let gap = 1e-8 * (1.0 + scale);
    let mut rng = case_rng(WEIGHT_SEED, 0);
    let mut combo = HermitianMatrix::zeros(dim);
    for x in ms {
        combo = combo.add(&x.scale(rng.random_range(1.0..2.0)))?;
    }
    let mut blocks = Vec::new();
    for piece in split(&DMatrix::identity(dim, dim), &combo, gap)? {
        refine(ms, piece, gap, &mut blocks)?;
    }
    let mut acc = DMatrix::<C64>::zeros(dim, dim);
    for block in &blocks {
        let values = ms.iter().map(|x| {
            let c = compress(x, block);
            (0..c.dim()).map(|i| c.get(i, i).re).sum::<f64>() / c.dim() as f64
        });
        let value = match mode {
            LatticeMode::Sup => values.fold(f64::NEG_INFINITY, f64::max),
            LatticeMode::Inf => values.fold(f64::INFINITY, f64::min),
        };
        acc += block * block.adjoint() * C64::new(value, 0.0);
    }
    Ok(HermitianMatrix::from_matrix_unchecked(acc))
}
