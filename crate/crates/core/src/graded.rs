//! Eigendecomposition of `sum_j exp(2 s_j) v_j v_j*` when the scales `s_j`
//! span far more than the double-precision range.
//!
//! Power means at `n = 2^40` produce sums of rank-one terms whose weights
//! differ by factors like `exp(10^11)`. Forming the sum and calling a dense
//! eigensolver returns every eigenvalue below `eps * max` as noise, and the
//! `1/n`-th root of noise is wrong by O(1). Instead:
//!
//! 1. pivoted Gram-Schmidt on the columns `exp(s_j) v_j`, in log scale, gives
//!    `B = Q diag(exp(rho)) R` with `rho` non-increasing and `|R| <= 1`;
//! 2. the Cholesky factor `L` of `R R*` comes from a QR of `R*`;
//! 3. indices whose `rho` are separated by more than `GAP` do not interact to
//!    working precision, so each cluster is solved on its own diagonal block
//!    of `L` (the Schur complement of the earlier blocks);
//! 4. one-sided Jacobi on the column-scaled block `L_bb* D` yields singular
//!    values to high relative accuracy.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::C64;

/// Columns whose residual falls below this fraction of their length are
/// treated as lying in the span of earlier pivots.
const RANK_TOL: f64 = 1e-10;
/// `exp(-GAP)` is below double-precision resolution.
const GAP: f64 = 36.0;
const JACOBI_SWEEPS: usize = 80;

/// A log scale `h * a + o`. Keeping the two parts apart makes differences
/// between columns with the same `a` exact even when `h` is huge.
#[derive(Debug, Clone, Copy)]
struct LogScale {
    a: f64,
    o: f64,
}

impl LogScale {
    fn minus(self, other: LogScale, h: f64) -> f64 {
        h * (self.a - other.a) + (self.o - other.o)
    }
}

/// A rank-one term `exp(2 (h a + offset)) v v*` with `|v| = 1`.
pub(crate) struct Column {
    pub a: f64,
    pub v: DVector<C64>,
}

/// An eigenpair of the sum, with eigenvalue `exp(2 h t)`.
pub(crate) struct GradedPair {
    pub vector: DVector<C64>,
    pub t: f64,
}

/// Eigenpairs of `sum_j exp(2 (h a_j + offset)) v_j v_j*` spanning its range.
pub(crate) fn graded_eigen(columns: &[Column], h: f64, offset: f64, dim: usize) -> Result<Vec<GradedPair>> {
    if !(h.is_finite() && h != 0.0) {
        return Err(Error::EigenFailure(format!("invalid exponent scale {h}")));
    }
    let n = columns.len();
    let mut scale: Vec<LogScale> = columns.iter().map(|c| LogScale { a: c.a, o: offset }).collect();
    let mut resid: Vec<DVector<C64>> = Vec::with_capacity(n);
    let mut active = vec![true; n];
    for (j, c) in columns.iter().enumerate() {
        let norm = c.v.norm();
        if !(norm > 0.0) || !c.a.is_finite() {
            active[j] = false;
            resid.push(c.v.clone());
            continue;
        }
        scale[j].o += norm.ln();
        resid.push(c.v.unscale(norm));
    }
    let start: Vec<f64> = scale.iter().map(|s| s.o).collect();
    let log_rank_tol = RANK_TOL.ln();

    let mut q: Vec<DVector<C64>> = Vec::new();
    let mut rho: Vec<LogScale> = Vec::new();
    let mut rows: Vec<Vec<C64>> = Vec::new();
    while q.len() < dim {
        let pivot = (0..n).filter(|&j| active[j]).reduce(|best, j| {
            if scale[j].minus(scale[best], h) > 0.0 {
                j
            } else {
                best
            }
        });
        let Some(p) = pivot else { break };
        active[p] = false;
        let qk = resid[p].clone();
        let mut row = vec![C64::new(0.0, 0.0); n];
        row[p] = C64::new(1.0, 0.0);
        for j in 0..n {
            if !active[j] {
                continue;
            }
            let weight = scale[j].minus(scale[p], h).exp();
            let coeff = qk.dotc(&resid[j]);
            resid[j].axpy(-coeff, &qk, C64::new(1.0, 0.0));
            row[j] = coeff * weight;
            // Second Gram-Schmidt pass; its coefficients belong to R as well.
            for (i, qi) in q.iter().enumerate() {
                let corr = qi.dotc(&resid[j]);
                resid[j].axpy(-corr, qi, C64::new(1.0, 0.0));
                rows[i][j] += corr * scale[j].minus(rho[i], h).exp();
            }
            let corr = qk.dotc(&resid[j]);
            resid[j].axpy(-corr, &qk, C64::new(1.0, 0.0));
            row[j] += corr * weight;

            let norm = resid[j].norm();
            if norm == 0.0 {
                active[j] = false;
                continue;
            }
            scale[j].o += norm.ln();
            if scale[j].o - start[j] < log_rank_tol {
                active[j] = false;
            } else {
                resid[j].unscale_mut(norm);
            }
        }
        q.push(qk);
        rho.push(scale[p]);
        rows.push(row);
    }

    let r = q.len();
    if r == 0 {
        return Ok(Vec::new());
    }
    let rhat = DMatrix::from_fn(r, n, |i, j| rows[i][j]);
    let t = rhat.adjoint().qr().r();
    let l = t.adjoint();

    let mut pairs = Vec::with_capacity(r);
    let mut first = 0;
    for k in 1..=r {
        if k < r && rho[k - 1].minus(rho[k], h).abs() <= GAP {
            continue;
        }
        let size = k - first;
        let mut g = l.view((first, first), (size, size)).adjoint();
        for i in 0..size {
            let factor = rho[first + i].minus(rho[first], h).exp();
            g.column_mut(i).scale_mut(factor);
        }
        let mut v = DMatrix::<C64>::identity(size, size);
        one_sided_jacobi(&mut g, &mut v);
        for i in 0..size {
            let sigma = safe_norm(g.column(i).into_owned());
            let mut vector = DVector::<C64>::zeros(dim);
            for (m, qm) in q[first..k].iter().enumerate() {
                vector.axpy(v[(m, i)], qm, C64::new(1.0, 0.0));
            }
            pairs.push(GradedPair {
                vector,
                t: rho[first].a + (rho[first].o + sigma.ln()) / h,
            });
        }
        first = k;
    }
    Ok(pairs)
}

fn safe_norm(v: DVector<C64>) -> f64 {
    let m = v.camax();
    if m == 0.0 {
        0.0
    } else {
        m * v.unscale(m).norm()
    }
}

/// Orthogonalizes the columns of `g` by plane rotations, accumulated in `v`.
fn one_sided_jacobi(g: &mut DMatrix<C64>, v: &mut DMatrix<C64>) {
    let b = g.ncols();
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for i in 0..b {
            for j in i + 1..b {
                let m = g.column(i).camax().max(g.column(j).camax());
                if m == 0.0 {
                    continue;
                }
                let ci = g.column(i).unscale(m);
                let cj = g.column(j).unscale(m);
                let alpha = ci.norm_squared();
                let beta = cj.norm_squared();
                let gamma = ci.dotc(&cj);
                let g_abs = gamma.norm();
                if g_abs <= f64::EPSILON * alpha.sqrt() * beta.sqrt() || g_abs == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g_abs;
                let zeta = (beta - alpha) / (2.0 * g_abs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(g, i, j, c, s, phase);
                rotate(v, i, j, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }
}

fn rotate(m: &mut DMatrix<C64>, i: usize, j: usize, c: f64, s: f64, phase: C64) {
    for r in 0..m.nrows() {
        let a = m[(r, i)];
        let b = m[(r, j)];
        m[(r, i)] = a * c - b * phase.conj() * s;
        m[(r, j)] = a * phase * s + b * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generate::random_hermitian;
    use crate::matrix::HermitianMatrix;

    fn columns_of(h: &HermitianMatrix, weight: impl Fn(f64) -> f64) -> Vec<Column> {
        let eig = h.eigen().unwrap();
        eig.eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &l)| Column {
                a: weight(l),
                v: eig.eigenvectors.column(k).into_owned(),
            })
            .collect()
    }

    fn assemble(pairs: &[GradedPair], h: f64, dim: usize) -> DMatrix<C64> {
        let mut acc = DMatrix::<C64>::zeros(dim, dim);
        for p in pairs {
            let value = (2.0 * h * p.t).exp();
            acc += &p.vector * p.vector.adjoint() * C64::new(value, 0.0);
        }
        acc
    }

    #[test]
    fn matches_dense_sum_in_moderate_range() {
        let x = random_hermitian(5, 1);
        let y = random_hermitian(5, 2);
        let mut cols = columns_of(&x, |l| l.tanh());
        cols.extend(columns_of(&y, |l| 0.5 * l.sin()));
        let h = 3.0;
        let mut dense = DMatrix::<C64>::zeros(5, 5);
        for c in &cols {
            dense += &c.v * c.v.adjoint() * C64::new((2.0 * h * c.a).exp(), 0.0);
        }
        let pairs = graded_eigen(&cols, h, 0.0, 5).unwrap();
        assert_eq!(pairs.len(), 5);
        let diff = (assemble(&pairs, h, 5) - &dense).norm();
        assert!(diff <= 1e-12 * dense.norm(), "{diff:e}");
    }

    #[test]
    fn resolves_tiny_eigenvalues() {
        // Two unit vectors at angle theta, weights 1 and exp(-2 * 400):
        // eigenvalues are ~1 and exp(-800) * sin^2(theta).
        let theta: f64 = 0.3;
        let e1 = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let u = DVector::from_vec(vec![C64::new(theta.cos(), 0.0), C64::new(0.0, theta.sin())]);
        let cols = vec![Column { a: 0.0, v: e1 }, Column { a: -1.0, v: u }];
        let h = 400.0;
        let pairs = graded_eigen(&cols, h, 0.0, 2).unwrap();
        let mut ts: Vec<f64> = pairs.iter().map(|p| 2.0 * h * p.t).collect();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = -800.0 + (theta.sin().powi(2)).ln();
        assert!((ts[0] - expected).abs() < 1e-9, "{} vs {}", ts[0], expected);
        assert!(ts[1].abs() < 1e-12);
        let small = pairs.iter().min_by(|a, b| a.t.partial_cmp(&b.t).unwrap()).unwrap();
        assert!(small.vector[0].norm() < 1e-12);
    }

    #[test]
    fn drops_repeated_directions() {
        let e1 = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let cols = vec![
            Column { a: 0.0, v: e1.clone() },
            Column { a: -2.0, v: e1 },
        ];
        let pairs = graded_eigen(&cols, 1e6, 0.0, 2).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!(pairs[0].t.abs() < 1e-12);
    }
}
