//! Limit formulas for suprema and infima.
//!
//! * `sup F = delta I + lim_n (sum_x (x - delta I)^n / c)^(1/n)` for any
//!   `delta <= min spec`;
//! * `inf M = -delta I + lim_n (sum_x (x + delta I)^(-n) / c)^(-1/n)` when every
//!   `x + delta I` is invertible;
//! * for mutually orthogonal families the supremum is `sum x+` and the infimum
//!   `-sum x-`.
//!
//! `c` is `|F|` for the normalized (power-mean) variant and `1` otherwise.
//! Powers are taken on eigenvalues only; see [`crate::graded`] for why the
//! sum is not formed densely.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{graded_eigen, Column};
use crate::matrix::{
    general_operator_norm, negative_part, operator_norm, positive_part, HermitianMatrix, C64,
};
use crate::tolerance::Tolerances;

/// Smallest admissible `lambda_min(x + delta I)` for the inverse-power formula.
pub const INVERTIBILITY_FLOOR: f64 = 1e-6;

/// Exponents at which a power-mean iteration is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSchedule {
    exponents: Vec<u64>,
    stop_tol: f64,
}

impl PowerSchedule {
    pub fn new(exponents: Vec<u64>, stop_tol: f64) -> Result<Self> {
        if exponents.first().is_none_or(|&e| e < 1) {
            return Err(Error::InvalidTolerances("schedule must start at an exponent >= 1".into()));
        }
        if exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidTolerances("schedule exponents must increase".into()));
        }
        if !(stop_tol > 0.0 && stop_tol.is_finite()) {
            return Err(Error::InvalidTolerances("stop_tol must be positive".into()));
        }
        Ok(PowerSchedule { exponents, stop_tol })
    }

    /// `1, 2, 4, ..., 2^max_doublings`.
    pub fn doubling(max_doublings: u32, stop_tol: f64) -> Result<Self> {
        if max_doublings > 62 {
            return Err(Error::InvalidTolerances("at most 62 doublings".into()));
        }
        Self::new((0..=max_doublings).map(|k| 1u64 << k).collect(), stop_tol)
    }

    pub fn from_tolerances(tol: &Tolerances) -> Result<Self> {
        Self::doubling(tol.max_power_doublings, tol.conv_tol)
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// Iteration stops once `|A_next - A_prev| < stop_tol * (1 + |A_prev|)`.
    pub fn stop_tol(&self) -> f64 {
        self.stop_tol
    }
}

impl Default for PowerSchedule {
    fn default() -> Self {
        Self::from_tolerances(&Tolerances::default()).expect("default tolerances are valid")
    }
}

/// Iterates of a power-mean run and how it ended.
#[derive(Debug, Clone)]
pub struct PowerTrace {
    /// Exponents actually evaluated.
    pub exponents: Vec<u64>,
    /// `residuals[k] = |A_{exponents[k+1]} - A_{exponents[k]}|`.
    pub residuals: Vec<f64>,
    pub converged: bool,
    /// The last iterate.
    pub result: HermitianMatrix,
}

impl PowerTrace {
    pub fn final_exponent(&self) -> u64 {
        *self.exponents.last().expect("at least one iterate")
    }

    pub fn into_result(self) -> Result<HermitianMatrix> {
        if self.converged {
            Ok(self.result)
        } else {
            Err(Error::NoConvergence {
                exponent: self.final_exponent(),
                residual: self.residuals.last().copied().unwrap_or(f64::INFINITY),
                last_iterate: Box::new(self.result),
            })
        }
    }
}

fn check_set(ms: &[HermitianMatrix]) -> Result<usize> {
    let first = ms.first().ok_or(Error::EmptySet)?;
    for m in ms {
        Error::dims(first.dim(), m.dim())?;
    }
    Ok(first.dim())
}

/// Smallest eigenvalue over the set.
pub fn delta_floor(fs: &[HermitianMatrix]) -> Result<f64> {
    check_set(fs)?;
    fs.iter()
        .map(|x| Ok(x.eigen()?.min()))
        .try_fold(f64::INFINITY, |acc, m: Result<f64>| Ok(acc.min(m?)))
}

/// Default shift for [`shifted_power_sup`]: the floor itself.
pub fn default_sup_delta(fs: &[HermitianMatrix]) -> Result<f64> {
    delta_floor(fs)
}

/// Default shift for [`inverse_power_inf`]: makes the smallest shifted
/// eigenvalue at least 1.
pub fn default_inf_delta(ms: &[HermitianMatrix]) -> Result<f64> {
    Ok((1.0 - delta_floor(ms)?).max(0.0))
}

/// Eigenvalues of one shifted input, sharing the input's eigenvectors.
struct Shifted<'a> {
    mus: Vec<f64>,
    vectors: &'a DMatrix<C64>,
}

/// `(sum_i y_i^p / c)^(1/p)`, with `y_i` given by eigenpairs.
///
/// The inputs are scaled by `s = max mu` first, which is exact:
/// `(sum (s a_i)^p)^(1/p) = s (sum a_i^p)^(1/p)`.
fn power_mean(inputs: &[Shifted<'_>], p: f64, c: f64, dim: usize) -> Result<HermitianMatrix> {
    let s = inputs
        .iter()
        .flat_map(|i| i.mus.iter().copied())
        .fold(0.0, f64::max);
    if s == 0.0 {
        return Ok(HermitianMatrix::zeros(dim));
    }
    let mut columns = Vec::new();
    for input in inputs {
        for (k, &mu) in input.mus.iter().enumerate() {
            if mu > 0.0 {
                columns.push(Column {
                    a: (mu / s).ln(),
                    v: input.vectors.column(k).into_owned(),
                });
            }
        }
    }
    let pairs = graded_eigen(&columns, 0.5 * p, -0.5 * c.ln(), dim)?;
    if p < 0.0 && pairs.len() < dim {
        return Err(Error::EigenFailure(format!(
            "inverse power sum has numerical rank {} < {dim}",
            pairs.len()
        )));
    }
    let mut acc = DMatrix::<C64>::zeros(dim, dim);
    for pair in &pairs {
        let value = s * pair.t.exp();
        acc += &pair.vector * pair.vector.adjoint() * C64::new(value, 0.0);
    }
    Ok(HermitianMatrix::from_matrix_unchecked(acc))
}

fn run_schedule(
    sched: &PowerSchedule,
    mut iterate: impl FnMut(u64) -> Result<HermitianMatrix>,
) -> Result<PowerTrace> {
    let mut exponents = Vec::new();
    let mut residuals = Vec::new();
    let mut previous: Option<HermitianMatrix> = None;
    for &n in &sched.exponents {
        let current = iterate(n)?;
        exponents.push(n);
        if let Some(prev) = &previous {
            let residual = current.distance(prev)?;
            residuals.push(residual);
            if residual < sched.stop_tol * (1.0 + operator_norm(prev)) {
                return Ok(PowerTrace {
                    exponents,
                    residuals,
                    converged: true,
                    result: current,
                });
            }
        }
        previous = Some(current);
    }
    Ok(PowerTrace {
        exponents,
        residuals,
        converged: false,
        result: previous.expect("schedule is non-empty"),
    })
}

fn normalizer(len: usize, normalize: bool) -> f64 {
    if normalize {
        len as f64
    } else {
        1.0
    }
}

fn sup_inputs<'a>(fs: &'a [HermitianMatrix], delta: f64, tol: &Tolerances) -> Result<Vec<Shifted<'a>>> {
    let floor = delta_floor(fs)?;
    if !delta.is_finite() || delta > floor + tol.psd_tol {
        return Err(Error::DeltaTooLarge { delta, floor });
    }
    fs.iter()
        .map(|x| {
            let eig = x.eigen()?;
            Ok(Shifted {
                mus: eig.eigenvalues.iter().map(|&l| (l - delta).max(0.0)).collect(),
                vectors: &eig.eigenvectors,
            })
        })
        .collect()
}

fn inf_inputs<'a>(ms: &'a [HermitianMatrix], delta: f64) -> Result<Vec<Shifted<'a>>> {
    check_set(ms)?;
    ms.iter()
        .enumerate()
        .map(|(index, x)| {
            let eig = x.eigen()?;
            let min_eigenvalue = eig.min() + delta;
            if !(min_eigenvalue >= INVERTIBILITY_FLOOR) {
                return Err(Error::NotInvertible {
                    index,
                    min_eigenvalue,
                    floor: INVERTIBILITY_FLOOR,
                });
            }
            Ok(Shifted {
                mus: eig.eigenvalues.iter().map(|&l| l + delta).collect(),
                vectors: &eig.eigenvectors,
            })
        })
        .collect()
}

/// The single iterate `A_n` of the supremum formula.
pub fn shifted_power_iterate(
    fs: &[HermitianMatrix],
    delta: f64,
    n: u64,
    normalize: bool,
    tol: &Tolerances,
) -> Result<HermitianMatrix> {
    let inputs = sup_inputs(fs, delta, tol)?;
    let c = normalizer(fs.len(), normalize);
    Ok(power_mean(&inputs, n as f64, c, fs[0].dim())?.shift(delta))
}

/// The single iterate `B_n` of the infimum formula.
pub fn inverse_power_iterate(ms: &[HermitianMatrix], delta: f64, n: u64, normalize: bool) -> Result<HermitianMatrix> {
    let inputs = inf_inputs(ms, delta)?;
    let c = normalizer(ms.len(), normalize);
    Ok(power_mean(&inputs, -(n as f64), c, ms[0].dim())?.shift(-delta))
}

/// Runs the supremum formula over the whole schedule, keeping the residuals.
/// Non-convergence is reported in the trace, not as an error.
pub fn shifted_power_sup_trace(
    fs: &[HermitianMatrix],
    delta: f64,
    sched: &PowerSchedule,
    normalize: bool,
    tol: &Tolerances,
) -> Result<PowerTrace> {
    let inputs = sup_inputs(fs, delta, tol)?;
    let c = normalizer(fs.len(), normalize);
    let dim = fs[0].dim();
    run_schedule(sched, |n| Ok(power_mean(&inputs, n as f64, c, dim)?.shift(delta)))
}

pub fn shifted_power_sup(
    fs: &[HermitianMatrix],
    delta: f64,
    sched: &PowerSchedule,
    normalize: bool,
    tol: &Tolerances,
) -> Result<HermitianMatrix> {
    shifted_power_sup_trace(fs, delta, sched, normalize, tol)?.into_result()
}

pub fn inverse_power_inf_trace(
    ms: &[HermitianMatrix],
    delta: f64,
    sched: &PowerSchedule,
    normalize: bool,
) -> Result<PowerTrace> {
    let inputs = inf_inputs(ms, delta)?;
    let c = normalizer(ms.len(), normalize);
    let dim = ms[0].dim();
    run_schedule(sched, |n| Ok(power_mean(&inputs, -(n as f64), c, dim)?.shift(-delta)))
}

pub fn inverse_power_inf(
    ms: &[HermitianMatrix],
    delta: f64,
    sched: &PowerSchedule,
    normalize: bool,
) -> Result<HermitianMatrix> {
    inverse_power_inf_trace(ms, delta, sched, normalize)?.into_result()
}

/// `lim ((x^-n + y^-n) / 2)^(-1/n)`; the first iterate is the harmonic mean.
pub fn harmonic_pair_inf_trace(x: &HermitianMatrix, y: &HermitianMatrix, sched: &PowerSchedule) -> Result<PowerTrace> {
    inverse_power_inf_trace(&[x.clone(), y.clone()], 0.0, sched, true)
}

pub fn harmonic_pair_inf(x: &HermitianMatrix, y: &HermitianMatrix, sched: &PowerSchedule) -> Result<HermitianMatrix> {
    harmonic_pair_inf_trace(x, y, sched)?.into_result()
}

fn check_orthogonal(ms: &[HermitianMatrix]) -> Result<()> {
    if ms.len() < 2 {
        return Err(Error::TooFewElements { got: ms.len(), need: 2 });
    }
    check_set(ms)?;
    let scale = ms.iter().map(operator_norm).fold(0.0, f64::max);
    let limit = 1e-10 * (1.0 + scale).powi(2);
    let mut worst: Option<(usize, usize, f64)> = None;
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            let norm = general_operator_norm(&ms[i].product(&ms[j]));
            if norm > limit && worst.is_none_or(|w| norm > w.2) {
                worst = Some((i, j, norm));
            }
        }
    }
    match worst {
        Some((i, j, norm)) => Err(Error::NotOrthogonal { i, j, norm }),
        None => Ok(()),
    }
}

/// `sum x+` for a family with `x y = 0` pairwise.
pub fn orthogonal_sup(ms: &[HermitianMatrix], _tol: &Tolerances) -> Result<HermitianMatrix> {
    check_orthogonal(ms)?;
    let mut acc = HermitianMatrix::zeros(ms[0].dim());
    for m in ms {
        acc = acc.add(&positive_part(m)?)?;
    }
    Ok(acc)
}

/// `-sum x-` for a family with `x y = 0` pairwise.
pub fn orthogonal_inf(ms: &[HermitianMatrix], _tol: &Tolerances) -> Result<HermitianMatrix> {
    check_orthogonal(ms)?;
    let mut acc = HermitianMatrix::zeros(ms[0].dim());
    for m in ms {
        acc = acc.sub(&negative_part(m)?)?;
    }
    Ok(acc)
}
