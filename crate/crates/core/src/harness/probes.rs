//! Refutation oracles for the spectral order.
//!
//! `x ⪯ y` holds iff `f(x) <= f(y)` for every continuous increasing `f`. No
//! finite sample of functions proves the order, but a single failing `f`
//! disproves it, so these probes only ever refute.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::generate::case_rng;
use crate::matrix::{functional_calculus, loewner_leq, HermitianMatrix};
use crate::spectral::clusters;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ProbeVerdict {
    /// No sampled function separated the pair.
    Consistent { functions_checked: usize },
    /// `f(x) <= f(y)` fails for the named function.
    Refuted { function: String },
}

impl ProbeVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, ProbeVerdict::Refuted { .. })
    }
}

struct Probe {
    name: String,
    f: Box<dyn Fn(f64) -> f64>,
}

fn merged_spectrum(x: &HermitianMatrix, y: &HermitianMatrix, tol: &Tolerances) -> Result<Vec<f64>> {
    let mut all = x.eigen()?.eigenvalues.clone();
    all.extend_from_slice(&y.eigen()?.eigenvalues);
    all.sort_by(|a, b| a.total_cmp(b));
    Ok(clusters(&all, tol.cluster_tol)
        .into_iter()
        .map(|(_, e)| all[e - 1])
        .collect())
}

fn probe_family(points: &[f64], random: usize, seed: u64) -> Vec<Probe> {
    let lo = points[0];
    let hi = *points.last().expect("non-empty spectrum");
    let mid = 0.5 * (lo + hi);
    let mut probes: Vec<Probe> = Vec::new();
    for &t in points {
        probes.push(Probe {
            name: format!("max(s - {t}, 0)"),
            f: Box::new(move |s| (s - t).max(0.0)),
        });
    }
    for k in [1, 3, 5, 7] {
        probes.push(Probe {
            name: format!("(s - {mid})^{k}"),
            f: Box::new(move |s| (s - mid).powi(k)),
        });
    }
    let mut rng = case_rng(seed, 0);
    let width = (hi - lo).max(1.0);
    for i in 0..random {
        let mut knots: Vec<f64> = (0..4).map(|_| rng.random_range(lo - 0.1 * width..=hi + 0.1 * width)).collect();
        knots.sort_by(|a, b| a.total_cmp(b));
        let slopes: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..2.0)).collect();
        let base = 0.01;
        probes.push(Probe {
            name: format!("piecewise-linear #{i} (knots {knots:?}, slopes {slopes:?})"),
            f: Box::new(move |s| {
                base * s
                    + knots
                        .iter()
                        .zip(&slopes)
                        .map(|(k, m)| m * (s - k).max(0.0))
                        .sum::<f64>()
            }),
        });
    }
    probes
}

/// Checks `f(x) <= f(y)` for hinges at the merged spectrum, odd powers about
/// its midpoint, and `random` seeded increasing piecewise-linear functions.
pub fn monotone_probe(
    x: &HermitianMatrix,
    y: &HermitianMatrix,
    random: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<ProbeVerdict> {
    Error::dims(x.dim(), y.dim())?;
    let points = merged_spectrum(x, y, tol)?;
    let probes = probe_family(&points, random, seed);
    for probe in &probes {
        let fx = functional_calculus(x, &probe.f)?;
        let fy = functional_calculus(y, &probe.f)?;
        if !loewner_leq(&fx, &fy, tol)? {
            return Ok(ProbeVerdict::Refuted {
                function: probe.name.clone(),
            });
        }
    }
    Ok(ProbeVerdict::Consistent {
        functions_checked: probes.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PowerVerdict {
    Holds { checked: u32 },
    Refuted { exponent: u32 },
}

/// Checks `x^n <= y^n` for `n = 1..=max_exponent` on positive `x`, `y`.
pub fn power_order_probe(
    x: &HermitianMatrix,
    y: &HermitianMatrix,
    max_exponent: u32,
    tol: &Tolerances,
) -> Result<PowerVerdict> {
    Error::dims(x.dim(), y.dim())?;
    for (index, m) in [x, y].into_iter().enumerate() {
        let min_eigenvalue = m.eigen()?.min();
        if min_eigenvalue < -tol.psd_slack(0.0, crate::matrix::operator_norm(m)) {
            return Err(Error::NotPositive { index, min_eigenvalue });
        }
    }
    for n in 1..=max_exponent {
        let power = |s: f64| s.max(0.0).powi(n as i32);
        let xn = functional_calculus(x, power)?;
        let yn = functional_calculus(y, power)?;
        if !loewner_leq(&xn, &yn, tol)? {
            return Ok(PowerVerdict::Refuted { exponent: n });
        }
    }
    Ok(PowerVerdict::Holds { checked: max_exponent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generate::{random_hermitian, random_positive};
    use crate::lattice::spectral_sup;

    fn gap_pair() -> (HermitianMatrix, HermitianMatrix) {
        (
            HermitianMatrix::diag(&[1.0, 0.0]),
            HermitianMatrix::from_real(&[[1.5, 0.5], [0.5, 0.5]]).unwrap(),
        )
    }

    #[test]
    fn gap_pair_is_refuted() {
        let t = Tolerances::default();
        let (x, y) = gap_pair();
        assert!(monotone_probe(&x, &y, 8, 1, &t).unwrap().is_refuted());
        assert_eq!(power_order_probe(&x, &y, 2, &t).unwrap(), PowerVerdict::Refuted { exponent: 2 });
        let square = |s: f64| s * s;
        let x2 = functional_calculus(&x, square).unwrap();
        let y2 = functional_calculus(&y, square).unwrap();
        assert!(!loewner_leq(&x2, &y2, &t).unwrap());
    }

    #[test]
    fn ordered_pairs_are_consistent() {
        let t = Tolerances::default();
        let x = random_hermitian(4, 3);
        assert!(!monotone_probe(&x, &x, 8, 2, &t).unwrap().is_refuted());
        let y = spectral_sup(&[x.clone(), random_hermitian(4, 4)], &t).unwrap();
        match monotone_probe(&x, &y, 16, 5, &t).unwrap() {
            ProbeVerdict::Consistent { functions_checked } => assert!(functions_checked >= 4 + 16),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn power_probe_on_commuting_shift() {
        let t = Tolerances::default();
        let x = random_positive(3, 9);
        let y = x.shift(1.0);
        assert_eq!(power_order_probe(&x, &y, 6, &t).unwrap(), PowerVerdict::Holds { checked: 6 });
        let d1 = HermitianMatrix::diag(&[1.0, 0.5]);
        let d2 = HermitianMatrix::diag(&[2.0, 0.5]);
        assert!(matches!(power_order_probe(&d1, &d2, 10, &t), Ok(PowerVerdict::Holds { .. })));
        assert!(matches!(
            power_order_probe(&d1.neg(), &d2, 2, &t),
            Err(Error::NotPositive { index: 0, .. })
        ));
    }
}
