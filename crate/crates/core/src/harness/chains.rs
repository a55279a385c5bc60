//! Monotone chains in the spectral order and the finite-chain form of the
//! monotone convergence theorem: a monotone chain converges in norm to its
//! bound, and a finite one attains it at its last element.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::generate::{case_rng, generic};
use crate::lattice::{spectral_inf, spectral_sup};
use crate::matrix::HermitianMatrix;
use crate::spectral::spectral_leq;
use crate::tolerance::Tolerances;

/// Accuracy for the attained-limit and monotone-distance checks.
pub const CHAIN_ACCURACY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "increasing" => Ok(Direction::Increasing),
            "decreasing" => Ok(Direction::Decreasing),
            _ => Err(format!("unknown direction `{s}`")),
        }
    }
}

/// `x_{k+1} = inf {x_k, r_k}` (decreasing) or `sup {x_k, r_k}` (increasing)
/// with seeded generic `x_1`, `r_k`.
pub fn gen_monotone_chain(
    seed: u64,
    dim: usize,
    length: usize,
    direction: Direction,
    tol: &Tolerances,
) -> Result<Vec<HermitianMatrix>> {
    if length < 2 || dim == 0 {
        return Err(Error::InvalidSpec("chains need length >= 2 and dim >= 1".into()));
    }
    let mut rng = case_rng(seed, 0);
    let mut chain = vec![generic(&mut rng, dim, 1e-3)];
    while chain.len() < length {
        let last = chain.last().expect("non-empty");
        let pair = [last.clone(), generic(&mut rng, dim, 1e-3)];
        let next = match direction {
            Direction::Decreasing => spectral_inf(&pair, tol)?,
            Direction::Increasing => spectral_sup(&pair, tol)?,
        };
        chain.push(next);
    }
    check_monotone(&chain, direction, tol)?;
    Ok(chain)
}

fn check_monotone(chain: &[HermitianMatrix], direction: Direction, tol: &Tolerances) -> Result<()> {
    for (k, w) in chain.windows(2).enumerate() {
        let verdict = match direction {
            Direction::Decreasing => spectral_leq(&w[1], &w[0], tol)?,
            Direction::Increasing => spectral_leq(&w[0], &w[1], tol)?,
        };
        if !verdict.holds {
            return Err(Error::NotMonotone {
                index: k + 1,
                defect: verdict.defect.unwrap_or(f64::NAN),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct VigierReport {
    pub direction: Direction,
    pub length: usize,
    /// The bound lies below (above) every element.
    pub bound_holds: bool,
    /// `|bound - x_last|`.
    pub last_deviation: f64,
    /// `|x_k - bound|` along the chain.
    pub distances: Vec<f64>,
    pub distances_monotone: bool,
    pub passed: bool,
}

/// Computes the bound of a monotone chain and checks that it is a bound,
/// that it equals the last element, and that distances to it shrink.
pub fn vigier_check(chain: &[HermitianMatrix], tol: &Tolerances) -> Result<VigierReport> {
    if chain.is_empty() {
        return Err(Error::EmptySet);
    }
    let direction = if check_monotone(chain, Direction::Decreasing, tol).is_ok() {
        Direction::Decreasing
    } else {
        check_monotone(chain, Direction::Increasing, tol)?;
        Direction::Increasing
    };
    let bound = match direction {
        Direction::Decreasing => spectral_inf(chain, tol)?,
        Direction::Increasing => spectral_sup(chain, tol)?,
    };
    let mut bound_holds = true;
    for x in chain {
        let verdict = match direction {
            Direction::Decreasing => spectral_leq(&bound, x, tol)?,
            Direction::Increasing => spectral_leq(x, &bound, tol)?,
        };
        bound_holds &= verdict.holds;
    }
    let distances = chain
        .iter()
        .map(|x| x.distance(&bound))
        .collect::<Result<Vec<_>>>()?;
    let last_deviation = *distances.last().expect("non-empty");
    let distances_monotone = distances.windows(2).all(|w| w[1] <= w[0] + CHAIN_ACCURACY);
    Ok(VigierReport {
        direction,
        length: chain.len(),
        bound_holds,
        last_deviation,
        distances,
        distances_monotone,
        passed: bound_holds && distances_monotone && last_deviation <= CHAIN_ACCURACY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_chain() {
        let t = Tolerances::default();
        let chain: Vec<_> = (1..=10).map(|k| HermitianMatrix::scaled_identity(3, 1.0 / k as f64)).collect();
        let report = vigier_check(&chain, &t).unwrap();
        assert_eq!(report.direction, Direction::Decreasing);
        assert!(report.passed);
        assert!(report.last_deviation < 1e-15);
    }

    #[test]
    fn generated_chains_pass_both_ways() {
        let t = Tolerances::default();
        for direction in [Direction::Decreasing, Direction::Increasing] {
            let chain = gen_monotone_chain(4, 4, 20, direction, &t).unwrap();
            assert_eq!(chain.len(), 20);
            let report = vigier_check(&chain, &t).unwrap();
            assert_eq!(report.direction, direction);
            assert!(report.passed, "{report:?}");
        }
        let pair = gen_monotone_chain(9, 3, 2, Direction::Decreasing, &t).unwrap();
        assert!(spectral_leq(&pair[1], &pair[0], &t).unwrap().holds);
    }

    #[test]
    fn rejects_non_monotone() {
        let t = Tolerances::default();
        let chain = [
            HermitianMatrix::diag(&[1.0, 0.0]),
            HermitianMatrix::from_real(&[[1.5, 0.5], [0.5, 0.5]]).unwrap(),
        ];
        assert!(matches!(vigier_check(&chain, &t), Err(Error::NotMonotone { .. })));
        assert!(gen_monotone_chain(1, 3, 1, Direction::Increasing, &t).is_err());
    }
}
