//! Seeded random instances. Every generator is a pure function of its RNG
//! state, so `(seed, spec)` reproduces an instance exactly.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{operator_norm, EigenSystem, HermitianMatrix, C64};
use crate::projection::Projection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Generic,
    Positive,
    PositiveDefinite,
    Projection,
    CommutingFamily,
    OrthogonalFamily,
    Effect,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 7] = [
        InstanceKind::Generic,
        InstanceKind::Positive,
        InstanceKind::PositiveDefinite,
        InstanceKind::Projection,
        InstanceKind::CommutingFamily,
        InstanceKind::OrthogonalFamily,
        InstanceKind::Effect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Generic => "generic",
            InstanceKind::Positive => "positive",
            InstanceKind::PositiveDefinite => "positive_definite",
            InstanceKind::Projection => "projection",
            InstanceKind::CommutingFamily => "commuting_family",
            InstanceKind::OrthogonalFamily => "orthogonal_family",
            InstanceKind::Effect => "effect",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        InstanceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown instance kind `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub dim: usize,
    pub seed: u64,
    pub kind: InstanceKind,
    pub count: usize,
    /// Minimum eigenvalue gap for `generic` and `positive`; the identity
    /// shift for `positive_definite`.
    pub spectrum_spread: f64,
}

impl InstanceSpec {
    pub fn new(dim: usize, seed: u64, kind: InstanceKind, count: usize, spectrum_spread: f64) -> Self {
        InstanceSpec {
            dim,
            seed,
            kind,
            count,
            spectrum_spread,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidSpec("dim must be at least 1".into()));
        }
        if self.count == 0 {
            return Err(Error::InvalidSpec("count must be at least 1".into()));
        }
        if !(self.spectrum_spread > 0.0 && self.spectrum_spread.is_finite()) {
            return Err(Error::InvalidSpec("spectrum_spread must be positive".into()));
        }
        if self.kind == InstanceKind::OrthogonalFamily && self.count > self.dim {
            return Err(Error::InvalidSpec(format!(
                "{} orthogonal blocks do not fit in dimension {}",
                self.count, self.dim
            )));
        }
        Ok(())
    }
}

/// Generator stream `case` of the master `seed`.
pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

pub fn gen_instances(spec: &InstanceSpec) -> Result<Vec<HermitianMatrix>> {
    spec.validate()?;
    let mut rng = case_rng(spec.seed, 0);
    generate(&mut rng, spec.kind, spec.dim, spec.count, spec.spectrum_spread)
}

/// Instances of `kind` drawn from an existing stream.
pub fn generate<R: Rng>(
    rng: &mut R,
    kind: InstanceKind,
    dim: usize,
    count: usize,
    spread: f64,
) -> Result<Vec<HermitianMatrix>> {
    Ok(match kind {
        InstanceKind::Generic => (0..count).map(|_| generic(rng, dim, spread)).collect(),
        InstanceKind::Positive => (0..count).map(|_| positive(rng, dim, spread)).collect(),
        InstanceKind::PositiveDefinite => (0..count).map(|_| positive_definite(rng, dim, spread)).collect(),
        InstanceKind::Projection => (0..count).map(|_| projection(rng, dim).into_matrix()).collect(),
        InstanceKind::Effect => (0..count).map(|_| effect(rng, dim, spread)).collect(),
        InstanceKind::CommutingFamily => commuting_family(rng, dim, count),
        InstanceKind::OrthogonalFamily => {
            if count > dim {
                return Err(Error::InvalidSpec(format!(
                    "{count} orthogonal blocks do not fit in dimension {dim}"
                )));
            }
            orthogonal_family(rng, dim, count)
        }
    })
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * FRAC_1_SQRT_2
    })
}

pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    gaussian_matrix(rng, dim, dim).qr().q()
}

fn from_eigenpairs(eigenvalues: Vec<f64>, eigenvectors: DMatrix<C64>) -> HermitianMatrix {
    EigenSystem {
        eigenvalues,
        eigenvectors,
    }
    .reconstruct()
}

/// Pushes sorted eigenvalues apart (`lambda_i += i * spread`) if any gap is
/// below `spread`; otherwise returns `h` untouched.
fn enforce_spread(h: HermitianMatrix, spread: f64) -> HermitianMatrix {
    let Ok(eig) = h.eigen() else { return h };
    if eig.eigenvalues.windows(2).all(|w| w[1] - w[0] >= spread) {
        return h;
    }
    let values = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, l)| l + i as f64 * spread)
        .collect();
    from_eigenpairs(values, eig.eigenvectors.clone())
}

/// `(G + G*) / 2` for a complex Gaussian `G`.
pub fn generic<R: Rng>(rng: &mut R, dim: usize, spread: f64) -> HermitianMatrix {
    let g = gaussian_matrix(rng, dim, dim);
    let h = HermitianMatrix::from_matrix_unchecked((&g + g.adjoint()) * C64::new(0.5, 0.0));
    enforce_spread(h, spread)
}

/// `G* G / dim`.
pub fn positive<R: Rng>(rng: &mut R, dim: usize, spread: f64) -> HermitianMatrix {
    let g = gaussian_matrix(rng, dim, dim);
    let h = HermitianMatrix::from_matrix_unchecked(g.adjoint() * &g * C64::new(1.0 / dim as f64, 0.0));
    enforce_spread(h, spread)
}

pub fn positive_definite<R: Rng>(rng: &mut R, dim: usize, spread: f64) -> HermitianMatrix {
    positive(rng, dim, spread).shift(spread)
}

/// Range projection of `k` random vectors, `k` uniform in `1..dim`
/// (`k = 1` when `dim = 1`).
pub fn projection<R: Rng>(rng: &mut R, dim: usize) -> Projection {
    let rank = if dim == 1 { 1 } else { rng.random_range(1..dim) };
    projection_of_rank(rng, dim, rank)
}

pub fn projection_of_rank<R: Rng>(rng: &mut R, dim: usize, rank: usize) -> Projection {
    if rank == 0 {
        return Projection::zero(dim);
    }
    let q = gaussian_matrix(rng, dim, rank).qr().q();
    Projection::from_orthonormal(&q)
}

/// A positive matrix with its spectrum clipped to `[0, 1]`.
pub fn effect<R: Rng>(rng: &mut R, dim: usize, spread: f64) -> HermitianMatrix {
    let p = positive(rng, dim, spread);
    match p.eigen() {
        Ok(eig) => eig.map(|s| s.clamp(0.0, 1.0)),
        Err(_) => HermitianMatrix::zeros(dim),
    }
}

/// A generic matrix rescaled to operator norm in `[0.5, 1]`.
pub fn unit_ball<R: Rng>(rng: &mut R, dim: usize, spread: f64) -> HermitianMatrix {
    let h = generic(rng, dim, spread);
    let norm = operator_norm(&h);
    let target: f64 = rng.random_range(0.5..=1.0);
    if norm == 0.0 {
        h
    } else {
        h.scale(target / norm)
    }
}

/// One unitary conjugating independent Gaussian diagonals.
pub fn commuting_family<R: Rng>(rng: &mut R, dim: usize, count: usize) -> Vec<HermitianMatrix> {
    let u = random_unitary(rng, dim);
    (0..count)
        .map(|_| {
            let values = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            from_eigenpairs(values, u.clone())
        })
        .collect()
}

/// `count` generic blocks on disjoint coordinate ranges, conjugated by one
/// unitary. Requires `count <= dim`; coordinates left over stay zero.
pub fn orthogonal_family<R: Rng>(rng: &mut R, dim: usize, count: usize) -> Vec<HermitianMatrix> {
    let mut sizes = vec![1usize; count];
    for _ in count..dim {
        // Slot `count` leaves the coordinate unused.
        let slot = rng.random_range(0..=count);
        if slot < count {
            sizes[slot] += 1;
        }
    }
    let u = random_unitary(rng, dim);
    let mut offset = 0;
    sizes
        .iter()
        .map(|&size| {
            let g = gaussian_matrix(rng, size, size);
            let block = (&g + g.adjoint()) * C64::new(0.5, 0.0);
            let mut full = DMatrix::<C64>::zeros(dim, dim);
            full.view_mut((offset, offset), (size, size)).copy_from(&block);
            offset += size;
            HermitianMatrix::from_matrix_unchecked(&u * full * u.adjoint())
        })
        .collect()
}

/// Shorthand: one generic matrix from stream 0 of `seed`.
pub fn random_hermitian(dim: usize, seed: u64) -> HermitianMatrix {
    generic(&mut case_rng(seed, 0), dim, 1e-3)
}

pub fn random_positive(dim: usize, seed: u64) -> HermitianMatrix {
    positive(&mut case_rng(seed, 0), dim, 1e-3)
}

pub fn random_positive_definite(dim: usize, seed: u64, spread: f64) -> HermitianMatrix {
    positive_definite(&mut case_rng(seed, 0), dim, spread)
}

pub fn random_projection(dim: usize, rank: usize, seed: u64) -> Projection {
    projection_of_rank(&mut case_rng(seed, 0), dim, rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance::Tolerances;

    fn spec(dim: usize, kind: InstanceKind, count: usize) -> InstanceSpec {
        InstanceSpec::new(dim, 17, kind, count, 0.1)
    }

    #[test]
    fn projection_instance_is_idempotent() {
        let ps = gen_instances(&spec(2, InstanceKind::Projection, 1)).unwrap();
        assert_eq!(ps.len(), 1);
        Projection::new(ps[0].clone(), &Tolerances::default()).unwrap();
    }

    #[test]
    fn commuting_family_commutes() {
        let fam = gen_instances(&spec(4, InstanceKind::CommutingFamily, 3)).unwrap();
        for a in &fam {
            for b in &fam {
                let comm = a.product(b) - b.product(a);
                assert!(comm.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn orthogonal_family_is_orthogonal() {
        let fam = gen_instances(&spec(6, InstanceKind::OrthogonalFamily, 3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(fam[i].product(&fam[j]).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn kinds_satisfy_their_invariants() {
        let t = Tolerances::default();
        for x in gen_instances(&spec(5, InstanceKind::Positive, 4)).unwrap() {
            let eig = x.eigen().unwrap();
            assert!(eig.min() >= -1e-12);
            assert!(eig.eigenvalues.windows(2).all(|w| w[1] - w[0] >= 0.1 - 1e-12));
        }
        for x in gen_instances(&spec(5, InstanceKind::PositiveDefinite, 4)).unwrap() {
            assert!(x.eigen().unwrap().min() >= 0.1 - 1e-12);
        }
        for x in gen_instances(&spec(5, InstanceKind::Effect, 4)).unwrap() {
            let eig = x.eigen().unwrap();
            assert!(eig.min() >= -t.psd_tol && eig.max() <= 1.0 + t.psd_tol);
        }
        let mut rng = case_rng(3, 0);
        for _ in 0..10 {
            let n = operator_norm(&unit_ball(&mut rng, 4, 0.1));
            assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&n));
        }
    }

    #[test]
    fn deterministic_in_seed_and_stream() {
        let a = gen_instances(&spec(3, InstanceKind::Generic, 2)).unwrap();
        let b = gen_instances(&spec(3, InstanceKind::Generic, 2)).unwrap();
        assert_eq!(a, b);
        let c = generic(&mut case_rng(17, 1), 3, 0.1);
        assert_ne!(a[0], c);
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(gen_instances(&spec(0, InstanceKind::Generic, 1)).is_err());
        assert!(gen_instances(&spec(3, InstanceKind::Generic, 0)).is_err());
        assert!(gen_instances(&spec(2, InstanceKind::OrthogonalFamily, 3)).is_err());
        assert!(gen_instances(&InstanceSpec::new(2, 1, InstanceKind::Generic, 1, 0.0)).is_err());
        assert_eq!("orthogonal_family".parse::<InstanceKind>().unwrap(), InstanceKind::OrthogonalFamily);
    }
}
