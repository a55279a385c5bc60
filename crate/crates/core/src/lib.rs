//! The spectral order on Hermitian matrices: spectral families, the
//! conditionally complete lattice structure, iterative limit formulas for its
//! bounds, and a seeded verification harness.

#[cfg(test)]
#[macro_use]
mod testutil;

pub mod error;
mod graded;
pub mod harness;
pub mod lattice;
pub mod limits;
pub mod matrix;
pub mod projection;
pub mod spectral;
pub mod tolerance;

pub use error::{Error, Result};
pub use lattice::{
    affine_image, membership_closure_check, order_bounds, spectral_inf, spectral_inf_family, spectral_sup,
    spectral_sup_family, ClosureReport, LatticeMode, MatrixClass,
};
pub use limits::{
    delta_floor, harmonic_pair_inf, inverse_power_inf, orthogonal_inf, orthogonal_sup, shifted_power_sup,
    PowerSchedule, PowerTrace,
};
pub use matrix::{
    eigensystem, functional_calculus, loewner_leq, make_hermitian, negative_part, operator_norm, positive_part,
    EigenSystem, HermitianMatrix, C64,
};
pub use projection::{alternating_meet_oracle, containment_defect, proj_join, proj_leq, proj_meet, Projection};
pub use spectral::{spectral_family_of, spectral_leq, OrderVerdict, SpectralFamily};
pub use tolerance::Tolerances;
