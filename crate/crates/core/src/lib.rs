//! Parametrization of pure-state discrimination problems by density
//! matrices.
//!
//! A discrimination problem is a set of N linearly independent normalized
//! pure states with prior probabilities. Gram-Schmidt orthonormalization
//! gives an upper-triangular transform T^(N) that maps the states to an
//! orthonormal basis; together with a permutation p of the priors it
//! produces the associated pair of density matrices
//!
//!   ρ_T = T^(N)† diag(η_p) T^(N) / Tr[..],   η_p = diag(η_{p_1}, ..),
//!
//! and the discriminability D = max_p F(ρ_T, η_p), the fidelity between the
//! pair maximized over prior permutations. D is 1 exactly for orthonormal
//! states, is minimized at uniform priors, and collapses to closed forms
//! for two states and for equal priors. The map is invertible: any
//! full-rank density matrix factors back into a problem ([`transform::inverse_parametrization`]).
//!
//! Modules:
//! - [`matrix`]: Hermitian/triangular kernels (eigen, Cholesky, fidelity).
//! - [`problem`]: problem model, validation, generators.
//! - [`transform`]: T^(N), associated pairs, the inverse map.
//! - [`discriminability`]: permutation search, closed forms, baselines.
//! - [`perm`], [`exec`], [`tolerances`], [`error`]: support.
//!
//! The permutation search evaluates fidelities in parallel when the
//! `parallel` feature (default) is enabled; results are bitwise identical
//! to the sequential path because the reduction is a deterministic
//! sequential scan in lexicographic order.

pub mod discriminability;
pub mod error;
pub mod exec;
pub mod matrix;
pub mod perm;
pub mod problem;
pub mod tolerances;
pub mod transform;

pub use discriminability::{
    discriminability, equal_prior_closed_form, fidelity_for_permutation, helstrom_correct,
    idp_success_equal_priors, normalized_discriminability, two_state_closed_form, Baselines,
    DiscriminabilityReport, PermStrategy,
};
pub use error::{Error, Result};
pub use matrix::{
    bures_distance, fidelity, fidelity_2x2, hermitian_eig, sqrt_psd, C64, ComplexMatrix,
    HermitianMatrix, UpperTriangular,
};
pub use problem::{
    dual_coefficients, gram_from_states, random_problem, three_state_family, three_state_gram,
    three_state_overlaps, two_state_family, validate_problem, DiscriminationProblem, GramMatrix,
    Priors, StateSet, ValidationReport,
};
pub use transform::{
    associated_pair, gs_coefficients, inverse_parametrization, t_matrix_direct,
    t_matrix_recursive, transform_factor, AssociatedPair, TransformFactor,
};
