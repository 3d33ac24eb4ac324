//! Named numerical tolerances shared across the crate.
//!
//! All residual tolerances are relative to the Frobenius norm of the input,
//! with one exception: the rank tolerance [`TOL_RANK`] is absolute, applied
//! to the smallest pivot or eigenvalue.

/// Absolute floor on factorization pivots and Gram eigenvalues. Anything at
/// or below this is treated as rank deficiency (linearly dependent states).
/// Separates genuine dependence from round-off at N <= 8.
pub const TOL_RANK: f64 = 1e-10;

/// Eigenvalues in [-CLAMP_TOL, 0) are clamped to 0 before square roots;
/// anything more negative is an error. Floating-point PSD drift must not
/// silently corrupt fidelity values.
pub const CLAMP_TOL: f64 = 1e-12;

/// Density matrices must have unit trace to within this tolerance.
pub const TRACE_TOL: f64 = 1e-8;

/// Unit-norm, unit-diagonal, and probability-sum checks.
pub const UNIT_TOL: f64 = 1e-12;

/// Hermiticity tolerance for matrices ingested from external sources.
pub const ASYM_TOL: f64 = 1e-8;

/// Random-problem rejection threshold on the smallest Gram eigenvalue.
/// Stricter than [`TOL_RANK`] so property tests stay well-conditioned.
pub const GEN_MIN_EIG: f64 = 1e-6;

/// Round-trip tolerance for parametrization followed by its inverse. Looser
/// than the factorization tolerances because the round trip composes an
/// inversion, a factorization, and a normalization.
pub const ROUND_TRIP_TOL: f64 = 1e-8;

/// Default cap on exact permutation enumeration (8! = 40320 fidelity
/// evaluations).
pub const MAX_EXACT_N: usize = 8;

// Ordering relations the algorithms assume, checked at compile time.
const _: () = {
    assert!(GEN_MIN_EIG > TOL_RANK);
    assert!(CLAMP_TOL < TRACE_TOL);
    assert!(ROUND_TRIP_TOL >= TRACE_TOL);
    assert!(ROUND_TRIP_TOL > TOL_RANK);
};
