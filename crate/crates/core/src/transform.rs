//! The transform T^(N) sending each state |φ_i⟩ to the Gram-Schmidt
//! orthonormal |e_i⟩, the projection of a problem onto its associated pair
//! of density matrices (ρ_T, η_p), and the inverse map from a full-rank
//! density matrix back to a problem.
//!
//! In the Gram-Schmidt basis the coefficient matrix A (column n holds the
//! coordinates a_{n,i} of |φ_n⟩) satisfies A†A = G, so A is the adjoint of
//! the Cholesky factor of the Gram matrix and T^(N) = A⁻¹. The full
//! transform for permuted priors is T^e = √η_p · T^(N); the projection
//!
//!   ρ_T = T^e† T^e / Tr[T^e† T^e] = T^(N)† diag(η_p) T^(N) / Tr[..]
//!
//! kills the left-unitary freedom, and the positive-diagonal triangular
//! gauge makes the representative unique. The permutation p acts on the
//! priors only; state order stays as given.

use crate::error::{Error, Result};
use crate::matrix::{
    cholesky_lower, ul_factor, C64, ComplexMatrix, HermitianMatrix, UpperTriangular,
};
use crate::perm::is_permutation;
use crate::problem::{DiscriminationProblem, GramMatrix, Priors};
use crate::tolerances::TRACE_TOL;

/// The transform for one choice of prior permutation, together with the
/// Gram-Schmidt coefficients it inverts.
#[derive(Clone, Debug)]
pub struct TransformFactor {
    /// T^e = √η_p · T^(N): upper triangular, positive diagonal.
    pub t: UpperTriangular,
    /// Permutation applied to the priors.
    pub permutation: Vec<usize>,
    /// Gram-Schmidt coefficient matrix A with A†A = G and unit column norms.
    pub gs_coeffs: UpperTriangular,
}

/// The projection image of a problem: the full-rank density matrix ρ_T and
/// the diagonal density matrix of permuted priors.
#[derive(Clone, Debug)]
pub struct AssociatedPair {
    /// Unit-trace, positive definite.
    pub rho_t: HermitianMatrix,
    /// Diagonal entries of η_p, i.e. the priors permuted by `permutation`.
    pub eta_p: Vec<f64>,
    pub permutation: Vec<usize>,
}

impl AssociatedPair {
    /// η_p as a diagonal density matrix.
    pub fn eta_matrix(&self) -> HermitianMatrix {
        HermitianMatrix::from_real_diagonal(&self.eta_p)
    }
}

fn ensure_perm(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n || !is_permutation(perm) {
        return Err(Error::InvalidDomain {
            detail: format!("{perm:?} is not a permutation of 0..{n}"),
        });
    }
    Ok(())
}

/// Gram-Schmidt coefficient matrix A = (cholesky_lower(G))†: upper
/// triangular, positive diagonal, A†A = G, unit column norms.
pub fn gs_coefficients(g: &GramMatrix, tol_rank: f64) -> Result<UpperTriangular> {
    let l = cholesky_lower(g.hermitian(), tol_rank)?;
    Ok(UpperTriangular::new_unchecked(l.adjoint()))
}

/// Inverse of an upper-triangular matrix by back-substitution.
fn inv_upper(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.nrows();
    let mut x = ComplexMatrix::zeros(n, n);
    for j in (0..n).rev() {
        x[(j, j)] = C64::new(1.0, 0.0) / a[(j, j)];
        for i in (0..j).rev() {
            let mut s = C64::new(0.0, 0.0);
            for k in (i + 1)..=j {
                s += a[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = -s / a[(i, i)];
        }
    }
    x
}

/// T^(N) = A⁻¹ by back-substitution. This is the production route.
pub fn t_matrix_direct(g: &GramMatrix, tol_rank: f64) -> Result<UpperTriangular> {
    let a = gs_coefficients(g, tol_rank)?;
    Ok(UpperTriangular::new_unchecked(inv_upper(a.matrix())))
}

/// T^(N) built from the explicit two-state transform and the block recursion
///
///   T^(m) = [[T^(m-1), 0], [0, 1]] · [[I, A^(m-1)], [0, 1/a_mm]],
///   A^(m-1) = -(a_{m,1}, .., a_{m,m-1})ᵀ / a_mm,
///
/// where a_{m,i} = ⟨e_i|φ_m⟩ = Σ_j conj(T^(m-1)_{ji}) γ_{jm} and a_mm
/// normalizes the new state. Exists as a cross-check of [`t_matrix_direct`]:
/// the two routes share no factorization code and must agree to 1e-10.
pub fn t_matrix_recursive(g: &GramMatrix, tol_rank: f64) -> Result<UpperTriangular> {
    let n = g.dim();
    let gm = g.matrix();
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);

    if n == 1 {
        return Ok(UpperTriangular::new_unchecked(ComplexMatrix::from_element(1, 1, one)));
    }

    let g12 = gm[(0, 1)];
    let s2 = 1.0 - g12.norm_sqr();
    if s2 <= tol_rank {
        return Err(Error::NotPositiveDefinite {
            detail: format!("1 - |gamma_12|^2 = {s2:.6e} is at or below tol_rank {tol_rank:.1e}"),
        });
    }
    let s = s2.sqrt();
    let mut t = ComplexMatrix::from_row_slice(2, 2, &[
        one, -g12 / C64::new(s, 0.0),
        zero, C64::new(1.0 / s, 0.0),
    ]);

    for m in 3..=n {
        let prev = m - 1;
        // a_i = Σ_j conj(T_{ji}) γ_{jm} for the new state's coordinates.
        let a: Vec<C64> = (0..prev)
            .map(|i| (0..prev).map(|j| t[(j, i)].conj() * gm[(j, m - 1)]).sum())
            .collect();
        let norm2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        let s2 = 1.0 - norm2;
        if s2 <= tol_rank {
            return Err(Error::NotPositiveDefinite {
                detail: format!("1 - Σ|a_{{{m},i}}|^2 = {s2:.6e} is at or below tol_rank {tol_rank:.1e}"),
            });
        }
        let a_mm = s2.sqrt();

        let mut left = ComplexMatrix::zeros(m, m);
        left.view_mut((0, 0), (prev, prev)).copy_from(&t);
        left[(m - 1, m - 1)] = one;

        let mut right = ComplexMatrix::identity(m, m);
        for i in 0..prev {
            right[(i, m - 1)] = -a[i] / C64::new(a_mm, 0.0);
        }
        right[(m - 1, m - 1)] = C64::new(1.0 / a_mm, 0.0);

        t = left * right;
    }
    Ok(UpperTriangular::new_unchecked(t))
}

/// Builds ρ_T and η_p from a precomputed T^(N). Shared by every permutation
/// of the same problem so that exhaustive searches and single-permutation
/// evaluations agree bitwise.
pub(crate) fn pair_from_t(t_n: &UpperTriangular, priors: &[f64], perm: &[usize]) -> AssociatedPair {
    let n = t_n.dim();
    let eta_p: Vec<f64> = perm.iter().map(|&i| priors[i]).collect();
    // Scale row i of T by √η_{p_i}; then ρ_T ∝ W†W is Hermitian PSD by
    // construction.
    let t = t_n.matrix();
    let w = ComplexMatrix::from_fn(n, n, |i, j| t[(i, j)] * C64::new(eta_p[i].sqrt(), 0.0));
    let m = w.adjoint() * &w;
    let trace: f64 = (0..n).map(|i| m[(i, i)].re).sum();
    let rho = HermitianMatrix::new(m.unscale(trace)).expect("finite by construction");
    AssociatedPair { rho_t: rho, eta_p, permutation: perm.to_vec() }
}

/// The transform T^e = √η_p · T^(N) in the canonical Gram-Schmidt gauge.
pub fn transform_factor(p: &DiscriminationProblem, perm: &[usize], tol_rank: f64) -> Result<TransformFactor> {
    ensure_perm(perm, p.n())?;
    let a = gs_coefficients(p.gram(), tol_rank)?;
    let t_n = inv_upper(a.matrix());
    let n = p.n();
    let priors = p.priors();
    let t = ComplexMatrix::from_fn(n, n, |i, j| t_n[(i, j)] * C64::new(priors[perm[i]].sqrt(), 0.0));
    Ok(TransformFactor {
        t: UpperTriangular::new_unchecked(t),
        permutation: perm.to_vec(),
        gs_coeffs: a,
    })
}

/// The associated pair (ρ_T, η_p) of a problem under one prior permutation:
/// ρ_T = T^(N)† diag(η_p) T^(N) normalized to unit trace.
pub fn associated_pair(p: &DiscriminationProblem, perm: &[usize], tol_rank: f64) -> Result<AssociatedPair> {
    ensure_perm(perm, p.n())?;
    let t_n = t_matrix_direct(p.gram(), tol_rank)?;
    Ok(pair_from_t(&t_n, p.priors(), perm))
}

/// Recovers a discrimination problem from a full-rank density matrix.
///
/// With M = ρ⁻¹ and B its upper-triangular factor (M = B B†), the column
/// norms of B fix the priors, η_j = τ/‖B_j‖² with τ chosen so they sum to 1,
/// and column-normalizing B recovers the Gram-Schmidt coefficients, G = A†A.
/// The associated pair of the result under the identity permutation
/// reproduces ρ to the round-trip tolerance.
pub fn inverse_parametrization(rho: &HermitianMatrix, tol_rank: f64) -> Result<DiscriminationProblem> {
    let n = rho.dim();
    let trace = rho.trace_real();
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidState {
            detail: format!("density matrix has trace {trace}, more than {TRACE_TOL:.0e} away from 1"),
        });
    }

    // ρ = L L† ⇒ ρ⁻¹ = U⁻¹ (U⁻¹)† with U = L†. A failed pivot means ρ is
    // not positive definite, which for a density matrix is an invalid state.
    let l = cholesky_lower(rho, tol_rank).map_err(|e| match e {
        Error::NotPositiveDefinite { detail } => Error::InvalidState {
            detail: format!("density matrix is not positive definite ({detail})"),
        },
        other => other,
    })?;
    let u_inv = inv_upper(&l.adjoint());
    let m = HermitianMatrix::new(&u_inv * u_inv.adjoint())?;

    let b = ul_factor(&m, tol_rank)?;
    let bm = b.matrix();
    let col_norms_sq: Vec<f64> = (0..n).map(|j| bm.column(j).norm_squared()).collect();
    let inv_sum: f64 = col_norms_sq.iter().map(|&c| 1.0 / c).sum();
    let tau = 1.0 / inv_sum;
    let priors: Vec<f64> = col_norms_sq.iter().map(|&c| tau / c).collect();

    // A = B · diag(√η_j / √τ) = B with unit-normalized columns.
    let a = ComplexMatrix::from_fn(n, n, |i, j| bm[(i, j)] / C64::new(col_norms_sq[j].sqrt(), 0.0));
    let g = a.adjoint() * &a;
    let cleaned = ComplexMatrix::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { g[(i, j)] });
    let gram = GramMatrix::new(HermitianMatrix::new(cleaned)?);

    DiscriminationProblem::from_gram(gram, Priors::new(priors)?)
}
