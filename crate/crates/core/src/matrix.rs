//! Dense complex-matrix kernel: Hermitian eigendecomposition, PSD square
//! root, triangular factorizations, Uhlmann fidelity and Bures distance.
//!
//! Conventions:
//! - Hermitian values are canonically symmetrized, M <- (M + M†)/2, so the
//!   stored matrix satisfies M = M† exactly up to paired rounding.
//! - Triangular factors carry a real, strictly positive diagonal. This fixes
//!   the phase gauge, making every factor unique and every test reproducible.
//! - Eigenvalues in [-clamp_tol, 0) are clamped to 0 before square roots;
//!   anything more negative is an error rather than a silent repair.
//! - Residual tolerances are relative to the Frobenius norm of the input;
//!   the rank tolerance is absolute on the smallest pivot.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::tolerances::{CLAMP_TOL, TRACE_TOL};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;

/// Iteration cap for the eigensolver; dense Hermitian QR converges in a
/// handful of sweeps for the small orders used here.
const EIG_MAX_ITER: usize = 4096;

pub(crate) fn ensure_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(())
}

pub(crate) fn ensure_finite(m: &ComplexMatrix, what: &'static str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}

/// Largest entry modulus, max_ij |M_ij|.
pub fn max_abs_entry(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest deviation from Hermiticity, max_ij |M_ij - conj(M_ji)|.
pub fn max_asymmetry(m: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// A square complex matrix stored in canonically symmetrized form.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    m: ComplexMatrix,
}

impl HermitianMatrix {
    /// Symmetrizes `m` to (M + M†)/2 after checking shape and finiteness.
    /// Use [`HermitianMatrix::new_checked`] to reject asymmetric input
    /// instead of averaging it away.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        ensure_square(&m)?;
        ensure_finite(&m, "hermitian matrix")?;
        let h = (&m + m.adjoint()).scale(0.5);
        Ok(Self { m: h })
    }

    /// Like [`HermitianMatrix::new`], but errors when the asymmetry exceeds
    /// `asym_tol`.
    pub fn new_checked(m: ComplexMatrix, asym_tol: f64) -> Result<Self> {
        ensure_square(&m)?;
        ensure_finite(&m, "hermitian matrix")?;
        let asym = max_asymmetry(&m);
        if asym > asym_tol {
            return Err(Error::NotHermitian { max_asymmetry: asym });
        }
        Self::new(m)
    }

    /// Diagonal matrix with the given real entries.
    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(d[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self { m }
    }

    pub fn identity(n: usize) -> Self {
        Self { m: ComplexMatrix::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }

    /// Real part of the trace; the imaginary part is zero by symmetrization.
    pub fn trace_real(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    /// Smallest eigenvalue, used for rank diagnostics.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = hermitian_eig(self)?;
        Ok(vals[0])
    }
}

/// A square complex matrix that is exactly zero below the diagonal and has a
/// real, strictly positive diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperTriangular {
    m: ComplexMatrix,
}

impl UpperTriangular {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        ensure_square(&m)?;
        ensure_finite(&m, "upper-triangular matrix")?;
        for i in 0..m.nrows() {
            for j in 0..i {
                if m[(i, j)] != C64::new(0.0, 0.0) {
                    return Err(Error::InvalidDomain {
                        detail: format!("entry ({i},{j}) below the diagonal is nonzero"),
                    });
                }
            }
            let d = m[(i, i)];
            if d.im != 0.0 || d.re <= 0.0 {
                return Err(Error::InvalidDomain {
                    detail: format!("diagonal entry {i} is {d}, expected real and positive"),
                });
            }
        }
        Ok(Self { m })
    }

    /// Wraps a matrix produced by a kernel that guarantees the invariants.
    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        debug_assert!(Self::new(m.clone()).is_ok());
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }
}

/// Eigendecomposition M = V diag(λ) V† with eigenvalues sorted ascending and
/// eigenvector columns permuted to match.
///
/// Exactly diagonal input short-circuits to its diagonal entries; everything
/// else goes through the dense Hermitian solver.
pub fn hermitian_eig(m: &HermitianMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = m.dim();
    let is_diagonal = (0..n).all(|i| (0..n).all(|j| i == j || m.m[(i, j)] == C64::new(0.0, 0.0)));
    let (vals, vecs) = if is_diagonal {
        let vals: Vec<f64> = (0..n).map(|i| m.m[(i, i)].re).collect();
        (vals, ComplexMatrix::identity(n, n))
    } else {
        let se = nalgebra::linalg::SymmetricEigen::try_new(m.m.clone(), f64::EPSILON, EIG_MAX_ITER)
            .ok_or(Error::NonConvergence { op: "hermitian_eig" })?;
        (se.eigenvalues.as_slice().to_vec(), se.eigenvectors)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap().then(a.cmp(&b)));
    let sorted_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = ComplexMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    Ok((sorted_vals, sorted_vecs))
}

/// PSD square root S with S·S = M. Eigenvalues in [-clamp_tol, 0) are
/// clamped to 0; anything more negative fails.
pub fn sqrt_psd(m: &HermitianMatrix, clamp_tol: f64) -> Result<HermitianMatrix> {
    let (vals, vecs) = hermitian_eig(m)?;
    if let Some(&min) = vals.first() {
        if min < -clamp_tol {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
    }
    let roots: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    let n = m.dim();
    let scaled = ComplexMatrix::from_fn(n, n, |i, j| vecs[(i, j)] * C64::new(roots[j], 0.0));
    let s = &scaled * vecs.adjoint();
    HermitianMatrix::new(s)
}

/// Cholesky factor L with M = L L†, lower triangular, real positive diagonal.
/// A pivot at or below `tol_rank` (absolute) aborts: the matrix is rank
/// deficient at that tolerance.
pub fn cholesky_lower(m: &HermitianMatrix, tol_rank: f64) -> Result<ComplexMatrix> {
    let n = m.dim();
    let a = &m.m;
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= tol_rank {
            return Err(Error::NotPositiveDefinite {
                detail: format!("Cholesky pivot {d:.6e} at index {j} is at or below tol_rank {tol_rank:.1e}"),
            });
        }
        let diag = d.sqrt();
        l[(j, j)] = C64::new(diag, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / diag;
        }
    }
    Ok(l)
}

/// Reverses row and column order: (JMJ)_ij = M_{n-1-i, n-1-j}.
fn reverse_both(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.nrows();
    ComplexMatrix::from_fn(n, n, |i, j| m[(n - 1 - i, n - 1 - j)])
}

/// Upper-triangular factor B with M = B B† and positive diagonal, the
/// "anti-Cholesky". Implemented as index reversal around [`cholesky_lower`]
/// so there is a single pivoting code path to validate.
pub fn ul_factor(m: &HermitianMatrix, tol_rank: f64) -> Result<UpperTriangular> {
    let flipped = HermitianMatrix::new(reverse_both(&m.m))?;
    let l = cholesky_lower(&flipped, tol_rank)?;
    Ok(UpperTriangular::new_unchecked(reverse_both(&l)))
}

fn ensure_density(m: &HermitianMatrix, name: &'static str) -> Result<()> {
    let tr = m.trace_real();
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidState {
            detail: format!("{name} has trace {tr}, more than {TRACE_TOL:.0e} away from 1"),
        });
    }
    Ok(())
}

/// Uhlmann fidelity F(ρ,σ) = [Tr √(√ρ σ √ρ)]², clamped into [0,1].
///
/// Both arguments must be unit-trace (to 1e-8) and PSD after the eigenvalue
/// clamp; violations are reported as invalid states, not repaired.
pub fn fidelity(rho: &HermitianMatrix, sigma: &HermitianMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            detail: format!("fidelity of {}x{} vs {}x{}", rho.dim(), rho.dim(), sigma.dim(), sigma.dim()),
        });
    }
    ensure_density(rho, "rho")?;
    ensure_density(sigma, "sigma")?;

    let (svals, _) = hermitian_eig(sigma)?;
    if svals[0] < -CLAMP_TOL {
        return Err(Error::InvalidState {
            detail: format!("sigma has eigenvalue {:.3e} below -{CLAMP_TOL:.0e}", svals[0]),
        });
    }

    let s = sqrt_psd(rho, CLAMP_TOL).map_err(|e| match e {
        Error::NotPsd { min_eigenvalue } => Error::InvalidState {
            detail: format!("rho has eigenvalue {min_eigenvalue:.3e} below -{CLAMP_TOL:.0e}"),
        },
        other => other,
    })?;

    let inner = HermitianMatrix::new(s.matrix() * sigma.matrix() * s.matrix())?;
    let (vals, _) = hermitian_eig(&inner)?;
    let root_sum: f64 = vals.iter().map(|&v| v.max(0.0).sqrt()).sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

/// Two-dimensional closed form F = Tr(ρσ) + 2√(det ρ · det σ); agrees with
/// [`fidelity`] on all valid 2x2 inputs.
pub fn fidelity_2x2(rho: &HermitianMatrix, sigma: &HermitianMatrix) -> Result<f64> {
    if rho.dim() != 2 || sigma.dim() != 2 {
        return Err(Error::DimensionMismatch {
            detail: format!("fidelity_2x2 requires 2x2 operands, got {}x{} and {}x{}",
                rho.dim(), rho.dim(), sigma.dim(), sigma.dim()),
        });
    }
    ensure_density(rho, "rho")?;
    ensure_density(sigma, "sigma")?;

    let det = |m: &HermitianMatrix| -> Result<f64> {
        let a = m.matrix();
        let d = a[(0, 0)].re * a[(1, 1)].re - a[(0, 1)].norm_sqr();
        let diag_min = a[(0, 0)].re.min(a[(1, 1)].re);
        if d < -CLAMP_TOL || diag_min < -CLAMP_TOL {
            return Err(Error::InvalidState {
                detail: format!("2x2 operand is not PSD (det {d:.3e}, min diagonal {diag_min:.3e})"),
            });
        }
        Ok(d.max(0.0))
    };
    let dr = det(rho)?;
    let ds = det(sigma)?;
    let trace_prod = (rho.matrix() * sigma.matrix()).trace().re;
    Ok((trace_prod + 2.0 * (dr * ds).sqrt()).clamp(0.0, 1.0))
}

/// Bures distance √(2 - 2√F); zero iff the states coincide within tolerance.
pub fn bures_distance(rho: &HermitianMatrix, sigma: &HermitianMatrix) -> Result<f64> {
    let f = fidelity(rho, sigma)?;
    Ok((2.0 - 2.0 * f.sqrt()).max(0.0).sqrt())
}
