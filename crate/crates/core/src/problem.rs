//! Discrimination problems: N linearly independent normalized pure states
//! with prior probabilities.
//!
//! The canonical internal representation is (Gram matrix, priors): every
//! downstream quantity depends only on the mutual overlaps γ_ij = ⟨φ_i|φ_j⟩
//! and the priors η_i, so explicit state vectors are optional provenance.
//! Construction is lenient where an invariant is a matter of degree (positive
//! definiteness, the priors simplex); [`validate_problem`] reports every
//! violation at once instead of stopping at the first.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::{ensure_finite, max_abs_entry, C64, ComplexMatrix, HermitianMatrix};
use crate::tolerances::{GEN_MIN_EIG, TOL_RANK, UNIT_TOL};

/// Rejection cap for the random-problem generator.
const MAX_GEN_ATTEMPTS: usize = 100;

/// d-dimensional ambient space holding N state columns, d >= N, each column
/// normalized to unit Euclidean norm.
#[derive(Clone, Debug)]
pub struct StateSet {
    m: ComplexMatrix,
}

impl StateSet {
    /// Columns of `m` are the states. Checks finiteness, d >= N >= 1, and
    /// unit column norms to 1e-12; linear independence is a separate,
    /// tolerance-dependent check left to validation.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        ensure_finite(&m, "state set")?;
        let (d, n) = (m.nrows(), m.ncols());
        if n == 0 || d < n {
            return Err(Error::InvalidProblem {
                violations: vec![format!("state set must satisfy d >= N >= 1, got d = {d}, N = {n}")],
            });
        }
        let mut violations = Vec::new();
        for j in 0..n {
            let norm = m.column(j).norm();
            if (norm - 1.0).abs() > UNIT_TOL {
                violations.push(format!("state {j} is not normalized (norm = {norm})"));
            }
        }
        if violations.is_empty() {
            Ok(Self { m })
        } else {
            Err(Error::InvalidProblem { violations })
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn len(&self) -> usize {
        self.m.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.m.ncols() == 0
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }
}

/// Hermitian matrix of mutual overlaps γ_ij with unit diagonal; positive
/// definite exactly when the states are linearly independent.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    h: HermitianMatrix,
}

impl GramMatrix {
    pub fn new(h: HermitianMatrix) -> Self {
        Self { h }
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.h
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.h.matrix()
    }

    pub fn overlap(&self, i: usize, j: usize) -> C64 {
        self.h.matrix()[(i, j)]
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        self.h.min_eigenvalue()
    }
}

/// Prior occurrence probabilities. Construction checks only shape and
/// finiteness; positivity and normalization are validation concerns.
#[derive(Clone, Debug)]
pub struct Priors {
    eta: Vec<f64>,
}

impl Priors {
    pub fn new(eta: Vec<f64>) -> Result<Self> {
        if eta.is_empty() {
            return Err(Error::InvalidProblem { violations: vec!["priors are empty".into()] });
        }
        if eta.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite { what: "priors" });
        }
        Ok(Self { eta })
    }

    pub fn uniform(n: usize) -> Self {
        Self { eta: vec![1.0 / n as f64; n] }
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.eta
    }
}

/// A discrimination problem Φ_η: Gram matrix plus priors, with the source
/// states retained when the problem was built from explicit vectors.
#[derive(Clone, Debug)]
pub struct DiscriminationProblem {
    gram: GramMatrix,
    priors: Priors,
    states: Option<StateSet>,
}

impl DiscriminationProblem {
    pub fn from_gram(gram: GramMatrix, priors: Priors) -> Result<Self> {
        if gram.dim() != priors.len() {
            return Err(Error::DimensionMismatch {
                detail: format!("Gram matrix is {0}x{0} but there are {1} priors", gram.dim(), priors.len()),
            });
        }
        Ok(Self { gram, priors, states: None })
    }

    pub fn from_states(states: StateSet, priors: Priors) -> Result<Self> {
        if states.len() != priors.len() {
            return Err(Error::DimensionMismatch {
                detail: format!("{} states but {} priors", states.len(), priors.len()),
            });
        }
        let gram = gram_from_states(&states);
        Ok(Self { gram, priors, states: Some(states) })
    }

    pub fn n(&self) -> usize {
        self.priors.len()
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    pub fn priors(&self) -> &[f64] {
        self.priors.as_slice()
    }

    pub fn states(&self) -> Option<&StateSet> {
        self.states.as_ref()
    }
}

/// Per-invariant outcome of [`validate_problem`]. `violations` aggregates a
/// human-readable message for every failed check.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub unit_diagonal: bool,
    pub max_diagonal_deviation: f64,
    pub positive_definite: bool,
    pub min_gram_eigenvalue: f64,
    pub priors_positive: bool,
    pub priors_sum: f64,
    pub priors_normalized: bool,
    /// Present when the problem carries explicit states: whether their Gram
    /// matrix reproduces the stored one to 1e-12.
    pub states_consistent: Option<bool>,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Gram matrix of overlaps, conjugate-linear in the first argument. The
/// diagonal is set to exactly 1: columns are unit vectors by the StateSet
/// invariant, so any deviation there is rounding noise.
pub fn gram_from_states(s: &StateSet) -> GramMatrix {
    let g = s.matrix().adjoint() * s.matrix();
    let n = g.nrows();
    let cleaned = ComplexMatrix::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { g[(i, j)] });
    GramMatrix::new(HermitianMatrix::new(cleaned).expect("gram of finite states is finite"))
}

/// Checks every problem invariant and reports them together: unit diagonal,
/// positive definiteness (with the minimum eigenvalue), the priors simplex,
/// and Gram/state consistency when states are present.
pub fn validate_problem(p: &DiscriminationProblem, tol_rank: f64) -> ValidationReport {
    let g = p.gram().matrix();
    let n = p.n();
    let mut violations = Vec::new();

    let mut max_diag_dev = 0.0f64;
    for i in 0..n {
        let d = g[(i, i)];
        max_diag_dev = max_diag_dev.max((d - C64::new(1.0, 0.0)).norm());
    }
    let unit_diagonal = max_diag_dev <= UNIT_TOL;
    if !unit_diagonal {
        violations.push(format!("Gram diagonal deviates from 1 by {max_diag_dev:.3e}"));
    }

    let min_gram_eigenvalue = p.gram().min_eigenvalue().unwrap_or(f64::NAN);
    let positive_definite = min_gram_eigenvalue > tol_rank;
    if !positive_definite {
        violations.push(format!(
            "Gram matrix is not positive definite (min eigenvalue {min_gram_eigenvalue:.6e} <= tol_rank {tol_rank:.1e}): states are linearly dependent"
        ));
    }

    let priors = p.priors();
    let priors_positive = priors.iter().all(|&e| e > 0.0);
    if !priors_positive {
        violations.push("priors must all be strictly positive".into());
    }
    let priors_sum: f64 = priors.iter().sum();
    let priors_normalized = (priors_sum - 1.0).abs() <= UNIT_TOL;
    if !priors_normalized {
        violations.push(format!("priors sum to {priors_sum}, not 1"));
    }

    let states_consistent = p.states().map(|s| {
        let rebuilt = gram_from_states(s);
        let dev = max_abs_entry(&(rebuilt.matrix() - g));
        let ok = dev <= 1e-12;
        if !ok {
            violations.push(format!("stored Gram differs from the states' Gram by {dev:.3e}"));
        }
        ok
    });

    ValidationReport {
        unit_diagonal,
        max_diagonal_deviation: max_diag_dev,
        positive_definite,
        min_gram_eigenvalue,
        priors_positive,
        priors_sum,
        priors_normalized,
        states_consistent,
        violations,
    }
}

/// Coefficients K = G⁻¹ of the dual (reciprocal) set: the dual states
/// |φ̃_i⟩ = Σ_j K_ji |φ_j⟩ satisfy ⟨φ̃_i|φ_j⟩ = δ_ij, encoded as G·K = I.
///
/// Inverted by LU rather than through the Cholesky factor, so cross-checks
/// against the transform path share no numerical code with it.
pub fn dual_coefficients(g: &GramMatrix) -> Result<ComplexMatrix> {
    g.matrix().clone().try_inverse().ok_or_else(|| Error::NotPositiveDefinite {
        detail: "Gram matrix is singular (LU inversion failed)".into(),
    })
}

/// Deterministic random problem: complex standard-Gaussian columns,
/// normalized, rejected until the smallest Gram eigenvalue clears the
/// conditioning threshold; priors are normalized exponential draws (flat
/// Dirichlet).
pub fn random_problem(n: usize, d: usize, seed: u64) -> Result<DiscriminationProblem> {
    if n < 2 || d < n {
        return Err(Error::InvalidDomain {
            detail: format!("random problem requires d >= N >= 2, got N = {n}, d = {d}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = None;
    for _ in 0..MAX_GEN_ATTEMPTS {
        let mut m = ComplexMatrix::from_fn(d, n, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        });
        for j in 0..n {
            let norm = m.column(j).norm();
            let col = m.column(j) / C64::new(norm, 0.0);
            m.set_column(j, &col);
        }
        let candidate = StateSet::new(m)?;
        let min_eig = gram_from_states(&candidate).min_eigenvalue()?;
        if min_eig > GEN_MIN_EIG {
            states = Some(candidate);
            break;
        }
    }
    let states = states.ok_or(Error::GenerationFailed { attempts: MAX_GEN_ATTEMPTS })?;

    let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = draws.iter().sum();
    let priors = Priors::new(draws.into_iter().map(|x| x / total).collect())?;

    DiscriminationProblem::from_states(states, priors)
}

/// Two linearly independent states with overlap γ and priors (η₁, 1-η₁).
pub fn two_state_family(gamma: C64, eta1: f64) -> Result<DiscriminationProblem> {
    if gamma.norm() >= 1.0 {
        return Err(Error::NotPositiveDefinite {
            detail: format!("two-state overlap |gamma| = {} >= 1: states are linearly dependent", gamma.norm()),
        });
    }
    if !(eta1 > 0.0 && eta1 < 1.0) {
        return Err(Error::InvalidDomain { detail: format!("eta1 = {eta1} is outside (0, 1)") });
    }
    let g = ComplexMatrix::from_row_slice(2, 2, &[
        C64::new(1.0, 0.0), gamma,
        gamma.conj(), C64::new(1.0, 0.0),
    ]);
    let gram = GramMatrix::new(HermitianMatrix::new(g)?);
    DiscriminationProblem::from_gram(gram, Priors::new(vec![eta1, 1.0 - eta1])?)
}

/// Overlaps of the three-state family: γ₁₂ = cos α, γ₁₃ = cos φ sin θ,
/// γ₂₃ = sin θ cos(α-φ).
pub fn three_state_overlaps(theta: f64, alpha: f64, phi: f64) -> (f64, f64, f64) {
    (alpha.cos(), phi.cos() * theta.sin(), theta.sin() * (alpha - phi).cos())
}

/// Gram matrix of the three-state family, built without a positive
/// definiteness check so that sweeps can report the dependent region
/// instead of failing.
pub fn three_state_gram(theta: f64, alpha: f64, phi: f64) -> GramMatrix {
    let (g12, g13, g23) = three_state_overlaps(theta, alpha, phi);
    let one = C64::new(1.0, 0.0);
    let m = ComplexMatrix::from_row_slice(3, 3, &[
        one, C64::new(g12, 0.0), C64::new(g13, 0.0),
        C64::new(g12, 0.0), one, C64::new(g23, 0.0),
        C64::new(g13, 0.0), C64::new(g23, 0.0), one,
    ]);
    GramMatrix::new(HermitianMatrix::new(m).expect("finite overlaps"))
}

/// Three-state family with equal priors. θ outside the admissible range
/// (Gram not positive definite at [`TOL_RANK`]) is a dependence error
/// reporting the offending minimum eigenvalue.
pub fn three_state_family(theta: f64, alpha: f64, phi: f64) -> Result<DiscriminationProblem> {
    let gram = three_state_gram(theta, alpha, phi);
    let min_eig = gram.min_eigenvalue()?;
    if min_eig <= TOL_RANK {
        return Err(Error::NotPositiveDefinite {
            detail: format!(
                "three-state Gram at theta = {theta} has min eigenvalue {min_eig:.6e} <= tol_rank {TOL_RANK:.1e}: states are linearly dependent"
            ),
        });
    }
    DiscriminationProblem::from_gram(gram, Priors::uniform(3))
}
