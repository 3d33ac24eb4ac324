//! The discriminability of a problem: D = max over prior permutations of
//! the fidelity between the associated pair (ρ_T, η_p), plus the closed
//! forms, the affine normalization to [0,1], and the two-state baselines
//! it is compared against.

use crate::error::{Error, Result};
use crate::exec;
use crate::matrix::{fidelity, sqrt_psd, C64};
use crate::perm::{factorial, identity, is_permutation, permutation_from_index};
use crate::problem::DiscriminationProblem;
use crate::tolerances::{CLAMP_TOL, MAX_EXACT_N};
use crate::transform::{pair_from_t, t_matrix_direct, AssociatedPair};

/// Largest permutation set echoed verbatim in a report (6! entries).
/// Beyond this only the maximum is kept.
pub const MAX_LISTED_PERMUTATIONS: usize = 720;

/// Slack accepted on the closed interval [1/N, 1] before a discriminability
/// value is rejected as out of range.
const RANGE_SLACK: f64 = 1e-9;

/// Which prior permutations to search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PermStrategy {
    /// Enumerate all N! permutations; errors when N exceeds `max_n`.
    Exact { max_n: usize },
    /// Evaluate a single caller-chosen permutation.
    Fixed(Vec<usize>),
    /// Pair larger priors with larger diagonal entries of the
    /// identity-permutation ρ_T. One evaluation, any N, lower bound only.
    SortedHeuristic,
}

impl Default for PermStrategy {
    fn default() -> Self {
        PermStrategy::Exact { max_n: MAX_EXACT_N }
    }
}

/// Classical two-state reference values reported alongside D.
#[derive(Clone, Copy, Debug)]
pub struct Baselines {
    /// Optimal unambiguous-discrimination success probability at equal
    /// priors, 1 - |γ|.
    pub idp_success: f64,
    /// Maximum probability of a correct guess in minimum-error
    /// discrimination of the two states.
    pub helstrom_correct: f64,
}

#[derive(Clone, Debug)]
pub struct DiscriminabilityReport {
    /// The (possibly lower-bounded) discriminability in [1/N, 1].
    pub value: f64,
    /// The permutation attaining `value`; lexicographically smallest among
    /// maximizers under the exact strategy.
    pub argmax_permutation: Vec<usize>,
    /// (N·D - 1)/(N - 1), the affine rescale of [1/N, 1] onto [0, 1].
    pub normalized: f64,
    /// True when the strategy searched a strict subset of permutations, so
    /// `value` only bounds the true maximum from below.
    pub is_lower_bound: bool,
    /// Every permutation with its fidelity, in lexicographic order. Present
    /// only for exact searches of at most [`MAX_LISTED_PERMUTATIONS`].
    pub fidelity_per_permutation: Option<Vec<(Vec<usize>, f64)>>,
    /// Present exactly when N = 2.
    pub baselines: Option<Baselines>,
    /// Smallest Gram eigenvalue: distance from linear dependence.
    pub min_gram_eigenvalue: f64,
    /// |Tr ρ_T - 1| for the reported permutation.
    pub rho_trace_residual: f64,
    /// |Ση_i - 1| for the problem's priors.
    pub prior_sum_residual: f64,
}

fn ensure_perm(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n || !is_permutation(perm) {
        return Err(Error::InvalidDomain {
            detail: format!("{perm:?} is not a permutation of 0..{n}"),
        });
    }
    Ok(())
}

fn pair_fidelity(pair: &AssociatedPair) -> Result<f64> {
    fidelity(&pair.rho_t, &pair.eta_matrix())
}

/// F(ρ_T, η_p) for one permutation of the priors.
pub fn fidelity_for_permutation(p: &DiscriminationProblem, perm: &[usize], tol_rank: f64) -> Result<f64> {
    ensure_perm(perm, p.n())?;
    let t_n = t_matrix_direct(p.gram(), tol_rank)?;
    pair_fidelity(&pair_from_t(&t_n, p.priors(), perm))
}

/// Pairs ascending diagonal weights with ascending priors, ties broken by
/// index so the result is schedule-independent.
fn sorted_pairing(diag: &[f64], priors: &[f64]) -> Vec<usize> {
    let n = diag.len();
    let mut slots: Vec<usize> = (0..n).collect();
    slots.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
    let mut by_prior: Vec<usize> = (0..n).collect();
    by_prior.sort_by(|&a, &b| priors[a].total_cmp(&priors[b]).then(a.cmp(&b)));
    let mut perm = vec![0usize; n];
    for (slot, prior_idx) in slots.into_iter().zip(by_prior) {
        perm[slot] = prior_idx;
    }
    perm
}

/// D under the given strategy. The exact strategy evaluates every
/// permutation (concurrently when available) and reduces sequentially in
/// lexicographic order, so the argmax is the lexicographically smallest
/// maximizer regardless of schedule.
pub fn discriminability(p: &DiscriminationProblem, strategy: &PermStrategy, tol_rank: f64) -> Result<DiscriminabilityReport> {
    let n = p.n();
    let priors = p.priors();
    let t_n = t_matrix_direct(p.gram(), tol_rank)?;

    let (value, argmax, per_perm, is_lower_bound) = match strategy {
        PermStrategy::Exact { max_n } => {
            if n > *max_n {
                return Err(Error::Capability { n, max_exact_n: *max_n });
            }
            let total = factorial(n);
            let results = exec::map_indexed(total, |idx| {
                pair_fidelity(&pair_from_t(&t_n, priors, &permutation_from_index(idx, n)))
            });
            let mut values = Vec::with_capacity(total);
            let mut best = f64::NEG_INFINITY;
            let mut best_idx = 0usize;
            for (idx, r) in results.into_iter().enumerate() {
                let f = r?;
                if f > best {
                    best = f;
                    best_idx = idx;
                }
                values.push(f);
            }
            let per = (total <= MAX_LISTED_PERMUTATIONS).then(|| {
                values.iter().enumerate().map(|(i, &f)| (permutation_from_index(i, n), f)).collect()
            });
            (best, permutation_from_index(best_idx, n), per, false)
        }
        PermStrategy::Fixed(perm) => {
            ensure_perm(perm, n)?;
            let f = pair_fidelity(&pair_from_t(&t_n, priors, perm))?;
            (f, perm.clone(), None, true)
        }
        PermStrategy::SortedHeuristic => {
            let id_pair = pair_from_t(&t_n, priors, &identity(n));
            let diag: Vec<f64> = (0..n).map(|i| id_pair.rho_t.matrix()[(i, i)].re).collect();
            let perm = sorted_pairing(&diag, priors);
            let f = pair_fidelity(&pair_from_t(&t_n, priors, &perm))?;
            (f, perm, None, true)
        }
    };

    // A single state is discriminated with certainty; the affine rescale is
    // degenerate at N = 1.
    let normalized = if n == 1 { 1.0 } else { normalized_discriminability(value, n)? };
    let baselines = if n == 2 {
        let g = p.gram().overlap(0, 1);
        Some(Baselines {
            idp_success: idp_success_equal_priors(g),
            helstrom_correct: helstrom_correct(priors[0], g)?,
        })
    } else {
        None
    };
    let reported = pair_from_t(&t_n, priors, &argmax);

    Ok(DiscriminabilityReport {
        value,
        argmax_permutation: argmax,
        normalized,
        is_lower_bound,
        fidelity_per_permutation: per_perm,
        baselines,
        min_gram_eigenvalue: p.gram().min_eigenvalue()?,
        rho_trace_residual: (reported.rho_t.trace_real() - 1.0).abs(),
        prior_sum_residual: (priors.iter().sum::<f64>() - 1.0).abs(),
    })
}

/// Two-state discriminability in closed form:
///
///   D = η₁² + η₂² + 2η₁η₂√(1-|γ|²) + |γ|²(η₁η₂ - η_min²)
///
/// with η₂ = 1-η₁ and η_min = min(η₁, η₂).
pub fn two_state_closed_form(eta1: f64, gamma: C64) -> Result<f64> {
    if !eta1.is_finite() || !(eta1 > 0.0 && eta1 < 1.0) {
        return Err(Error::InvalidDomain { detail: format!("eta1 = {eta1} is outside (0, 1)") });
    }
    let g2 = gamma.norm_sqr();
    if !g2.is_finite() || g2 >= 1.0 {
        return Err(Error::InvalidDomain {
            detail: format!("|gamma| = {} is not below 1", g2.sqrt()),
        });
    }
    let eta2 = 1.0 - eta1;
    let emin = eta1.min(eta2);
    Ok(eta1 * eta1 + eta2 * eta2
        + 2.0 * eta1 * eta2 * (1.0 - g2).sqrt()
        + g2 * (eta1 * eta2 - emin * emin))
}

/// Uniform-prior discriminability in closed form, (Tr √ρ_T)²/N with the
/// identity-permutation ρ_T. Equal priors make every permutation give the
/// same pair, so this is the full maximum there.
pub fn equal_prior_closed_form(p: &DiscriminationProblem, tol_rank: f64) -> Result<f64> {
    let n = p.n();
    let u = 1.0 / n as f64;
    let max_dev = p.priors().iter().map(|e| (e - u).abs()).fold(0.0, f64::max);
    if max_dev > 1e-12 {
        return Err(Error::InvalidDomain {
            detail: format!("priors deviate from uniform by {max_dev:.3e}; the closed form holds only for equal priors"),
        });
    }
    let t_n = t_matrix_direct(p.gram(), tol_rank)?;
    let pair = pair_from_t(&t_n, p.priors(), &identity(n));
    let tr = sqrt_psd(&pair.rho_t, CLAMP_TOL)?.trace_real();
    Ok(tr * tr / n as f64)
}

/// (N·D - 1)/(N - 1): maps the attainable range [1/N, 1] onto [0, 1].
/// Values within 1e-9 of the endpoints are accepted and clamped.
pub fn normalized_discriminability(d: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDomain {
            detail: format!("normalization needs at least two states, got N = {n}"),
        });
    }
    let lo = 1.0 / n as f64;
    if !d.is_finite() || d < lo - RANGE_SLACK || d > 1.0 + RANGE_SLACK {
        return Err(Error::InvalidDomain {
            detail: format!("D = {d} is outside [1/{n}, 1]"),
        });
    }
    Ok(((n as f64 * d - 1.0) / (n as f64 - 1.0)).clamp(0.0, 1.0))
}

/// Optimal unambiguous-discrimination success probability for two
/// equiprobable pure states, 1 - |γ|.
pub fn idp_success_equal_priors(gamma: C64) -> f64 {
    1.0 - gamma.norm()
}

/// Maximum probability of a correct guess in minimum-error discrimination
/// of two pure states, ½(1 + √(1 - 4η₁(1-η₁)|γ|²)).
pub fn helstrom_correct(eta1: f64, gamma: C64) -> Result<f64> {
    if !eta1.is_finite() || !(eta1 > 0.0 && eta1 < 1.0) {
        return Err(Error::InvalidDomain { detail: format!("eta1 = {eta1} is outside (0, 1)") });
    }
    let g2 = gamma.norm_sqr();
    if !g2.is_finite() || g2 > 1.0 + 1e-12 {
        return Err(Error::InvalidDomain {
            detail: format!("|gamma| = {} exceeds 1", g2.sqrt()),
        });
    }
    let discriminant = (1.0 - 4.0 * eta1 * (1.0 - eta1) * g2.min(1.0)).max(0.0);
    Ok(0.5 * (1.0 + discriminant.sqrt()))
}
