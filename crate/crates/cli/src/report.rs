//! The analysis report document: problem echo, the canonical density-matrix
//! image, and the discriminability results with diagnostics. Serialization
//! is field-order stable and numerically lossless, so a report re-parses to
//! the exact values it was built from.

use serde::{Deserialize, Serialize};

use qsd_core::discriminability::{DiscriminabilityReport, PermStrategy};
use qsd_core::perm::identity;
use qsd_core::problem::{DiscriminationProblem, ValidationReport};
use qsd_core::tolerances::{CLAMP_TOL, TRACE_TOL};
use qsd_core::transform::associated_pair;

use crate::schema::{matrix_to_json, problem_to_json, MatrixJson, ProblemJson};
use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesJson {
    pub tol_rank: f64,
    pub clamp_tol: f64,
    pub trace_tol: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselinesJson {
    pub idp_success: f64,
    pub helstrom_correct: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsJson {
    pub min_gram_eigenvalue: f64,
    pub rho_trace_residual: f64,
    pub prior_sum_residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermFidelityJson {
    pub permutation: Vec<usize>,
    pub fidelity: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscriminabilityJson {
    pub value: f64,
    pub argmax_permutation: Vec<usize>,
    pub normalized: f64,
    pub is_lower_bound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_per_permutation: Option<Vec<PermFidelityJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baselines: Option<BaselinesJson>,
    pub diagnostics: DiagnosticsJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportJson {
    pub tool_version: String,
    pub strategy: String,
    pub tolerances: TolerancesJson,
    pub problem: ProblemJson,
    /// ρ_T under the identity permutation: the canonical image of the
    /// problem, which `invert` maps back to the problem itself.
    pub rho_t: MatrixJson,
    pub discriminability: DiscriminabilityJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationJson {
    pub valid: bool,
    pub unit_diagonal: bool,
    pub max_diagonal_deviation: f64,
    pub positive_definite: bool,
    pub min_gram_eigenvalue: f64,
    pub priors_positive: bool,
    pub priors_sum: f64,
    pub priors_normalized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states_consistent: Option<bool>,
    pub violations: Vec<String>,
}

pub fn strategy_label(strategy: &PermStrategy) -> String {
    match strategy {
        PermStrategy::Exact { .. } => "exact".into(),
        PermStrategy::SortedHeuristic => "sorted".into(),
        PermStrategy::Fixed(p) => format!(
            "fixed:{}",
            p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
        ),
    }
}

pub fn validation_to_json(v: &ValidationReport) -> ValidationJson {
    ValidationJson {
        valid: v.is_valid(),
        unit_diagonal: v.unit_diagonal,
        max_diagonal_deviation: v.max_diagonal_deviation,
        positive_definite: v.positive_definite,
        min_gram_eigenvalue: v.min_gram_eigenvalue,
        priors_positive: v.priors_positive,
        priors_sum: v.priors_sum,
        priors_normalized: v.priors_normalized,
        states_consistent: v.states_consistent,
        violations: v.violations.clone(),
    }
}

pub fn build_report(
    problem: &DiscriminationProblem,
    result: &DiscriminabilityReport,
    strategy: &PermStrategy,
    tol_rank: f64,
) -> Result<ReportJson, CliError> {
    let pair = associated_pair(problem, &identity(problem.n()), tol_rank)
        .map_err(CliError::from_compute_err)?;
    Ok(ReportJson {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        strategy: strategy_label(strategy),
        tolerances: TolerancesJson {
            tol_rank,
            clamp_tol: CLAMP_TOL,
            trace_tol: TRACE_TOL,
        },
        problem: problem_to_json(problem),
        rho_t: matrix_to_json(pair.rho_t.matrix()),
        discriminability: DiscriminabilityJson {
            value: result.value,
            argmax_permutation: result.argmax_permutation.clone(),
            normalized: result.normalized,
            is_lower_bound: result.is_lower_bound,
            fidelity_per_permutation: result.fidelity_per_permutation.as_ref().map(|per| {
                per.iter()
                    .map(|(p, f)| PermFidelityJson { permutation: p.clone(), fidelity: *f })
                    .collect()
            }),
            baselines: result.baselines.map(|b| BaselinesJson {
                idp_success: b.idp_success,
                helstrom_correct: b.helstrom_correct,
            }),
            diagnostics: DiagnosticsJson {
                min_gram_eigenvalue: result.min_gram_eigenvalue,
                rho_trace_residual: result.rho_trace_residual,
                prior_sum_residual: result.prior_sum_residual,
            },
        },
    })
}
