//! JSON wire formats and their conversions to core types.
//!
//! A problem document holds exactly one of `states` (N arrays of d [re, im]
//! pairs) or `gram` (N×N [re, im] pairs), plus `priors` (N reals). A density
//! document holds `rho` (N×N [re, im] pairs). Numbers are IEEE doubles;
//! serialization uses shortest round-trip decimals, so emitted documents
//! re-parse to bitwise-identical values.

use serde::{Deserialize, Serialize};

use qsd_core::matrix::{C64, ComplexMatrix, HermitianMatrix};
use qsd_core::problem::{DiscriminationProblem, GramMatrix, Priors, StateSet};
use qsd_core::tolerances::ASYM_TOL;

use crate::CliError;

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gram: Option<MatrixJson>,
    pub priors: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoJson {
    pub rho: MatrixJson,
}

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Rectangular [re, im] grid to a matrix; `what` names the field in errors.
fn matrix_from_json(rows: &MatrixJson, what: &str) -> Result<ComplexMatrix, CliError> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err(CliError::schema(format!("\"{what}\" must not be empty")));
    }
    let ncols = rows[0].len();
    if ncols == 0 {
        return Err(CliError::schema(format!("\"{what}\" rows must not be empty")));
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
        return Err(CliError::schema(format!(
            "\"{what}\" is ragged: row 0 has {ncols} entries, row {i} has {}",
            row.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(nrows, ncols, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

fn square_matrix_from_json(rows: &MatrixJson, what: &str) -> Result<ComplexMatrix, CliError> {
    let m = matrix_from_json(rows, what)?;
    if m.nrows() != m.ncols() {
        return Err(CliError::schema(format!(
            "\"{what}\" must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m)
}

pub fn parse_problem_document(text: &str) -> Result<DiscriminationProblem, CliError> {
    let doc: ProblemJson =
        serde_json::from_str(text).map_err(|e| CliError::schema(format!("invalid problem JSON: {e}")))?;
    problem_from_json(&doc)
}

pub fn problem_from_json(doc: &ProblemJson) -> Result<DiscriminationProblem, CliError> {
    let priors = Priors::new(doc.priors.clone()).map_err(CliError::from_schema_err)?;
    match (&doc.states, &doc.gram) {
        (Some(_), Some(_)) | (None, None) => Err(CliError::schema(
            "the problem document must hold exactly one of \"states\" or \"gram\"".into(),
        )),
        (Some(states), None) => {
            // Row i of the document is state i; columns of the matrix are
            // states, so ingest the transpose.
            let per_state = matrix_from_json(states, "states")?;
            let set = StateSet::new(per_state.transpose()).map_err(CliError::from_schema_err)?;
            DiscriminationProblem::from_states(set, priors).map_err(CliError::from_schema_err)
        }
        (None, Some(gram)) => {
            let m = square_matrix_from_json(gram, "gram")?;
            let h = HermitianMatrix::new_checked(m, ASYM_TOL).map_err(CliError::from_schema_err)?;
            DiscriminationProblem::from_gram(GramMatrix::new(h), priors)
                .map_err(CliError::from_schema_err)
        }
    }
}

/// The canonical echo of a problem: Gram plus priors, never states.
pub fn problem_to_json(p: &DiscriminationProblem) -> ProblemJson {
    ProblemJson {
        states: None,
        gram: Some(matrix_to_json(p.gram().matrix())),
        priors: p.priors().to_vec(),
    }
}

/// Parses a density document. Shape problems are schema errors; Hermiticity
/// and all spectral checks are left to the numerical phase.
pub fn parse_rho_document(text: &str) -> Result<ComplexMatrix, CliError> {
    let doc: RhoJson =
        serde_json::from_str(text).map_err(|e| CliError::schema(format!("invalid density JSON: {e}")))?;
    square_matrix_from_json(&doc.rho, "rho")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_document_round_trips() {
        let text = r#"{"gram": [[[1,0],[0.5,0]],[[0.5,0],[1,0]]], "priors": [0.5, 0.5]}"#;
        let p = parse_problem_document(text).unwrap();
        assert_eq!(p.n(), 2);
        assert!((p.gram().overlap(0, 1).re - 0.5).abs() < 1e-15);
        let echo = problem_to_json(&p);
        let again = problem_from_json(&echo).unwrap();
        assert_eq!(again.gram().matrix(), p.gram().matrix());
        assert_eq!(again.priors(), p.priors());
    }

    #[test]
    fn states_document_builds_the_gram() {
        let s = 0.75f64.sqrt();
        let text = format!(
            r#"{{"states": [[[1,0],[0,0]],[[0.5,0],[{s},0]]], "priors": [0.5, 0.5]}}"#
        );
        let p = parse_problem_document(&text).unwrap();
        assert!((p.gram().overlap(0, 1).re - 0.5).abs() < 1e-12);
        assert!(p.states().is_some());
    }

    #[test]
    fn rejects_both_or_neither_source() {
        let both = r#"{"states": [[[1,0]]], "gram": [[[1,0]]], "priors": [1]}"#;
        assert_eq!(parse_problem_document(both).unwrap_err().code, 2);
        let neither = r#"{"priors": [1]}"#;
        assert_eq!(parse_problem_document(neither).unwrap_err().code, 2);
    }

    #[test]
    fn rejects_malformed_documents() {
        for text in [
            "not json",
            r#"{"gram": [[[1,0],[0,0]]], "priors": [0.5,0.5]}"#,
            r#"{"gram": [[[1,0]],[[0,0],[1,0]]], "priors": [0.5,0.5]}"#,
            r#"{"gram": [[[1,0]]], "priors": [1], "extra": 3}"#,
            r#"{"states": [], "priors": []}"#,
        ] {
            assert_eq!(parse_problem_document(text).unwrap_err().code, 2, "{text}");
        }
    }

    #[test]
    fn rejects_priors_gram_dimension_mismatch() {
        let text = r#"{"gram": [[[1,0],[0,0]],[[0,0],[1,0]]], "priors": [1]}"#;
        assert_eq!(parse_problem_document(text).unwrap_err().code, 2);
    }

    #[test]
    fn rho_document_shape_checks() {
        let ok = r#"{"rho": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#;
        let m = parse_rho_document(ok).unwrap();
        assert_eq!(m.nrows(), 2);
        let bad = r#"{"rho": [[[0.5,0],[0,0]]]}"#;
        assert_eq!(parse_rho_document(bad).unwrap_err().code, 2);
    }
}
