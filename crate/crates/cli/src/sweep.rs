//! Figure-reproduction sweeps: evaluate a one-parameter family over a
//! linear grid and emit CSV or JSON. Grid points are computed concurrently
//! through the core batch map and written strictly in grid order. Rows
//! where the family leaves positive definiteness are flagged in a status
//! column with empty value cells; no NaN is ever emitted.

use qsd_core::discriminability::{discriminability, helstrom_correct, idp_success_equal_priors, PermStrategy};
use qsd_core::exec;
use qsd_core::matrix::C64;
use qsd_core::problem::{three_state_gram, two_state_family, DiscriminationProblem, Priors};

use crate::CliError;

const PI_3: f64 = std::f64::consts::FRAC_PI_3;
const PI_4: f64 = std::f64::consts::FRAC_PI_4;
const PI_2: f64 = std::f64::consts::FRAC_PI_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    #[value(name = "two_state_gamma")]
    TwoStateGamma,
    #[value(name = "two_state_eta")]
    TwoStateEta,
    #[value(name = "three_state_theta")]
    ThreeStateTheta,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::TwoStateGamma => "two_state_gamma",
            Family::TwoStateEta => "two_state_eta",
            Family::ThreeStateTheta => "three_state_theta",
        }
    }
}

/// Caller-supplied overrides; anything absent takes the family default.
#[derive(Clone, Debug, Default)]
pub struct SweepArgs {
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub steps: Option<usize>,
    pub eta1: Option<f64>,
    pub gammas: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub phi: Option<f64>,
}

#[derive(Clone, Debug)]
struct ResolvedSweep {
    family: Family,
    start: f64,
    stop: f64,
    steps: usize,
    eta1: f64,
    gammas: Vec<f64>,
    alpha: f64,
    phi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(&'static str),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // f64 Display is the shortest decimal that parses back to the
            // same value, capped at 17 significant digits.
            Cell::Num(v) => format!("{v}"),
            Cell::Text(s) => (*s).to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(v) => serde_json::Value::from(*v),
            Cell::Text(s) => serde_json::Value::String((*s).to_string()),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepTable {
    pub family: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "family": self.family,
            "columns": self.columns,
            "rows": self.rows.iter()
                .map(|r| r.iter().map(Cell::json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// Uniform grid with both endpoints exact; the naive increment formula can
/// miss `stop` by an ulp, which matters when the last row must land on a
/// boundary such as an angle whose sine is exactly 1.
pub fn grid(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|k| {
            if k + 1 == steps {
                stop
            } else {
                start + k as f64 * (stop - start) / (steps - 1) as f64
            }
        })
        .collect()
}

fn ensure(cond: bool, msg: &str) -> Result<(), CliError> {
    if cond { Ok(()) } else { Err(CliError::schema(msg.to_string())) }
}

fn resolve(family: Family, args: &SweepArgs) -> Result<ResolvedSweep, CliError> {
    let (d_start, d_stop, d_steps) = match family {
        Family::TwoStateGamma => (0.0, 0.999, 200),
        Family::TwoStateEta => (0.01, 0.99, 99),
        Family::ThreeStateTheta => (0.0, PI_2, 200),
    };
    let r = ResolvedSweep {
        family,
        start: args.start.unwrap_or(d_start),
        stop: args.stop.unwrap_or(d_stop),
        steps: args.steps.unwrap_or(d_steps),
        eta1: args.eta1.unwrap_or(0.5),
        gammas: args.gammas.clone().unwrap_or_else(|| vec![0.5, 0.75, 0.9]),
        alpha: args.alpha.unwrap_or(PI_3),
        phi: args.phi.unwrap_or(PI_4),
    };

    ensure(r.steps >= 2, "sweep needs at least 2 grid steps")?;
    ensure(r.start.is_finite() && r.stop.is_finite(), "grid endpoints must be finite")?;
    match family {
        Family::TwoStateGamma => {
            ensure(
                (0.0..1.0).contains(&r.start) && (0.0..1.0).contains(&r.stop),
                "two_state_gamma grid must stay within 0 <= gamma < 1",
            )?;
            ensure(r.eta1 > 0.0 && r.eta1 < 1.0, "eta1 must lie strictly inside (0, 1)")?;
        }
        Family::TwoStateEta => {
            ensure(
                r.start > 0.0 && r.start < 1.0 && r.stop > 0.0 && r.stop < 1.0,
                "two_state_eta grid must stay strictly inside 0 < eta1 < 1",
            )?;
            ensure(!r.gammas.is_empty(), "two_state_eta needs at least one gamma")?;
            ensure(
                r.gammas.iter().all(|g| (0.0..1.0).contains(g)),
                "every gamma must satisfy 0 <= gamma < 1",
            )?;
        }
        Family::ThreeStateTheta => {
            ensure(r.alpha.is_finite() && r.phi.is_finite(), "alpha and phi must be finite")?;
        }
    }
    Ok(r)
}

fn exact() -> PermStrategy {
    PermStrategy::default()
}

fn two_state_d(gamma: f64, eta1: f64, tol_rank: f64) -> Result<f64, CliError> {
    let p = two_state_family(C64::new(gamma, 0.0), eta1).map_err(CliError::from_compute_err)?;
    Ok(discriminability(&p, &exact(), tol_rank)
        .map_err(CliError::from_compute_err)?
        .value)
}

fn gamma_rows(r: &ResolvedSweep, tol_rank: f64) -> Result<SweepTable, CliError> {
    let xs = grid(r.start, r.stop, r.steps);
    let eta1 = r.eta1;
    let rows = exec::map_indexed(xs.len(), |k| -> Result<Vec<Cell>, CliError> {
        let gamma = xs[k];
        let d = two_state_d(gamma, eta1, tol_rank)?;
        Ok(vec![
            Cell::Num(gamma),
            Cell::Num(d),
            Cell::Num(2.0 * d - 1.0),
            Cell::Num(idp_success_equal_priors(C64::new(gamma, 0.0))),
        ])
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepTable {
        family: r.family.name(),
        columns: ["gamma", "D", "two_D_minus_1", "p_idp"].map(String::from).to_vec(),
        rows,
    })
}

fn eta_rows(r: &ResolvedSweep, tol_rank: f64) -> Result<SweepTable, CliError> {
    let xs = grid(r.start, r.stop, r.steps);
    let gammas = r.gammas.clone();
    let mut columns = vec!["eta1".to_string()];
    for g in &gammas {
        columns.push(format!("D_gamma_{g}"));
        columns.push(format!("helstrom_{g}"));
    }
    let rows = exec::map_indexed(xs.len(), |k| -> Result<Vec<Cell>, CliError> {
        let eta1 = xs[k];
        let mut row = vec![Cell::Num(eta1)];
        for &g in &gammas {
            row.push(Cell::Num(two_state_d(g, eta1, tol_rank)?));
            let h = helstrom_correct(eta1, C64::new(g, 0.0)).map_err(CliError::from_compute_err)?;
            row.push(Cell::Num(h));
        }
        Ok(row)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepTable { family: r.family.name(), columns, rows })
}

fn theta_rows(r: &ResolvedSweep, tol_rank: f64) -> Result<SweepTable, CliError> {
    let xs = grid(r.start, r.stop, r.steps);
    let (alpha, phi) = (r.alpha, r.phi);
    let rows = exec::map_indexed(xs.len(), |k| -> Result<Vec<Cell>, CliError> {
        let theta = xs[k];
        let gram = three_state_gram(theta, alpha, phi);
        let min_eig = gram.min_eigenvalue().map_err(CliError::from_compute_err)?;
        if min_eig <= tol_rank {
            return Ok(vec![
                Cell::Num(theta),
                Cell::Num(min_eig),
                Cell::Text("dependent"),
                Cell::Empty,
                Cell::Empty,
            ]);
        }
        let p = DiscriminationProblem::from_gram(gram, Priors::uniform(3))
            .map_err(CliError::from_compute_err)?;
        let report = discriminability(&p, &exact(), tol_rank).map_err(CliError::from_compute_err)?;
        Ok(vec![
            Cell::Num(theta),
            Cell::Num(min_eig),
            Cell::Text("ok"),
            Cell::Num(report.value),
            Cell::Num(report.normalized),
        ])
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepTable {
        family: r.family.name(),
        columns: ["theta", "min_gram_eig", "status", "D", "normalized_D"].map(String::from).to_vec(),
        rows,
    })
}

/// Resolves defaults, checks the grid against the family's validity domain,
/// and computes the table. D is always the exact permutation maximum; the
/// families have at most three states, where the search is trivial.
pub fn run_sweep(family: Family, args: &SweepArgs, tol_rank: f64) -> Result<SweepTable, CliError> {
    let r = resolve(family, args)?;
    match family {
        Family::TwoStateGamma => gamma_rows(&r, tol_rank),
        Family::TwoStateEta => eta_rows(&r, tol_rank),
        Family::ThreeStateTheta => theta_rows(&r, tol_rank),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qsd_core::tolerances::TOL_RANK;

    #[test]
    fn grid_hits_both_endpoints_exactly() {
        let xs = grid(0.0, 0.999, 200);
        assert_eq!(xs.len(), 200);
        assert_eq!(xs[0], 0.0);
        assert_eq!(xs[199], 0.999);
        let xs = grid(0.01, 0.99, 99);
        assert_eq!(xs[0], 0.01);
        assert_eq!(xs[98], 0.99);
        assert!((xs[49] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gamma_family_defaults_and_headers() {
        let t = run_sweep(Family::TwoStateGamma, &SweepArgs { steps: Some(5), ..Default::default() }, TOL_RANK).unwrap();
        assert_eq!(t.columns.join(","), "gamma,D,two_D_minus_1,p_idp");
        assert_eq!(t.rows.len(), 5);
        assert_eq!(t.rows[0][0], Cell::Num(0.0));
        assert_eq!(t.rows[0][1], Cell::Num(1.0));
        assert_eq!(t.rows[0][3], Cell::Num(1.0));
    }

    #[test]
    fn eta_family_headers_follow_the_gamma_list() {
        let args = SweepArgs { steps: Some(3), gammas: Some(vec![0.5, 0.9]), ..Default::default() };
        let t = run_sweep(Family::TwoStateEta, &args, TOL_RANK).unwrap();
        assert_eq!(t.columns.join(","), "eta1,D_gamma_0.5,helstrom_0.5,D_gamma_0.9,helstrom_0.9");
    }

    #[test]
    fn theta_family_flags_the_dependent_edge() {
        let t = run_sweep(Family::ThreeStateTheta, &SweepArgs { steps: Some(5), ..Default::default() }, TOL_RANK).unwrap();
        assert_eq!(t.columns.join(","), "theta,min_gram_eig,status,D,normalized_D");
        let last = t.rows.last().unwrap();
        assert_eq!(last[2], Cell::Text("dependent"));
        assert_eq!(last[3], Cell::Empty);
        assert_eq!(last[4], Cell::Empty);
        assert_eq!(t.rows[0][2], Cell::Text("ok"));
    }

    #[test]
    fn csv_renders_empty_cells_between_commas() {
        let table = SweepTable {
            family: "three_state_theta",
            columns: ["a", "b", "c"].map(String::from).to_vec(),
            rows: vec![vec![Cell::Num(1.5), Cell::Empty, Cell::Text("dependent")]],
        };
        assert_eq!(table.to_csv(), "a,b,c\n1.5,,dependent\n");
    }

    #[test]
    fn rejects_invalid_specs() {
        let bad_steps = SweepArgs { steps: Some(1), ..Default::default() };
        assert_eq!(run_sweep(Family::TwoStateGamma, &bad_steps, TOL_RANK).unwrap_err().code, 2);
        let bad_stop = SweepArgs { stop: Some(1.0), ..Default::default() };
        assert_eq!(run_sweep(Family::TwoStateGamma, &bad_stop, TOL_RANK).unwrap_err().code, 2);
        let bad_gamma = SweepArgs { gammas: Some(vec![1.0]), ..Default::default() };
        assert_eq!(run_sweep(Family::TwoStateEta, &bad_gamma, TOL_RANK).unwrap_err().code, 2);
        let bad_eta = SweepArgs { start: Some(0.0), ..Default::default() };
        assert_eq!(run_sweep(Family::TwoStateEta, &bad_eta, TOL_RANK).unwrap_err().code, 2);
    }
}
