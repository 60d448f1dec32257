//! Running one configured experiment end to end.

use std::path::Path;
use std::time::Instant;

use augdual_core::numerics::operator_norm_estimate;
use augdual_core::oracle::{kkt_residual, KktReport};
use augdual_core::solver::{validate_config, NORM_SAFETY_FACTOR};
use augdual_core::{
    build_problem, solve, solve_accelerated, tau_heuristic, ModelSpec, Point, ProblemSpec, Shape, SolveConfig,
};
use serde::{Deserialize, Serialize};

use crate::config::{parse_json, ExperimentConfig, TauSource};
use crate::error::{CliError, CliResult};
use crate::instance::{generate_instance, load_instance, Instance};
use crate::trace::emit_trace;

/// Power-iteration settings for the step-size bound. The seed is fixed so
/// that the default step size, and with it every trace, is reproducible.
const NORM_EST_TOL: f64 = 1e-12;
const NORM_EST_MAX_ITER: usize = 10_000;
const NORM_EST_SEED: u64 = 0x5eed;

/// Summary written to `report_path`. Field set and order are fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub model: String,
    pub n_iter: usize,
    pub termination: String,
    pub primal_residual: f64,
    pub kkt_max_violation: f64,
    /// `‖x − x⁰‖₂ / ‖x⁰‖₂`, or `‖x‖₂` when the planted solution is zero.
    pub recovery_error: Option<f64>,
    /// `null` unless the config sets `wall_clock`.
    pub wall_ms: Option<f64>,
    pub tau: f64,
    pub h: f64,
}

impl Report {
    /// 0 converged, 3 suspected infeasible, 4 iteration cap.
    pub fn exit_code(&self) -> i32 {
        match self.termination.as_str() {
            "feasibility_tol" => 0,
            "suspected_infeasible" => 3,
            _ => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeRecord {
    Vector(usize),
    Matrix([usize; 2]),
    Pair([usize; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointRecord {
    pub shape: ShapeRecord,
    pub data: Vec<f64>,
}

impl From<&Point<f64>> for PointRecord {
    fn from(p: &Point<f64>) -> Self {
        let shape = match p.shape() {
            Shape::Vector(n) => ShapeRecord::Vector(n),
            Shape::Matrix { rows, cols } => ShapeRecord::Matrix([rows, cols]),
            Shape::Pair { rows, cols } => ShapeRecord::Pair([rows, cols]),
        };
        PointRecord {
            shape,
            data: p.data().to_vec(),
        }
    }
}

impl PointRecord {
    pub fn to_point(&self) -> CliResult<Point<f64>> {
        let shape = match self.shape {
            ShapeRecord::Vector(n) => Shape::Vector(n),
            ShapeRecord::Matrix([rows, cols]) => Shape::Matrix { rows, cols },
            ShapeRecord::Pair([rows, cols]) => Shape::Pair { rows, cols },
        };
        Ok(Point::new(shape, self.data.clone())?)
    }
}

/// Primal-dual pair written to `solution_path`, with the τ and μ it solves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub model: String,
    pub tau: f64,
    pub mu: f64,
    pub x: PointRecord,
    pub y: PointRecord,
}

pub fn load_solution(path: &Path) -> CliResult<SolutionFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_json(&text, path)
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("plain data serializes") + "\n";
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Instance with τ (and μ) applied.
fn configured_model(inst: &Instance, tau: f64, mu: Option<f64>) -> CliResult<ModelSpec<f64>> {
    let model = inst.model.clone().with_tau(tau);
    match (mu, &model) {
        (Some(mu), ModelSpec::AugL1 { .. }) => Ok(model.with_mu(mu)?),
        (None, ModelSpec::AugL1 { .. }) => Ok(model.with_mu(tau)?),
        (Some(mu), _) if mu != tau => Err(CliError::Config(format!(
            "model {} uses mu = tau; remove `mu`",
            inst.spec.model_name()
        ))),
        _ => Ok(model),
    }
}

/// Upper bound on `‖A‖`: the inflated power-iteration estimate, or the
/// Frobenius norm if power iteration did not settle.
pub fn operator_norm_bound(p: &ProblemSpec<f64>) -> CliResult<(f64, f64)> {
    let est = operator_norm_estimate(p.op(), NORM_EST_TOL, NORM_EST_MAX_ITER, NORM_EST_SEED)?;
    if est.converged {
        Ok((est.value, est.value * NORM_SAFETY_FACTOR))
    } else {
        let fro = p.op().to_dense().frobenius_norm();
        Ok((fro / NORM_SAFETY_FACTOR, fro))
    }
}

fn recovery_error(x: &Point<f64>, truth: &Point<f64>) -> Option<f64> {
    if x.shape() != truth.shape() {
        return None;
    }
    let t = truth.norm();
    let e = x.distance(truth);
    Some(if t > 0.0 { e / t } else { e })
}

/// Loads or generates the instance, solves, and writes trace, report and
/// (optionally) solution files. Solver outcomes other than convergence are
/// reported, not raised; see [`Report::exit_code`].
pub fn run_experiment(cfg: &ExperimentConfig) -> CliResult<Report> {
    cfg.validate()?;
    let inst = match (&cfg.instance, &cfg.instance_path) {
        (Some(spec), _) => generate_instance(spec)?,
        (None, Some(path)) => load_instance(path)?,
        (None, None) => unreachable!("validated"),
    };
    let tau = match cfg.tau {
        TauSource::Value(t) => t,
        TauSource::Heuristic => {
            let t = tau_heuristic(&inst.model, inst.truth_magnitude())?;
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Config(format!(
                    "tau heuristic gives {t} for this instance; set `tau` explicitly"
                )));
            }
            t
        }
    };
    let model = configured_model(&inst, tau, cfg.mu)?;
    let problem = build_problem(&model)?;
    let (est, bound) = operator_norm_bound(&problem)?;
    let h = cfg.step_size.unwrap_or_else(|| problem.default_step_size(est));

    let mut sc = SolveConfig::new(h)
        .with_max_iter(cfg.max_iter)
        .with_primal_tol(cfg.primal_tol);
    if let Some(path) = &cfg.y0_path {
        sc.y0 = Some(load_solution(path)?.y.to_point()?);
    }
    sc.warm_start = cfg.warm_start;
    sc.accelerated = cfg.accelerated;
    sc.restart = cfg.restart;
    validate_config(&problem, &sc, bound)?;

    let start = Instant::now();
    let sol = if sc.accelerated {
        solve_accelerated(&problem, &sc)?
    } else {
        solve(&problem, &sc)?
    };
    let elapsed = start.elapsed();
    let kkt: KktReport<f64> = kkt_residual(&problem, &sol.x, &sol.y)?;

    emit_trace(&sol.trace, &cfg.trace_path)?;
    if let Some(path) = &cfg.solution_path {
        let file = SolutionFile {
            model: inst.spec.model_name().into(),
            tau: problem.tau(),
            mu: problem.mu(),
            x: (&sol.x).into(),
            y: (&sol.y).into(),
        };
        write_json(&file, path)?;
    }
    let report = Report {
        model: inst.spec.model_name().into(),
        n_iter: sol.trace.iterations(),
        termination: sol.trace.termination.as_str().into(),
        primal_residual: kkt.feasibility,
        kkt_max_violation: kkt.max_violation,
        recovery_error: recovery_error(&sol.x, &inst.truth),
        wall_ms: cfg.wall_clock.then_some(elapsed.as_secs_f64() * 1e3),
        tau: problem.tau(),
        h,
    };
    write_json(&report, &cfg.report_path)?;
    Ok(report)
}

/// KKT residual of a stored solution against a stored instance.
pub fn check_solution(problem_path: &Path, solution_path: &Path) -> CliResult<KktReport<f64>> {
    let inst = load_instance(problem_path)?;
    let sol = load_solution(solution_path)?;
    if sol.model != inst.spec.model_name() {
        return Err(CliError::Config(format!(
            "solution is for model {}, instance is {}",
            sol.model,
            inst.spec.model_name()
        )));
    }
    let model = configured_model(&inst, sol.tau, Some(sol.mu))?;
    let problem = build_problem(&model)?;
    let x = sol.x.to_point()?;
    let y = sol.y.to_point()?;
    Ok(kkt_residual(&problem, &x, &y)?)
}
