//! Seeded verification suites, shared by `augdual props` and the
//! acceptance tests. Every suite compares library output with an
//! independent computation (finite differences, a hand-written recursion,
//! the exact small-instance solver, or a longer reference run).

use std::time::Instant;

use augdual_core::gauge::{gauge_eval, gauge_prox, polar_gauge_eval};
use augdual_core::numerics::svd;
use augdual_core::oracle::{kkt_residual, l1_exact_solve};
use augdual_core::prox::{moreau_residual, prox_norm};
use augdual_core::solver::{dual_gradient, dual_objective, step, validate_config, DualState};
use augdual_core::{
    build_problem, solve, solve_accelerated, tau_heuristic, DenseMatrix, Error, GaugeSpec, LinearOperator, ModelSpec,
    NormSpec, Point, ProblemSpec, Regularizer, SeededRng, Shape, SolveConfig, Termination,
};

use crate::error::CliResult;
use crate::experiment::operator_norm_bound;
use crate::instance::{generate_instance, Instance, InstanceSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub label: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.label, self.detail)
    }
}

fn outcome(label: &'static str, run: impl FnOnce() -> CliResult<(bool, String)>) -> CheckOutcome {
    let start = Instant::now();
    match run() {
        Ok((passed, detail)) => CheckOutcome {
            label,
            passed,
            detail: format!("{detail} [{:.2}s]", start.elapsed().as_secs_f64()),
        },
        Err(e) => CheckOutcome {
            label,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Sparse-recovery instance (n = 50, m = 20, k = 5), τ = 10‖x⁰‖∞, μ = τ.
pub fn lbreg_instance(seed: u64) -> CliResult<(ProblemSpec<f64>, Instance)> {
    let inst = generate_instance(&InstanceSpec::AugL1 {
        n: 50,
        m: 20,
        k: 5,
        seed,
    })?;
    let tau = tau_heuristic(&inst.model, inst.truth_magnitude())?;
    let p = build_problem(&inst.model.clone().with_tau(tau).with_mu(tau)?)?;
    Ok((p, inst))
}

fn default_step(p: &ProblemSpec<f64>) -> CliResult<f64> {
    let (est, _) = operator_norm_bound(p)?;
    Ok(p.default_step_size(est))
}

fn dense_of(inst: &Instance) -> &DenseMatrix<f64> {
    match &inst.model {
        ModelSpec::AugL1 { a, .. } => a,
        _ => unreachable!("sparse-recovery instance"),
    }
}

fn catalog_point(norm: &NormSpec<f64>, rng: &mut SeededRng, dims: (usize, usize)) -> Point<f64> {
    let spread = 10f64.powf(2.0 * rng.uniform() - 1.0);
    let (r, c) = dims;
    let data: Vec<f64> = (0..r * c).map(|_| rng.normal() * spread).collect();
    match norm.kind() {
        augdual_core::NormKind::Nuclear => Point::from_matrix(DenseMatrix::new(r, c, data).expect("sized")),
        _ => Point::vector(data).expect("finite"),
    }
}

/// Moreau decomposition, firm nonexpansiveness, 1-Lipschitz and the
/// scaling identity `τ·prox(v/τ) = prox_τ(v)` for every catalog norm.
pub fn prox_identities(seed: u64, samples: usize) -> CheckOutcome {
    outcome("prox identities", || {
        let mut rng = SeededRng::new(seed);
        let mut worst = [0.0f64; 4]; // moreau, -firm slack, -lip slack, scaling/(1+‖v‖)
        let families = ["l1", "weighted_l1", "l2", "linf", "nuclear"];
        for fam in families {
            for i in 0..samples {
                let dims = if fam == "nuclear" {
                    (1 + rng.below(5), 1 + rng.below(5))
                } else {
                    (1, 1 + rng.below(8))
                };
                let norm = match fam {
                    "l1" => NormSpec::l1(),
                    "weighted_l1" => NormSpec::weighted_l1((0..dims.1).map(|_| 0.1 + 3.0 * rng.uniform()).collect())?,
                    "l2" => NormSpec::l2(),
                    "linf" => NormSpec::linf(),
                    _ => NormSpec::nuclear(),
                };
                let u = catalog_point(&norm, &mut rng, dims);
                let v = catalog_point(&norm, &mut rng, dims);
                let s = [0.1, 1.0, 37.0][i % 3];

                worst[0] = worst[0].max(moreau_residual(&norm, &v, s)?);
                let pu = prox_norm(&norm, &u, s)?;
                let pv = prox_norm(&norm, &v, s)?;
                let du = u.sub(&v);
                let dp = pu.sub(&pv);
                let firm = du.dot(&dp) - dp.dot(&dp);
                let lip = du.norm() - dp.norm();
                worst[1] = worst[1].max(-firm);
                worst[2] = worst[2].max(-lip);
                let scaled = prox_norm(&norm, &v.scale(1.0 / s), 1.0)?.scale(s);
                worst[3] = worst[3].max(scaled.distance(&pv) / (1.0 + v.norm()));
            }
        }
        let passed = worst[0] <= 1e-10 && worst[1] <= 1e-10 && worst[2] <= 1e-10 && worst[3] <= 1e-12;
        Ok((
            passed,
            format!(
                "{samples} inputs x {} norms; max moreau {:.2e}, min firm slack {:.2e}, min lipschitz slack {:.2e}, max scaling {:.2e}",
                families.len(),
                worst[0],
                -worst[1],
                -worst[2],
                worst[3]
            ),
        ))
    })
}

/// Relative error of `dual_gradient` against central differences of
/// `dual_objective`, worst over `points` random duals.
fn gradient_error(p: &ProblemSpec<f64>, rng: &mut SeededRng, points: usize) -> CliResult<f64> {
    let (_, nb) = operator_norm_bound(p)?;
    let shape = p.op().codomain_shape();
    let len = shape.len();
    let eps = 1e-6 * p.mu() / nb;
    let mut worst = 0.0f64;
    for _ in 0..points {
        let radius = p.mu() * (0.5 + 3.0 * rng.uniform()) / nb;
        let y = Point::new(
            shape,
            (0..len).map(|_| rng.normal() * radius / (len as f64).sqrt()).collect(),
        )?;
        let g = dual_gradient(p, &y)?;
        let mut fd = vec![0.0; len];
        for (i, fdi) in fd.iter_mut().enumerate() {
            let mut plus = y.clone();
            plus.data_mut()[i] += eps;
            let mut minus = y.clone();
            minus.data_mut()[i] -= eps;
            *fdi = (dual_objective(p, &plus)? - dual_objective(p, &minus)?) / (2.0 * eps);
        }
        let fd = Point::new(shape, fd)?;
        worst = worst.max(g.distance(&fd) / g.norm().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Finite-difference check of the dual gradient on four model families.
pub fn gradient_consistency(seed: u64, points: usize) -> CheckOutcome {
    outcome("dual gradient vs finite differences", || {
        let mut rng = SeededRng::new(seed);
        let mut rows = Vec::new();

        let l1 = generate_instance(&InstanceSpec::AugL1 {
            n: 20,
            m: 10,
            k: 3,
            seed,
        })?;
        let tau = tau_heuristic(&l1.model, l1.truth_magnitude())?;
        let p = build_problem(&l1.model.clone().with_tau(tau).with_mu(0.5 * tau)?)?;
        rows.push(("aug_l1", gradient_error(&p, &mut rng, points)?));

        let mc = generate_instance(&InstanceSpec::MatrixCompletion {
            rows: 6,
            cols: 5,
            rank: 2,
            p: 0.6,
            seed,
        })?;
        let p = build_problem(&mc.model.clone().with_tau(tau_heuristic(&mc.model, None)?))?;
        rows.push(("matrix_completion", gradient_error(&p, &mut rng, points)?));

        let rp = generate_instance(&InstanceSpec::Rpca {
            rows: 5,
            cols: 5,
            rank: 1,
            k: 3,
            lambda: Some(0.3),
            seed,
        })?;
        let p = build_problem(&rp.model.clone().with_tau(tau_heuristic(&rp.model, None)?))?;
        rows.push(("rpca", gradient_error(&p, &mut rng, points)?));

        let a = DenseMatrix::from_fn(3, 4, |_, _| rng.normal());
        let vertices: Vec<Vec<f64>> = (0..6).map(|_| rng.normal_vec(4)).collect();
        let x0: Vec<f64> = rng.normal_vec(4);
        let model = ModelSpec::GaugeModel {
            gauge: GaugeSpec::polyhedral(vertices)?,
            b: a.matvec(&x0),
            op: LinearOperator::dense(a)?,
            tau: 2.0,
        };
        rows.push((
            "polyhedral gauge",
            gradient_error(&build_problem(&model)?, &mut rng, points)?,
        ));

        let passed = rows.iter().all(|(_, e)| *e <= 1e-6);
        let detail = rows
            .iter()
            .map(|(m, e)| format!("{m} {e:.2e}"))
            .collect::<Vec<_>>()
            .join(", ");
        Ok((passed, format!("{points} points each; max relative error: {detail}")))
    })
}

/// `‖y^k − ȳ‖` is nonincreasing, ȳ the end of a run ten times longer than
/// the one that reaches tolerance.
pub fn fejer_monotonicity(seed: u64) -> CheckOutcome {
    outcome("Fejer monotonicity", || {
        let (p, _) = lbreg_instance(seed)?;
        let h = default_step(&p)?;
        let first = solve(&p, &SolveConfig::new(h).with_max_iter(200_000))?;
        if first.trace.termination != Termination::FeasibilityTol {
            return Ok((
                false,
                format!("reference solve ended with {:?}", first.trace.termination),
            ));
        }
        let n = first.trace.iterations();
        let mut state = DualState::initial(&p, None)?;
        let mut ys = vec![state.y.clone()];
        for k in 0..10 * n {
            state = step(&p, &state, h)?;
            if k < n {
                ys.push(state.y.clone());
            }
        }
        let ybar = state.y;
        let dist: Vec<f64> = ys.iter().map(|y| y.distance(&ybar)).collect();
        let worst = dist.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        Ok((
            worst <= 1e-9,
            format!(
                "{n} iterates vs reference at {} steps; max increase {worst:.2e}, distance {:.3e} -> {:.3e}",
                10 * n,
                dist[0],
                dist[n]
            ),
        ))
    })
}

/// Solver output against exhaustive sign-pattern enumeration.
pub fn oracle_agreement(seed: u64, instances: usize) -> CheckOutcome {
    outcome("agreement with exact l1 solver", || {
        let mut worst = 0.0f64;
        let mut max_iters = 0;
        for i in 0..instances {
            let n = 6 + i % 5;
            let spec = InstanceSpec::AugL1 {
                n,
                m: n.div_ceil(2),
                k: 2,
                seed: seed.wrapping_mul(1000).wrapping_add(i as u64),
            };
            let inst = generate_instance(&spec)?;
            let tau = tau_heuristic(&inst.model, inst.truth_magnitude())?;
            let p = build_problem(&inst.model.clone().with_tau(tau).with_mu(tau)?)?;
            let h = default_step(&p)?;
            let sol = solve(&p, &SolveConfig::new(h).with_primal_tol(1e-13).with_max_iter(2_000_000))?;
            if sol.trace.termination != Termination::FeasibilityTol {
                return Ok((
                    false,
                    format!("instance {i}: solver ended with {:?}", sol.trace.termination),
                ));
            }
            max_iters = max_iters.max(sol.trace.iterations());
            let exact = l1_exact_solve(dense_of(&inst), p.b(), tau, tau)?;
            worst = worst.max(sol.x.distance(&exact) / exact.norm());
        }
        Ok((
            worst <= 1e-6,
            format!("{instances} instances (n = 6..10); max relative error {worst:.2e}; max iterations {max_iters}"),
        ))
    })
}

/// Step sizes at or past `2μ/(τ‖A‖²)` are rejected; 99% of it converges.
pub fn step_size_gate(seed: u64) -> CheckOutcome {
    outcome("step-size gate", || {
        let (p, inst) = lbreg_instance(seed)?;
        let exact_norm = dense_of(&inst).spectral_norm()?;
        let bound = p.step_upper_bound(exact_norm);
        let (_, est_bound) = operator_norm_bound(&p)?;
        let rejected = |h: f64, nb: f64, accel: bool| {
            let mut c = SolveConfig::new(h);
            c.accelerated = accel;
            matches!(validate_config(&p, &c, nb), Err(Error::StepSize { .. }))
        };
        let gate = [
            rejected(bound, exact_norm, false),
            rejected(bound * 1.5, exact_norm, false),
            rejected(bound, est_bound, false),
            rejected(0.0, exact_norm, false),
            rejected(-bound, exact_norm, false),
            rejected(0.51 * bound, exact_norm, true),
        ];
        if let Some(i) = gate.iter().position(|ok| !ok) {
            return Ok((false, format!("gate case {i} was accepted")));
        }
        let h = 0.99 * bound;
        let c = SolveConfig::new(h)
            .with_max_iter(50_000)
            .with_primal_tol(1e-8 / p.b().norm().max(1.0));
        validate_config(&p, &c, exact_norm)?;
        let sol = solve(&p, &c)?;
        let res = kkt_residual(&p, &sol.x, &sol.y)?.feasibility;
        Ok((
            sol.trace.termination == Termination::FeasibilityTol && res <= 1e-8,
            format!(
                "bound {bound:.6e} rejected; h = 0.99 bound reached residual {res:.2e} in {} iterations",
                sol.trace.iterations()
            ),
        ))
    })
}

/// `X = Σ max(σ_i − τ, 0) u_i v_iᵀ`, written out from the SVD factors.
fn hand_svt(y: &DenseMatrix<f64>, tau: f64) -> CliResult<DenseMatrix<f64>> {
    let d = svd(y)?;
    let (r, c) = (y.rows(), y.cols());
    let mut x = DenseMatrix::zeros(r, c);
    for (k, &s) in d.singular_values.iter().enumerate() {
        let w = s - tau;
        if w <= 0.0 {
            continue;
        }
        for i in 0..r {
            for j in 0..c {
                x.set(i, j, x.get(i, j) + w * d.u.get(i, k) * d.v.get(j, k));
            }
        }
    }
    Ok(x)
}

/// Matrix completion: step-by-step agreement with the SVT recursion, then
/// convergence to feasibility.
pub fn svt_reproduction(seed: u64) -> CheckOutcome {
    outcome("SVT reproduction", || {
        let inst = generate_instance(&InstanceSpec::MatrixCompletion {
            rows: 10,
            cols: 10,
            rank: 2,
            p: 0.6,
            seed,
        })?;
        let ModelSpec::MatrixCompletion { omega, values, .. } = &inst.model else {
            unreachable!()
        };
        let tau = tau_heuristic(&inst.model, None)?;
        let p = build_problem(&inst.model.clone().with_tau(tau))?;
        let h = default_step(&p)?;

        // Y^{k+1} = Y^k + h·P_Ω(M − X^{k+1}),  X^{k+1} = D_τ(Y^k)
        let mut y = DenseMatrix::zeros(10, 10);
        let mut state = DualState::initial(&p, None)?;
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let x = hand_svt(&y, tau)?;
            for (&(i, j), &m) in omega.iter().zip(values) {
                y.set(i, j, y.get(i, j) + h * (m - x.get(i, j)));
            }
            state = step(&p, &state, h)?;
            let xs = state.x.as_matrix()?;
            worst = worst.max(xs.sub(&x).frobenius_norm());
            let ys: Vec<f64> = omega.iter().map(|&(i, j)| y.get(i, j)).collect();
            worst = worst.max(Point::vector(ys)?.distance(&state.y));
        }

        let c = SolveConfig::new(h)
            .with_max_iter(500_000)
            .with_primal_tol(1e-8 / p.b().norm().max(1.0))
            .accelerated(true);
        validate_config(&p, &c, operator_norm_bound(&p)?.1)?;
        let sol = solve_accelerated(&p, &c)?;
        let kkt = kkt_residual(&p, &sol.x, &sol.y)?;
        let passed = worst <= 1e-12 && kkt.feasibility <= 1e-8 && kkt.max_violation <= 1e-6;
        Ok((
            passed,
            format!(
                "max deviation over 100 steps {worst:.2e}; tau {tau:.4}; residual {:.2e}, kkt {:.2e} after {} iterations",
                kkt.feasibility,
                kkt.max_violation,
                sol.trace.iterations()
            ),
        ))
    })
}

/// Robust PCA on a planted rank-1 plus 5-sparse matrix.
pub fn rpca_decomposition(seed: u64) -> CheckOutcome {
    outcome("RPCA feasibility and KKT", || {
        let inst = generate_instance(&InstanceSpec::Rpca {
            rows: 10,
            cols: 10,
            rank: 1,
            k: 5,
            lambda: Some(0.25),
            seed,
        })?;
        let tau = tau_heuristic(&inst.model, None)?;
        let p = build_problem(&inst.model.clone().with_tau(tau))?;
        let h = default_step(&p)?;
        let dnorm = p.b().norm();
        let c = SolveConfig::new(h)
            .with_max_iter(500_000)
            .with_primal_tol(1e-8 * dnorm / dnorm.max(1.0))
            .accelerated(true);
        validate_config(&p, &c, operator_norm_bound(&p)?.1)?;
        let sol = solve_accelerated(&p, &c)?;
        let kkt = kkt_residual(&p, &sol.x, &sol.y)?;
        let rel = kkt.feasibility / dnorm;
        Ok((
            rel <= 1e-8 && kkt.max_violation <= 1e-6,
            format!(
                "tau {tau:.4}; |D - L - S|/|D| {rel:.2e}, kkt {:.2e} after {} iterations",
                kkt.max_violation,
                sol.trace.iterations()
            ),
        ))
    })
}

/// A catalog norm run as a norm and as a gauge gives the same iterates.
pub fn gauge_path_consistency(seed: u64) -> CheckOutcome {
    outcome("gauge path vs norm path", || {
        let (p, inst) = lbreg_instance(seed)?;
        let a = dense_of(&inst).clone();
        let mut rng = SeededRng::new(seed ^ 0x9e37_79b9);
        let weights: Vec<f64> = (0..a.cols()).map(|_| 0.5 + 1.5 * rng.uniform()).collect();
        let cases = [
            ("l1", NormSpec::l1(), Shape::Vector(a.cols())),
            ("weighted_l1", NormSpec::weighted_l1(weights)?, Shape::Vector(a.cols())),
            ("l2", NormSpec::l2(), Shape::Vector(a.cols())),
            ("linf", NormSpec::linf(), Shape::Vector(a.cols())),
            ("nuclear", NormSpec::nuclear(), Shape::Matrix { rows: 5, cols: 10 }),
        ];
        let tau = p.tau();
        let mut rows = Vec::new();
        let mut passed = true;
        for (name, norm, domain) in cases {
            let op = LinearOperator::dense_on(a.clone(), domain)?;
            let as_norm = ProblemSpec::new(op.clone(), p.b().clone(), Regularizer::Norm(norm.clone()), tau, tau)?;
            let as_gauge = ProblemSpec::new(op, p.b().clone(), Regularizer::Gauge(GaugeSpec::norm(norm)), tau, tau)?;
            let h = default_step(&as_norm)?;
            let mut s3 = DualState::initial(&as_norm, None)?;
            let mut s5 = DualState::initial(&as_gauge, None)?;
            let mut worst = 0.0f64;
            for _ in 0..100 {
                s3 = step(&as_norm, &s3, h)?;
                s5 = step(&as_gauge, &s5, h)?;
                worst = worst
                    .max(s3.x.distance(&s5.x) / (1.0 + s3.x.norm()))
                    .max(s3.y.distance(&s5.y) / (1.0 + s3.y.norm()));
            }
            passed &= worst <= 1e-12;
            rows.push(format!("{name} {worst:.1e}"));
        }
        Ok((
            passed,
            format!("100 steps, max relative deviation: {}", rows.join(", ")),
        ))
    })
}

/// Accelerated and plain solves on the same instance.
pub fn acceleration_sanity(seed: u64) -> CheckOutcome {
    outcome("accelerated vs plain", || {
        let (p, _) = lbreg_instance(seed)?;
        let h = default_step(&p)?;
        let plain = solve(&p, &SolveConfig::new(h).with_max_iter(500_000))?;
        let accel = solve_accelerated(&p, &SolveConfig::new(h).with_max_iter(500_000).accelerated(true))?;
        for (name, s) in [("plain", &plain), ("accelerated", &accel)] {
            if s.trace.termination != Termination::FeasibilityTol {
                return Ok((false, format!("{name} solve ended with {:?}", s.trace.termination)));
            }
        }
        let (kp, ka) = (plain.trace.iterations(), accel.trace.iterations());
        let diff = accel.x.distance(&plain.x) / plain.x.norm();
        Ok((
            ka <= kp && diff <= 1e-6,
            format!("iterations: accelerated {ka}, plain {kp}; relative difference of limits {diff:.2e}"),
        ))
    })
}

/// Gauge identities on random polyhedral polars: the polar inequality
/// `⟨x, u⟩ <= γ(x)·γ°(u)` and firm nonexpansiveness of the gauge prox.
pub fn gauge_identities(seed: u64, samples: usize) -> CheckOutcome {
    outcome("gauge identities", || {
        let mut rng = SeededRng::new(seed);
        let mut worst_polar = f64::NEG_INFINITY;
        let mut worst_firm = f64::NEG_INFINITY;
        for _ in 0..samples {
            let d = 2 + rng.below(3);
            let verts: Vec<Vec<f64>> = (0..d + 2 + rng.below(4)).map(|_| rng.normal_vec(d)).collect();
            let g = GaugeSpec::polyhedral(verts)?;
            let x = Point::vector(rng.normal_vec(d))?;
            let u = Point::vector(rng.normal_vec(d))?;
            let pu = polar_gauge_eval(&g, &u)?;
            if pu.is_finite() {
                worst_polar = worst_polar.max(x.dot(&u) - gauge_eval(&g, &x)? * pu);
            }
            let s = 0.2 + 2.0 * rng.uniform();
            let (px, pv) = (gauge_prox(&g, &x, s)?, gauge_prox(&g, &u, s)?);
            let (dx, dp) = (x.sub(&u), px.sub(&pv));
            worst_firm = worst_firm.max(dp.dot(&dp) - dx.dot(&dp));
        }
        Ok((
            worst_polar <= 1e-10 && worst_firm <= 1e-10,
            format!("{samples} polytopes; max polar excess {worst_polar:.2e}, max firm violation {worst_firm:.2e}"),
        ))
    })
}

/// All seeded suites, in acceptance order, plus the gauge identities.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    vec![
        prox_identities(seed, 1000),
        gradient_consistency(seed, 100),
        fejer_monotonicity(seed),
        oracle_agreement(seed, 20),
        step_size_gate(seed),
        svt_reproduction(seed),
        rpca_decomposition(seed),
        gauge_path_consistency(seed),
        acceleration_sanity(seed),
        gauge_identities(seed, 200),
    ]
}
