//! Solver behaviour checked against hand-written recursions, finite
//! differences and the exact small-instance solver.

use augdual_core::numerics::operator_norm_estimate;
use augdual_core::oracle::{kkt_residual, l1_exact_solve};
use augdual_core::prox::{soft_threshold, svt};
use augdual_core::solver::{dual_gradient, dual_objective, step, DualState};
use augdual_core::{
    build_problem, solve, solve_accelerated, DenseMatrix, ModelSpec, Point, ProblemSpec, SeededRng, SolveConfig,
    Termination,
};
use proptest::prelude::*;

/// Gaussian `A` (m×n), `k`-sparse planted `x⁰`, `b = A x⁰`.
fn sparse_instance(seed: u64, n: usize, m: usize, k: usize) -> (DenseMatrix<f64>, Vec<f64>, Vec<f64>) {
    let mut rng = SeededRng::new(seed);
    let a = DenseMatrix::new(m, n, rng.normal_vec(m * n))
        .unwrap()
        .scaled(1.0 / (m as f64).sqrt());
    let mut x0 = vec![0.0; n];
    for i in rng.sample_without_replacement(n, k) {
        x0[i] = if rng.uniform() < 0.5 { -1.0 } else { 1.0 } * (0.5 + rng.uniform());
    }
    let b = a.matvec(&x0);
    (a, b, x0)
}

fn l1_problem(seed: u64, n: usize, m: usize, tau: f64, mu: f64) -> (ProblemSpec<f64>, Vec<f64>) {
    let (a, b, x0) = sparse_instance(seed, n, m, 2);
    let p = build_problem(&ModelSpec::AugL1 { a, b, tau, mu }).unwrap();
    (p, x0)
}

fn safe_step(p: &ProblemSpec<f64>) -> f64 {
    let est = operator_norm_estimate(p.op(), 1e-12, 10_000, 7).unwrap();
    p.default_step_size(est.value)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gradient_matches_central_differences(seed in any::<u64>(), scale in 0.1..5.0f64) {
        let (p, _) = l1_problem(seed, 12, 6, 8.0, 3.0);
        let mut rng = SeededRng::new(seed ^ 1);
        let y = Point::vector(rng.normal_vec::<f64>(6)).unwrap().scale(scale);
        let g = dual_gradient(&p, &y).unwrap();
        let eps = 1e-6;
        for i in 0..6 {
            let mut e = vec![0.0; 6];
            e[i] = eps;
            let e = Point::vector(e).unwrap();
            let fd = (dual_objective(&p, &y.add(&e)).unwrap() - dual_objective(&p, &y.sub(&e)).unwrap()) / (2.0 * eps);
            prop_assert!((fd - g.data()[i]).abs() <= 1e-6 * (1.0 + g.norm()), "coord {i}: {fd} vs {}", g.data()[i]);
        }
    }

    #[test]
    fn exact_solution_certified_by_solver_dual(seed in any::<u64>()) {
        let (a, b, x0) = sparse_instance(seed, 8, 4, 2);
        let tau = 10.0 * x0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let p = build_problem(&ModelSpec::AugL1 { a: a.clone(), b: b.clone(), tau, mu: tau }).unwrap();
        let c = SolveConfig::new(safe_step(&p)).with_max_iter(2_000_000).with_primal_tol(1e-13);
        let sol = solve(&p, &c).unwrap();
        prop_assert_eq!(sol.trace.termination, Termination::FeasibilityTol);
        let exact = Point::vector(l1_exact_solve(&a, &Point::vector(b).unwrap(), tau, tau).unwrap().into_data()).unwrap();
        let kkt = kkt_residual(&p, &exact, &sol.y).unwrap();
        prop_assert!(kkt.max_violation <= 1e-8, "{kkt:?}");
    }
}

#[test]
fn lbreg_recursion_is_reproduced() {
    // x⁺ = (τ/μ)·shrink(Aᵀy, μ), y⁺ = y + h(b − A x⁺); μ = τ, and μ = 1
    // where the primal update reads τ·shrink(Aᵀy, 1)
    for (tau, mu) in [(12.0, 12.0), (12.0, 1.0)] {
        let (a, b, _) = sparse_instance(5, 30, 12, 2);
        let p = build_problem(&ModelSpec::AugL1 {
            a: a.clone(),
            b: b.clone(),
            tau,
            mu,
        })
        .unwrap();
        let h = safe_step(&p);
        let mut s = DualState::initial(&p, None).unwrap();
        let mut y = vec![0.0; 12];
        for k in 0..200 {
            let aty = a.tr_matvec(&y);
            let x: Vec<f64> = aty.iter().map(|&v| tau / mu * soft_threshold(v, mu)).collect();
            let ax = a.matvec(&x);
            for i in 0..12 {
                y[i] += h * (b[i] - ax[i]);
            }
            s = step(&p, &s, h).unwrap();
            let dx = s.x.distance(&Point::vector(x.clone()).unwrap());
            let dy = s.y.distance(&Point::vector(y.clone()).unwrap());
            let scale = 1.0 + s.y.norm() + s.x.norm();
            assert!(
                dx <= 1e-12 * scale && dy <= 1e-12 * scale,
                "μ = {mu}, step {k}: {dx:e} {dy:e}"
            );
        }
    }
}

#[test]
fn svt_recursion_is_reproduced() {
    let (rows, cols) = (6, 5);
    let mut rng = SeededRng::new(3);
    let u = DenseMatrix::new(rows, 2, rng.normal_vec(rows * 2)).unwrap();
    let v = DenseMatrix::new(2, cols, rng.normal_vec(2 * cols)).unwrap();
    let m = u.matmul(&v);
    let omega: Vec<(usize, usize)> = (0..rows * cols)
        .filter(|i| i % 3 != 1)
        .map(|i| (i / cols, i % cols))
        .collect();
    let values: Vec<f64> = omega.iter().map(|&(i, j)| m.get(i, j)).collect();
    let tau = 40.0;
    let p = build_problem(&ModelSpec::MatrixCompletion {
        rows,
        cols,
        omega: omega.clone(),
        values: values.clone(),
        tau,
    })
    .unwrap();
    let h = 1.2;
    let mut s = DualState::initial(&p, None).unwrap();
    let mut y = DenseMatrix::zeros(rows, cols);
    for k in 0..100 {
        // X = shrink_τ(Y) on singular values; Y += h·P_Ω(M − X)
        let x = svt(&y, tau).unwrap();
        for (&(i, j), &val) in omega.iter().zip(&values) {
            y.set(i, j, y.get(i, j) + h * (val - x.get(i, j)));
        }
        s = step(&p, &s, h).unwrap();
        let dx = s.x.distance(&Point::from_matrix(x));
        let scale = 1.0 + s.x.norm();
        assert!(dx <= 1e-12 * scale, "step {k}: {dx:e}");
        let ys: Vec<f64> = omega.iter().map(|&(i, j)| y.get(i, j)).collect();
        assert!(s.y.distance(&Point::vector(ys).unwrap()) <= 1e-12 * (1.0 + s.y.norm()));
    }
}

#[test]
fn plain_iterates_descend_and_approach_the_limit() {
    let (p, _) = l1_problem(11, 40, 16, 10.0, 10.0);
    let h = safe_step(&p);
    let reference = solve(&p, &SolveConfig::new(h).with_max_iter(500_000).with_primal_tol(1e-13)).unwrap();
    assert_eq!(reference.trace.termination, Termination::FeasibilityTol);
    let ybar = reference.y;

    let mut s = DualState::initial(&p, None).unwrap();
    let mut dist = s.y.distance(&ybar);
    let mut obj = dual_objective(&p, &s.y).unwrap();
    for k in 0..3000 {
        s = step(&p, &s, h).unwrap();
        let d = s.y.distance(&ybar);
        let o = dual_objective(&p, &s.y).unwrap();
        assert!(d <= dist + 1e-9, "distance grew at step {k}");
        assert!(o <= obj + 1e-12 * obj.abs().max(1.0), "objective grew at step {k}");
        dist = d;
        obj = o;
    }
    for w in reference.trace.records.windows(2) {
        assert!(w[1].dual_objective <= w[0].dual_objective + 1e-12 * w[0].dual_objective.abs().max(1.0));
    }
}

#[test]
fn kkt_residual_tracks_a_primal_perturbation() {
    let (p, _) = l1_problem(4, 20, 8, 10.0, 10.0);
    let sol = solve(
        &p,
        &SolveConfig::new(safe_step(&p))
            .with_max_iter(500_000)
            .with_primal_tol(1e-13),
    )
    .unwrap();
    let base = kkt_residual(&p, &sol.x, &sol.y).unwrap().max_violation;
    assert!(base <= 1e-10);
    let norm = p.op().to_dense().spectral_norm().unwrap();
    for delta in [1e-6, 1e-4, 1e-2] {
        let mut dir = Point::zeros(sol.x.shape());
        dir.data_mut()[3] = 1.0;
        let x = sol.x.axpy(delta, &dir);
        let r = kkt_residual(&p, &x, &sol.y).unwrap().max_violation;
        // stationarity moves by exactly δ, feasibility by at most ‖A‖δ
        assert!(r >= delta / 2.0 && r <= 2.0 * delta * norm.max(1.0), "δ = {delta}: {r}");
    }
}

#[test]
fn accelerated_agrees_with_plain() {
    let (p, _) = l1_problem(8, 40, 16, 10.0, 10.0);
    let h = safe_step(&p);
    let c = SolveConfig::new(h).with_max_iter(500_000).with_primal_tol(1e-10);
    let plain = solve(&p, &c).unwrap();
    let fast = solve_accelerated(&p, &c.clone().accelerated(true)).unwrap();
    assert_eq!(fast.trace.termination, Termination::FeasibilityTol);
    assert!(fast.trace.iterations() <= plain.trace.iterations());
    assert!(fast.x.distance(&plain.x) <= 1e-6 * plain.x.norm());
}

#[test]
fn single_precision_solves_a_small_instance() {
    let (a, b, x0) = sparse_instance(2, 16, 8, 1);
    let a32 = DenseMatrix::new(8, 16, a.data().iter().map(|&v| v as f32).collect()).unwrap();
    let b32: Vec<f32> = b.iter().map(|&v| v as f32).collect();
    let tau = 10.0f32 * x0.iter().fold(0.0f64, |m, v| m.max(v.abs())) as f32;
    let p = build_problem(&ModelSpec::AugL1 {
        a: a32,
        b: b32,
        tau,
        mu: tau,
    })
    .unwrap();
    let est = operator_norm_estimate(p.op(), 1e-6f32, 10_000, 7).unwrap();
    let c = SolveConfig::new(p.default_step_size(est.value))
        .with_max_iter(200_000)
        .with_primal_tol(1e-5f32);
    let sol = solve_accelerated(&p, &c.accelerated(true)).unwrap();
    assert_eq!(sol.trace.termination, Termination::FeasibilityTol);
    let err: f64 = sol
        .x
        .data()
        .iter()
        .zip(&x0)
        .map(|(&x, &t)| (x as f64 - t).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!(err <= 1e-3, "{err}");
}
