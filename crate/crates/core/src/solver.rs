//! Dual gradient method for augmented models
//!
//! ```text
//! min  μ·R(x) + (μ / 2τ)·‖x‖₂²   subject to  A x = b
//! ```
//!
//! where `R` is a catalog norm, a gauge, or the separable RPCA block
//! regularizer. The dual objective is
//!
//! ```text
//! D(y) = −⟨y, b⟩ + (τμ/2)·dist(A*y/μ, B)²,    ∇D(y) = −b + τ·A·prox_R(A*y/μ)
//! ```
//!
//! with `B` the unit ball of the dual norm (or the polar set `C°`). Gradient
//! steps on `D` give the primal-dual iteration
//!
//! ```text
//! x⁺ = τ·prox_R(A*y/μ),   y⁺ = y + h·(b − A x⁺)
//! ```
//!
//! which is computed as `(τ/μ)·prox_{μR}(A*y)`; at `μ = τ` that is exactly
//! `prox_{τR}(A*y)`. The iteration converges for `0 < h < 2μ/(τ‖A‖²)`.

use crate::error::{Error, Result};
use crate::gauge::{gauge_eval, gauge_prox_with_tol, polar_project, GaugeSpec, DEFAULT_PROJECTION_TOL};
use crate::linop::{LinearOperator, Point, Shape};
use crate::numerics::{svd, DenseMatrix};
use crate::prox::{dual_ball_project, prox_norm, soft_threshold, svt, NormSpec};
use crate::scalar::Real;

/// Separable regularizer `‖L‖_* + λ‖S‖₁` on pair-shaped points `(L, S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockRegularizer<T> {
    lambda: T,
}

impl<T: Real> BlockRegularizer<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(Error::Input("block regularizer needs lambda > 0".into()));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// Nuclear prox with threshold `scale` on `L`, soft threshold `λ·scale`
    /// on `S`.
    pub fn prox(&self, v: &Point<T>, scale: T) -> Result<Point<T>> {
        let (l, s) = v.pair_blocks()?;
        let l = svt(&l, scale)?;
        let t = self.lambda * scale;
        let s = DenseMatrix::new(
            s.rows(),
            s.cols(),
            s.data().iter().map(|&x| soft_threshold(x, t)).collect(),
        )?;
        Point::pair(&l, &s)
    }

    /// Projection onto `{‖L‖₂ <= 1} × {‖S‖∞ <= λ}`, the dual unit ball.
    pub fn dual_project(&self, v: &Point<T>) -> Result<Point<T>> {
        let (l, s) = v.pair_blocks()?;
        let d = svd(&l)?;
        let l = if d.singular_values.first().is_none_or(|&x| x <= T::one()) {
            l
        } else {
            d.recompose_with(|x| x.min(T::one()))
        };
        let lam = self.lambda;
        let s = DenseMatrix::new(
            s.rows(),
            s.cols(),
            s.data().iter().map(|&x| x.max(-lam).min(lam)).collect(),
        )?;
        Point::pair(&l, &s)
    }

    pub fn value(&self, x: &Point<T>) -> Result<T> {
        let (l, s) = x.pair_blocks()?;
        let nuc: T = svd(&l)?.singular_values.into_iter().sum();
        let l1: T = s.data().iter().map(|v| v.abs()).sum();
        Ok(nuc + self.lambda * l1)
    }
}

/// The regularizer `R` of an augmented model.
#[derive(Debug, Clone, PartialEq)]
pub enum Regularizer<T> {
    Norm(NormSpec<T>),
    Gauge(GaugeSpec<T>),
    Block(BlockRegularizer<T>),
}

impl<T: Real> Regularizer<T> {
    /// `prox_{scale·R}(v)`.
    pub fn prox(&self, v: &Point<T>, scale: T) -> Result<Point<T>> {
        match self {
            Regularizer::Norm(n) => prox_norm(n, v, scale),
            Regularizer::Gauge(g) => gauge_prox_with_tol(g, v, scale, T::lit(DEFAULT_PROJECTION_TOL)),
            Regularizer::Block(b) => b.prox(v, scale),
        }
    }

    /// Projection onto the dual unit ball (the polar set for gauges).
    pub fn dual_project(&self, v: &Point<T>) -> Result<Point<T>> {
        match self {
            Regularizer::Norm(n) => dual_ball_project(n, v),
            Regularizer::Gauge(g) => polar_project(g, v, T::lit(DEFAULT_PROJECTION_TOL)),
            Regularizer::Block(b) => b.dual_project(v),
        }
    }

    pub fn value(&self, x: &Point<T>) -> Result<T> {
        match self {
            Regularizer::Norm(n) => n.value(x),
            Regularizer::Gauge(g) => gauge_eval(g, x),
            Regularizer::Block(b) => b.value(x),
        }
    }
}

/// One augmented model instance `(A, b, R, τ, μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec<T> {
    op: LinearOperator<T>,
    b: Point<T>,
    regularizer: Regularizer<T>,
    tau: T,
    mu: T,
}

impl<T: Real> ProblemSpec<T> {
    pub fn new(op: LinearOperator<T>, b: Point<T>, regularizer: Regularizer<T>, tau: T, mu: T) -> Result<Self> {
        b.check_shape(op.codomain_shape())?;
        if !b.is_finite() {
            return Err(Error::NonFinite("b"));
        }
        for (name, v) in [("tau", tau), ("mu", mu)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::Input(format!("{name} must be finite and positive, got {v}")));
            }
        }
        if let (Regularizer::Block(_), Shape::Matrix { .. } | Shape::Vector(_)) = (&regularizer, op.domain_shape()) {
            return Err(Error::Input("block regularizer needs a pair-shaped domain".into()));
        }
        Ok(Self {
            op,
            b,
            regularizer,
            tau,
            mu,
        })
    }

    pub fn op(&self) -> &LinearOperator<T> {
        &self.op
    }

    pub fn b(&self) -> &Point<T> {
        &self.b
    }

    pub fn regularizer(&self) -> &Regularizer<T> {
        &self.regularizer
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    /// `μ·R(x) + (μ/2τ)‖x‖₂²`.
    pub fn primal_objective(&self, x: &Point<T>) -> Result<T> {
        let n = x.norm();
        Ok(self.mu * self.regularizer.value(x)? + self.mu / (self.tau + self.tau) * n * n)
    }

    /// Upper end of the admissible step interval for a given bound on `‖A‖`.
    pub fn step_upper_bound(&self, norm_bound: T) -> T {
        (self.mu + self.mu) / (self.tau * norm_bound * norm_bound)
    }

    /// `μ / (τ (1.01·‖A‖_est)²)`.
    pub fn default_step_size(&self, norm_estimate: T) -> T {
        let nb = norm_estimate * T::lit(NORM_SAFETY_FACTOR);
        self.mu / (self.tau * nb * nb)
    }
}

/// Inflation applied to power-iteration norm estimates before they are used
/// as a bound on `‖A‖`.
pub const NORM_SAFETY_FACTOR: f64 = 1.01;

/// Primal point, dual-ball point and `A*y` generated by a dual iterate:
/// `x = (τ/μ)·prox_{μR}(A*y)`, `z = Π_B(A*y/μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualPoint<T> {
    pub x: Point<T>,
    pub z: Point<T>,
    pub aty: Point<T>,
}

pub fn primal_dual_point<T: Real>(p: &ProblemSpec<T>, y: &Point<T>) -> Result<PrimalDualPoint<T>> {
    let aty = p.op.adjoint_apply(y)?;
    let x = primal_from_aty(p, &aty)?;
    let z = p.regularizer.dual_project(&aty.scale(T::one() / p.mu))?;
    Ok(PrimalDualPoint { x, z, aty })
}

/// `τ·prox_R(A*y/μ)`, the minimizer of the Lagrangian at `y`.
pub fn primal_from_dual<T: Real>(p: &ProblemSpec<T>, y: &Point<T>) -> Result<Point<T>> {
    let aty = p.op.adjoint_apply(y)?;
    primal_from_aty(p, &aty)
}

fn primal_from_aty<T: Real>(p: &ProblemSpec<T>, aty: &Point<T>) -> Result<Point<T>> {
    let x = p.regularizer.prox(aty, p.mu)?;
    if p.tau == p.mu {
        Ok(x)
    } else {
        Ok(x.scale(p.tau / p.mu))
    }
}

/// `D(y) = −⟨y, b⟩ + (τμ/2)·dist(A*y/μ, B)²`.
pub fn dual_objective<T: Real>(p: &ProblemSpec<T>, y: &Point<T>) -> Result<T> {
    y.check_shape(p.op.codomain_shape())?;
    let aty = p.op.adjoint_apply(y)?;
    let w = aty.scale(T::one() / p.mu);
    let z = p.regularizer.dual_project(&w)?;
    Ok(dual_objective_from(p, y, &w, &z))
}

fn dual_objective_from<T: Real>(p: &ProblemSpec<T>, y: &Point<T>, w: &Point<T>, z: &Point<T>) -> T {
    let d = w.distance(z);
    let half = T::lit(0.5);
    -y.dot(&p.b) + half * p.tau * p.mu * d * d
}

/// `∇D(y) = −b + A·x(y)` with `x(y) = τ·prox_R(A*y/μ)`.
pub fn dual_gradient<T: Real>(p: &ProblemSpec<T>, y: &Point<T>) -> Result<Point<T>> {
    y.check_shape(p.op.codomain_shape())?;
    let x = primal_from_dual(p, y)?;
    Ok(p.op.apply(&x)?.sub(&p.b))
}

/// Step size, stopping rule and start point of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig<T> {
    pub step_size: T,
    pub max_iter: usize,
    /// Stop once `‖b − A x‖₂ <= primal_tol·max(1, ‖b‖₂)`.
    pub primal_tol: T,
    /// Dual start; `None` is the origin.
    pub y0: Option<Point<T>>,
    /// Must be set for a nonzero `y0` to pass validation.
    pub warm_start: bool,
    pub accelerated: bool,
    /// Gradient-based adaptive restart (accelerated variant only).
    pub restart: bool,
}

impl<T: Real> SolveConfig<T> {
    pub fn new(step_size: T) -> Self {
        Self {
            step_size,
            max_iter: 10_000,
            primal_tol: T::lit(1e-8),
            y0: None,
            warm_start: false,
            accelerated: false,
            restart: true,
        }
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_primal_tol(mut self, tol: T) -> Self {
        self.primal_tol = tol;
        self
    }

    pub fn with_warm_start(mut self, y0: Point<T>) -> Self {
        self.y0 = Some(y0);
        self.warm_start = true;
        self
    }

    pub fn accelerated(mut self, restart: bool) -> Self {
        self.accelerated = true;
        self.restart = restart;
        self
    }
}

/// Checks `0 < h < 2μ/(τ·norm_bound²)` (or `<= μ/(τ·norm_bound²)` for the
/// accelerated variant) and the remaining configuration fields.
///
/// `norm_bound` must bound `‖A‖` from above; pass the power-iteration
/// estimate times [`NORM_SAFETY_FACTOR`].
pub fn validate_config<T: Real>(p: &ProblemSpec<T>, c: &SolveConfig<T>, norm_bound: T) -> Result<()> {
    if !(norm_bound > T::zero() && norm_bound.is_finite()) {
        return Err(Error::Config(format!(
            "operator norm bound must be positive, got {norm_bound}"
        )));
    }
    let h = c.step_size;
    let (upper, inclusive) = if c.accelerated {
        (p.step_upper_bound(norm_bound) / (T::one() + T::one()), true)
    } else {
        (p.step_upper_bound(norm_bound), false)
    };
    let inside = h > T::zero() && h.is_finite() && if inclusive { h <= upper } else { h < upper };
    if !inside {
        return Err(Error::StepSize {
            h: h.to_f64_lossy(),
            upper: upper.to_f64_lossy(),
            upper_inclusive: inclusive,
        });
    }
    if !(c.primal_tol > T::zero()) {
        return Err(Error::Config("primal_tol must be positive".into()));
    }
    if c.max_iter == 0 {
        return Err(Error::Config("max_iter must be at least 1".into()));
    }
    if let Some(y0) = &c.y0 {
        y0.check_shape(p.op.codomain_shape())?;
        let nonzero = y0.data().iter().any(|&v| v != T::zero());
        if nonzero && !c.warm_start {
            return Err(Error::Config("nonzero y0 requires warm_start".into()));
        }
    }
    Ok(())
}

/// Iterate of the primal-dual recursion. After `k >= 1` steps, `y` is
/// `y^k`, while `x` and `z` were both generated from `y^{k-1}`:
/// `x = (τ/μ)(A*y^{k-1} − μ z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState<T> {
    pub k: usize,
    pub y: Point<T>,
    pub x: Point<T>,
    pub z: Point<T>,
}

impl<T: Real> DualState<T> {
    pub fn initial(p: &ProblemSpec<T>, y0: Option<&Point<T>>) -> Result<Self> {
        let y = match y0 {
            Some(y) => {
                y.check_shape(p.op.codomain_shape())?;
                y.clone()
            }
            None => Point::zeros(p.op.codomain_shape()),
        };
        Ok(Self {
            k: 0,
            y,
            x: Point::zeros(p.op.domain_shape()),
            z: Point::zeros(p.op.domain_shape()),
        })
    }
}

/// Diagnostics of one iteration `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord<T> {
    pub k: usize,
    /// `‖b − A x^{k+1}‖₂`
    pub primal_residual: T,
    /// `D(y^k)`
    pub dual_objective: T,
    /// `‖x^{k+1} − x^k‖₂`
    pub x_change: T,
    /// `‖y^{k+1} − y^k‖₂`
    pub y_change: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    FeasibilityTol,
    MaxIter,
    SuspectedInfeasible,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::FeasibilityTol => "feasibility_tol",
            Termination::MaxIter => "max_iter",
            Termination::SuspectedInfeasible => "suspected_infeasible",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace<T> {
    pub records: Vec<IterationRecord<T>>,
    pub termination: Termination,
}

impl<T> SolveTrace<T> {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

/// Output of [`solve`] / [`solve_accelerated`]. `y` is the dual point that
/// generated `x`, so `x = τ·prox_R(A*y/μ)` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub x: Point<T>,
    pub y: Point<T>,
    pub trace: SolveTrace<T>,
}

struct Advance<T> {
    next: DualState<T>,
    record: IterationRecord<T>,
    residual: Point<T>,
}

fn advance<T: Real>(p: &ProblemSpec<T>, s: &DualState<T>, h: T) -> Result<Advance<T>> {
    let pd = primal_dual_point(p, &s.y)?;
    let residual = p.b.sub(&p.op.apply(&pd.x)?);
    let y_next = s.y.axpy(h, &residual);
    let w = pd.aty.scale(T::one() / p.mu);
    let record = IterationRecord {
        k: s.k,
        primal_residual: residual.norm(),
        dual_objective: dual_objective_from(p, &s.y, &w, &pd.z),
        x_change: pd.x.distance(&s.x),
        y_change: y_next.distance(&s.y),
    };
    Ok(Advance {
        next: DualState {
            k: s.k + 1,
            y: y_next,
            x: pd.x,
            z: pd.z,
        },
        record,
        residual,
    })
}

/// One step of `x⁺ = τ·prox_R(A*y/μ)`, `y⁺ = y + h(b − A x⁺)`.
pub fn step<T: Real>(p: &ProblemSpec<T>, s: &DualState<T>, h: T) -> Result<DualState<T>> {
    s.y.check_shape(p.op.codomain_shape())?;
    Ok(advance(p, s, h)?.next)
}

const STAGNATION_WINDOW: usize = 100;
const STAGNATION_REL_CHANGE: f64 = 1e-12;
const RANGE_ORTHOGONALITY: f64 = 1e-6;

/// Flags an inconsistent constraint system: the feasibility residual has
/// stopped moving while above tolerance *and* is nearly orthogonal to the
/// range of `A`. Such an `r` certifies inconsistency, since `⟨r, b⟩ > 0`
/// while `⟨r, A x⟩ ≈ 0` for every `x`. The second test matters: recovery
/// models with large τ spend many iterations at `x = 0`, where the residual
/// equals `b` exactly but `A*r = A*b` is far from zero.
struct StagnationMonitor<T> {
    history: Vec<T>,
    /// `‖A*b‖ / ‖b‖`, the reference scale for `‖A*r‖ / ‖r‖`.
    range_scale: T,
}

impl<T: Real> StagnationMonitor<T> {
    fn new(p: &ProblemSpec<T>) -> Result<Self> {
        let nb = p.b.norm();
        let range_scale = if nb > T::zero() {
            p.op.adjoint_apply(&p.b)?.norm() / nb
        } else {
            T::zero()
        };
        Ok(Self {
            history: Vec::new(),
            range_scale,
        })
    }

    fn stalled(&mut self, p: &ProblemSpec<T>, residual: &Point<T>) -> Result<bool> {
        let rn = residual.norm();
        self.history.push(rn);
        let n = self.history.len();
        if n <= STAGNATION_WINDOW {
            return Ok(false);
        }
        let old = self.history[n - 1 - STAGNATION_WINDOW];
        if !(old > T::zero() && (rn - old).abs() <= T::lit(STAGNATION_REL_CHANGE) * old) {
            return Ok(false);
        }
        // b ⟂ range(A) with b ≠ 0 is inconsistent outright
        if self.range_scale == T::zero() {
            return Ok(true);
        }
        let atr = p.op.adjoint_apply(residual)?.norm();
        Ok(atr <= T::lit(RANGE_ORTHOGONALITY) * self.range_scale * rn)
    }
}

fn feasibility_target<T: Real>(p: &ProblemSpec<T>, c: &SolveConfig<T>) -> T {
    c.primal_tol * p.b.norm().max(T::one())
}

/// Plain dual gradient iteration until `‖b − A x‖₂ <= primal_tol·max(1, ‖b‖₂)`
/// or `max_iter`. Does not validate `c`; call [`validate_config`] first.
pub fn solve<T: Real>(p: &ProblemSpec<T>, c: &SolveConfig<T>) -> Result<Solution<T>> {
    let target = feasibility_target(p, c);
    let mut state = DualState::initial(p, c.y0.as_ref())?;
    let mut records = Vec::new();
    let mut monitor = StagnationMonitor::new(p)?;
    let mut termination = Termination::MaxIter;
    let mut generator = state.y.clone();
    for _ in 0..c.max_iter {
        let adv = advance(p, &state, c.step_size)?;
        let rn = adv.record.primal_residual;
        records.push(adv.record);
        generator = std::mem::replace(&mut state, adv.next).y;
        if rn <= target {
            termination = Termination::FeasibilityTol;
            break;
        }
        if monitor.stalled(p, &adv.residual)? {
            termination = Termination::SuspectedInfeasible;
            break;
        }
    }
    Ok(Solution {
        x: state.x,
        y: generator,
        trace: SolveTrace { records, termination },
    })
}

/// Nesterov-accelerated dual gradient with optional gradient restart.
///
/// Momentum `β_k = (t_k − 1)/t_{k+1}`, `t_0 = 1`,
/// `t_{k+1} = (1 + √(1 + 4t_k²))/2`, applied to the dual sequence; the
/// restart resets `t` to 1 whenever `⟨∇D(y_m), y^{k+1} − y^k⟩ > 0`, with
/// `y_m` the extrapolated point. `D(y^k)` in the trace is evaluated at the
/// main iterate, not at `y_m`.
pub fn solve_accelerated<T: Real>(p: &ProblemSpec<T>, c: &SolveConfig<T>) -> Result<Solution<T>> {
    let target = feasibility_target(p, c);
    let start = DualState::initial(p, c.y0.as_ref())?;
    let mut y = start.y;
    let mut y_m = y.clone();
    let mut x_prev = start.x;
    let mut t = T::one();
    let mut records = Vec::new();
    let mut monitor = StagnationMonitor::new(p)?;
    let mut termination = Termination::MaxIter;
    let mut generator = y_m.clone();
    let two = T::one() + T::one();
    let four = two + two;

    for k in 0..c.max_iter {
        let x = primal_from_dual(p, &y_m)?;
        let residual = p.b.sub(&p.op.apply(&x)?);
        let y_next = y_m.axpy(c.step_size, &residual);
        let rn = residual.norm();
        records.push(IterationRecord {
            k,
            primal_residual: rn,
            dual_objective: dual_objective(p, &y)?,
            x_change: x.distance(&x_prev),
            y_change: y_next.distance(&y),
        });
        generator = y_m.clone();
        x_prev = x;
        if rn <= target {
            termination = Termination::FeasibilityTol;
            break;
        }
        if monitor.stalled(p, &residual)? {
            termination = Termination::SuspectedInfeasible;
            break;
        }
        // ∇D(y_m) = −residual
        if c.restart && -residual.dot(&y_next.sub(&y)) > T::zero() {
            t = T::one();
        }
        let t_next = (T::one() + (T::one() + four * t * t).sqrt()) / two;
        let beta = (t - T::one()) / t_next;
        y_m = y_next.axpy(beta, &y_next.sub(&y));
        y = y_next;
        t = t_next;
    }
    Ok(Solution {
        x: x_prev,
        y: generator,
        trace: SolveTrace { records, termination },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::operator_norm_estimate;

    fn vecp(v: &[f64]) -> Point<f64> {
        Point::vector(v.to_vec()).unwrap()
    }

    fn identity_l1(b: &[f64], tau: f64, mu: f64) -> ProblemSpec<f64> {
        let op = LinearOperator::dense(DenseMatrix::identity(b.len())).unwrap();
        ProblemSpec::new(op, vecp(b), Regularizer::Norm(NormSpec::l1()), tau, mu).unwrap()
    }

    #[test]
    fn dual_objective_examples() {
        let p = identity_l1(&[0.0, 0.0], 1.0, 1.0);
        assert_eq!(dual_objective(&p, &vecp(&[0.0, 0.0])).unwrap(), 0.0);
        assert_eq!(dual_objective(&p, &vecp(&[3.0, 0.0])).unwrap(), 2.0);
    }

    #[test]
    fn dual_objective_inner_minimum_matches_grid() {
        // min over z in the ℓ∞ ball of ½‖(3,0) − z‖², grid resolution 1e-3
        let mut best = f64::INFINITY;
        for i in -1000..=1000 {
            for j in -1000..=1000 {
                let z = (i as f64 * 1e-3, j as f64 * 1e-3);
                best = best.min(0.5 * ((3.0 - z.0).powi(2) + z.1.powi(2)));
            }
        }
        assert!((best - 2.0).abs() < 1e-9);
    }

    #[test]
    fn gradient_at_origin_is_minus_b() {
        let p = identity_l1(&[1.0, -2.0], 3.0, 0.5);
        let g = dual_gradient(&p, &vecp(&[0.0, 0.0])).unwrap();
        assert_eq!(g.data(), &[-1.0, 2.0]);
    }

    #[test]
    fn step_from_zero() {
        let p = identity_l1(&[1.0, -2.0], 3.0, 0.5);
        let s0 = DualState::initial(&p, None).unwrap();
        let s1 = step(&p, &s0, 0.1).unwrap();
        assert_eq!(s1.x.data(), &[0.0, 0.0]);
        assert_eq!(s1.y.data(), &[0.1, -0.2]);
        assert_eq!(s1.k, 1);
    }

    #[test]
    fn lbreg_hand_iteration() {
        let p = identity_l1(&[5.0], 1.0, 1.0);
        let s0 = DualState::initial(&p, None).unwrap();
        let s1 = step(&p, &s0, 1.0).unwrap();
        assert_eq!((s1.x.data()[0], s1.y.data()[0]), (0.0, 5.0));
        let s2 = step(&p, &s1, 1.0).unwrap();
        assert_eq!((s2.x.data()[0], s2.y.data()[0]), (4.0, 6.0));
    }

    #[test]
    fn validate_step_interval() {
        let p = identity_l1(&[1.0, 1.0], 2.0, 1.0);
        let bound = 2.0 * 1.0 / (2.0 * 1.0);
        let c = SolveConfig::new(bound);
        let err = validate_config(&p, &c, 1.0).unwrap_err();
        assert!(matches!(
            err,
            Error::StepSize {
                upper_inclusive: false,
                ..
            }
        ));
        assert!(err.to_string().contains("(0, 1e0)"), "{err}");
        assert!(validate_config(&p, &SolveConfig::new(0.0), 1.0).is_err());
        assert!(validate_config(&p, &SolveConfig::new(-1.0), 1.0).is_err());
        assert!(validate_config(&p, &SolveConfig::new(f64::NAN), 1.0).is_err());
        assert!(validate_config(&p, &SolveConfig::new(bound / 2.0), 1.0).is_ok());
        // accelerated caps at half the plain bound, inclusive
        assert!(validate_config(&p, &SolveConfig::new(bound / 2.0).accelerated(true), 1.0).is_ok());
        assert!(validate_config(&p, &SolveConfig::new(0.6 * bound).accelerated(true), 1.0).is_err());
    }

    #[test]
    fn validate_warm_start_and_fields() {
        let p = identity_l1(&[1.0, 1.0], 1.0, 1.0);
        let mut c = SolveConfig::new(0.5);
        c.y0 = Some(vecp(&[1.0, 0.0]));
        assert!(matches!(validate_config(&p, &c, 1.0), Err(Error::Config(_))));
        c.warm_start = true;
        assert!(validate_config(&p, &c, 1.0).is_ok());
        c.y0 = Some(vecp(&[1.0]));
        assert!(validate_config(&p, &c, 1.0).is_err());
        let c = SolveConfig::new(0.5).with_primal_tol(0.0);
        assert!(validate_config(&p, &c, 1.0).is_err());
        let c = SolveConfig::new(0.5).with_max_iter(0);
        assert!(validate_config(&p, &c, 1.0).is_err());
        // zero y0 without the flag is fine
        let mut c = SolveConfig::new(0.5);
        c.y0 = Some(vecp(&[0.0, 0.0]));
        assert!(validate_config(&p, &c, 1.0).is_ok());
    }

    #[test]
    fn zero_data_solves_immediately() {
        let p = identity_l1(&[0.0, 0.0, 0.0], 2.0, 2.0);
        for sol in [
            solve(&p, &SolveConfig::new(0.5)).unwrap(),
            solve_accelerated(&p, &SolveConfig::new(0.5).accelerated(true)).unwrap(),
        ] {
            assert_eq!(sol.trace.iterations(), 1);
            assert_eq!(sol.trace.termination, Termination::FeasibilityTol);
            assert!(sol.x.data().iter().all(|&v| v == 0.0));
            assert!(sol.y.data().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn identity_constraint_pins_solution() {
        let p = identity_l1(&[1.0, 0.0, 0.0], 1.0, 1.0);
        let c = SolveConfig::new(0.9).with_primal_tol(1e-12).with_max_iter(10_000);
        let sol = solve(&p, &c).unwrap();
        assert_eq!(sol.trace.termination, Termination::FeasibilityTol);
        assert!((sol.x.data()[0] - 1.0).abs() < 1e-11);
        assert!(sol.x.data()[1].abs() < 1e-11 && sol.x.data()[2].abs() < 1e-11);
    }

    #[test]
    fn max_iter_is_not_an_error() {
        let p = identity_l1(&[10.0, -3.0], 1.0, 1.0);
        let sol = solve(&p, &SolveConfig::new(0.01).with_max_iter(5)).unwrap();
        assert_eq!(sol.trace.termination, Termination::MaxIter);
        assert_eq!(sol.trace.iterations(), 5);
    }

    #[test]
    fn inconsistent_system_is_flagged() {
        // x1 = 1 and x1 = -1 cannot both hold
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let op = LinearOperator::dense(a).unwrap();
        let p = ProblemSpec::new(op, vecp(&[1.0, -1.0]), Regularizer::Norm(NormSpec::l1()), 1.0, 1.0).unwrap();
        let sol = solve(&p, &SolveConfig::new(0.4).with_max_iter(5000)).unwrap();
        assert_eq!(sol.trace.termination, Termination::SuspectedInfeasible);
    }

    #[test]
    fn long_zero_phase_is_not_mistaken_for_infeasibility() {
        // x stays 0 until |y| exceeds tau, about 1100 iterations at this step
        let p = identity_l1(&[1.0], 1000.0, 1000.0);
        let sol = solve(&p, &SolveConfig::new(0.9).with_max_iter(5000)).unwrap();
        assert_eq!(sol.trace.termination, Termination::FeasibilityTol);
        assert!(sol.trace.iterations() > 1000);
    }

    #[test]
    fn primal_dual_relationship_every_step() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, -1.0], vec![0.5, -1.0, 3.0]]).unwrap();
        let op = LinearOperator::dense(a).unwrap();
        let p = ProblemSpec::new(op, vecp(&[1.0, 2.0]), Regularizer::Norm(NormSpec::l1()), 4.0, 1.5).unwrap();
        let mut s = DualState::initial(&p, None).unwrap();
        for _ in 0..50 {
            let y_prev = s.y.clone();
            s = step(&p, &s, 0.05).unwrap();
            let aty = p.op().adjoint_apply(&y_prev).unwrap();
            let rebuilt = aty.sub(&s.z.scale(p.mu())).scale(p.tau() / p.mu());
            assert!(rebuilt.distance(&s.x) <= 1e-10);
        }
    }

    #[test]
    fn block_regularizer_example() {
        let b = BlockRegularizer::new(0.5).unwrap();
        let l = DenseMatrix::from_diag(&[3.0, 0.4]);
        let s = DenseMatrix::new(2, 2, vec![3.0, -0.5, 0.0, 0.0]).unwrap();
        let out = b.prox(&Point::pair(&l, &s).unwrap(), 1.0).unwrap();
        let (lo, so) = out.pair_blocks().unwrap();
        assert!(lo.sub(&DenseMatrix::from_diag(&[2.0, 0.0])).max_abs() < 1e-14);
        assert_eq!(so.data(), &[2.5, 0.0, 0.0, 0.0]);
        assert!(BlockRegularizer::new(0.0).is_err());
    }

    #[test]
    fn block_regularizer_needs_pair_domain() {
        let op = LinearOperator::dense(DenseMatrix::<f64>::identity(2)).unwrap();
        let r = Regularizer::Block(BlockRegularizer::new(1.0).unwrap());
        assert!(ProblemSpec::new(op, vecp(&[1.0, 1.0]), r, 1.0, 1.0).is_err());
    }

    #[test]
    fn problem_validation() {
        let op = LinearOperator::dense(DenseMatrix::<f64>::identity(2)).unwrap();
        let r = Regularizer::Norm(NormSpec::l1());
        assert!(ProblemSpec::new(op.clone(), vecp(&[1.0]), r.clone(), 1.0, 1.0).is_err());
        assert!(ProblemSpec::new(op.clone(), vecp(&[1.0, 1.0]), r.clone(), 0.0, 1.0).is_err());
        assert!(ProblemSpec::new(op, vecp(&[1.0, 1.0]), r, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn default_step_is_inside_interval() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let op = LinearOperator::dense(a).unwrap();
        let p = ProblemSpec::new(
            op.clone(),
            vecp(&[1.0, 1.0]),
            Regularizer::Norm(NormSpec::l1()),
            3.0,
            1.0,
        )
        .unwrap();
        let est = operator_norm_estimate(&op, 1e-12, 1000, 1).unwrap().value;
        let h = p.default_step_size(est);
        let c = SolveConfig::new(h);
        assert!(validate_config(&p, &c, est * NORM_SAFETY_FACTOR).is_ok());
        assert!(validate_config(&p, &c.clone().accelerated(true), est * NORM_SAFETY_FACTOR).is_ok());
    }

    #[test]
    fn f32_problem_runs() {
        let op = LinearOperator::dense(DenseMatrix::<f32>::identity(2)).unwrap();
        let p = ProblemSpec::new(
            op,
            Point::vector(vec![1.0f32, 0.0]).unwrap(),
            Regularizer::Norm(NormSpec::l1()),
            1.0,
            1.0,
        )
        .unwrap();
        let sol = solve(&p, &SolveConfig::new(0.9f32).with_primal_tol(1e-5)).unwrap();
        assert_eq!(sol.trace.termination, Termination::FeasibilityTol);
        assert!((sol.x.data()[0] - 1.0).abs() < 1e-4);
    }
}
