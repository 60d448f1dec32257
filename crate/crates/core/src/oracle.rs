//! Independent reference computations: an exact small-instance solver for
//! the augmented ℓ1 model, the KKT residual of a primal-dual pair, and a
//! grid-search prox.

use crate::error::{Error, Result};
use crate::linop::Point;
use crate::numerics::{pseudo_inverse, DenseMatrix};
use crate::scalar::{norm2, Real};
use crate::solver::{primal_from_dual, ProblemSpec};

pub const MAX_ENUMERATION_DIM: usize = 12;

/// Exact minimizer of `μ‖x‖₁ + (μ/2τ)‖x‖₂²` subject to `A x = b`.
///
/// Every sign pattern `s ∈ {0, +, −}ⁿ` fixes a quadratic program on the
/// support `S`: minimize `⟨s, x_S⟩ + ‖x_S‖²/(2τ)` over `A_S x_S = b`, whose
/// solution is the projection of `−τ s` onto that affine set. Candidates
/// that are feasible and sign-consistent are compared by the true
/// objective; the minimizer's own pattern always yields the minimizer, so
/// the smallest objective wins. Patterns are visited in a fixed order and
/// the first of tied candidates is kept.
pub fn l1_exact_solve<T: Real>(a: &DenseMatrix<T>, b: &Point<T>, tau: T, mu: T) -> Result<Point<T>> {
    let (m, n) = (a.rows(), a.cols());
    if n > MAX_ENUMERATION_DIM {
        return Err(Error::Input(format!(
            "enumeration limited to n <= {MAX_ENUMERATION_DIM}, got {n}"
        )));
    }
    if b.len() != m {
        return Err(Error::ShapeMismatch {
            expected: format!("{m} measurements"),
            found: format!("{}", b.len()),
        });
    }
    if !(tau > T::zero() && mu > T::zero()) {
        return Err(Error::Input("tau and mu must be positive".into()));
    }
    let bv = b.data();
    let bnorm = norm2(bv);
    if bnorm == T::zero() {
        return Ok(Point::zeros(crate::linop::Shape::Vector(n)));
    }
    let feas_tol = T::lit(1e-9) * (T::one() + bnorm);
    let sign_tol = T::lit(1e-12) * (T::one() + bnorm);

    // pseudo-inverse of A_S depends only on the support; cache per mask
    let mut pinv_cache: Vec<Option<DenseMatrix<T>>> = vec![None; 1 << n];
    let objective = |x: &[T]| -> T {
        let l1: T = x.iter().map(|v| v.abs()).sum();
        let l2 = norm2(x);
        l1 + l2 * l2 / (tau + tau)
    };

    let mut best: Option<(T, Vec<T>)> = None;
    let total = 3usize.pow(n as u32);
    let mut signs = vec![0i8; n];
    for code in 0..total {
        let mut c = code;
        let mut mask = 0usize;
        for (i, s) in signs.iter_mut().enumerate() {
            *s = match c % 3 {
                0 => 0,
                1 => 1,
                _ => -1,
            };
            if *s != 0 {
                mask |= 1 << i;
            }
            c /= 3;
        }
        if mask == 0 {
            continue; // b != 0 so x = 0 is infeasible
        }
        let support: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let a_s = DenseMatrix::from_fn(m, support.len(), |r, k| a.get(r, support[k]));
        if pinv_cache[mask].is_none() {
            pinv_cache[mask] = Some(pseudo_inverse(&a_s)?);
        }
        let pinv = pinv_cache[mask].as_ref().expect("cached");

        // x_S = −τ s + A_S⁺ (b + τ A_S s)
        let ts: Vec<T> = support.iter().map(|&i| -tau * T::lit(signs[i] as f64)).collect();
        let a_ts = a_s.matvec(&ts);
        let rhs: Vec<T> = bv.iter().zip(&a_ts).map(|(&bi, &ai)| bi - ai).collect();
        let corr = pinv.matvec(&rhs);
        let xs: Vec<T> = ts.iter().zip(&corr).map(|(&t, &c)| t + c).collect();

        let resid: Vec<T> = a_s.matvec(&xs).iter().zip(bv).map(|(&r, &bi)| r - bi).collect();
        if norm2(&resid) > feas_tol {
            continue;
        }
        let consistent = support
            .iter()
            .zip(&xs)
            .all(|(&i, &xi)| T::lit(signs[i] as f64) * xi >= -sign_tol);
        if !consistent {
            continue;
        }
        let mut x = vec![T::zero(); n];
        for (&i, &xi) in support.iter().zip(&xs) {
            x[i] = xi;
        }
        let f = objective(&x);
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((f, x));
        }
    }
    match best {
        Some((_, x)) => Point::vector(x),
        None => Err(Error::Infeasible("no sign pattern yields a feasible point".into())),
    }
}

/// Optimality defects of a primal-dual pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktReport<T> {
    /// `‖A x − b‖₂`
    pub feasibility: T,
    /// `‖x − τ·prox_R(A*y/μ)‖₂`; zero exactly when `x` minimizes the
    /// Lagrangian at `y`.
    pub stationarity: T,
    pub max_violation: T,
}

pub fn kkt_residual<T: Real>(p: &ProblemSpec<T>, x: &Point<T>, y: &Point<T>) -> Result<KktReport<T>> {
    let ax = p.op().apply(x)?;
    let feasibility = ax.distance(p.b());
    let stationarity = x.distance(&primal_from_dual(p, y)?);
    Ok(KktReport {
        feasibility,
        stationarity,
        max_violation: feasibility.max(stationarity),
    })
}

pub const MAX_GRID_DIM: usize = 3;
pub const MAX_GRID_POINTS: usize = 201;

/// Grid minimizer of `f(x) + ½‖x − v‖₂²` over the box `[v − w, v + w]^d`
/// with `grid_points` nodes per axis. Accurate to one grid cell.
pub fn prox_bruteforce<T: Real>(f: impl Fn(&[T]) -> T, v: &[T], half_width: T, grid_points: usize) -> Result<Vec<T>> {
    let d = v.len();
    if d == 0 || d > MAX_GRID_DIM {
        return Err(Error::Input(format!(
            "grid prox supports 1..={MAX_GRID_DIM} dimensions"
        )));
    }
    if !(2..=MAX_GRID_POINTS).contains(&grid_points) {
        return Err(Error::Input(format!("grid_points must be in 2..={MAX_GRID_POINTS}")));
    }
    if !(half_width > T::zero()) {
        return Err(Error::Input("half_width must be positive".into()));
    }
    let step = (half_width + half_width) / T::lit((grid_points - 1) as f64);
    let nodes = grid_points.pow(d as u32);
    let mut x = vec![T::zero(); d];
    let mut best = (T::infinity(), v.to_vec());
    let half = T::lit(0.5);
    for idx in 0..nodes {
        let mut c = idx;
        for k in 0..d {
            x[k] = v[k] - half_width + step * T::lit((c % grid_points) as f64);
            c /= grid_points;
        }
        let q: T = x.iter().zip(v).map(|(&a, &b)| (a - b) * (a - b)).sum();
        let val = f(&x) + half * q;
        if val < best.0 {
            best = (val, x.clone());
        }
    }
    Ok(best.1)
}
