//! Euclidean projection onto the convex hull of a finite point set by
//! Wolfe's minimum-norm-point active-set method.

use crate::error::{Error, Result};
use crate::numerics::{solve_linear, DenseMatrix};
use crate::scalar::{dot, Real};

/// Result of [`project_onto_hull`].
#[derive(Debug, Clone, PartialEq)]
pub struct HullProjection<T> {
    pub point: Vec<T>,
    /// `max_w ⟨v − z, w − z⟩` over the generating points; nonpositive up to
    /// rounding exactly when `z` is the projection.
    pub certificate: T,
    pub iterations: usize,
}

/// Projects `v` onto `conv(points)`.
///
/// Errors with [`Error::ProjectionNotConverged`] if the variational
/// certificate is still above `tol` after `max_iter` major plus minor steps.
pub fn project_onto_hull<T: Real>(points: &[Vec<T>], v: &[T], tol: T, max_iter: usize) -> Result<HullProjection<T>> {
    if points.is_empty() {
        return Err(Error::Input("empty point set".into()));
    }
    let dim = v.len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::Input("point dimensions disagree".into()));
    }
    // shifted generators q_i = p_i − v; we seek the min-norm point of conv(q)
    let q: Vec<Vec<T>> = points
        .iter()
        .map(|p| p.iter().zip(v).map(|(&a, &b)| a - b).collect())
        .collect();
    let sq: Vec<T> = q.iter().map(|qi| dot(qi, qi)).collect();
    let scale2 = sq.iter().fold(T::one(), |m, &s| m.max(s));
    let stop = T::epsilon() * T::lit(1e3) * scale2;
    let tiny = T::epsilon() * T::lit(1e2);

    let start = (0..q.len())
        .min_by(|&a, &b| sq[a].partial_cmp(&sq[b]).unwrap_or(std::cmp::Ordering::Equal))
        .expect("nonempty");
    let mut active = vec![start];
    let mut lambda = vec![T::one()];
    let mut x = q[start].clone();
    let mut iterations = 0;
    let mut capped = false;

    'major: loop {
        iterations += 1;
        if iterations > max_iter {
            capped = true;
            break;
        }
        let (j, mn) = argmin_inner(&q, &x);
        let gap = dot(&x, &x) - mn;
        if gap <= stop || active.contains(&j) {
            break;
        }
        active.push(j);
        lambda.push(T::zero());

        loop {
            iterations += 1;
            if iterations > max_iter {
                capped = true;
                break 'major;
            }
            let Some(alpha) = affine_minimizer(&q, &active) else {
                // affinely dependent active set: drop the newcomer and stop
                active.pop();
                lambda.pop();
                break 'major;
            };
            if alpha.iter().all(|&a| a > tiny) {
                lambda = alpha;
                x = combine(&q, &active, &lambda, dim);
                break;
            }
            // largest step toward alpha that keeps the weights nonnegative;
            // the blocking index leaves even when rounding puts its step
            // just past 1
            let mut theta = T::infinity();
            let mut leaving = 0;
            for (i, (&a, &l)) in alpha.iter().zip(&lambda).enumerate() {
                if a <= tiny {
                    let t = if l - a > T::zero() { l / (l - a) } else { T::zero() };
                    if t < theta {
                        theta = t;
                        leaving = i;
                    }
                }
            }
            let theta = theta.min(T::one());
            for (l, &a) in lambda.iter_mut().zip(&alpha) {
                *l = theta * a + (T::one() - theta) * *l;
            }
            lambda[leaving] = T::zero();
            let mut keep = 0;
            for i in 0..active.len() {
                if lambda[i] > tiny {
                    active[keep] = active[i];
                    lambda[keep] = lambda[i];
                    keep += 1;
                }
            }
            active.truncate(keep);
            lambda.truncate(keep);
            if active.is_empty() {
                active.push(start);
                lambda.push(T::one());
            }
            let total: T = lambda.iter().copied().sum();
            lambda.iter_mut().for_each(|l| *l = *l / total);
        }
    }

    // z as a convex combination of the original points keeps it in the hull
    let total: T = lambda.iter().copied().sum();
    let mut z = vec![T::zero(); dim];
    for (&i, &l) in active.iter().zip(&lambda) {
        let w = l / total;
        for (zk, &pk) in z.iter_mut().zip(&points[i]) {
            *zk = *zk + w * pk;
        }
    }
    let certificate = certificate(points, v, &z);
    if capped || certificate > tol {
        return Err(Error::ProjectionNotConverged {
            requested: tol.to_f64_lossy(),
            achieved: certificate.to_f64_lossy(),
            iterations: iterations.min(max_iter),
            best: z.iter().map(|x| x.to_f64_lossy()).collect(),
        });
    }
    Ok(HullProjection {
        point: z,
        certificate,
        iterations,
    })
}

/// `max_w ⟨v − z, w − z⟩`.
pub fn certificate<T: Real>(points: &[Vec<T>], v: &[T], z: &[T]) -> T {
    let r: Vec<T> = v.iter().zip(z).map(|(&a, &b)| a - b).collect();
    let rz = dot(&r, z);
    points.iter().map(|w| dot(&r, w) - rz).fold(T::neg_infinity(), T::max)
}

fn argmin_inner<T: Real>(q: &[Vec<T>], x: &[T]) -> (usize, T) {
    let mut best = (0, dot(&q[0], x));
    for (i, qi) in q.iter().enumerate().skip(1) {
        let d = dot(qi, x);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn combine<T: Real>(q: &[Vec<T>], active: &[usize], lambda: &[T], dim: usize) -> Vec<T> {
    let mut x = vec![T::zero(); dim];
    for (&i, &l) in active.iter().zip(lambda) {
        for (xk, &qk) in x.iter_mut().zip(&q[i]) {
            *xk = *xk + l * qk;
        }
    }
    x
}

/// Weights `alpha` (summing to one) of the min-norm point of the affine hull
/// of the active generators.
fn affine_minimizer<T: Real>(q: &[Vec<T>], active: &[usize]) -> Option<Vec<T>> {
    let k = active.len();
    let mut kkt = DenseMatrix::zeros(k + 1, k + 1);
    for (a, &i) in active.iter().enumerate() {
        for (b, &j) in active.iter().enumerate().skip(a) {
            let g = dot(&q[i], &q[j]);
            kkt.set(a, b, g);
            kkt.set(b, a, g);
        }
        kkt.set(a, k, T::one());
        kkt.set(k, a, T::one());
    }
    let mut rhs = vec![T::zero(); k + 1];
    rhs[k] = T::one();
    let sol = solve_linear(&kkt, &rhs)?;
    Some(sol[..k].to_vec())
}
