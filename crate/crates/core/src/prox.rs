//! Proximal operators of the norm catalog and projections onto the unit
//! ball of the dual norm.
//!
//! For every norm `‖·‖` in the catalog the two maps are tied by the Moreau
//! identity `v = prox_{‖·‖}(v) + Π_B(v)`, where `B` is the dual-norm unit
//! ball. [`moreau_residual`] evaluates it.

use crate::error::{Error, Result};
use crate::linop::Point;
use crate::numerics::{svd, DenseMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    L1,
    L2,
    Linf,
    Nuclear,
}

/// A norm from the catalog. Weights are only meaningful for `L1`, giving
/// `Σ w_i |x_i|` with dual norm `max |z_i| / w_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSpec<T> {
    kind: NormKind,
    weights: Option<Vec<T>>,
}

impl<T: Real> NormSpec<T> {
    pub fn new(kind: NormKind) -> Self {
        Self { kind, weights: None }
    }

    pub fn l1() -> Self {
        Self::new(NormKind::L1)
    }

    pub fn l2() -> Self {
        Self::new(NormKind::L2)
    }

    pub fn linf() -> Self {
        Self::new(NormKind::Linf)
    }

    pub fn nuclear() -> Self {
        Self::new(NormKind::Nuclear)
    }

    pub fn weighted_l1(weights: Vec<T>) -> Result<Self> {
        if weights.iter().any(|&w| !(w > T::zero() && w.is_finite())) {
            return Err(Error::Input("L1 weights must be finite and positive".into()));
        }
        Ok(Self {
            kind: NormKind::L1,
            weights: Some(weights),
        })
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    pub fn weights(&self) -> Option<&[T]> {
        self.weights.as_deref()
    }

    fn check(&self, v: &Point<T>) -> Result<()> {
        if let Some(w) = &self.weights {
            if w.len() != v.len() {
                return Err(Error::ShapeMismatch {
                    expected: format!("{} weights", w.len()),
                    found: format!("{} coordinates", v.len()),
                });
            }
        }
        if self.kind == NormKind::Nuclear {
            v.as_matrix()?;
        }
        Ok(())
    }

    fn weight(&self, i: usize) -> T {
        self.weights.as_ref().map_or(T::one(), |w| w[i])
    }

    /// `‖x‖`.
    pub fn value(&self, x: &Point<T>) -> Result<T> {
        self.check(x)?;
        let d = x.data();
        Ok(match self.kind {
            NormKind::L1 => d.iter().enumerate().map(|(i, v)| self.weight(i) * v.abs()).sum(),
            NormKind::L2 => x.norm(),
            NormKind::Linf => x.norm_inf(),
            NormKind::Nuclear => svd(&x.as_matrix()?)?.singular_values.into_iter().sum(),
        })
    }

    /// `‖z‖_◊`, the dual norm.
    pub fn dual_value(&self, z: &Point<T>) -> Result<T> {
        self.check(z)?;
        let d = z.data();
        Ok(match self.kind {
            NormKind::L1 => d
                .iter()
                .enumerate()
                .fold(T::zero(), |m, (i, v)| m.max(v.abs() / self.weight(i))),
            NormKind::L2 => z.norm(),
            NormKind::Linf => d.iter().map(|v| v.abs()).sum(),
            NormKind::Nuclear => z.as_matrix()?.spectral_norm()?,
        })
    }
}

/// `max(|v| - t, 0) * sign(v)`; `|v| = t` maps to zero.
#[inline]
pub fn soft_threshold<T: Real>(v: T, t: T) -> T {
    let a = v.abs() - t;
    if a > T::zero() {
        a.copysign(v)
    } else {
        T::zero()
    }
}

/// Euclidean projection onto `{x : ‖x‖₁ <= radius}` by sorting magnitudes.
pub fn project_l1_ball<T: Real>(v: &[T], radius: T) -> Vec<T> {
    let l1: T = v.iter().map(|x| x.abs()).sum();
    if l1 <= radius {
        return v.to_vec();
    }
    if radius <= T::zero() {
        return vec![T::zero(); v.len()];
    }
    let mut mags: Vec<T> = v.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumsum = T::zero();
    let mut theta = T::zero();
    for (j, &u) in mags.iter().enumerate() {
        cumsum = cumsum + u;
        let t = (cumsum - radius) / T::lit((j + 1) as f64);
        if u > t {
            theta = t;
        } else {
            break;
        }
    }
    v.iter().map(|&x| soft_threshold(x, theta)).collect()
}

/// `prox_{scale·‖·‖}(v) = argmin_x scale·‖x‖ + ½‖x − v‖₂²`.
pub fn prox_norm<T: Real>(norm: &NormSpec<T>, v: &Point<T>, scale: T) -> Result<Point<T>> {
    if !(scale > T::zero() && scale.is_finite()) {
        return Err(Error::Input(format!("prox scale must be positive, got {scale}")));
    }
    norm.check(v)?;
    Ok(match norm.kind {
        NormKind::L1 => {
            let mut out = v.clone();
            for (i, x) in out.data_mut().iter_mut().enumerate() {
                *x = soft_threshold(*x, scale * norm.weight(i));
            }
            out
        }
        NormKind::L2 => {
            let n = v.norm();
            if n <= scale {
                Point::zeros(v.shape())
            } else {
                v.scale(T::one() - scale / n)
            }
        }
        // Moreau: prox of scale·‖·‖∞ is v minus its projection on the scale-ℓ1 ball
        NormKind::Linf => {
            let p = project_l1_ball(v.data(), scale);
            let mut out = v.clone();
            for (x, pi) in out.data_mut().iter_mut().zip(p) {
                *x = *x - pi;
            }
            out
        }
        NormKind::Nuclear => Point::from_matrix(svt(&v.as_matrix()?, scale)?),
    })
}

/// Euclidean projection onto the dual-norm unit ball `{z : ‖z‖_◊ <= 1}`.
pub fn dual_ball_project<T: Real>(norm: &NormSpec<T>, v: &Point<T>) -> Result<Point<T>> {
    norm.check(v)?;
    Ok(match norm.kind {
        NormKind::L1 => {
            let mut out = v.clone();
            for (i, x) in out.data_mut().iter_mut().enumerate() {
                let w = norm.weight(i);
                *x = x.max(-w).min(w);
            }
            out
        }
        NormKind::L2 => {
            let n = v.norm();
            if n <= T::one() {
                v.clone()
            } else {
                v.scale(T::one() / n)
            }
        }
        NormKind::Linf => Point::new(v.shape(), project_l1_ball(v.data(), T::one()))?,
        NormKind::Nuclear => {
            let d = svd(&v.as_matrix()?)?;
            if d.singular_values.first().is_none_or(|&s| s <= T::one()) {
                v.clone()
            } else {
                Point::from_matrix(d.recompose_with(|s| s.min(T::one())))
            }
        }
    })
}

/// `‖v − prox_{s‖·‖}(v) − s·Π_B(v/s)‖₂`, the defect in the Moreau
/// decomposition of `v` (at `s = 1`: `v = prox(v) + Π_B(v)`).
pub fn moreau_residual<T: Real>(norm: &NormSpec<T>, v: &Point<T>, scale: T) -> Result<T> {
    let p = prox_norm(norm, v, scale)?;
    let z = dual_ball_project(norm, &v.scale(T::one() / scale))?.scale(scale);
    Ok(v.sub(&p).sub(&z).norm())
}

/// Singular value thresholding `U diag(max(s − threshold, 0)) V^T`, the prox
/// of `threshold·‖·‖_*`.
pub fn svt<T: Real>(m: &DenseMatrix<T>, threshold: T) -> Result<DenseMatrix<T>> {
    if !(threshold > T::zero()) {
        return Err(Error::Input("threshold must be positive".into()));
    }
    let d = svd(m)?;
    Ok(d.recompose_with(|s| (s - threshold).max(T::zero())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::Shape;
    use crate::rng::SeededRng;

    fn vecp(v: &[f64]) -> Point<f64> {
        Point::vector(v.to_vec()).unwrap()
    }

    fn catalog() -> Vec<NormSpec<f64>> {
        vec![
            NormSpec::l1(),
            NormSpec::weighted_l1(vec![0.5, 1.0, 2.0, 3.0]).unwrap(),
            NormSpec::l2(),
            NormSpec::linf(),
        ]
    }

    /// Grid minimizer of `f(x) + ½(x − v)²` in one dimension.
    fn grid_prox_1d(f: impl Fn(f64) -> f64, v: f64, step: f64) -> f64 {
        let n = (6.0 / step) as i64;
        (-n..=n)
            .map(|k| v + k as f64 * step)
            .min_by(|a, b| {
                let fa = f(*a) + 0.5 * (a - v).powi(2);
                let fb = f(*b) + 0.5 * (b - v).powi(2);
                fa.partial_cmp(&fb).unwrap()
            })
            .unwrap()
    }

    #[test]
    fn prox_fixes_origin() {
        for n in catalog() {
            let z = Point::zeros(Shape::Vector(4));
            assert_eq!(prox_norm(&n, &z, 1.3).unwrap(), z);
        }
        let z = Point::<f64>::zeros(Shape::Matrix { rows: 2, cols: 3 });
        assert_eq!(prox_norm(&NormSpec::nuclear(), &z, 0.7).unwrap(), z);
    }

    #[test]
    fn l1_prox_example_matches_grid() {
        let v = [3.0, -0.5, 0.0];
        // grid oracle per coordinate at resolution 1e-4
        let oracle: Vec<f64> = v.iter().map(|&vi| grid_prox_1d(f64::abs, vi, 1e-4)).collect();
        assert!((oracle[0] - 2.0).abs() < 2e-4 && oracle[1].abs() < 2e-4 && oracle[2].abs() < 2e-4);
        let p = prox_norm(&NormSpec::l1(), &vecp(&v), 1.0).unwrap();
        assert_eq!(p.data(), &[2.0, 0.0, 0.0]);
    }

    #[test]
    fn soft_threshold_tie_goes_to_zero() {
        assert_eq!(soft_threshold(1.0, 1.0), 0.0);
        assert_eq!(soft_threshold(-1.0, 1.0), 0.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
    }

    #[test]
    fn nuclear_prox_diagonal_example() {
        let v = Point::from_matrix(DenseMatrix::<f64>::from_diag(&[3.0, 0.4]));
        // singular-value soft threshold, grid-checked per singular value
        assert!((grid_prox_1d(f64::abs, 3.0, 1e-4) - 2.0).abs() < 2e-4);
        assert!(grid_prox_1d(f64::abs, 0.4, 1e-4).abs() < 2e-4);
        let p = prox_norm(&NormSpec::nuclear(), &v, 1.0).unwrap();
        let expect = [2.0, 0.0, 0.0, 0.0];
        for (a, b) in p.data().iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn nuclear_needs_matrix_shape() {
        let v = vecp(&[1.0, 2.0]);
        assert!(prox_norm(&NormSpec::nuclear(), &v, 1.0).is_err());
        assert!(dual_ball_project(&NormSpec::nuclear(), &v).is_err());
    }

    #[test]
    fn prox_rejects_bad_scale_and_weight_length() {
        assert!(prox_norm(&NormSpec::l1(), &vecp(&[1.0]), 0.0).is_err());
        assert!(prox_norm(&NormSpec::l1(), &vecp(&[1.0]), -1.0).is_err());
        let w = NormSpec::weighted_l1(vec![1.0, 2.0]).unwrap();
        assert!(prox_norm(&w, &vecp(&[1.0]), 1.0).is_err());
        assert!(NormSpec::weighted_l1(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn l2_prox_is_radial_shrink() {
        let p = prox_norm(&NormSpec::l2(), &vecp(&[3.0, 4.0]), 1.0).unwrap();
        assert!((p.data()[0] - 2.4).abs() < 1e-15 && (p.data()[1] - 3.2).abs() < 1e-15);
        let p = prox_norm(&NormSpec::l2(), &vecp(&[0.3, 0.4]), 1.0).unwrap();
        assert_eq!(p.data(), &[0.0, 0.0]);
    }

    #[test]
    fn linf_prox_known_value() {
        // prox of ‖·‖∞ at (3, 1) with scale 1: remove ℓ1-ball projection (1, 0)
        let p = prox_norm(&NormSpec::linf(), &vecp(&[3.0, 1.0]), 1.0).unwrap();
        assert_eq!(p.data(), &[2.0, 1.0]);
        // (2, 2) -> projection (0.5, 0.5) -> prox (1.5, 1.5)
        let p = prox_norm(&NormSpec::linf(), &vecp(&[2.0, 2.0]), 1.0).unwrap();
        assert_eq!(p.data(), &[1.5, 1.5]);
    }

    #[test]
    fn dual_ball_examples() {
        let inside = vecp(&[0.5, -1.0]);
        assert_eq!(dual_ball_project(&NormSpec::l1(), &inside).unwrap(), inside);
        let p = dual_ball_project(&NormSpec::l1(), &vecp(&[3.0, -0.5])).unwrap();
        assert_eq!(p.data(), &[1.0, -0.5]);

        let v = Point::from_matrix(DenseMatrix::<f64>::from_diag(&[3.0, 0.4]));
        let p = dual_ball_project(&NormSpec::nuclear(), &v).unwrap();
        let expect = [1.0, 0.0, 0.0, 0.4];
        for (a, b) in p.data().iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn dual_ball_clamp_matches_grid_projection() {
        // 2-D grid projection of (3, -0.5) onto the ℓ∞ unit ball
        let v = (3.0, -0.5);
        let step = 1e-3;
        let mut best = (f64::INFINITY, (0.0, 0.0));
        for i in -1000..=1000 {
            for j in -1000..=1000 {
                let (a, b) = (i as f64 * step, j as f64 * step);
                let d = (a - v.0).powi(2) + (b - v.1).powi(2);
                if d < best.0 {
                    best = (d, (a, b));
                }
            }
        }
        assert!((best.1 .0 - 1.0).abs() <= step && (best.1 .1 + 0.5).abs() <= step);
    }

    #[test]
    fn project_l1_ball_lands_on_boundary() {
        let p = project_l1_ball(&[2.0, 2.0], 1.0);
        assert_eq!(p, vec![0.5, 0.5]);
        let p = project_l1_ball(&[0.2, -0.3], 1.0);
        assert_eq!(p, vec![0.2, -0.3]);
        let mut rng = SeededRng::new(4);
        for _ in 0..100 {
            let v: Vec<f64> = rng.normal_vec(7).into_iter().map(|x: f64| 3.0 * x).collect();
            let p = project_l1_ball(&v, 1.0);
            let l1: f64 = p.iter().map(|x| x.abs()).sum();
            assert!(l1 <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn moreau_identity_holds() {
        let mut rng = SeededRng::new(8);
        for n in catalog() {
            for _ in 0..20 {
                let v = Point::vector(rng.normal_vec::<f64>(4).into_iter().map(|x| 2.0 * x).collect()).unwrap();
                assert!(moreau_residual(&n, &v, 1.0).unwrap() <= 1e-12);
                assert!(moreau_residual(&n, &v, 0.3).unwrap() <= 1e-12);
            }
            assert_eq!(moreau_residual(&n, &Point::zeros(Shape::Vector(4)), 1.0).unwrap(), 0.0);
        }
        let m = DenseMatrix::new(4, 3, rng.normal_vec(12)).unwrap();
        let v = Point::from_matrix(m.scaled(2.0));
        assert!(moreau_residual(&NormSpec::nuclear(), &v, 1.0).unwrap() <= 1e-10);
    }

    #[test]
    fn svt_examples() {
        let z = DenseMatrix::<f64>::zeros(3, 2);
        assert_eq!(svt(&z, 1.0).unwrap(), z);

        let d = svt(&DenseMatrix::from_diag(&[3.0, 0.4]), 1.0).unwrap();
        assert!(d.sub(&DenseMatrix::from_diag(&[2.0, 0.0])).max_abs() < 1e-14);

        let u = [0.6, 0.8, 0.0];
        let v = [0.0, 1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt()];
        let uv = DenseMatrix::from_fn(3, 3, |i, j| u[i] * v[j]);
        let s = svt(&uv, 0.5).unwrap();
        assert!(s.sub(&uv.scaled(0.5)).max_abs() < 1e-14);
        // agrees with the nuclear prox path
        let p = prox_norm(&NormSpec::nuclear(), &Point::from_matrix(uv.clone()), 0.5).unwrap();
        assert_eq!(p.as_matrix().unwrap(), s);
    }

    #[test]
    fn norm_and_dual_values() {
        let x = vecp(&[3.0, -4.0]);
        assert_eq!(NormSpec::l1().value(&x).unwrap(), 7.0);
        assert_eq!(NormSpec::l1().dual_value(&x).unwrap(), 4.0);
        assert_eq!(NormSpec::l2().value(&x).unwrap(), 5.0);
        assert_eq!(NormSpec::linf().value(&x).unwrap(), 4.0);
        assert_eq!(NormSpec::linf().dual_value(&x).unwrap(), 7.0);
        let w = NormSpec::weighted_l1(vec![2.0, 0.5]).unwrap();
        assert_eq!(w.value(&x).unwrap(), 8.0);
        assert_eq!(w.dual_value(&x).unwrap(), 8.0);
        let m = Point::from_matrix(DenseMatrix::<f64>::from_diag(&[3.0, -0.4]));
        assert!((NormSpec::nuclear().value(&m).unwrap() - 3.4).abs() < 1e-14);
        assert!((NormSpec::nuclear().dual_value(&m).unwrap() - 3.0).abs() < 1e-14);
    }
}
