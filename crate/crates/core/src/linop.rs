//! Shape-tagged points and the linear measurement operators acting on them.

use std::collections::HashSet;

use crate::error::{shape_mismatch, Error, Result};
use crate::numerics::DenseMatrix;
use crate::rng::SeededRng;
use crate::scalar::{dot, norm2, Real};

/// Layout of a [`Point`]'s flat coordinates.
///
/// Matrices are row-major. A `Pair` holds two `rows x cols` matrices back to
/// back (first block, then second block).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Vector(usize),
    Matrix { rows: usize, cols: usize },
    Pair { rows: usize, cols: usize },
}

impl Shape {
    pub fn len(&self) -> usize {
        match *self {
            Shape::Vector(n) => n,
            Shape::Matrix { rows, cols } => rows * cols,
            Shape::Pair { rows, cols } => 2 * rows * cols,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Flat real coordinates plus a shape tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T> {
    shape: Shape,
    data: Vec<T>,
}

impl<T: Real> Point<T> {
    pub fn new(shape: Shape, data: Vec<T>) -> Result<Self> {
        if data.len() != shape.len() {
            return Err(Error::Input(format!(
                "{shape:?} needs {} coordinates, got {}",
                shape.len(),
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("point coordinates"));
        }
        Ok(Self { shape, data })
    }

    pub(crate) fn from_parts(shape: Shape, data: Vec<T>) -> Self {
        debug_assert_eq!(shape.len(), data.len());
        Self { shape, data }
    }

    pub fn zeros(shape: Shape) -> Self {
        Self {
            shape,
            data: vec![T::zero(); shape.len()],
        }
    }

    pub fn vector(data: Vec<T>) -> Result<Self> {
        Self::new(Shape::Vector(data.len()), data)
    }

    pub fn from_matrix(m: DenseMatrix<T>) -> Self {
        let shape = Shape::Matrix {
            rows: m.rows(),
            cols: m.cols(),
        };
        Self {
            shape,
            data: m.into_data(),
        }
    }

    pub fn pair(first: &DenseMatrix<T>, second: &DenseMatrix<T>) -> Result<Self> {
        if (first.rows(), first.cols()) != (second.rows(), second.cols()) {
            return Err(shape_mismatch(
                (first.rows(), first.cols()),
                (second.rows(), second.cols()),
            ));
        }
        let mut data = first.data().to_vec();
        data.extend_from_slice(second.data());
        Ok(Self {
            shape: Shape::Pair {
                rows: first.rows(),
                cols: first.cols(),
            },
            data,
        })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Views a matrix-shaped point as a [`DenseMatrix`].
    pub fn as_matrix(&self) -> Result<DenseMatrix<T>> {
        match self.shape {
            Shape::Matrix { rows, cols } => DenseMatrix::new(rows, cols, self.data.clone()),
            other => Err(Error::Input(format!("expected a matrix point, got {other:?}"))),
        }
    }

    /// Splits a pair-shaped point into its two blocks.
    pub fn pair_blocks(&self) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
        match self.shape {
            Shape::Pair { rows, cols } => {
                let (a, b) = self.data.split_at(rows * cols);
                Ok((
                    DenseMatrix::new(rows, cols, a.to_vec())?,
                    DenseMatrix::new(rows, cols, b.to_vec())?,
                ))
            }
            other => Err(Error::Input(format!("expected a pair point, got {other:?}"))),
        }
    }

    pub fn dot(&self, other: &Self) -> T {
        assert_eq!(self.shape, other.shape, "dot of mismatched shapes");
        dot(&self.data, &other.data)
    }

    pub fn norm(&self) -> T {
        norm2(&self.data)
    }

    pub fn norm_inf(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn distance(&self, other: &Self) -> T {
        assert_eq!(self.shape, other.shape, "distance of mismatched shapes");
        crate::scalar::dist2(&self.data, &other.data)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            shape: self.shape,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.shape, other.shape, "zip of mismatched shapes");
        Self {
            shape: self.shape,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: T, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + alpha * b)
    }

    pub(crate) fn check_shape(&self, expected: Shape) -> Result<()> {
        if self.shape != expected {
            return Err(shape_mismatch(expected, self.shape));
        }
        Ok(())
    }
}

/// The concrete form of a [`LinearOperator`].
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorVariant<T> {
    /// Matrix acting on the flattened coordinates of `domain`.
    Dense { matrix: DenseMatrix<T>, domain: Shape },
    /// Element selection on a `rows x cols` matrix; the codomain is the
    /// compact vector of sampled values in `indices` order.
    SamplingMask {
        rows: usize,
        cols: usize,
        indices: Vec<(usize, usize)>,
    },
    /// `(L, S) -> L + S` on pairs of `rows x cols` matrices.
    BlockSum { rows: usize, cols: usize },
}

/// A linear map between shape-tagged spaces, with its adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator<T> {
    variant: OperatorVariant<T>,
}

impl<T: Real> LinearOperator<T> {
    /// Dense matrix on plain vectors of length `matrix.cols()`.
    pub fn dense(matrix: DenseMatrix<T>) -> Result<Self> {
        let domain = Shape::Vector(matrix.cols());
        Self::dense_on(matrix, domain)
    }

    /// Dense matrix acting on the flattened coordinates of `domain`, e.g. a
    /// measurement operator on `r x c` matrices.
    pub fn dense_on(matrix: DenseMatrix<T>, domain: Shape) -> Result<Self> {
        if domain.len() != matrix.cols() {
            return Err(shape_mismatch(matrix.cols(), domain));
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite("operator matrix"));
        }
        Ok(Self {
            variant: OperatorVariant::Dense { matrix, domain },
        })
    }

    pub fn sampling_mask(rows: usize, cols: usize, indices: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(indices.len());
        for &(i, j) in &indices {
            if i >= rows || j >= cols {
                return Err(Error::Input(format!("sample index ({i}, {j}) outside {rows}x{cols}")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::Input(format!("duplicate sample index ({i}, {j})")));
            }
        }
        Ok(Self {
            variant: OperatorVariant::SamplingMask { rows, cols, indices },
        })
    }

    pub fn block_sum(rows: usize, cols: usize) -> Self {
        Self {
            variant: OperatorVariant::BlockSum { rows, cols },
        }
    }

    pub fn variant(&self) -> &OperatorVariant<T> {
        &self.variant
    }

    pub fn domain_shape(&self) -> Shape {
        match &self.variant {
            OperatorVariant::Dense { domain, .. } => *domain,
            &OperatorVariant::SamplingMask { rows, cols, .. } => Shape::Matrix { rows, cols },
            &OperatorVariant::BlockSum { rows, cols } => Shape::Pair { rows, cols },
        }
    }

    pub fn codomain_shape(&self) -> Shape {
        match &self.variant {
            OperatorVariant::Dense { matrix, .. } => Shape::Vector(matrix.rows()),
            OperatorVariant::SamplingMask { indices, .. } => Shape::Vector(indices.len()),
            &OperatorVariant::BlockSum { rows, cols } => Shape::Matrix { rows, cols },
        }
    }

    pub fn apply(&self, x: &Point<T>) -> Result<Point<T>> {
        x.check_shape(self.domain_shape())?;
        Ok(Point::from_parts(self.codomain_shape(), self.apply_raw(x.data())))
    }

    pub fn adjoint_apply(&self, y: &Point<T>) -> Result<Point<T>> {
        y.check_shape(self.codomain_shape())?;
        Ok(Point::from_parts(self.domain_shape(), self.adjoint_apply_raw(y.data())))
    }

    pub(crate) fn apply_raw(&self, x: &[T]) -> Vec<T> {
        match &self.variant {
            OperatorVariant::Dense { matrix, .. } => matrix.matvec(x),
            OperatorVariant::SamplingMask { cols, indices, .. } => {
                indices.iter().map(|&(i, j)| x[i * cols + j]).collect()
            }
            OperatorVariant::BlockSum { rows, cols } => {
                let (l, s) = x.split_at(rows * cols);
                l.iter().zip(s).map(|(&a, &b)| a + b).collect()
            }
        }
    }

    pub(crate) fn adjoint_apply_raw(&self, y: &[T]) -> Vec<T> {
        match &self.variant {
            OperatorVariant::Dense { matrix, .. } => matrix.tr_matvec(y),
            OperatorVariant::SamplingMask { rows, cols, indices } => {
                let mut out = vec![T::zero(); rows * cols];
                for (&(i, j), &v) in indices.iter().zip(y) {
                    out[i * cols + j] = v;
                }
                out
            }
            OperatorVariant::BlockSum { .. } => {
                let mut out = y.to_vec();
                out.extend_from_slice(y);
                out
            }
        }
    }

    /// Dense matrix of the operator (codomain length x domain length).
    pub fn to_dense(&self) -> DenseMatrix<T> {
        let n = self.domain_shape().len();
        let m = self.codomain_shape().len();
        let mut out = DenseMatrix::zeros(m, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e[j] = T::one();
            for (i, v) in self.apply_raw(&e).into_iter().enumerate() {
                out.set(i, j, v);
            }
            e[j] = T::zero();
        }
        out
    }

    /// Worst relative violation of `<A x, y> = <x, A* y>` over seeded
    /// Gaussian probes, measured as `|lhs - rhs| / (1 + |lhs|)`.
    pub fn adjoint_consistency_check(&self, trials: usize, seed: u64) -> T {
        let mut rng = SeededRng::new(seed);
        let n = self.domain_shape().len();
        let m = self.codomain_shape().len();
        let mut worst = T::zero();
        for _ in 0..trials.max(1) {
            let x: Vec<T> = rng.normal_vec(n);
            let y: Vec<T> = rng.normal_vec(m);
            let lhs = dot(&self.apply_raw(&x), &y);
            let rhs = dot(&x, &self.adjoint_apply_raw(&y));
            worst = worst.max((lhs - rhs).abs() / (T::one() + lhs.abs()));
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[Vec<f64>]) -> DenseMatrix<f64> {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn dense_identity_round_trips() {
        let op = LinearOperator::dense(DenseMatrix::<f64>::identity(3)).unwrap();
        let x = Point::vector(vec![1.0, -2.0, 3.5]).unwrap();
        assert_eq!(op.apply(&x).unwrap(), x);
        assert_eq!(op.adjoint_apply(&x).unwrap(), x);
    }

    #[test]
    fn sampling_mask_selects_entries() {
        let op = LinearOperator::sampling_mask(2, 2, vec![(1, 1)]).unwrap();
        let x = Point::from_matrix(mat(&[vec![5.0, 2.0], vec![3.0, 4.0]]));
        assert_eq!(op.apply(&x).unwrap().data(), &[4.0]);
        // one-based (1,1) in the worked example is zero-based (0,0)
        let op = LinearOperator::sampling_mask(2, 2, vec![(0, 0)]).unwrap();
        assert_eq!(op.apply(&x).unwrap().data(), &[5.0]);
    }

    #[test]
    fn sampling_mask_adjoint_zero_fills() {
        let op = LinearOperator::sampling_mask(2, 3, vec![(0, 2), (1, 0)]).unwrap();
        let y = Point::vector(vec![7.0, -1.0]).unwrap();
        let back = op.adjoint_apply(&y).unwrap();
        assert_eq!(back.shape(), Shape::Matrix { rows: 2, cols: 3 });
        assert_eq!(back.data(), &[0.0, 0.0, 7.0, -1.0, 0.0, 0.0]);
        // P P* = I on the codomain
        assert_eq!(op.apply(&back).unwrap(), y);
    }

    #[test]
    fn sampling_mask_projection_is_idempotent_and_self_adjoint() {
        let op = LinearOperator::<f64>::sampling_mask(3, 3, vec![(0, 0), (2, 1), (1, 2)]).unwrap();
        let p = op.to_dense().transpose().matmul(&op.to_dense());
        assert_eq!(p.matmul(&p), p);
        assert_eq!(p.transpose(), p);
    }

    #[test]
    fn sampling_mask_rejects_bad_indices() {
        assert!(LinearOperator::<f64>::sampling_mask(2, 2, vec![(2, 0)]).is_err());
        assert!(LinearOperator::<f64>::sampling_mask(2, 2, vec![(0, 1), (0, 1)]).is_err());
    }

    #[test]
    fn block_sum_forward_and_adjoint() {
        let op = LinearOperator::block_sum(2, 2);
        let l = mat(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let pair = Point::pair(&l, &l.scaled(-1.0)).unwrap();
        assert!(op.apply(&pair).unwrap().data().iter().all(|&v| v == 0.0));
        let y = Point::from_matrix(l.clone());
        let back = op.adjoint_apply(&y).unwrap();
        let (a, b) = back.pair_blocks().unwrap();
        assert_eq!(a, l);
        assert_eq!(b, l);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let op = LinearOperator::dense(DenseMatrix::<f64>::identity(3)).unwrap();
        let x = Point::vector(vec![1.0, 2.0]).unwrap();
        assert!(matches!(op.apply(&x), Err(Error::ShapeMismatch { .. })));
        assert!(matches!(op.adjoint_apply(&x), Err(Error::ShapeMismatch { .. })));
        assert!(LinearOperator::dense_on(DenseMatrix::<f64>::identity(3), Shape::Vector(4)).is_err());
    }

    #[test]
    fn dense_on_matrix_domain() {
        let a = mat(&[vec![1.0, 0.0, 0.0, 1.0]]); // trace functional on 2x2
        let op = LinearOperator::dense_on(a, Shape::Matrix { rows: 2, cols: 2 }).unwrap();
        let x = Point::from_matrix(mat(&[vec![3.0, 9.0], vec![9.0, 4.0]]));
        assert_eq!(op.apply(&x).unwrap().data(), &[7.0]);
        let back = op.adjoint_apply(&Point::vector(vec![2.0]).unwrap()).unwrap();
        assert_eq!(back.shape(), Shape::Matrix { rows: 2, cols: 2 });
        assert_eq!(back.data(), &[2.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn adjoint_identity_for_all_variants() {
        let mut rng = SeededRng::new(5);
        let dense = LinearOperator::dense(DenseMatrix::new(6, 9, rng.normal_vec(54)).unwrap()).unwrap();
        let mask = LinearOperator::<f64>::sampling_mask(4, 5, vec![(0, 0), (3, 4), (2, 2), (1, 3)]).unwrap();
        let block = LinearOperator::<f64>::block_sum(3, 4);
        for op in [dense, mask, block] {
            assert!(op.adjoint_consistency_check(20, 17) <= 1e-12);
        }
    }

    #[test]
    fn point_validation() {
        assert!(Point::<f64>::new(Shape::Vector(2), vec![1.0]).is_err());
        assert!(Point::<f64>::vector(vec![f64::NAN]).is_err());
        let p = Point::<f64>::zeros(Shape::Pair { rows: 2, cols: 3 });
        assert_eq!(p.len(), 12);
        assert!(p.as_matrix().is_err());
    }
}
