//! Dense linear-algebra kernels: row-major matrices, one-sided Jacobi SVD,
//! a small pivoted linear solve and power-iteration norm estimation.

use crate::error::{Error, Result};
use crate::linop::LinearOperator;
use crate::rng::SeededRng;
use crate::scalar::{dot, norm2, Real};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Input(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Input("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    /// Square diagonal matrix.
    pub fn from_diag(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// `self * x`.
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `self^T * y`.
    pub fn tr_matvec(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a * yi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> T {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    /// Spectral norm via the SVD.
    pub fn spectral_norm(&self) -> Result<T> {
        Ok(svd(self)?.singular_values.first().copied().unwrap_or_else(T::zero))
    }
}

/// Thin singular value decomposition `M = U diag(s) V^T`.
///
/// For an `m x n` input with `k = min(m, n)`: `u` is `m x k`, `v` is `n x k`,
/// both with orthonormal columns; `singular_values` is nonincreasing.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: DenseMatrix<T>,
    pub singular_values: Vec<T>,
    pub v: DenseMatrix<T>,
}

impl<T: Real> Svd<T> {
    /// `U diag(f(s)) V^T`.
    pub fn recompose_with(&self, f: impl Fn(T) -> T) -> DenseMatrix<T> {
        let m = self.u.rows();
        let n = self.v.rows();
        let mut out = DenseMatrix::zeros(m, n);
        for (k, &s) in self.singular_values.iter().enumerate() {
            let w = f(s);
            if w == T::zero() {
                continue;
            }
            for i in 0..m {
                let ui = self.u.get(i, k) * w;
                if ui == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + ui * self.v.get(j, k);
                }
            }
        }
        out
    }

    pub fn recompose(&self) -> DenseMatrix<T> {
        self.recompose_with(|s| s)
    }

    /// Number of nonzero (post-clamp) singular values.
    pub fn rank(&self) -> usize {
        self.singular_values.iter().filter(|&&s| s > T::zero()).count()
    }
}

/// Relative threshold below which singular values are clamped to zero.
pub const SINGULAR_VALUE_CLAMP: f64 = 1e-12;

const MAX_JACOBI_SWEEPS: usize = 100;

/// One-sided (Hestenes) Jacobi SVD. Deterministic for a fixed input.
pub fn svd<T: Real>(m: &DenseMatrix<T>) -> Result<Svd<T>> {
    if !m.is_finite() {
        return Err(Error::NonFinite("svd input"));
    }
    if m.rows() < m.cols() {
        let t = svd(&m.transpose())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    let (rows, n) = (m.rows(), m.cols());
    let mut a: Vec<Vec<T>> = (0..n).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let eps = T::epsilon();

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&a[p], &a[p]);
                let beta = dot(&a[q], &a[q]);
                let gamma = dot(&a[p], &a[q]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + T::one().hypot(zeta));
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<T> = a.iter().map(|col| norm2(col)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));
    let smax = order.first().map_or(T::zero(), |&i| norms[i]);
    let cutoff = smax * T::lit(SINGULAR_VALUE_CLAMP);

    let mut singular_values = Vec::with_capacity(n);
    let mut u_cols: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut v_cols: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        let s = norms[j];
        if s > cutoff && s > T::zero() {
            singular_values.push(s);
            u_cols.push(a[j].iter().map(|&x| x / s).collect());
        } else {
            singular_values.push(T::zero());
            u_cols.push(vec![T::zero(); rows]);
            deficient.push(slot);
        }
        v_cols.push(v[j].clone());
    }
    complete_orthonormal(&mut u_cols, &deficient);

    let u = DenseMatrix::from_fn(rows, n, |i, k| u_cols[k][i]);
    let v = DenseMatrix::from_fn(n, n, |i, k| v_cols[k][i]);
    Ok(Svd { u, singular_values, v })
}

fn rotate<T: Real>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Fills the columns listed in `slots` with unit vectors orthogonal to every
/// other column, using coordinate axes as seeds.
fn complete_orthonormal<T: Real>(cols: &mut [Vec<T>], slots: &[usize]) {
    if slots.is_empty() {
        return;
    }
    let dim = cols[0].len();
    let mut filled: Vec<bool> = (0..cols.len()).map(|k| !slots.contains(&k)).collect();
    for &slot in slots {
        let mut best: Option<(T, Vec<T>)> = None;
        for axis in 0..dim {
            let mut w = vec![T::zero(); dim];
            w[axis] = T::one();
            // two passes of classical Gram-Schmidt
            for _ in 0..2 {
                for (k, c) in cols.iter().enumerate() {
                    if !filled[k] {
                        continue;
                    }
                    let proj = dot(&w, c);
                    for (wi, &ci) in w.iter_mut().zip(c) {
                        *wi = *wi - proj * ci;
                    }
                }
            }
            let nw = norm2(&w);
            if best.as_ref().is_none_or(|(b, _)| nw > *b) {
                best = Some((nw, w));
            }
        }
        let (nw, w) = best.expect("dimension >= 1");
        cols[slot] = w.into_iter().map(|x| x / nw).collect();
        filled[slot] = true;
    }
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot falls below `eps * max|a|`.
pub fn solve_linear<T: Real>(a: &DenseMatrix<T>, b: &[T]) -> Option<Vec<T>> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    assert_eq!(b.len(), n);
    let mut m = a.data().to_vec();
    let mut rhs = b.to_vec();
    let scale = a.max_abs();
    let tiny = scale * T::epsilon() * T::lit(n as f64);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                m[i * n + col]
                    .abs()
                    .partial_cmp(&m[j * n + col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        if m[piv * n + col].abs() <= tiny {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(piv * n + k, col * n + k);
            }
            rhs.swap(piv, col);
        }
        let d = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / d;
            if f == T::zero() {
                continue;
            }
            for k in col..n {
                m[r * n + k] = m[r * n + k] - f * m[col * n + k];
            }
            rhs[r] = rhs[r] - f * rhs[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let mut s = rhs[r];
        for k in r + 1..n {
            s = s - m[r * n + k] * x[k];
        }
        x[r] = s / m[r * n + r];
    }
    Some(x)
}

/// Moore-Penrose pseudo-inverse from the SVD (clamped singular values are
/// treated as zero).
pub fn pseudo_inverse<T: Real>(m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let d = svd(m)?;
    // pinv = V diag(1/s) U^T
    let inv = Svd {
        u: d.v,
        singular_values: d.singular_values,
        v: d.u,
    };
    Ok(inv.recompose_with(|s| if s > T::zero() { T::one() / s } else { T::zero() }))
}

/// Outcome of [`operator_norm_estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate<T> {
    /// Estimate of the largest singular value; never exceeds the true norm
    /// beyond rounding.
    pub value: T,
    pub converged: bool,
    pub iterations: usize,
}

/// Largest singular value of `op` by power iteration on `A*A` from a seeded
/// Gaussian start. Convergence: relative change of the Rayleigh quotient
/// `|rho_k - rho_{k-1}| <= tol * rho_k`.
pub fn operator_norm_estimate<T: Real>(
    op: &LinearOperator<T>,
    tol: T,
    max_iter: usize,
    seed: u64,
) -> Result<NormEstimate<T>> {
    if !(tol > T::zero()) {
        return Err(Error::Input("tol must be positive".into()));
    }
    let dom = op.domain_shape();
    let mut rng = SeededRng::new(seed);
    let mut v: Vec<T> = rng.normal_vec(dom.len());
    let nv = norm2(&v);
    if nv == T::zero() {
        return Ok(NormEstimate {
            value: T::zero(),
            converged: true,
            iterations: 0,
        });
    }
    v.iter_mut().for_each(|x| *x = *x / nv);

    let mut rho_prev = T::zero();
    let mut rho = T::zero();
    for it in 1..=max_iter.max(1) {
        let w = op.apply_raw(&v);
        rho = dot(&w, &w);
        let u = op.adjoint_apply_raw(&w);
        let nu = norm2(&u);
        if rho == T::zero() || nu == T::zero() {
            return Ok(NormEstimate {
                value: T::zero(),
                converged: true,
                iterations: it,
            });
        }
        if it > 1 && (rho - rho_prev).abs() <= tol * rho {
            return Ok(NormEstimate {
                value: rho.sqrt(),
                converged: true,
                iterations: it,
            });
        }
        rho_prev = rho;
        v = u.into_iter().map(|x| x / nu).collect();
    }
    Ok(NormEstimate {
        value: rho.sqrt(),
        converged: false,
        iterations: max_iter.max(1),
    })
}
