//! Dual gradient methods for augmented convex recovery models.
//!
//! An augmented model adds a small strongly convex term to a norm or gauge
//! objective,
//!
//! ```text
//! minimize  μ R(x) + (μ / 2τ) ‖x‖²   subject to  A x = b,
//! ```
//!
//! which makes the Lagrange dual differentiable with a Lipschitz gradient.
//! Plain gradient ascent on that dual recovers linearized Bregman for ℓ1,
//! singular value thresholding for the nuclear norm, and a block variant for
//! robust PCA. All numerics are generic over [`Real`] (`f32` or `f64`).

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gauge;
pub mod linop;
pub mod models;
pub mod numerics;
pub mod oracle;
pub mod polytope;
pub mod prox;
pub mod rng;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use gauge::{GaugeSpec, PolarPolytope};
pub use linop::{LinearOperator, OperatorVariant, Point, Shape};
pub use models::{build_problem, tau_heuristic, ModelKind, ModelSpec};
pub use numerics::{DenseMatrix, NormEstimate, Svd};
pub use prox::{NormKind, NormSpec};
pub use rng::SeededRng;
pub use scalar::Real;
pub use solver::{
    solve, solve_accelerated, BlockRegularizer, DualState, IterationRecord, ProblemSpec, Regularizer, Solution,
    SolveConfig, SolveTrace, Termination,
};

pub type DenseMatrixF64 = DenseMatrix<f64>;
pub type DenseMatrixF32 = DenseMatrix<f32>;
pub type PointF64 = Point<f64>;
pub type PointF32 = Point<f32>;
pub type LinearOperatorF64 = LinearOperator<f64>;
pub type LinearOperatorF32 = LinearOperator<f32>;
pub type ProblemSpecF64 = ProblemSpec<f64>;
pub type ProblemSpecF32 = ProblemSpec<f32>;
pub type ModelSpecF64 = ModelSpec<f64>;
pub type ModelSpecF32 = ModelSpec<f32>;
pub type SolveConfigF64 = SolveConfig<f64>;
pub type SolutionF64 = Solution<f64>;
