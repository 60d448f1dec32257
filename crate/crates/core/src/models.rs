//! Builders for the concrete augmented models and their τ-selection rules.

use crate::error::{Error, Result};
use crate::gauge::GaugeSpec;
use crate::linop::{LinearOperator, Point, Shape};
use crate::numerics::DenseMatrix;
use crate::prox::NormSpec;
use crate::scalar::{norm2, Real};
use crate::solver::{BlockRegularizer, ProblemSpec, Regularizer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    AugL1,
    AugNuclear,
    MatrixCompletion,
    Rpca,
    GaugeModel,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::AugL1 => "aug_l1",
            ModelKind::AugNuclear => "aug_nuclear",
            ModelKind::MatrixCompletion => "matrix_completion",
            ModelKind::Rpca => "rpca",
            ModelKind::GaugeModel => "gauge",
        }
    }
}

/// One model instance. `MatrixCompletion`, `Rpca` and `GaugeModel` always
/// use `μ = τ`.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec<T> {
    /// `min ‖x‖₁ + ‖x‖²/(2τ)  s.t.  A x = b`
    AugL1 {
        a: DenseMatrix<T>,
        b: Vec<T>,
        tau: T,
        mu: T,
    },
    /// `min ‖X‖_* + ‖X‖_F²/(2τ)  s.t.  A(X) = b`; `op` acts on matrices.
    AugNuclear {
        op: LinearOperator<T>,
        b: Vec<T>,
        tau: T,
        mu: T,
    },
    /// `min ‖X‖_* + ‖X‖_F²/(2τ)  s.t.  X_ij = M_ij, (i, j) ∈ Ω`
    MatrixCompletion {
        rows: usize,
        cols: usize,
        omega: Vec<(usize, usize)>,
        values: Vec<T>,
        tau: T,
    },
    /// `min ‖L‖_* + λ‖S‖₁ + (‖L‖_F² + ‖S‖_F²)/(2τ)  s.t.  L + S = D`
    Rpca { d: DenseMatrix<T>, lambda: T, tau: T },
    /// `min γ_C(x) + ‖x‖²/(2τ)  s.t.  A x = b`
    GaugeModel {
        gauge: GaugeSpec<T>,
        op: LinearOperator<T>,
        b: Vec<T>,
        tau: T,
    },
}

impl<T: Real> ModelSpec<T> {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::AugL1 { .. } => ModelKind::AugL1,
            ModelSpec::AugNuclear { .. } => ModelKind::AugNuclear,
            ModelSpec::MatrixCompletion { .. } => ModelKind::MatrixCompletion,
            ModelSpec::Rpca { .. } => ModelKind::Rpca,
            ModelSpec::GaugeModel { .. } => ModelKind::GaugeModel,
        }
    }

    pub fn tau(&self) -> T {
        match self {
            ModelSpec::AugL1 { tau, .. }
            | ModelSpec::AugNuclear { tau, .. }
            | ModelSpec::MatrixCompletion { tau, .. }
            | ModelSpec::Rpca { tau, .. }
            | ModelSpec::GaugeModel { tau, .. } => *tau,
        }
    }

    pub fn mu(&self) -> T {
        match self {
            ModelSpec::AugL1 { mu, .. } | ModelSpec::AugNuclear { mu, .. } => *mu,
            other => other.tau(),
        }
    }

    /// Replaces τ. For the models tied to `μ = τ` this moves μ along.
    pub fn with_tau(mut self, new_tau: T) -> Self {
        match &mut self {
            ModelSpec::AugL1 { tau, .. }
            | ModelSpec::AugNuclear { tau, .. }
            | ModelSpec::MatrixCompletion { tau, .. }
            | ModelSpec::Rpca { tau, .. }
            | ModelSpec::GaugeModel { tau, .. } => *tau = new_tau,
        }
        self
    }

    /// Replaces μ where the model carries an independent μ.
    pub fn with_mu(mut self, new_mu: T) -> Result<Self> {
        match &mut self {
            ModelSpec::AugL1 { mu, .. } | ModelSpec::AugNuclear { mu, .. } => {
                *mu = new_mu;
                Ok(self)
            }
            other => Err(Error::Unsupported(format!("{} uses mu = tau", other.kind().as_str()))),
        }
    }

    /// `|Ω| / (rows·cols)` for matrix completion.
    pub fn sample_ratio(&self) -> Option<T> {
        match self {
            ModelSpec::MatrixCompletion { rows, cols, omega, .. } => {
                Some(T::lit(omega.len() as f64) / T::lit((rows * cols) as f64))
            }
            _ => None,
        }
    }
}

/// Maps a model onto the generic augmented problem.
pub fn build_problem<T: Real>(m: &ModelSpec<T>) -> Result<ProblemSpec<T>> {
    match m {
        ModelSpec::AugL1 { a, b, tau, mu } => {
            let op = LinearOperator::dense(a.clone())?;
            ProblemSpec::new(
                op,
                Point::vector(b.clone())?,
                Regularizer::Norm(NormSpec::l1()),
                *tau,
                *mu,
            )
        }
        ModelSpec::AugNuclear { op, b, tau, mu } => {
            if !matches!(op.domain_shape(), Shape::Matrix { .. }) {
                return Err(Error::Input("nuclear-norm model needs an operator on matrices".into()));
            }
            ProblemSpec::new(
                op.clone(),
                Point::vector(b.clone())?,
                Regularizer::Norm(NormSpec::nuclear()),
                *tau,
                *mu,
            )
        }
        ModelSpec::MatrixCompletion {
            rows,
            cols,
            omega,
            values,
            tau,
        } => {
            if omega.is_empty() {
                return Err(Error::Input("sample set must be nonempty".into()));
            }
            if omega.len() != values.len() {
                return Err(Error::Input(format!(
                    "{} sample indices but {} values",
                    omega.len(),
                    values.len()
                )));
            }
            let op = LinearOperator::sampling_mask(*rows, *cols, omega.clone())?;
            ProblemSpec::new(
                op,
                Point::vector(values.clone())?,
                Regularizer::Norm(NormSpec::nuclear()),
                *tau,
                *tau,
            )
        }
        ModelSpec::Rpca { d, lambda, tau } => {
            let op = LinearOperator::block_sum(d.rows(), d.cols());
            let reg = Regularizer::Block(BlockRegularizer::new(*lambda)?);
            ProblemSpec::new(op, Point::from_matrix(d.clone()), reg, *tau, *tau)
        }
        ModelSpec::GaugeModel { gauge, op, b, tau } => ProblemSpec::new(
            op.clone(),
            Point::vector(b.clone())?,
            Regularizer::Gauge(gauge.clone()),
            *tau,
            *tau,
        ),
    }
}

/// Lower bound on τ quoted for exact recovery, used as a heuristic:
///
/// - `AugL1`: `10‖x⁰‖∞`
/// - `AugNuclear`: `10‖X⁰‖₂` (spectral norm)
/// - `MatrixCompletion`: `(4/p)‖P_Ω(M)‖_F`, `p` the sample ratio
/// - `Rpca`: `8√15‖D‖_F / (3λ)`
///
/// The first two need the ground-truth magnitude, passed as `magnitude`.
/// Synthetic instances know it; for real data a surrogate can be passed,
/// but then the bound carries no recovery guarantee.
pub fn tau_heuristic<T: Real>(m: &ModelSpec<T>, magnitude: Option<T>) -> Result<T> {
    let need =
        |what: &str| magnitude.ok_or_else(|| Error::Input(format!("tau heuristic needs {what} of the ground truth")));
    match m {
        ModelSpec::AugL1 { .. } => Ok(T::lit(10.0) * need("the max-abs entry")?),
        ModelSpec::AugNuclear { .. } => Ok(T::lit(10.0) * need("the spectral norm")?),
        ModelSpec::MatrixCompletion { values, .. } => {
            let p = m.sample_ratio().expect("matrix completion");
            Ok(T::lit(4.0) / p * norm2(values))
        }
        ModelSpec::Rpca { d, lambda, .. } => {
            Ok(T::lit(8.0 * 15f64.sqrt()) * d.frobenius_norm() / (T::lit(3.0) * *lambda))
        }
        ModelSpec::GaugeModel { .. } => Err(Error::Unsupported(
            "no tau bound is known for general gauge models".into(),
        )),
    }
}
