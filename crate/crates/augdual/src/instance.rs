//! Synthetic exact-data instances and their on-disk layout.
//!
//! An instance directory holds `instance.json` (the generating spec plus the
//! payload file names) and headerless CSV payloads, one matrix row or one
//! vector entry per line, values written with 17 significant digits:
//!
//! | model               | problem data                     | ground truth         |
//! |---------------------|----------------------------------|----------------------|
//! | `aug_l1`            | `a.csv` (m×n), `b.csv` (m)       | `x0.csv` (n)         |
//! | `matrix_completion` | `omega.csv` (`row,col,value`)    | `m.csv` (rows×cols)  |
//! | `rpca`              | `d.csv` (rows×cols)              | `l0.csv`, `s0.csv`   |

use std::fs;
use std::path::{Path, PathBuf};

use augdual_core::{DenseMatrix, ModelSpec, Point, SeededRng};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::files::{read_matrix, read_triplets, read_vector, write_matrix, write_triplets, write_vector};

/// Parameters of a synthetic instance. The seed fully determines the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSpec {
    /// Gaussian `A` (m×n, entries N(0,1)/√m), k-sparse `x⁰`, `b = A x⁰`.
    AugL1 { n: usize, m: usize, k: usize, seed: u64 },
    /// Rank-r `M = U Vᵀ` with Gaussian factors, `⌊p·rows·cols⌉` samples.
    MatrixCompletion {
        rows: usize,
        cols: usize,
        rank: usize,
        p: f64,
        seed: u64,
    },
    /// `D = L⁰ + S⁰`, rank-r `L⁰`, `k` nonzeros in `S⁰`. `lambda` defaults
    /// to `1/√max(rows, cols)`.
    Rpca {
        rows: usize,
        cols: usize,
        rank: usize,
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
        seed: u64,
    },
}

impl InstanceSpec {
    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        match *self {
            InstanceSpec::AugL1 { n, m, k, .. } => {
                if n == 0 || m == 0 {
                    return bad("aug_l1 needs n >= 1 and m >= 1".into());
                }
                if k > n {
                    return bad(format!("sparsity k = {k} exceeds n = {n}"));
                }
            }
            InstanceSpec::MatrixCompletion {
                rows, cols, rank, p, ..
            } => {
                if rows == 0 || cols == 0 {
                    return bad("matrix dimensions must be positive".into());
                }
                if rank > rows.min(cols) {
                    return bad(format!("rank {rank} exceeds min(rows, cols) = {}", rows.min(cols)));
                }
                if !(p > 0.0 && p <= 1.0) {
                    return bad(format!("sample ratio p = {p} outside (0, 1]"));
                }
            }
            InstanceSpec::Rpca {
                rows,
                cols,
                rank,
                k,
                lambda,
                ..
            } => {
                if rows == 0 || cols == 0 {
                    return bad("matrix dimensions must be positive".into());
                }
                if rank > rows.min(cols) {
                    return bad(format!("rank {rank} exceeds min(rows, cols) = {}", rows.min(cols)));
                }
                if k > rows * cols {
                    return bad(format!("{k} sparse entries do not fit a {rows}x{cols} matrix"));
                }
                if let Some(l) = lambda {
                    if !(l > 0.0 && l.is_finite()) {
                        return bad(format!("lambda = {l} must be positive"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn model_name(&self) -> &'static str {
        match self {
            InstanceSpec::AugL1 { .. } => "aug_l1",
            InstanceSpec::MatrixCompletion { .. } => "matrix_completion",
            InstanceSpec::Rpca { .. } => "rpca",
        }
    }
}

/// A model instance (with placeholder `τ = μ = 1`) and its planted solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub spec: InstanceSpec,
    pub model: ModelSpec<f64>,
    pub truth: Point<f64>,
}

impl Instance {
    /// Magnitude fed to the τ heuristic: `‖x⁰‖∞` for `aug_l1`, unused by
    /// the other models.
    pub fn truth_magnitude(&self) -> Option<f64> {
        match self.spec {
            InstanceSpec::AugL1 { .. } => Some(self.truth.norm_inf()),
            _ => None,
        }
    }
}

/// Random sign times a magnitude uniform on `(1/2, 1]`.
fn signed_unit(rng: &mut SeededRng) -> f64 {
    let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
    sign * (1.0 - 0.5 * rng.uniform())
}

fn low_rank(rng: &mut SeededRng, rows: usize, cols: usize, rank: usize) -> DenseMatrix<f64> {
    let u = DenseMatrix::from_fn(rows, rank, |_, _| rng.normal());
    let v = DenseMatrix::from_fn(rank, cols, |_, _| rng.normal());
    if rank == 0 {
        DenseMatrix::zeros(rows, cols)
    } else {
        u.matmul(&v)
    }
}

pub fn generate_instance(spec: &InstanceSpec) -> CliResult<Instance> {
    spec.validate()?;
    let (model, truth) = match *spec {
        InstanceSpec::AugL1 { n, m, k, seed } => {
            let mut rng = SeededRng::new(seed);
            let scale = 1.0 / (m as f64).sqrt();
            let a = DenseMatrix::from_fn(m, n, |_, _| rng.normal() * scale);
            let mut x0 = vec![0.0; n];
            for i in rng.sample_without_replacement(n, k) {
                x0[i] = signed_unit(&mut rng);
            }
            let b = a.matvec(&x0);
            let model = ModelSpec::AugL1 {
                a,
                b,
                tau: 1.0,
                mu: 1.0,
            };
            (model, Point::vector(x0)?)
        }
        InstanceSpec::MatrixCompletion {
            rows,
            cols,
            rank,
            p,
            seed,
        } => {
            let mut rng = SeededRng::new(seed);
            let m = low_rank(&mut rng, rows, cols, rank);
            let total = rows * cols;
            let count = ((p * total as f64).round() as usize).clamp(1, total);
            let mut flat = rng.sample_without_replacement(total, count);
            flat.sort_unstable();
            let omega: Vec<(usize, usize)> = flat.iter().map(|&f| (f / cols, f % cols)).collect();
            let values = omega.iter().map(|&(i, j)| m.get(i, j)).collect();
            let model = ModelSpec::MatrixCompletion {
                rows,
                cols,
                omega,
                values,
                tau: 1.0,
            };
            (model, Point::from_matrix(m))
        }
        InstanceSpec::Rpca {
            rows,
            cols,
            rank,
            k,
            lambda,
            seed,
        } => {
            let mut rng = SeededRng::new(seed);
            let l0 = low_rank(&mut rng, rows, cols, rank);
            let mut s0 = DenseMatrix::zeros(rows, cols);
            for f in rng.sample_without_replacement(rows * cols, k) {
                s0.set(f / cols, f % cols, signed_unit(&mut rng));
            }
            let d = DenseMatrix::from_fn(rows, cols, |i, j| l0.get(i, j) + s0.get(i, j));
            let lambda = lambda.unwrap_or(1.0 / (rows.max(cols) as f64).sqrt());
            let model = ModelSpec::Rpca { d, lambda, tau: 1.0 };
            (model, Point::pair(&l0, &s0)?)
        }
    };
    Ok(Instance {
        spec: spec.clone(),
        model,
        truth,
    })
}

pub const INSTANCE_FORMAT: &str = "augdual-instance";
pub const INSTANCE_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceMeta {
    format: String,
    version: u32,
    spec: InstanceSpec,
}

/// Writes `instance.json` and the CSV payloads into `dir` (created if
/// missing).
pub fn save_instance(inst: &Instance, dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let meta = InstanceMeta {
        format: INSTANCE_FORMAT.into(),
        version: INSTANCE_VERSION,
        spec: inst.spec.clone(),
    };
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    let meta_path = dir.join("instance.json");
    fs::write(&meta_path, json + "\n").map_err(|e| CliError::io(&meta_path, e))?;

    match &inst.model {
        ModelSpec::AugL1 { a, b, .. } => {
            write_matrix(&dir.join("a.csv"), a)?;
            write_vector(&dir.join("b.csv"), b)?;
            write_vector(&dir.join("x0.csv"), inst.truth.data())?;
        }
        ModelSpec::MatrixCompletion { omega, values, .. } => {
            write_triplets(&dir.join("omega.csv"), omega, values)?;
            write_matrix(&dir.join("m.csv"), &inst.truth.as_matrix()?)?;
        }
        ModelSpec::Rpca { d, .. } => {
            write_matrix(&dir.join("d.csv"), d)?;
            let (l0, s0) = inst.truth.pair_blocks()?;
            write_matrix(&dir.join("l0.csv"), &l0)?;
            write_matrix(&dir.join("s0.csv"), &s0)?;
        }
        other => {
            return Err(CliError::Config(format!(
                "no file layout for model {}",
                other.kind().as_str()
            )))
        }
    }
    Ok(())
}

/// Accepts either the instance directory or its `instance.json`.
pub fn instance_dir(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.to_path_buf()
    } else {
        path.parent().map(Path::to_path_buf).unwrap_or_default()
    }
}

pub fn load_instance(path: &Path) -> CliResult<Instance> {
    let dir = instance_dir(path);
    let meta_path = dir.join("instance.json");
    let text = fs::read_to_string(&meta_path).map_err(|e| CliError::io(&meta_path, e))?;
    let meta: InstanceMeta = crate::config::parse_json(&text, &meta_path)?;
    if meta.format != INSTANCE_FORMAT || meta.version != INSTANCE_VERSION {
        return Err(CliError::format(
            &meta_path,
            format!(
                "expected format {INSTANCE_FORMAT:?} version {INSTANCE_VERSION}, found {:?} version {}",
                meta.format, meta.version
            ),
        ));
    }
    meta.spec.validate()?;
    let spec = meta.spec;
    let (model, truth) = match spec {
        InstanceSpec::AugL1 { n, m, .. } => {
            let a = read_matrix(&dir.join("a.csv"), Some((m, n)))?;
            let b = read_vector(&dir.join("b.csv"), Some(m))?;
            let x0 = read_vector(&dir.join("x0.csv"), Some(n))?;
            (
                ModelSpec::AugL1 {
                    a,
                    b,
                    tau: 1.0,
                    mu: 1.0,
                },
                Point::vector(x0)?,
            )
        }
        InstanceSpec::MatrixCompletion { rows, cols, .. } => {
            let (omega, values) = read_triplets(&dir.join("omega.csv"), rows, cols)?;
            let m = read_matrix(&dir.join("m.csv"), Some((rows, cols)))?;
            let model = ModelSpec::MatrixCompletion {
                rows,
                cols,
                omega,
                values,
                tau: 1.0,
            };
            (model, Point::from_matrix(m))
        }
        InstanceSpec::Rpca { rows, cols, lambda, .. } => {
            let d = read_matrix(&dir.join("d.csv"), Some((rows, cols)))?;
            let l0 = read_matrix(&dir.join("l0.csv"), Some((rows, cols)))?;
            let s0 = read_matrix(&dir.join("s0.csv"), Some((rows, cols)))?;
            let lambda = lambda.unwrap_or(1.0 / (rows.max(cols) as f64).sqrt());
            (ModelSpec::Rpca { d, lambda, tau: 1.0 }, Point::pair(&l0, &s0)?)
        }
    };
    Ok(Instance { spec, model, truth })
}
