//! Gauges `γ_C`, their polars, and the gauge prox obtained from projection
//! onto the polar set `C°` through `v = prox_{γ_C}(v) + Π_{C°}(v)`.
//!
//! Only `C°` is ever stored: the solver touches `C` solely through the
//! support function of `C°` (which is `γ_C`) and the projection onto `C°`.

use crate::error::{Error, Result};
use crate::linop::Point;
use crate::polytope::project_onto_hull;
use crate::prox::{dual_ball_project, NormSpec};
use crate::scalar::{dot, norm2, Real};

pub const DEFAULT_PROJECTION_TOL: f64 = 1e-10;
pub const MAX_PROJECTION_ITERS: usize = 10_000;

/// `C° = conv(V ∪ {0})` given by its vertex list `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarPolytope<T> {
    dim: usize,
    vertices: Vec<Vec<T>>,
}

impl<T: Real> PolarPolytope<T> {
    pub fn new(vertices: Vec<Vec<T>>) -> Result<Self> {
        let dim = vertices
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Input("polar polytope needs at least one vertex".into()))?;
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::Input("polar vertices have differing dimensions".into()));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("polar vertices"));
        }
        Ok(Self { dim, vertices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<T>] {
        &self.vertices
    }

    /// Generators of `scale·C°` with the origin adjoined.
    fn generators(&self, scale: T) -> Vec<Vec<T>> {
        let mut g: Vec<Vec<T>> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|&x| x * scale).collect())
            .collect();
        g.push(vec![T::zero(); self.dim]);
        g
    }

    fn project(&self, v: &[T], scale: T, tol: T) -> Result<Vec<T>> {
        Ok(project_onto_hull(&self.generators(scale), v, tol, MAX_PROJECTION_ITERS)?.point)
    }

    fn support(&self, x: &[T]) -> T {
        self.vertices.iter().map(|v| dot(v, x)).fold(T::zero(), T::max)
    }
}

/// A gauge `γ_C`, described through its polar set `C°`.
#[derive(Debug, Clone, PartialEq)]
pub enum GaugeSpec<T> {
    /// A catalog norm; `C°` is its dual-norm unit ball.
    NormGauge(NormSpec<T>),
    /// `Σ w_i |x_i|` with `w_i > 0`; `C°` is the box `|z_i| <= w_i`.
    DiagWeighted(Vec<T>),
    PolyhedralPolar(PolarPolytope<T>),
}

impl<T: Real> GaugeSpec<T> {
    pub fn norm(n: NormSpec<T>) -> Self {
        GaugeSpec::NormGauge(n)
    }

    pub fn diag_weighted(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|&w| !(w > T::zero() && w.is_finite())) {
            return Err(Error::Input("diagonal gauge weights must be positive".into()));
        }
        Ok(GaugeSpec::DiagWeighted(weights))
    }

    pub fn polyhedral(vertices: Vec<Vec<T>>) -> Result<Self> {
        Ok(GaugeSpec::PolyhedralPolar(PolarPolytope::new(vertices)?))
    }

    fn check(&self, x: &Point<T>) -> Result<()> {
        let expected = match self {
            GaugeSpec::NormGauge(_) => return Ok(()),
            GaugeSpec::DiagWeighted(w) => w.len(),
            GaugeSpec::PolyhedralPolar(p) => p.dim,
        };
        if x.len() != expected {
            return Err(Error::ShapeMismatch {
                expected: format!("{expected} coordinates"),
                found: format!("{}", x.len()),
            });
        }
        Ok(())
    }
}

/// `γ_C(x)`, computed as the support function of `C°`.
pub fn gauge_eval<T: Real>(g: &GaugeSpec<T>, x: &Point<T>) -> Result<T> {
    g.check(x)?;
    match g {
        GaugeSpec::NormGauge(n) => n.value(x),
        GaugeSpec::DiagWeighted(w) => Ok(w.iter().zip(x.data()).map(|(&wi, &xi)| wi * xi.abs()).sum()),
        GaugeSpec::PolyhedralPolar(p) => Ok(p.support(x.data())),
    }
}

/// `γ°_C(u) = γ_{C°}(u)`. May be `+inf` when `C°` is lower-dimensional and
/// `u` lies outside the cone it generates.
///
/// For polyhedral `C°` the value is found by doubling then bisecting on `λ`
/// with the membership test `dist(u, λC°) <= δ‖u‖`, `δ = 1e4·eps`. The
/// doubling stage gives up after 64 steps past `‖u‖ / max‖v‖`.
pub fn polar_gauge_eval<T: Real>(g: &GaugeSpec<T>, u: &Point<T>) -> Result<T> {
    g.check(u)?;
    match g {
        GaugeSpec::NormGauge(n) => n.dual_value(u),
        GaugeSpec::DiagWeighted(w) => Ok(w
            .iter()
            .zip(u.data())
            .fold(T::zero(), |m, (&wi, &ui)| m.max(ui.abs() / wi))),
        GaugeSpec::PolyhedralPolar(p) => polyhedral_polar_gauge(p, u.data()),
    }
}

fn polyhedral_polar_gauge<T: Real>(p: &PolarPolytope<T>, u: &[T]) -> Result<T> {
    let nu = norm2(u);
    if nu == T::zero() {
        return Ok(T::zero());
    }
    let rmax = p.vertices.iter().map(|v| norm2(v)).fold(T::zero(), T::max);
    if rmax == T::zero() {
        return Ok(T::infinity());
    }
    let slack = T::epsilon() * T::lit(1e4) * nu;
    let tol = T::lit(DEFAULT_PROJECTION_TOL);
    // dist(u, λC°) = λ·dist(u/λ, C°); projecting at unit scale stays well
    // conditioned when λ is large
    let member = |lambda: T| -> Result<bool> {
        let w: Vec<T> = u.iter().map(|&x| x / lambda).collect();
        let z = p.project(&w, T::one(), tol)?;
        Ok(crate::scalar::dist2(&w, &z) * lambda <= slack)
    };

    // no point of λC° is longer than λ·rmax
    let mut lo = nu / rmax;
    if member(lo)? {
        return Ok(lo);
    }
    let mut hi = lo;
    let mut found = false;
    for _ in 0..64 {
        hi = hi + hi;
        if member(hi)? {
            found = true;
            break;
        }
        lo = hi;
    }
    if !found {
        return Ok(T::infinity());
    }
    for _ in 0..200 {
        let mid = lo + (hi - lo) / (T::one() + T::one());
        if mid <= lo || mid >= hi {
            break;
        }
        if member(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= T::epsilon() * T::lit(4.0) * hi {
            break;
        }
    }
    Ok(hi)
}

/// Euclidean projection onto `C°`, certified by `⟨v − z, w − z⟩ <= tol` for
/// every generator `w` in the polyhedral case.
pub fn polar_project<T: Real>(g: &GaugeSpec<T>, v: &Point<T>, tol: T) -> Result<Point<T>> {
    scaled_polar_project(g, v, T::one(), tol)
}

/// Projection onto `scale·C°`.
fn scaled_polar_project<T: Real>(g: &GaugeSpec<T>, v: &Point<T>, scale: T, tol: T) -> Result<Point<T>> {
    if !(tol > T::zero()) {
        return Err(Error::Input("projection tolerance must be positive".into()));
    }
    g.check(v)?;
    match g {
        GaugeSpec::NormGauge(n) => {
            if scale == T::one() {
                dual_ball_project(n, v)
            } else {
                Ok(dual_ball_project(n, &v.scale(T::one() / scale))?.scale(scale))
            }
        }
        GaugeSpec::DiagWeighted(w) => {
            let mut out = v.clone();
            for (x, &wi) in out.data_mut().iter_mut().zip(w) {
                let b = wi * scale;
                *x = x.max(-b).min(b);
            }
            Ok(out)
        }
        GaugeSpec::PolyhedralPolar(p) => Point::new(v.shape(), p.project(v.data(), scale, tol)?),
    }
}

/// `prox_{scale·γ_C}(v) = v − Π_{scale·C°}(v)` at the default tolerance.
pub fn gauge_prox<T: Real>(g: &GaugeSpec<T>, v: &Point<T>, scale: T) -> Result<Point<T>> {
    gauge_prox_with_tol(g, v, scale, T::lit(DEFAULT_PROJECTION_TOL))
}

pub fn gauge_prox_with_tol<T: Real>(g: &GaugeSpec<T>, v: &Point<T>, scale: T, tol: T) -> Result<Point<T>> {
    if !(scale > T::zero() && scale.is_finite()) {
        return Err(Error::Input(format!("prox scale must be positive, got {scale}")));
    }
    let z = scaled_polar_project(g, v, scale, tol)?;
    Ok(v.sub(&z))
}
