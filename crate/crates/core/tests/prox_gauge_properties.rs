//! Randomized identities of the prox catalog and the gauge layer.

use augdual_core::gauge::{gauge_eval, gauge_prox, polar_gauge_eval};
use augdual_core::prox::{dual_ball_project, moreau_residual, prox_norm};
use augdual_core::{DenseMatrix, GaugeSpec, NormSpec, Point};
use proptest::prelude::*;

const DIM: usize = 6;

fn catalog() -> Vec<NormSpec<f64>> {
    vec![
        NormSpec::l1(),
        NormSpec::weighted_l1(vec![0.5, 1.0, 2.0, 0.25, 3.0, 1.5]).unwrap(),
        NormSpec::l2(),
        NormSpec::linf(),
        NormSpec::nuclear(),
    ]
}

/// Vectors for the vector norms, 2×3 matrices for the nuclear norm.
fn point(norm: &NormSpec<f64>, data: &[f64]) -> Point<f64> {
    match norm.kind() {
        augdual_core::NormKind::Nuclear => Point::from_matrix(DenseMatrix::new(2, 3, data.to_vec()).unwrap()),
        _ => Point::vector(data.to_vec()).unwrap(),
    }
}

fn coords() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, DIM)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn prox_is_firmly_nonexpansive(u in coords(), v in coords(), t in 0.01..5.0f64) {
        for n in catalog() {
            let (u, v) = (point(&n, &u), point(&n, &v));
            let pu = prox_norm(&n, &u, t).unwrap();
            let pv = prox_norm(&n, &v, t).unwrap();
            let d = pu.sub(&pv);
            prop_assert!(d.dot(&d) <= d.dot(&u.sub(&v)) + 1e-10, "{:?}", n.kind());
            prop_assert!(d.norm() <= u.distance(&v) + 1e-10);
        }
    }

    #[test]
    fn moreau_decomposition_holds(v in coords(), t in 0.01..5.0f64) {
        for n in catalog() {
            let v = point(&n, &v);
            prop_assert!(moreau_residual(&n, &v, t).unwrap() <= 1e-10);
            // and explicitly: v = prox(v) + t·P_B(v/t)
            let back = prox_norm(&n, &v, t).unwrap().axpy(t, &dual_ball_project(&n, &v.scale(1.0 / t)).unwrap());
            prop_assert!(back.distance(&v) <= 1e-10 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn prox_scales_with_its_argument(v in coords(), t in 0.01..5.0f64, s in 0.1..10.0f64) {
        // prox_{t‖·‖}(v) = s·prox_{(t/s)‖·‖}(v/s)
        for n in catalog() {
            let v = point(&n, &v);
            let lhs = prox_norm(&n, &v, t).unwrap();
            let rhs = prox_norm(&n, &v.scale(1.0 / s), t / s).unwrap().scale(s);
            prop_assert!(lhs.distance(&rhs) <= 1e-12 * (1.0 + v.norm()) * 10.0);
        }
    }

    #[test]
    fn norm_gauge_prox_is_norm_prox(v in coords(), t in 0.01..5.0f64) {
        for n in catalog() {
            let v = point(&n, &v);
            let g = GaugeSpec::norm(n.clone());
            let a = gauge_prox(&g, &v, t).unwrap();
            let b = prox_norm(&n, &v, t).unwrap();
            prop_assert!(a.distance(&b) <= 1e-12 * (1.0 + v.norm()));
            prop_assert!((gauge_eval(&g, &v).unwrap() - n.value(&v).unwrap()).abs() <= 1e-12 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn polar_inequality(x in prop::collection::vec(-3.0..3.0f64, 3), u in prop::collection::vec(-3.0..3.0f64, 3),
                        verts in prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 3), 1..6)) {
        // ⟨x, u⟩ <= γ(x)·γ°(u) whenever both sides are finite
        let g = GaugeSpec::polyhedral(verts).unwrap();
        let (x, u) = (Point::vector(x).unwrap(), Point::vector(u).unwrap());
        let gx = gauge_eval(&g, &x).unwrap();
        let gu = polar_gauge_eval(&g, &u).unwrap();
        if gu.is_finite() {
            prop_assert!(x.dot(&u) <= gx * gu + 1e-7 * (1.0 + gx * gu), "{} > {gx}·{gu}", x.dot(&u));
        }
        let w = GaugeSpec::diag_weighted(vec![0.5, 2.0, 1.0]).unwrap();
        let wx = gauge_eval(&w, &x).unwrap();
        let wu = polar_gauge_eval(&w, &u).unwrap();
        prop_assert!(x.dot(&u) <= wx * wu + 1e-12 * (1.0 + wx * wu));
    }

    #[test]
    fn diag_gauge_matches_weighted_l1(v in coords(), t in 0.01..5.0f64) {
        let w = vec![0.5, 1.0, 2.0, 0.25, 3.0, 1.5];
        let g = GaugeSpec::diag_weighted(w.clone()).unwrap();
        let n = NormSpec::weighted_l1(w).unwrap();
        let v = Point::vector(v).unwrap();
        let a = gauge_prox(&g, &v, t).unwrap();
        let b = prox_norm(&n, &v, t).unwrap();
        prop_assert!(a.distance(&b) <= 1e-12 * (1.0 + v.norm()));
    }
}
