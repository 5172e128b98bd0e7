use cipsar_core::convexify::*;
use cipsar_core::medium::travel_time;
use cipsar_core::preprocess::*;
use cipsar_core::slantimage::{postprocess, SlantRangeImage};
use cipsar_core::{MediumProfile, SpaceTimeField, TimeTrace};
use num_complex::Complex64;
use proptest::prelude::*;

fn samples(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

fn trace(v: Vec<f64>) -> TimeTrace {
    TimeTrace::new(v, 0.02, 0.0).unwrap()
}

fn field_v(vals: Vec<f64>, q0: Vec<f64>, q1: Vec<f64>, n: usize) -> FieldV {
    let h = 2.0 / (n - 1) as f64;
    let data = BoundaryData::new(TimeTrace::new(q0, h, 0.0).unwrap(), TimeTrace::new(q1, h, 0.0).unwrap()).unwrap();
    let f = SpaceTimeField::from_values(vals, n, n, 1.0 / (n - 1) as f64, h, 0.0, 0.0).unwrap();
    FieldV::new(f, data).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn travel_time_preserves_order(bumps in prop::collection::vec(0.0f64..3.0, 4), x1 in 0.0f64..1.0, x2 in 0.0f64..1.0) {
        prop_assume!((x1 - x2).abs() > 1e-3);
        let c = MediumProfile::from_fn(0.0, 1.0, 201, |x| {
            1.0 + bumps.iter().enumerate().map(|(j, a)| a * (-((x - 0.2 * j as f64 - 0.2) / 0.1).powi(2)).exp()).sum::<f64>()
        }).unwrap();
        let map = travel_time(&c, 0.005).unwrap();
        let (lo, hi) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
        prop_assert!(map.y_of_x(lo) < map.y_of_x(hi));
        // y(x) >= x because c >= 1
        prop_assert!(map.y_of_x(hi) >= hi - 1e-9);
    }

    #[test]
    fn carleman_weight_decreases_in_y_and_t(lambda in 0.1f64..10.0, beta in 0.05f64..0.5,
                                           y in 0.0f64..2.0, t in 0.0f64..4.0, d in 1e-3f64..1.0) {
        prop_assert!(weight(lambda, beta, y + d, t) < weight(lambda, beta, y, t));
        prop_assert!(weight(lambda, beta, y, t + d) < weight(lambda, beta, y, t));
    }

    #[test]
    fn sample_aligned_propagation_is_additive(v in samples(300), s1 in 0usize..60, s2 in 0usize..60) {
        let phi = trace(v);
        let dt = phi.dt();
        let (a, m) = (-9.0, -9.0 + s1 as f64 * dt);
        let at = m + s2 as f64 * dt;
        let two = propagate(&propagate(&phi, a, m).unwrap(), m, at).unwrap();
        prop_assert_eq!(two, propagate(&phi, a, at).unwrap());
    }

    #[test]
    fn truncation_is_idempotent(v in samples(200), r in 1usize..50) {
        let once = truncate(&trace(v), r).unwrap();
        prop_assert_eq!(truncate(&once, r).unwrap(), once);
    }

    #[test]
    fn subtraction_is_linear(u in samples(64), r in samples(64), w in samples(64), s in samples(64),
                             al in -3.0f64..3.0, be in -3.0f64..3.0) {
        let comb = |x: &[f64], y: &[f64]| trace(x.iter().zip(y).map(|(a, b)| al * a + be * b).collect());
        let lhs = background_subtract(&comb(&u, &w), &comb(&r, &s)).unwrap();
        let d1 = background_subtract(&trace(u.clone()), &trace(r.clone())).unwrap();
        let d2 = background_subtract(&trace(w.clone()), &trace(s.clone())).unwrap();
        for (i, x) in lhs.samples().iter().enumerate() {
            let want = al * d1.samples()[i] + be * d2.samples()[i];
            prop_assert!((x - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn time_domain_transform_is_linear(re in samples(48), im in samples(48), al in -2.0f64..2.0) {
        let geom = GeometryConfig { n_time: 200, ..GeometryConfig::default() };
        let freqs: Vec<f64> = (0..24).map(|j| 5.6 + 3.4 * j as f64 / 23.0).collect();
        let a: Vec<Complex64> = (0..24).map(|j| Complex64::new(re[j], im[j])).collect();
        let b: Vec<Complex64> = (0..24).map(|j| Complex64::new(re[24 + j], im[24 + j])).collect();
        let ab: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * al + y).collect();
        let rec = |v: Vec<Complex64>| RawSarRecord::new(0, vec![[0.0, 0.0]], freqs.clone(), v).unwrap();
        let ta = to_time_domain(&rec(a), &geom).unwrap();
        let tb = to_time_domain(&rec(b), &geom).unwrap();
        let tab = to_time_domain(&rec(ab), &geom).unwrap();
        for i in 0..200 {
            let want = ta[0].samples()[i] * al + tb[0].samples()[i];
            prop_assert!((tab[0].samples()[i] - want).norm() <= 1e-10 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn constraints_hold_for_any_free_rows(vals in samples(81), q0 in samples(9), q1 in samples(9)) {
        let v = field_v(vals, q0, q1, 9);
        prop_assert!(v.bc_residual() < 1e-12);
    }

    #[test]
    fn postprocess_is_idempotent(vals in prop::collection::vec(1.0f64..30.0, 60), l1 in 0usize..10, dl in 0usize..10,
                                 s1 in 0usize..6, ds in 0usize..6) {
        let img = SlantRangeImage::new(vals, 6, 10, 0.05, 0.0, 0.1).unwrap();
        let rect = (l1, (l1 + dl).min(9), s1, (s1 + ds).min(5));
        let once = postprocess(&img, rect).unwrap();
        prop_assert_eq!(postprocess(&once, rect).unwrap(), once.clone());
        let mut top = 1.0f64;
        for s in rect.2..=rect.3 {
            for l in rect.0..=rect.1 {
                top = top.max(img.get(s, l));
            }
        }
        // the rectangle keeps at least its own maximum
        prop_assert!(once.max() >= top);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gradient_agrees_with_directional_differences(vals in samples(121), q0 in samples(11), q1 in samples(11),
                                                    dir in samples(121)) {
        let params = CarlemanParams { lambda: 2.25, beta: 0.33, gamma: 1e-10, ..CarlemanParams::default() };
        let v = field_v(vals, q0, q1, 11);
        let zero = vec![0.0; 11];
        let d = field_v(dir, zero.clone(), zero, 11).into_field();
        let g = gradient(&v, &params);
        let shifted = |eps: f64| {
            let mut f = v.field().clone();
            for (a, b) in f.values_mut().iter_mut().zip(d.values()) {
                *a += eps * b;
            }
            FieldV::unconstrained(f, v.data().clone()).unwrap()
        };
        let eps = 1e-5;
        let fd = (cost(&shifted(eps), &params) - cost(&shifted(-eps), &params)) / (2.0 * eps);
        let an = inner(&g, &d);
        prop_assert!((fd - an).abs() <= 1e-6 * (1.0 + an.abs()), "fd {} vs {}", fd, an);
    }

    #[test]
    fn descent_preserves_constraints(vals in samples(121), q0 in samples(11), q1 in samples(11)) {
        let params = CarlemanParams::default();
        let v = field_v(vals, q0, q1, 11);
        let rep = descend(&v, &params, 20, 1e-14).unwrap();
        // one-sided stencils divide by h, so round-off grows like |V|/h
        let f = rep.v.field();
        let tol = 64.0 * f64::EPSILON * (1.0 + f.sup_norm()) / f.h_y();
        prop_assert!(rep.v.bc_residual() <= tol, "residual {:e}, tol {:e}", rep.v.bc_residual(), tol);
    }
}
