use cipsar_core::preprocess::*;
use cipsar_core::{Error, TimeTrace};
use num_complex::Complex64;
use std::f64::consts::PI;

fn geom() -> GeometryConfig {
    GeometryConfig::default()
}

fn record(values: impl Fn(f64) -> Complex64, n_f: usize) -> RawSarRecord {
    let freqs: Vec<f64> = (0..n_f).map(|j| 5.6 + 3.4 * j as f64 / (n_f - 1) as f64).collect();
    let vals = freqs.iter().map(|&f| values(wavenumber(f))).collect();
    RawSarRecord::new(0, vec![[0.0, 0.0]], freqs, vals).unwrap()
}

#[test]
fn band_maps_to_dimensionless_wavenumbers() {
    let g = geom();
    assert_eq!(g.band_ghz, (5.6, 9.0));
    // 2π f / c0 in 1/m, times the 0.3 m length unit
    let per_metre = 2.0 * PI * 5.6e9 / 3.0e8;
    assert!((wavenumber(5.6) - per_metre * 0.3).abs() < 1e-9);
}

#[test]
fn zero_spectrum_gives_zero_trace() {
    let rec = record(|_| Complex64::new(0.0, 0.0), 201);
    let tr = to_time_domain(&rec, &geom()).unwrap();
    assert!(tr[0].samples().iter().all(|v| v.norm() == 0.0));
}

#[test]
fn single_delay_peaks_at_its_time() {
    let t0 = 7.3;
    let rec = record(|k| Complex64::new(0.0, k * t0).exp(), 341);
    let tr = to_time_domain(&rec, &geom()).unwrap();
    let i = tr[0].argmax_magnitude();
    assert!((tr[0].time(i) - t0).abs() <= tr[0].dt(), "peak at {}", tr[0].time(i));
}

#[test]
fn single_frequency_is_an_empty_band() {
    let rec = RawSarRecord::new(0, vec![[0.0, 0.0]], vec![6.0], vec![Complex64::new(1.0, 0.0)]).unwrap();
    assert!(matches!(to_time_domain(&rec, &geom()), Err(Error::InvalidParameter(_))));
}

#[test]
fn out_of_band_frequencies_are_rejected() {
    let rec = RawSarRecord::new(0, vec![[0.0, 0.0]], vec![5.0, 6.0], vec![Complex64::new(1.0, 0.0); 2]).unwrap();
    assert!(to_time_domain(&rec, &geom()).is_err());
}

fn trace(v: Vec<f64>) -> TimeTrace {
    TimeTrace::new(v, 0.02, 0.0).unwrap()
}

#[test]
fn background_subtraction_cases() {
    let u = trace((0..50).map(|i| (i as f64 * 0.3).sin()).collect());
    let zero = trace(vec![0.0; 50]);
    assert!(background_subtract(&u, &u).unwrap().samples().iter().all(|&v| v == 0.0));
    assert_eq!(background_subtract(&u, &zero).unwrap(), u);
    let target = trace((0..50).map(|i| (i as f64 * 0.1).cos()).collect());
    let clutter = trace((0..50).map(|i| 0.25 * i as f64).collect());
    let both = trace(target.samples().iter().zip(clutter.samples()).map(|(a, b)| a + b).collect());
    let back = background_subtract(&both, &clutter).unwrap();
    for (a, b) in back.samples().iter().zip(target.samples()) {
        assert!((a - b).abs() < 1e-14);
    }
    assert!(background_subtract(&u, &trace(vec![0.0; 49])).is_err());
}

#[test]
fn propagation_moves_features_earlier() {
    let g = geom();
    let dt = g.dt();
    let mut v = vec![0.0; g.n_time];
    v[(10.0 / dt).round() as usize] = 1.0;
    let out = propagate(&TimeTrace::new(v.clone(), dt, 0.0).unwrap(), g.a, g.a_tilde).unwrap();
    let i = out.argmax_magnitude();
    let want = 10.0 - (g.a_tilde - g.a);
    assert!((out.time(i) - want).abs() <= dt / 2.0 + 1e-12, "{} vs {want}", out.time(i));

    let mut early = vec![0.0; g.n_time];
    early[(5.0 / dt).round() as usize] = 1.0;
    let out = propagate(&TimeTrace::new(early, dt, 0.0).unwrap(), g.a, g.a_tilde).unwrap();
    assert!(out.samples().iter().all(|&x| x == 0.0));
}

#[test]
fn propagation_composes() {
    let dt = 0.02;
    let phi = TimeTrace::new((0..400).map(|i| (i as f64 * 0.05).sin()).collect(), dt, 0.0).unwrap();
    let (a, m, at) = (-8.0, -6.0, -1.5);
    let two = propagate(&propagate(&phi, a, m).unwrap(), m, at).unwrap();
    assert_eq!(two, propagate(&phi, a, at).unwrap());
    assert_eq!(propagate(&phi, a, a).unwrap(), phi);
}

#[test]
fn optimal_detector_fixtures() {
    let mk = |v0: f64| trace(vec![v0, 1.0, 2.0]);
    assert_eq!(select_optimal_detector(&[mk(0.3)]).unwrap().0, 0);
    let set: Vec<TimeTrace> = (0..10).map(|i| mk(if i == 7 { -4.0 } else { i as f64 * 0.1 })).collect();
    assert_eq!(select_optimal_detector(&set).unwrap().0, 7);
    let same: Vec<TimeTrace> = (0..5).map(|_| mk(1.0)).collect();
    assert_eq!(select_optimal_detector(&same).unwrap().0, 0);
    let empty: Vec<TimeTrace> = Vec::new();
    assert!(matches!(select_optimal_detector(&empty), Err(Error::Input(_))));
}

#[test]
fn truncation_fixtures() {
    let zero = trace(vec![0.0; 100]);
    assert_eq!(truncate(&zero, 30).unwrap(), zero);
    let mut s = vec![0.0; 100];
    s[40] = 3.0;
    let spike = trace(s);
    assert_eq!(truncate(&spike, 30).unwrap(), spike);
    let bumps: Vec<f64> = (0..300)
        .map(|i| {
            let x = i as f64;
            (-(x - 50.0).powi(2) / 20.0).exp() + 2.0 * (-(x - 200.0).powi(2) / 20.0).exp()
        })
        .collect();
    let out = truncate(&trace(bumps), 30).unwrap();
    assert!(out.samples()[..100].iter().all(|&v| v == 0.0));
    assert!(out.samples()[200] > 1.9);
}

#[test]
fn calibration_fixtures() {
    let u = trace(vec![1.0, -2.0, 0.5]);
    assert_eq!(calibrate(&u, 1.0).unwrap(), u);
    let spike = trace(vec![0.0, 1.0, 0.0]);
    assert_eq!(calibrate(&spike, 43.17).unwrap().samples()[1], 43.17);
    let two = calibrate(&calibrate(&u, 2.0).unwrap(), 3.0).unwrap();
    assert_eq!(two, calibrate(&u, 6.0).unwrap());
    assert!(calibrate(&u, 0.0).is_err());
}

#[test]
fn delay_and_sum_of_zero_traces_is_zero() {
    let g = geom();
    let traces: Vec<TimeTrace> = (0..5).map(|_| TimeTrace::zeros(200, 0.02, 0.0).unwrap()).collect();
    let img = delay_and_sum(&traces, &g).unwrap();
    assert!(img.values.iter().all(|&v| v == 0.0));
}

#[test]
fn delay_and_sum_needs_two_sources() {
    let traces: Vec<TimeTrace> = vec![TimeTrace::zeros(200, 0.02, 0.0).unwrap()];
    assert!(matches!(delay_and_sum(&traces, &geom()), Err(Error::DegenerateAperture { sources: 1 })));
}

#[test]
fn delay_and_sum_finds_point_scatterer() {
    let g = geom();
    let dt = 0.02;
    let (s_true, y_true) = (12usize, 1.5f64);
    let dx = g.source_step / g.c0;
    let traces: Vec<TimeTrace> = (0..25)
        .map(|n| {
            let xo = (n as f64 - s_true as f64) * dx;
            let t = 2.0 * (xo * xo + y_true * y_true).sqrt();
            let s = (0..400).map(|i| (-((i as f64 * dt - t) / 0.03).powi(2)).exp()).collect();
            TimeTrace::new(s, dt, 0.0).unwrap()
        })
        .collect();
    let img = delay_and_sum(&traces, &g).unwrap();
    let l_true = (y_true / img.range_step).round() as usize;
    assert!(img.get(s_true, l_true) > 0.0);
    let (l1, l2, s1, s2) = img.support_box().unwrap();
    assert!(l1 <= l_true && l_true <= l2 && s1 <= s_true && s_true <= s2);
}

#[test]
fn geometry_is_validated() {
    assert!(geom().validate().is_ok());
    let bad = GeometryConfig { a_tilde: -9.0, ..geom() };
    assert!(bad.validate().is_err());
    let g = geom();
    assert!((g.a + 8.333).abs() < 1e-3 && (g.a_tilde + 1.667).abs() < 1e-3 && g.b_tilde == 1.4);
    assert_eq!((g.n_time, g.t_end, g.cf), (1000, 20.0, 43.17));
}
