//! Self-checks exposed through `cipsar verify <suite>`.
//!
//! Each suite returns a table of numbers plus a pass flag; the command line
//! writes the table as CSV and turns a failure into exit code 4.

use cipsar_core::convexify::{
    convexity_gap, cost, gradient, inner, initial_guess, BoundaryData, CarlemanParams, FieldV,
};
use cipsar_core::forward1d::{solve_w_volterra_report, solve_wave_fd_with, trace_from_w, FdConfig};
use cipsar_core::incidentwave::{disk_field_quadrature, fit_exponent, leading_term, n_quad_for, AntennaDisk};
use cipsar_core::medium::{potential_from_medium, travel_time};
use cipsar_core::{MediumProfile, SpaceTimeField, TimeTrace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::invert::{boundary_data, InversionSettings};
use crate::simulate::{bump_medium, simulate_source, PHANTOM_NODES};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub passed: bool,
    pub summary: String,
}

pub const SUITES: [&str; 4] = ["gradcheck", "convexity", "lemma1", "oracle"];

fn paper_params() -> CarlemanParams {
    CarlemanParams {
        lambda: 2.25,
        beta: 0.33,
        gamma: 1e-10,
        ..CarlemanParams::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradcheckOptions {
    pub fields: usize,
    /// Nodes per axis.
    pub n: usize,
    pub b: f64,
    pub t_tilde: f64,
    pub eps: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for GradcheckOptions {
    fn default() -> Self {
        Self {
            fields: 20,
            n: 21,
            b: 1.0,
            t_tilde: 2.0,
            eps: 1e-5,
            tol: 1e-6,
            seed: 0,
        }
    }
}

/// Analytic directional derivative against central differences of J along
/// directions that keep the boundary conditions homogeneous.
pub fn gradcheck(o: &GradcheckOptions) -> cipsar_core::Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let p = paper_params();
    let h_t = o.t_tilde / (o.n - 1) as f64;
    let mut uniform = |len: usize| -> Vec<f64> { (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for j in 0..o.fields {
        let data = BoundaryData::new(
            TimeTrace::new(uniform(o.n), h_t, 0.0)?,
            TimeTrace::new(uniform(o.n), h_t, 0.0)?,
        )?;
        let mut f = SpaceTimeField::on_rectangle(o.n, o.n, o.b, o.t_tilde)?;
        f.values_mut().copy_from_slice(&uniform(o.n * o.n));
        let v = FieldV::new(f, data.clone())?;
        let mut d = SpaceTimeField::on_rectangle(o.n, o.n, o.b, o.t_tilde)?;
        d.values_mut().copy_from_slice(&uniform(o.n * o.n));
        let d = FieldV::new(d, BoundaryData::zeros(o.n, h_t)?)?.into_field();
        let shifted = |eps: f64| -> cipsar_core::Result<FieldV> {
            let mut f = v.field().clone();
            for (a, b) in f.values_mut().iter_mut().zip(d.values()) {
                *a += eps * b;
            }
            FieldV::unconstrained(f, data.clone())
        };
        let an = inner(&gradient(&v, &p), &d);
        let fd = (cost(&shifted(o.eps)?, &p) - cost(&shifted(-o.eps)?, &p)) / (2.0 * o.eps);
        let rel = ((fd - an) / an).abs();
        worst = worst.max(rel);
        rows.push(vec![j as f64, an, fd, rel]);
    }
    Ok(SuiteReport {
        suite: "gradcheck",
        header: vec!["field", "analytic", "finite_difference", "rel_error"],
        rows,
        passed: worst < o.tol,
        summary: format!("max relative error {worst:.3e} over {} fields (limit {:.0e})", o.fields, o.tol),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityOptions {
    pub pairs: usize,
    pub seed: u64,
    /// Grid step of the inversion grid.
    pub h: f64,
    pub amplitude: f64,
    pub support: [f64; 2],
    pub fd_n_x: usize,
}

impl Default for ConvexityOptions {
    fn default() -> Self {
        Self {
            pairs: 100,
            seed: 0,
            h: 0.02,
            amplitude: 0.5,
            support: [0.3, 0.6],
            fd_n_x: 4001,
        }
    }
}

/// Initial guess of the bump-medium inversion at step `h`.
pub fn bump_initial_guess(
    amplitude: f64,
    support: [f64; 2],
    h: f64,
    fd_n_x: usize,
) -> cipsar_core::Result<(FieldV, InversionSettings)> {
    let c = bump_medium(amplitude, support, PHANTOM_NODES)?;
    let b = travel_time(&c, h)?.b();
    let t_tilde = 2.0 * b;
    let sim = simulate_source(&c, t_tilde + 0.1, fd_n_x, 0.0, 0, 0)?;
    let s = InversionSettings {
        params: paper_params(),
        descent: Default::default(),
        b,
        t_tilde,
        n_y: (b / h).round() as usize + 1,
        n_t: (t_tilde / h).round() as usize + 1,
        n_x: 501,
        mu: None,
    };
    let q = boundary_data(&sim.clean_scattered, &s)?;
    Ok((initial_guess(&q, b, s.n_y)?, s))
}

/// Smooth random perturbation of the free rows, largest entry `scale`.
pub fn smooth_perturbation(rng: &mut ChaCha8Rng, v: &FieldV, scale: f64) -> cipsar_core::Result<FieldV> {
    let f = v.field();
    let (b, t_tilde) = (f.b(), f.t_tilde());
    let ky = rng.gen_range(1..6) as f64;
    let kt = rng.gen_range(1..8) as f64;
    let (py, pt) = (rng.gen::<f64>(), rng.gen::<f64>());
    let pi = std::f64::consts::PI;
    let mut d = SpaceTimeField::on_rectangle(f.n_y(), f.n_t(), b, t_tilde)?;
    for i in 2..f.n_y() - 1 {
        let y = f.y(i);
        let wy = y * y * (pi * py + ky * pi * y / b).cos();
        for n in 0..f.n_t() {
            d.set(i, n, wy * (kt * pi * f.t(n) / t_tilde + 3.0 * pt).sin());
        }
    }
    let top = d.sup_norm();
    let mut out = f.clone();
    if top > 0.0 {
        for (a, e) in out.values_mut().iter_mut().zip(d.values()) {
            *a += scale * e / top;
        }
    }
    FieldV::new(out, v.data().clone())
}

/// Gap `J(V2) - J(V1) - <J'(V1), V2-V1> - γ/2 |V2-V1|²` over random pairs
/// around the bump-medium initial guess; violations are gaps below
/// `-1e-12 J(V1)`.
pub fn convexity(o: &ConvexityOptions) -> cipsar_core::Result<SuiteReport> {
    let (v0, s) = bump_initial_guess(o.amplitude, o.support, o.h, o.fd_n_x)?;
    let m = v0.field().sup_norm();
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let mut rows = Vec::new();
    let mut bad = 0usize;
    for j in 0..o.pairs {
        let s1 = rng.gen::<f64>() * m;
        let v1 = smooth_perturbation(&mut rng, &v0, s1)?;
        let s2 = rng.gen::<f64>() * m;
        let v2 = smooth_perturbation(&mut rng, &v0, s2)?;
        let j1 = cost(&v1, &s.params);
        let gap = convexity_gap(&v1, &v2, &s.params)?;
        if gap < -1e-12 * j1 {
            bad += 1;
        }
        rows.push(vec![j as f64, j1, cost(&v2, &s.params), gap, gap / j1]);
    }
    Ok(SuiteReport {
        suite: "convexity",
        header: vec!["pair", "cost_1", "cost_2", "gap", "gap_over_cost_1"],
        rows,
        passed: bad == 0,
        summary: format!("{bad} of {} pairs below -1e-12 J(V1)", o.pairs),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Options {
    pub diameter: f64,
    pub eta: f64,
    /// In front of the aperture where `0 < m < 1`.
    pub inside: [f64; 3],
    /// In front of the region where `m = 0`.
    pub outside: [f64; 3],
    pub k_min: f64,
    pub k_max: f64,
    pub n_k: usize,
    pub points_per_wavelength: f64,
    pub min_nodes: usize,
}

impl Default for Lemma1Options {
    fn default() -> Self {
        Self {
            diameter: 1.0,
            eta: 0.4,
            inside: [0.3, 0.0, 0.2],
            outside: [0.8, 0.0, 0.2],
            k_min: 20.0,
            k_max: 200.0,
            n_k: 40,
            points_per_wavelength: 16.0,
            min_nodes: 201,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Slopes {
    pub inside: f64,
    pub outside: f64,
}

/// Log-spaced sweep of k; fitted exponents of the relative deviation from
/// the leading term inside and of the magnitude outside.
pub fn lemma1_sweep(o: &Lemma1Options) -> cipsar_core::Result<(Vec<Vec<f64>>, Lemma1Slopes)> {
    let disk = AntennaDisk::new([0.0; 3], o.diameter, o.eta, 0.0)?;
    let ks: Vec<f64> = (0..o.n_k)
        .map(|j| o.k_min * (o.k_max / o.k_min).powf(j as f64 / (o.n_k - 1) as f64))
        .collect();
    let rows = ks
        .par_iter()
        .map(|&k| -> cipsar_core::Result<Vec<f64>> {
            let n = n_quad_for(&disk, k, o.points_per_wavelength).max(o.min_nodes);
            let inside = disk_field_quadrature(&disk, o.inside, k, n)?.value;
            let lead = leading_term(&disk, o.inside, k);
            let outside = disk_field_quadrature(&disk, o.outside, k, n)?.value;
            Ok(vec![k, (inside - lead).norm() / lead.norm(), outside.norm()])
        })
        .collect::<cipsar_core::Result<Vec<_>>>()?;
    let col = |c: usize| rows.iter().map(|r| r[c]).collect::<Vec<f64>>();
    let slopes = Lemma1Slopes {
        inside: fit_exponent(&ks, &col(1))?,
        outside: fit_exponent(&ks, &col(2))?,
    };
    Ok((rows, slopes))
}

pub fn lemma1(o: &Lemma1Options) -> cipsar_core::Result<SuiteReport> {
    let (rows, s) = lemma1_sweep(o)?;
    let ok_in = (s.inside + 1.0).abs() <= 0.1;
    let ok_out = (s.outside + 2.0).abs() <= 0.3;
    Ok(SuiteReport {
        suite: "lemma1",
        header: vec!["k", "inside_error", "outside_magnitude"],
        rows,
        passed: ok_in && ok_out,
        summary: format!(
            "inside exponent {:.3} (want -1.0 +- 0.1), outside exponent {:.3} (want -2.0 +- 0.3)",
            s.inside, s.outside
        ),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOptions {
    pub amplitude: f64,
    pub support: [f64; 2],
    pub h_y: f64,
    pub fd_n_x: usize,
    pub t_tilde: f64,
    /// Samples before this time are skipped; both traces smear the direct
    /// pulse differently there.
    pub t_min: f64,
    pub tol: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            amplitude: 0.5,
            support: [0.3, 0.6],
            h_y: 0.0025,
            fd_n_x: 8001,
            t_tilde: 2.5,
            t_min: 0.05,
            tol: 0.02,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleTraces {
    /// FD trace minus the homogeneous reference.
    pub fd: TimeTrace,
    /// `w(0,t) - 1/2` from the integral equation.
    pub volterra: TimeTrace,
    pub rel_l2: f64,
}

/// Scattered trace from the finite-difference solver against the one from
/// the integral equation for `p` derived from the same medium.
pub fn oracle_traces(o: &OracleOptions) -> cipsar_core::Result<OracleTraces> {
    let c: MediumProfile = bump_medium(o.amplitude, o.support, PHANTOM_NODES)?;
    let cfg = FdConfig {
        n_x: o.fd_n_x,
        ..FdConfig::default()
    };
    let target = solve_wave_fd_with(&c, o.t_tilde + 0.1, &cfg)?;
    let unity = MediumProfile::unity(c.x_min(), c.x_max(), c.n_x())?;
    let reference = solve_wave_fd_with(
        &unity,
        o.t_tilde + 0.1,
        &FdConfig {
            c_bar: Some(c.c_bar()),
            ..cfg
        },
    )?;
    let p = potential_from_medium(&c, o.h_y)?;
    let b = travel_time(&c, o.h_y)?.b();
    let w = solve_w_volterra_report(&p, b, o.t_tilde, 500)?.w;
    let tr = trace_from_w(&w)?;
    let (mut fd, mut vt) = (Vec::new(), Vec::new());
    for i in 0..tr.len() {
        let t = tr.time(i);
        fd.push(target.f0.value_at(t) - reference.f0.value_at(t));
        vt.push(tr.samples()[i] - 0.5);
    }
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..tr.len() {
        if tr.time(i) >= o.t_min {
            num += (fd[i] - vt[i]).powi(2);
            den += vt[i] * vt[i];
        }
    }
    Ok(OracleTraces {
        fd: TimeTrace::new(fd, tr.dt(), tr.t0())?,
        volterra: TimeTrace::new(vt, tr.dt(), tr.t0())?,
        rel_l2: (num / den).sqrt(),
    })
}

pub fn oracle(o: &OracleOptions) -> cipsar_core::Result<SuiteReport> {
    let r = oracle_traces(o)?;
    let rows = (0..r.fd.len())
        .map(|i| vec![r.fd.time(i), r.fd.samples()[i], r.volterra.samples()[i]])
        .collect();
    Ok(SuiteReport {
        suite: "oracle",
        header: vec!["t", "finite_difference", "integral_equation"],
        rows,
        passed: r.rel_l2 < o.tol,
        summary: format!("relative L2 difference {:.3e} (limit {:.0e})", r.rel_l2, o.tol),
    })
}
