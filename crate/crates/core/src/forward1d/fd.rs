use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::medium::MediumProfile;
use crate::trace::TimeTrace;

/// Discretization of the initial velocity `δ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    /// `1/h` at the source node.
    Spike,
    /// Unit-mass Gaussian of width `sigma`, normalized on the grid.
    Gaussian { sigma: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdConfig {
    /// Nodes on the padded interval `[a1, a2]`.
    pub n_x: usize,
    pub cfl: f64,
    /// `a1 = -pad`, `a2 = sqrt(c̄) + pad`.
    pub pad: f64,
    pub source: Source,
    /// Overrides the c̄ used to size the domain, so a reference run can share
    /// the grid of a target run.
    pub c_bar: Option<f64>,
    /// Extra observation points.
    pub probes: Vec<f64>,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            n_x: 4001,
            cfl: 0.9,
            pad: 0.2,
            source: Source::Gaussian { sigma: 0.005 },
            c_bar: None,
            probes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FdSolution {
    /// `u(0,t)`
    pub f0: TimeTrace,
    /// `u_x(0,t)`, equal to `f0'` under the absorbing condition at the left end.
    pub f1: TimeTrace,
    pub probes: Vec<TimeTrace>,
    /// `max_x |u(x,t_n)|` per step.
    pub sup_norm: Vec<f64>,
    pub h: f64,
    pub dt: f64,
}

/// Default configuration with the given resolution and Courant number.
pub fn solve_wave_fd(
    c: &MediumProfile,
    t_end: f64,
    n_x: usize,
    cfl: f64,
) -> Result<(TimeTrace, TimeTrace)> {
    let cfg = FdConfig {
        n_x,
        cfl,
        ..FdConfig::default()
    };
    let s = solve_wave_fd_with(c, t_end, &cfg)?;
    Ok((s.f0, s.f1))
}

/// Leapfrog in time, three-point Laplacian in space, Mur's first-order
/// absorbing condition at both ends. The padding is vacuum (c = 1).
pub fn solve_wave_fd_with(c: &MediumProfile, t_end: f64, cfg: &FdConfig) -> Result<FdSolution> {
    if cfg.n_x < 5 {
        return Err(Error::InvalidParameter("n_x must be at least 5".into()));
    }
    if !(t_end > 0.0) {
        return Err(Error::InvalidParameter("t_end must be positive".into()));
    }
    if !(cfg.pad > 0.0) {
        return Err(Error::InvalidParameter("pad must be positive".into()));
    }
    let c_bar = cfg.c_bar.unwrap_or_else(|| c.c_bar()).max(c.c_bar());
    let a2 = libm::sqrt(c_bar) + cfg.pad;
    let mut a1 = -cfg.pad;
    let n = cfg.n_x;
    let h = (a2 - a1) / (n - 1) as f64;
    let i0 = libm::round(-a1 / h) as usize;
    a1 = -(i0 as f64) * h;
    let xs: Vec<f64> = (0..n).map(|i| a1 + i as f64 * h).collect();
    let cs: Vec<f64> = xs.iter().map(|&x| c.value_at(x)).collect();
    let c_min = cs.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let bound = h * libm::sqrt(c_min);
    if !(cfg.cfl > 0.0 && cfg.cfl <= 1.0) {
        return Err(Error::Stability {
            dt: cfg.cfl * bound,
            bound,
        });
    }
    let dt = cfg.cfl * bound;
    let nt = libm::ceil(t_end / dt) as usize + 1;

    let mut g = alloc::vec![0.0; n];
    match cfg.source {
        Source::Spike => g[i0] = 1.0 / h,
        Source::Gaussian { sigma } => {
            if !(sigma > 0.0) {
                return Err(Error::InvalidParameter("source width must be positive".into()));
            }
            for (gi, &x) in g.iter_mut().zip(&xs) {
                let s = x / sigma;
                *gi = libm::exp(-0.5 * s * s);
            }
            let mass: f64 = g.iter().sum::<f64>() * h;
            for gi in g.iter_mut() {
                *gi /= mass;
            }
        }
    }

    let r: Vec<f64> = cs.iter().map(|&ci| dt * dt / (ci * h * h)).collect();
    let mut u_prev = alloc::vec![0.0; n];
    // u_tt(0) = 0 and u_ttt(0) = c^-1 g'': third-order Taylor start
    let mut u = alloc::vec![0.0; n];
    for i in 1..n - 1 {
        u[i] = dt * g[i] + dt * dt * dt / 6.0 * (g[i + 1] - 2.0 * g[i] + g[i - 1]) / (cs[i] * h * h);
    }
    u[0] = dt * g[0];
    u[n - 1] = dt * g[n - 1];
    let mut u_next = alloc::vec![0.0; n];

    let nu = dt / h;
    let k = (nu - 1.0) / (nu + 1.0);
    let probe_at = |u: &[f64], x: f64| -> f64 {
        let s = (x - a1) / h;
        if !(s >= 0.0) || s > (n - 1) as f64 {
            return 0.0;
        }
        let i = (libm::floor(s) as usize).min(n - 2);
        let f = s - i as f64;
        u[i] * (1.0 - f) + u[i + 1] * f
    };
    let sup = |u: &[f64]| u.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));

    let mut f0 = Vec::with_capacity(nt);
    let mut probes: Vec<Vec<f64>> = cfg.probes.iter().map(|_| Vec::with_capacity(nt)).collect();
    let mut sup_norm = Vec::with_capacity(nt);
    f0.push(0.0);
    f0.push(u[i0]);
    for pr in probes.iter_mut() {
        pr.push(0.0);
    }
    for (pr, &x) in probes.iter_mut().zip(&cfg.probes) {
        pr.push(probe_at(&u, x));
    }
    sup_norm.push(0.0);
    sup_norm.push(sup(&u));

    for _ in 2..nt {
        for i in 1..n - 1 {
            u_next[i] = 2.0 * u[i] - u_prev[i] + r[i] * (u[i + 1] - 2.0 * u[i] + u[i - 1]);
        }
        u_next[0] = u[1] + k * (u_next[1] - u[0]);
        u_next[n - 1] = u[n - 2] + k * (u_next[n - 2] - u[n - 1]);
        core::mem::swap(&mut u_prev, &mut u);
        core::mem::swap(&mut u, &mut u_next);
        f0.push(u[i0]);
        for (pr, &x) in probes.iter_mut().zip(&cfg.probes) {
            pr.push(probe_at(&u, x));
        }
        sup_norm.push(sup(&u));
    }

    let f0 = TimeTrace::new(f0, dt, 0.0)?;
    let f1 = f0.derivative()?;
    let probes = probes
        .into_iter()
        .map(|p| TimeTrace::new(p, dt, 0.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(FdSolution {
        f0,
        f1,
        probes,
        sup_norm,
        h,
        dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cfl_above_one_is_a_stability_error() {
        let c = MediumProfile::unity(0.0, 1.0, 11).unwrap();
        let r = solve_wave_fd(&c, 1.0, 201, 1.5);
        assert!(matches!(r, Err(Error::Stability { .. })));
    }

    #[test]
    fn unit_medium_settles_to_one_half() {
        let c = MediumProfile::unity(0.0, 1.0, 11).unwrap();
        let (f0, f1) = solve_wave_fd(&c, 1.5, 1001, 0.9).unwrap();
        for i in 0..f0.len() {
            if f0.time(i) >= 0.5 {
                assert!((f0.samples()[i] - 0.5).abs() < 2e-3, "t={}", f0.time(i));
                assert!(f1.samples()[i].abs() < 1e-2);
            }
        }
    }
}
