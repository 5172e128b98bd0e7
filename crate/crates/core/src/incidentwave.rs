//! Field radiated by a flat disk antenna with a tapered aperture.
//!
//! The aperture weight `m` is 1 within radius `D/2 - η`, 0 beyond `D/2`, and
//! a cubic smoothstep in between. The field at `x` is
//! `∫ m(ξ) e^{ik|x-ξ|} / (4π|x-ξ|) dξ` over the disk. For large k it tends to
//! `(i/2k) e^{ik|z-z0|} m(x', y')` in front of the aperture, and decays like
//! `1/k²` in front of the region where `m = 0`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Points per wavelength below which results are flagged.
pub const MIN_POINTS_PER_WAVELENGTH: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaDisk {
    center: [f64; 3],
    d: f64,
    eta: f64,
    /// Elevation angle; the disk is described in its own frame, with normal
    /// along z, so θ only orients that frame.
    theta: f64,
}

impl AntennaDisk {
    pub fn new(center: [f64; 3], d: f64, eta: f64, theta: f64) -> Result<Self> {
        if !(d > 0.0) {
            return Err(Error::InvalidParameter("disk diameter must be positive".into()));
        }
        if !(eta > 0.0 && eta < 0.5 * d) {
            return Err(Error::InvalidParameter("eta must lie in (0, D/2)".into()));
        }
        Ok(Self { center, d, eta, theta })
    }

    pub fn center(&self) -> [f64; 3] {
        self.center
    }
    pub fn diameter(&self) -> f64 {
        self.d
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
}

fn smoothstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * (3.0 - 2.0 * s)
}

/// Aperture weight at `x`, by distance to the centre.
pub fn cutoff_m(disk: &AntennaDisk, x: [f64; 3]) -> f64 {
    let c = disk.center;
    let (dx, dy, dz) = (x[0] - c[0], x[1] - c[1], x[2] - c[2]);
    let r = libm::sqrt(dx * dx + dy * dy + dz * dz);
    smoothstep((0.5 * disk.d - r) / disk.eta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskField {
    pub value: Complex64,
    pub points_per_wavelength: f64,
    /// Fewer than [`MIN_POINTS_PER_WAVELENGTH`] nodes per wavelength.
    pub under_resolved: bool,
}

/// Nodes per axis that give `ppw` points per wavelength at wavenumber `k`.
pub fn n_quad_for(disk: &AntennaDisk, k: f64, ppw: f64) -> usize {
    let lambda = 2.0 * PI / k;
    (libm::ceil(disk.d / lambda * ppw) as usize + 1).max(3)
}

/// Tensor trapezoid rule with `n_quad` nodes per axis on the square
/// circumscribing the disk. The weight vanishes on the square's edge.
pub fn disk_field_quadrature(disk: &AntennaDisk, obs: [f64; 3], k: f64, n_quad: usize) -> Result<DiskField> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    if n_quad < 3 {
        return Err(Error::InvalidParameter("need at least 3 nodes per axis".into()));
    }
    let c = disk.center;
    let h = disk.d / (n_quad - 1) as f64;
    let dz = obs[2] - c[2];
    if libm::fabs(dz) < h {
        return Err(Error::Domain("observation point lies on the disk plane".into()));
    }
    let ppw = 2.0 * PI / k / h;
    let xs: Vec<f64> = (0..n_quad).map(|i| -0.5 * disk.d + i as f64 * h).collect();
    let (ox, oy) = (obs[0] - c[0], obs[1] - c[1]);
    let r_in = 0.5 * disk.d - disk.eta;
    let mut acc = Complex64::new(0.0, 0.0);
    for &u in &xs {
        for &v in &xs {
            let rho = libm::sqrt(u * u + v * v);
            let m = if rho <= r_in { 1.0 } else { smoothstep((0.5 * disk.d - rho) / disk.eta) };
            if m == 0.0 {
                continue;
            }
            let (du, dv) = (ox - u, oy - v);
            let r = libm::sqrt(du * du + dv * dv + dz * dz);
            let ph = k * r;
            acc += Complex64::new(libm::cos(ph), libm::sin(ph)) * (m / (4.0 * PI * r));
        }
    }
    Ok(DiskField {
        value: acc * (h * h),
        points_per_wavelength: ppw,
        under_resolved: ppw < MIN_POINTS_PER_WAVELENGTH,
    })
}

/// `(i/2k) e^{ik|z-z0|} m(x, y, z0)`
pub fn leading_term(disk: &AntennaDisk, obs: [f64; 3], k: f64) -> Complex64 {
    let c = disk.center;
    let m = cutoff_m(disk, [obs[0], obs[1], c[2]]);
    let ph = k * libm::fabs(obs[2] - c[2]);
    Complex64::new(0.0, 1.0 / (2.0 * k)) * Complex64::new(libm::cos(ph), libm::sin(ph)) * m
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Shape("need at least two matching samples".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter("log-log fit needs positive samples".into()));
    }
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| libm::log(*v)).collect();
    let ly: Vec<f64> = ys.iter().map(|v| libm::log(*v)).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("abscissae are all equal".into()));
    }
    Ok(sxy / sxx)
}
