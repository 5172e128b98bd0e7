//! From raw frequency sweeps to one time trace per source.
//!
//! Steps per source: inverse transform to time, background subtraction,
//! propagation from the detector plane `x = a` to `x = ã`, choice of the
//! detector with the largest `|u(ã,0)|`, truncation around the main peak and
//! calibration. Delay-and-sum over all sources locates the target region.
//!
//! Lengths are in units of 0.3 m and times in ns, so the background speed is
//! one and a spatial shift equals a time shift.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::trace::{Sample, TimeTrace};

/// Speed of light in m/ns; one length unit.
pub const C0: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    /// Detector plane.
    pub a: f64,
    /// Plane the data are propagated to.
    pub a_tilde: f64,
    /// Rear end of the region of interest.
    pub b_tilde: f64,
    pub c0: f64,
    /// Distance between consecutive sources, m.
    pub source_step: f64,
    pub cf: f64,
    pub n_time: usize,
    pub t_end: f64,
    /// Instrument band in GHz.
    pub band_ghz: (f64, f64),
    /// Half width of the truncation window in samples.
    pub trunc_radius: usize,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            a: -2.5 / C0,
            a_tilde: -0.5 / C0,
            b_tilde: 1.4,
            c0: C0,
            source_step: 0.05,
            cf: 43.17,
            n_time: 1000,
            t_end: 20.0,
            band_ghz: (5.6, 9.0),
            trunc_radius: 30,
        }
    }
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if !(self.a < self.a_tilde && self.a_tilde < 0.0 && 0.0 < self.b_tilde) {
            return bad("geometry needs a < a_tilde < 0 < b_tilde");
        }
        if !(self.c0 > 0.0 && self.source_step > 0.0 && self.cf > 0.0 && self.t_end > 0.0) {
            return bad("c0, source_step, CF and T must be positive");
        }
        if self.n_time < 2 {
            return bad("n_time must be at least 2");
        }
        if !(self.band_ghz.0 > 0.0 && self.band_ghz.0 < self.band_ghz.1) {
            return bad("band must be a non-empty positive interval");
        }
        if self.trunc_radius == 0 {
            return bad("truncation radius must be at least 1");
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.n_time as f64
    }
}

/// Frequency sweep of one source: one row of complex values per detector.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSarRecord {
    pub source_index: usize,
    /// Detector offsets in m.
    pub detector_offsets: Vec<[f64; 2]>,
    /// GHz, strictly increasing.
    pub freqs: Vec<f64>,
    /// Row-major, `n_detectors x n_freqs`.
    pub values: Vec<Complex64>,
}

impl RawSarRecord {
    pub fn new(
        source_index: usize,
        detector_offsets: Vec<[f64; 2]>,
        freqs: Vec<f64>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if detector_offsets.is_empty() {
            return Err(Error::Input("record has no detectors".into()));
        }
        if values.len() != detector_offsets.len() * freqs.len() {
            return Err(Error::Shape("values do not match detectors x frequencies".into()));
        }
        if freqs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Input("frequencies must be strictly increasing".into()));
        }
        Ok(Self {
            source_index,
            detector_offsets,
            freqs,
            values,
        })
    }

    pub fn n_detectors(&self) -> usize {
        self.detector_offsets.len()
    }

    pub fn row(&self, d: usize) -> &[Complex64] {
        let nf = self.freqs.len();
        &self.values[d * nf..(d + 1) * nf]
    }
}

/// Dimensionless wavenumber `2π f / c0` (length unit c0 · 1 ns) for `f` in GHz.
pub fn wavenumber(f_ghz: f64) -> f64 {
    2.0 * PI * f_ghz
}

/// `F(t) = ∫ F̃(k) e^{-ikt} dk` over the band by the trapezoid rule, with the
/// dimensionless wavenumber `k = 2π f_GHz` (that is `2π f / c0` in units of
/// 0.3 m). One complex trace per detector on `t_n = n T / n_time`.
pub fn to_time_domain(rec: &RawSarRecord, geom: &GeometryConfig) -> Result<Vec<TimeTrace<Complex64>>> {
    geom.validate()?;
    if rec.freqs.len() < 2 {
        return Err(Error::InvalidParameter("frequency band is empty".into()));
    }
    let (lo, hi) = geom.band_ghz;
    if rec.freqs[0] < lo - 1e-9 || rec.freqs[rec.freqs.len() - 1] > hi + 1e-9 {
        return Err(Error::Input("frequencies outside the instrument band".into()));
    }
    let ks: Vec<f64> = rec.freqs.iter().map(|&f| wavenumber(f)).collect();
    let dt = geom.dt();
    (0..rec.n_detectors())
        .map(|d| {
            let row = rec.row(d);
            let samples = (0..geom.n_time)
                .map(|n| {
                    let t = n as f64 * dt;
                    let term = |j: usize| {
                        let ph = -ks[j] * t;
                        row[j] * Complex64::new(libm::cos(ph), libm::sin(ph))
                    };
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..ks.len() - 1 {
                        acc += (term(j) + term(j + 1)) * (0.5 * (ks[j + 1] - ks[j]));
                    }
                    acc
                })
                .collect();
            TimeTrace::new(samples, dt, 0.0)
        })
        .collect()
}

pub fn background_subtract<T: Sample>(meas: &TimeTrace<T>, reference: &TimeTrace<T>) -> Result<TimeTrace<T>> {
    if !meas.same_sampling(reference) {
        return Err(Error::Shape("measurement and reference sampled differently".into()));
    }
    let s = meas
        .samples()
        .iter()
        .zip(reference.samples())
        .map(|(&m, &r)| m - r)
        .collect();
    TimeTrace::new(s, meas.dt(), meas.t0())
}

/// `u(ã,t) = φ(t + ã - a)`, rounded to whole samples, zero-filled at the tail.
pub fn propagate<T: Sample>(phi: &TimeTrace<T>, a: f64, a_tilde: f64) -> Result<TimeTrace<T>> {
    if !(a <= a_tilde) {
        return Err(Error::InvalidParameter("propagation needs a <= a_tilde".into()));
    }
    let m = libm::round((a_tilde - a) / phi.dt()) as usize;
    let n = phi.len();
    if m >= n {
        return Err(Error::Domain(alloc::format!(
            "shift of {m} samples exceeds the trace length {n}"
        )));
    }
    let src = phi.samples();
    let s = (0..n).map(|i| if i + m < n { src[i + m] } else { T::default() }).collect();
    TimeTrace::new(s, phi.dt(), phi.t0())
}

/// Detector with the largest `|u(ã,0)|`; the lowest index wins ties.
pub fn select_optimal_detector<T: Sample>(traces: &[TimeTrace<T>]) -> Result<(usize, TimeTrace<T>)> {
    let first = traces.first().ok_or_else(|| Error::Input("no detector traces".into()))?;
    if traces.iter().any(|t| !t.same_sampling(first)) {
        return Err(Error::Shape("detector traces sampled differently".into()));
    }
    let mut best = 0;
    let mut bv = first.value_at(0.0).magnitude();
    for (i, t) in traces.iter().enumerate().skip(1) {
        let v = t.value_at(0.0).magnitude();
        if v > bv {
            bv = v;
            best = i;
        }
    }
    Ok((best, traces[best].clone()))
}

/// Zero everything farther than `radius` samples from the first maximum of |u|.
pub fn truncate<T: Sample>(trace: &TimeTrace<T>, radius: usize) -> Result<TimeTrace<T>> {
    if radius == 0 {
        return Err(Error::InvalidParameter("truncation radius must be at least 1".into()));
    }
    let c = trace.argmax_magnitude();
    let lo = c.saturating_sub(radius);
    let hi = c + radius;
    let s = trace
        .samples()
        .iter()
        .enumerate()
        .map(|(i, &v)| if i >= lo && i <= hi { v } else { T::default() })
        .collect();
    TimeTrace::new(s, trace.dt(), trace.t0())
}

pub fn calibrate<T: Sample>(trace: &TimeTrace<T>, cf: f64) -> Result<TimeTrace<T>> {
    if !(cf > 0.0) {
        return Err(Error::InvalidParameter("CF must be positive".into()));
    }
    Ok(trace.map(|v| v * cf))
}

/// Delay-and-sum image over (source, range) with the 95% cut applied.
#[derive(Debug, Clone, PartialEq)]
pub struct DasImage {
    /// Row-major, `n_sources x n_range`.
    pub values: Vec<f64>,
    pub n_sources: usize,
    pub n_range: usize,
    /// Dimensionless range step from the plane of the traces.
    pub range_step: f64,
    pub source_step: f64,
}

/// Fraction of the maximum kept by the cut.
pub const DAS_CUT: f64 = 0.95;

impl DasImage {
    pub fn get(&self, s: usize, l: usize) -> f64 {
        self.values[s * self.n_range + l]
    }

    /// Bounding box `(l1, l2, s1, s2)` of the non-zero cells: range indices
    /// first, then source indices. `None` for an all-zero image.
    pub fn support_box(&self) -> Option<(usize, usize, usize, usize)> {
        let mut b: Option<(usize, usize, usize, usize)> = None;
        for s in 0..self.n_sources {
            for l in 0..self.n_range {
                if self.get(s, l) != 0.0 {
                    b = Some(match b {
                        None => (l, l, s, s),
                        Some((l1, l2, s1, s2)) => (l1.min(l), l2.max(l), s1.min(s), s2.max(s)),
                    });
                }
            }
        }
        b
    }
}

/// Zero every cell below `frac` times the maximum.
pub fn threshold_cut(values: &mut [f64], frac: f64) {
    let m = values.iter().fold(0.0f64, |m, &v| m.max(v));
    for v in values.iter_mut() {
        if *v < frac * m {
            *v = 0.0;
        }
    }
}

/// Two-way delay backprojection of `|u_n|` onto the range grid
/// `y_l = l dt / 2`, `l < n_t / 2`, with nearest-sample lookup.
pub fn delay_and_sum<T: Sample>(per_source: &[TimeTrace<T>], geom: &GeometryConfig) -> Result<DasImage> {
    let ns = per_source.len();
    if ns < 2 {
        return Err(Error::DegenerateAperture { sources: ns });
    }
    let first = &per_source[0];
    if per_source.iter().any(|t| !t.same_sampling(first)) {
        return Err(Error::Shape("source traces sampled differently".into()));
    }
    let dt = first.dt();
    let nt = first.len();
    let nr = (nt / 2).max(1);
    let dy = 0.5 * dt;
    let dx = geom.source_step / geom.c0;
    let mags: Vec<Vec<f64>> = per_source
        .iter()
        .map(|t| t.samples().iter().map(|v| v.magnitude()).collect())
        .collect();
    let mut values = alloc::vec![0.0; ns * nr];
    for s in 0..ns {
        for l in 0..nr {
            let y = l as f64 * dy;
            let mut acc = 0.0;
            for (n, m) in mags.iter().enumerate() {
                let xo = (n as f64 - s as f64) * dx;
                let t = 2.0 * libm::sqrt(xo * xo + y * y);
                let k = libm::round((t - first.t0()) / dt);
                if k >= 0.0 && (k as usize) < nt {
                    acc += m[k as usize];
                }
            }
            values[s * nr + l] = acc;
        }
    }
    threshold_cut(&mut values, DAS_CUT);
    Ok(DasImage {
        values,
        n_sources: ns,
        n_range: nr,
        range_step: dy,
        source_step: geom.source_step,
    })
}
