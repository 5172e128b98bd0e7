//! Uniformly sampled time series, real or complex.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar types a trace can carry.
pub trait Sample:
    Copy + Default + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
    fn is_finite_sample(self) -> bool;
}

impl Sample for f64 {
    fn magnitude(self) -> f64 {
        libm::fabs(self)
    }
    fn is_finite_sample(self) -> bool {
        self.is_finite()
    }
}

impl Sample for Complex64 {
    fn magnitude(self) -> f64 {
        libm::hypot(self.re, self.im)
    }
    fn is_finite_sample(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeTrace<T = f64> {
    samples: Vec<T>,
    dt: f64,
    t0: f64,
}

impl<T: Sample> TimeTrace<T> {
    pub fn new(samples: Vec<T>, dt: f64, t0: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("dt must be positive, got {dt}")));
        }
        if samples.len() < 2 {
            return Err(Error::Shape(alloc::format!(
                "a trace needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidParameter("t0 must be finite".into()));
        }
        Ok(Self { samples, dt, t0 })
    }

    pub fn zeros(n: usize, dt: f64, t0: f64) -> Result<Self> {
        Self::new(alloc::vec![T::default(); n], dt, t0)
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [T] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.samples.len() - 1)
    }

    /// Same length, step and origin (origin to a relative 1e-9 of dt).
    pub fn same_sampling<U: Sample>(&self, other: &TimeTrace<U>) -> bool {
        self.len() == other.len()
            && libm::fabs(self.dt - other.dt) <= 1e-12 * self.dt
            && libm::fabs(self.t0 - other.t0) <= 1e-9 * self.dt
    }

    /// Linear interpolation; zero outside the sampled interval.
    pub fn value_at(&self, t: f64) -> T {
        let s = (t - self.t0) / self.dt;
        let n = self.samples.len();
        if !(s >= 0.0) || s > (n - 1) as f64 {
            return T::default();
        }
        let i = libm::floor(s) as usize;
        if i >= n - 1 {
            return self.samples[n - 1];
        }
        let f = s - i as f64;
        self.samples[i] * (1.0 - f) + self.samples[i + 1] * f
    }

    /// Resample onto `n` points starting at `t0` with step `dt`.
    pub fn resample(&self, n: usize, dt: f64, t0: f64) -> Result<Self> {
        let s = (0..n).map(|i| self.value_at(t0 + i as f64 * dt)).collect();
        Self::new(s, dt, t0)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            samples: self.samples.iter().map(|&v| f(v)).collect(),
            dt: self.dt,
            t0: self.t0,
        }
    }

    /// Index of the first maximum of |u|.
    pub fn argmax_magnitude(&self) -> usize {
        let mut best = 0;
        let mut bv = self.samples[0].magnitude();
        for (i, v) in self.samples.iter().enumerate().skip(1) {
            let m = v.magnitude();
            if m > bv {
                bv = m;
                best = i;
            }
        }
        best
    }
}

impl TimeTrace<Complex64> {
    pub fn re(&self) -> TimeTrace<f64> {
        TimeTrace {
            samples: self.samples.iter().map(|c| c.re).collect(),
            dt: self.dt,
            t0: self.t0,
        }
    }

    pub fn abs(&self) -> TimeTrace<f64> {
        TimeTrace {
            samples: self.samples.iter().map(|c| c.magnitude()).collect(),
            dt: self.dt,
            t0: self.t0,
        }
    }
}

impl TimeTrace<f64> {
    pub fn to_complex(&self) -> TimeTrace<Complex64> {
        TimeTrace {
            samples: self.samples.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
            dt: self.dt,
            t0: self.t0,
        }
    }

    /// First derivative, centered inside and second-order one-sided at the ends.
    pub fn derivative(&self) -> Result<Self> {
        let n = self.samples.len();
        if n < 3 {
            return Err(Error::Shape("derivative needs at least 3 samples".into()));
        }
        Ok(Self {
            samples: crate::interp::diff1(&self.samples, self.dt),
            dt: self.dt,
            t0: self.t0,
        })
    }

    /// L2 norm with the sample spacing as weight.
    pub fn l2(&self) -> f64 {
        libm::sqrt(self.samples.iter().map(|v| v * v).sum::<f64>() * self.dt)
    }
}
