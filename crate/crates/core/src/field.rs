//! Real fields on a uniform (y, t) grid, stored row-major with t fastest.

use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    values: Vec<f64>,
    n_y: usize,
    n_t: usize,
    h_y: f64,
    h_t: f64,
    y0: f64,
    t0: f64,
}

impl SpaceTimeField {
    pub fn zeros(n_y: usize, n_t: usize, h_y: f64, h_t: f64, y0: f64, t0: f64) -> Result<Self> {
        Self::from_values(alloc::vec![0.0; n_y * n_t], n_y, n_t, h_y, h_t, y0, t0)
    }

    pub fn from_values(
        values: Vec<f64>,
        n_y: usize,
        n_t: usize,
        h_y: f64,
        h_t: f64,
        y0: f64,
        t0: f64,
    ) -> Result<Self> {
        if !(h_y > 0.0 && h_t > 0.0) {
            return Err(Error::InvalidParameter("grid steps must be positive".into()));
        }
        if n_y < 2 || n_t < 2 {
            return Err(Error::Shape("field needs at least 2x2 nodes".into()));
        }
        if values.len() != n_y * n_t {
            return Err(Error::Shape(alloc::format!(
                "{} values for a {}x{} grid",
                values.len(),
                n_y,
                n_t
            )));
        }
        Ok(Self {
            values,
            n_y,
            n_t,
            h_y,
            h_t,
            y0,
            t0,
        })
    }

    /// Field on the rectangle `[0,b] x [0,t_tilde]`.
    pub fn on_rectangle(n_y: usize, n_t: usize, b: f64, t_tilde: f64) -> Result<Self> {
        if n_y < 2 || n_t < 2 {
            return Err(Error::Shape("field needs at least 2x2 nodes".into()));
        }
        Self::zeros(
            n_y,
            n_t,
            b / (n_y - 1) as f64,
            t_tilde / (n_t - 1) as f64,
            0.0,
            0.0,
        )
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }
    pub fn n_t(&self) -> usize {
        self.n_t
    }
    pub fn h_y(&self) -> f64 {
        self.h_y
    }
    pub fn h_t(&self) -> f64 {
        self.h_t
    }
    pub fn y0(&self) -> f64 {
        self.y0
    }
    pub fn t0(&self) -> f64 {
        self.t0
    }
    /// Last y node.
    pub fn b(&self) -> f64 {
        self.y0 + (self.n_y - 1) as f64 * self.h_y
    }
    /// Last t node.
    pub fn t_tilde(&self) -> f64 {
        self.t0 + (self.n_t - 1) as f64 * self.h_t
    }
    pub fn y(&self, i: usize) -> f64 {
        self.y0 + i as f64 * self.h_y
    }
    pub fn t(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.h_t
    }

    #[inline]
    pub fn get(&self, i: usize, n: usize) -> f64 {
        self.values[i * self.n_t + n]
    }

    #[inline]
    pub fn set(&mut self, i: usize, n: usize, v: f64) {
        self.values[i * self.n_t + n] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_t..(i + 1) * self.n_t]
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.n_y == other.n_y
            && self.n_t == other.n_t
            && self.h_y == other.h_y
            && self.h_t == other.h_t
            && self.y0 == other.y0
            && self.t0 == other.t0
    }

    /// Largest absolute entry.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
    }

    /// Linear interpolation in t along column `i`; `None` outside the range.
    pub fn interp_t(&self, i: usize, t: f64) -> Option<f64> {
        let s = (t - self.t0) / self.h_t;
        let last = (self.n_t - 1) as f64;
        if s < -1e-9 || s > last + 1e-9 {
            return None;
        }
        let s = s.clamp(0.0, last);
        let n = libm::floor(s) as usize;
        if n >= self.n_t - 1 {
            return Some(self.get(i, self.n_t - 1));
        }
        let f = s - n as f64;
        Some(self.get(i, n) * (1.0 - f) + self.get(i, n + 1) * f)
    }
}
