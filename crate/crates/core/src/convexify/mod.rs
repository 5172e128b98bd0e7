//! Weighted least-squares formulation for `V = v_t`:
//!
//! ```text
//! S(V) = V_yy - 2 V_yt + 4 V_y(y,0) V = 0   in (0,b) x (0,T̃)
//! V(0,t) = q0,  V_y(0,t) = q1,  V_y(b,t) = 0
//! J(V) = ∫∫ S(V)^2 exp(-2λ(y + βt)) + γ |V|^2_{H^2}
//! ```
//!
//! and `p(y) = 4 V_y(y,0)` at the minimizer.
//!
//! The three boundary conditions are imposed exactly on the grid: row 0 holds
//! `q0`, rows 1 and `n_y - 1` follow from one-sided second-order stencils for
//! `V_y`. Only rows `2..=n_y-2` are free, and gradients vanish elsewhere.

mod descend;
mod metric;
mod operator;

pub use descend::{descend, descend_with, DescentOptions, DescentReport, HistoryEntry};
pub use metric::{BandCholesky, Metric};
pub use operator::{
    boundary_data_from_traces, convexity_gap, cost, extract_potential, gradient, h2_norm_sq,
    initial_guess, inner, nonlinear_operator, weight,
};

use crate::error::{Error, Result};
use crate::field::SpaceTimeField;
use crate::trace::TimeTrace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlemanParams {
    pub lambda: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Descent step.
    pub kappa: f64,
    /// Radius of the admissible ball in the discrete H² norm.
    pub m_ball: f64,
    pub theta_frac: f64,
}

impl Default for CarlemanParams {
    fn default() -> Self {
        Self {
            lambda: 2.25,
            beta: 0.33,
            gamma: 1e-10,
            kappa: 0.1,
            m_ball: 1e3,
            theta_frac: 0.25,
        }
    }
}

impl CarlemanParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.into()));
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be finite and non-negative");
        }
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return bad("beta must lie in (0, 1/2)");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return bad("kappa must lie in (0, 1)");
        }
        if !(self.m_ball > 0.0) {
            return bad("M must be positive");
        }
        if !(self.theta_frac > 0.0 && self.theta_frac < 1.0 / 3.0) {
            return bad("theta_frac must lie in (0, 1/3)");
        }
        Ok(())
    }
}

/// `q0 = f0'` and `q1 = f0'' + f1'` on a common time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub q0: TimeTrace,
    pub q1: TimeTrace,
}

impl BoundaryData {
    pub fn new(q0: TimeTrace, q1: TimeTrace) -> Result<Self> {
        if !q0.same_sampling(&q1) {
            return Err(Error::Shape("q0 and q1 sampled differently".into()));
        }
        Ok(Self { q0, q1 })
    }

    pub fn zeros(n_t: usize, h_t: f64) -> Result<Self> {
        Self::new(TimeTrace::zeros(n_t, h_t, 0.0)?, TimeTrace::zeros(n_t, h_t, 0.0)?)
    }

    /// Linear resampling onto `n_t` points with step `h_t` from `t = 0`.
    pub fn on_grid(&self, n_t: usize, h_t: f64) -> Result<Self> {
        Self::new(self.q0.resample(n_t, h_t, 0.0)?, self.q1.resample(n_t, h_t, 0.0)?)
    }

    pub fn len(&self) -> usize {
        self.q0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q0.is_empty()
    }
}

/// V together with the data it must match.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldV {
    field: SpaceTimeField,
    data: BoundaryData,
}

impl FieldV {
    /// Checks the grid and overwrites the constrained rows.
    pub fn new(field: SpaceTimeField, data: BoundaryData) -> Result<Self> {
        let mut v = Self::unconstrained(field, data)?;
        v.enforce_constraints();
        Ok(v)
    }

    /// Checks the grid only; the caller is responsible for the constraints.
    pub fn unconstrained(field: SpaceTimeField, data: BoundaryData) -> Result<Self> {
        if field.n_y() < 5 || field.n_t() < 5 {
            return Err(Error::Shape("V needs at least 5x5 nodes".into()));
        }
        if field.y0() != 0.0 || field.t0() != 0.0 {
            return Err(Error::Shape("V must live on [0,b] x [0,T]".into()));
        }
        if data.len() != field.n_t()
            || libm::fabs(data.q0.dt() - field.h_t()) > 1e-12 * field.h_t()
            || data.q0.t0() != 0.0
        {
            return Err(Error::Shape("boundary data do not match the t-grid".into()));
        }
        Ok(Self { field, data })
    }

    pub fn field(&self) -> &SpaceTimeField {
        &self.field
    }
    pub fn data(&self) -> &BoundaryData {
        &self.data
    }
    pub fn into_field(self) -> SpaceTimeField {
        self.field
    }

    pub fn n_y(&self) -> usize {
        self.field.n_y()
    }
    pub fn n_t(&self) -> usize {
        self.field.n_t()
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        self.field.values_mut()
    }

    /// Recompute rows 0, 1 and `n_y-1` from the data and the free rows.
    pub fn enforce_constraints(&mut self) {
        let (ny, nt, h) = (self.n_y(), self.n_t(), self.field.h_y());
        let q0 = self.data.q0.samples().to_vec();
        let q1 = self.data.q1.samples().to_vec();
        let v = self.field.values_mut();
        for n in 0..nt {
            v[n] = q0[n];
            v[nt + n] = (2.0 * h * q1[n] + 3.0 * q0[n] + v[2 * nt + n]) / 4.0;
            v[(ny - 1) * nt + n] = (4.0 * v[(ny - 2) * nt + n] - v[(ny - 3) * nt + n]) / 3.0;
        }
    }

    /// Largest violation of the three discrete boundary conditions.
    pub fn bc_residual(&self) -> f64 {
        let (ny, h) = (self.n_y(), self.field.h_y());
        let f = &self.field;
        let mut r = 0.0f64;
        for n in 0..self.n_t() {
            let q0 = self.data.q0.samples()[n];
            let q1 = self.data.q1.samples()[n];
            r = r.max(libm::fabs(f.get(0, n) - q0));
            let vy0 = (-3.0 * f.get(0, n) + 4.0 * f.get(1, n) - f.get(2, n)) / (2.0 * h);
            r = r.max(libm::fabs(vy0 - q1));
            let vyb = (3.0 * f.get(ny - 1, n) - 4.0 * f.get(ny - 2, n) + f.get(ny - 3, n)) / (2.0 * h);
            r = r.max(libm::fabs(vyb));
        }
        r
    }

    /// Same grid and bit-identical data.
    pub fn compatible(&self, other: &Self) -> bool {
        self.field.same_grid(&other.field) && self.data == other.data
    }
}
