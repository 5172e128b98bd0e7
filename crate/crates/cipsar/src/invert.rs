//! One trace in, one reconstructed profile out.

use cipsar_core::convexify::{
    boundary_data_from_traces, descend_with, extract_potential, initial_guess, BoundaryData, CarlemanParams,
    DescentOptions, DescentReport, FieldV,
};
use cipsar_core::medium::medium_from_potential;
use cipsar_core::{Error, MediumProfile, PotentialProfile, TimeTrace};

#[derive(Debug, Clone, PartialEq)]
pub struct InversionSettings {
    pub params: CarlemanParams,
    pub descent: DescentOptions,
    pub b: f64,
    pub t_tilde: f64,
    pub n_y: usize,
    pub n_t: usize,
    /// Nodes of the output profile on [0,1].
    pub n_x: usize,
    /// Margin of the reporting interval; `None` means `0.1 βb`.
    pub mu: Option<f64>,
}

impl InversionSettings {
    /// Upper end `2βb - μ` of the interval on which p is kept.
    pub fn reporting_limit(&self) -> f64 {
        let mu = self.mu.unwrap_or(0.1 * self.params.beta * self.b);
        2.0 * self.params.beta * self.b - mu
    }
}

#[derive(Debug, Clone)]
pub struct Inversion {
    pub initial: FieldV,
    pub report: DescentReport,
    /// `4 V_y(y,0)`, zero beyond the reporting interval.
    pub potential: PotentialProfile,
    pub medium: MediumProfile,
}

/// `q0, q1` from the background-subtracted trace `φ`, with `f1 = φ'`, on
/// the solver's time grid. `φ` is sampled onto that grid before any
/// differencing; differencing at the finer trace step amplifies noise.
pub fn boundary_data(phi: &TimeTrace, s: &InversionSettings) -> cipsar_core::Result<BoundaryData> {
    if phi.t_end() < s.t_tilde - 1e-9 {
        return Err(Error::Domain(format!(
            "trace ends at t = {} before T_tilde = {}",
            phi.t_end(),
            s.t_tilde
        )));
    }
    let phi = phi.resample(s.n_t, s.t_tilde / (s.n_t - 1) as f64, 0.0)?;
    boundary_data_from_traces(&phi, &phi.derivative()?)
}

pub fn invert_trace(phi: &TimeTrace, s: &InversionSettings) -> cipsar_core::Result<Inversion> {
    let q = boundary_data(phi, s)?;
    let v0 = initial_guess(&q, s.b, s.n_y)?;
    invert_from(&v0, s)
}

/// Descent from a given starting field.
pub fn invert_from(v0: &FieldV, s: &InversionSettings) -> cipsar_core::Result<Inversion> {
    let report = descend_with(v0, &s.params, &s.descent)?;
    let potential = extract_potential(&report.v, s.reporting_limit())?;
    let medium = medium_from_potential(&potential, 0.0, 1.0, s.n_x)?;
    Ok(Inversion {
        initial: v0.clone(),
        report,
        potential,
        medium,
    })
}
