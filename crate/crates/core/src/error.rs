//! Error type shared by every module.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Medium samples below one, non-finite, or not unity outside (0,1).
    InvalidMedium(String),
    /// Second differences of the medium are too large for the grid.
    Resolution { roughness: f64, threshold: f64 },
    /// Q left the positive half-line while integrating the potential.
    NonPhysicalPotential { y: f64, q: f64 },
    /// Time step violates the leapfrog stability bound.
    Stability { dt: f64, bound: f64 },
    /// Fixed-point iteration did not settle.
    Divergence { iterations: usize, residual: f64 },
    /// Step size kept increasing the cost.
    StepTooLarge { kappa: f64, iteration: usize },
    /// A request reaches outside the sampled range.
    Domain(String),
    /// Mismatched lengths or grids.
    Shape(String),
    /// Parameter outside its admissible set.
    InvalidParameter(String),
    /// Empty or otherwise unusable input collection.
    Input(String),
    DegenerateAperture { sources: usize },
    DegenerateSupport(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMedium(m) => write!(f, "invalid medium: {m}"),
            Error::Resolution {
                roughness,
                threshold,
            } => write!(
                f,
                "medium under-resolved: relative roughness {roughness:.3e} exceeds {threshold:.3e}"
            ),
            Error::NonPhysicalPotential { y, q } => {
                write!(f, "non-physical potential: Q = {q:.3e} at y = {y:.4}")
            }
            Error::Stability { dt, bound } => {
                write!(f, "unstable time step {dt:.3e}, bound is {bound:.3e}")
            }
            Error::Divergence {
                iterations,
                residual,
            } => write!(
                f,
                "no convergence after {iterations} iterations (last change {residual:.3e})"
            ),
            Error::StepTooLarge { kappa, iteration } => write!(
                f,
                "cost increased repeatedly at iteration {iteration} with kappa = {kappa:.3e}; use a smaller kappa"
            ),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Shape(m) => write!(f, "shape error: {m}"),
            Error::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            Error::Input(m) => write!(f, "input error: {m}"),
            Error::DegenerateAperture { sources } => {
                write!(f, "delay-and-sum needs at least 2 sources, got {sources}")
            }
            Error::DegenerateSupport(m) => write!(f, "degenerate support: {m}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
