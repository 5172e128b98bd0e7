//! Numerical core for radar slant-range imaging through a 1D coefficient
//! inverse problem.
//!
//! Each source position yields one time trace. The trace is turned into
//! boundary data for a nonlinear hyperbolic problem, which is solved by
//! minimizing an exponentially weighted least-squares functional. The
//! recovered potential is mapped back to a dielectric profile and the
//! profiles are stacked into a 2D image.
//!
//! The crate is `no_std` with `alloc`. File formats, configuration and the
//! command line live in the companion `cipsar` crate.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod convexify;
pub mod error;
pub mod field;
pub mod forward1d;
pub mod incidentwave;
pub mod interp;
pub mod medium;
pub mod preprocess;
pub mod slantimage;
pub mod trace;

pub use error::{Error, Result};
pub use field::SpaceTimeField;
pub use medium::{MediumProfile, PotentialProfile, TravelTimeMap};
pub use trace::TimeTrace;
