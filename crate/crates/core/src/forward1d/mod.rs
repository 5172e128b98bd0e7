//! Synthetic data for the 1D problem `c(x) u_tt = u_xx`, `u(x,0) = 0`,
//! `u_t(x,0) = δ(x)`, observed at `x = 0`.
//!
//! Two independent routes: an explicit finite-difference solve in x, and the
//! Volterra integral equation for `w(y,t) = u(x(y),t) c^(1/4)` in travel-time
//! coordinates. At the source `w(0,t) = u(0,t)`, so the two traces can be
//! compared directly.

mod fd;
mod volterra;

pub use fd::{solve_wave_fd, solve_wave_fd_with, FdConfig, FdSolution, Source};
pub use volterra::{
    heaviside_w, picard_step, solve_w_volterra, solve_w_volterra_report, trace_from_w, v_from_w,
    VolterraSolution,
};
