use alloc::vec::Vec;

use super::metric::Metric;
use super::operator::{cost, gradient, h2_norm_sq, inner};
use super::{CarlemanParams, FieldV};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    pub n_max: usize,
    /// Relative tolerance on the estimated distance to the minimizer.
    pub tol: f64,
    /// Halve κ and restart from the best iterate instead of failing.
    pub auto_halve: bool,
    pub min_kappa: f64,
    /// Number of recent step ratios used to estimate the contraction factor.
    pub window: usize,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            n_max: 20_000,
            tol: 1e-8,
            auto_halve: true,
            min_kappa: 1e-4,
            window: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryEntry {
    pub iter: usize,
    pub cost: f64,
    pub step_norm: f64,
}

#[derive(Debug, Clone)]
pub struct DescentReport {
    pub v: FieldV,
    /// Entry 0 is the initial guess with step norm 0.
    pub history: Vec<HistoryEntry>,
    /// `|V(n+1) - V(n)| / |V(n) - V(n-1)|` per iteration, starting at the second.
    pub ratios: Vec<f64>,
    pub kappa: f64,
    pub halvings: usize,
    pub converged: bool,
    /// Some iterate left the ball of radius M.
    pub ball_exceeded: bool,
    /// Largest H² norm seen.
    pub max_norm: f64,
}

const MAX_INCREASES: usize = 5;

/// Fixed-step descent `V <- V - κ P^{-1} J'(V)` with the default options.
pub fn descend(v0: &FieldV, params: &CarlemanParams, n_max: usize, tol: f64) -> Result<DescentReport> {
    let opts = DescentOptions {
        n_max,
        tol,
        ..DescentOptions::default()
    };
    descend_with(v0, params, &opts)
}

/// Steps are measured in the metric norm `|s|_P`. The run stops once the
/// a-posteriori bound `θ/(1-θ)|s|`, with θ the largest recent step ratio,
/// drops below `tol (1 + |V0|_P)`.
pub fn descend_with(v0: &FieldV, params: &CarlemanParams, opts: &DescentOptions) -> Result<DescentReport> {
    params.validate()?;
    if !(opts.tol > 0.0) || opts.window == 0 {
        return Err(Error::InvalidParameter("tol and window must be positive".into()));
    }
    let metric = Metric::assemble(v0.field(), params)?;
    let scale = 1.0 + libm::sqrt(metric.norm_sq(v0.field()));
    let (ny, nt) = (v0.n_y(), v0.n_t());

    let mut v = v0.clone();
    let mut j = cost(&v, params);
    let mut best = (j, v.clone());
    let mut kappa = params.kappa;
    let mut history = alloc::vec![HistoryEntry {
        iter: 0,
        cost: j,
        step_norm: 0.0
    }];
    let mut ratios = Vec::new();
    let mut recent: Vec<f64> = Vec::new();
    let mut prev_step: Option<f64> = None;
    let mut increases = 0;
    let mut halvings = 0;
    let mut converged = j == 0.0;
    let mut max_norm = libm::sqrt(h2_norm_sq(v.field()));
    let mut ball_exceeded = max_norm > params.m_ball;

    let mut it = 0;
    while !converged && it < opts.n_max {
        it += 1;
        let g = gradient(&v, params);
        let d = metric.apply_inverse(&g)?;
        let step = kappa * libm::sqrt(inner(&d, &g).max(0.0));
        if step == 0.0 {
            converged = true;
            break;
        }
        {
            let vals = v.values_mut();
            for (x, dx) in vals[2 * nt..(ny - 1) * nt].iter_mut().zip(&d.values()[2 * nt..(ny - 1) * nt]) {
                *x -= kappa * dx;
            }
        }
        v.enforce_constraints();
        let j_new = cost(&v, params);
        history.push(HistoryEntry {
            iter: it,
            cost: j_new,
            step_norm: step,
        });

        increases = if j_new > j { increases + 1 } else { 0 };
        if !j_new.is_finite() || increases >= MAX_INCREASES {
            if opts.auto_halve && kappa / 2.0 >= opts.min_kappa {
                kappa /= 2.0;
                halvings += 1;
                v = best.1.clone();
                j = best.0;
                increases = 0;
                prev_step = None;
                recent.clear();
                continue;
            }
            return Err(Error::StepTooLarge { kappa, iteration: it });
        }
        j = j_new;
        if j < best.0 {
            best = (j, v.clone());
        }

        let norm = libm::sqrt(h2_norm_sq(v.field()));
        max_norm = max_norm.max(norm);
        ball_exceeded |= norm > params.m_ball;

        if let Some(ps) = prev_step {
            let r = step / ps;
            ratios.push(r);
            recent.push(r);
            if recent.len() > opts.window {
                recent.remove(0);
            }
        }
        prev_step = Some(step);
        if recent.len() == opts.window {
            let theta = recent.iter().fold(0.0f64, |m, &r| m.max(r));
            if theta < 1.0 && theta / (1.0 - theta) * step < opts.tol * scale {
                converged = true;
            }
        }
    }
    Ok(DescentReport {
        v,
        history,
        ratios,
        kappa,
        halvings,
        converged,
        ball_exceeded,
        max_norm,
    })
}
