//! Picard iteration for
//! `w(y,t) = H(t-|y|)/2 + 1/2 ∫∫_{K(y,t)} p(ξ) w(ξ,τ) dτ dξ`,
//! `K(y,t) = {|ξ| ≤ τ ≤ t - |y-ξ|}`.
//!
//! In the rotated coordinates `σ = τ - ξ`, `ρ = τ + ξ` the cone is the
//! rectangle `[0, t-y] x [0, t+y]`, so the integral at a node is the integral
//! at two earlier nodes minus their overlap plus one diamond cell. Cells that
//! straddle the line `τ = |ξ|` are clipped to rectangles in (σ, ρ) and
//! integrated exactly for piecewise-linear p; the cell value of w is the mean
//! of its four corners.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::SpaceTimeField;
use crate::medium::PotentialProfile;
use crate::trace::TimeTrace;

#[derive(Debug, Clone)]
pub struct VolterraSolution {
    pub w: SpaceTimeField,
    pub iterations: usize,
    /// Sup-norm change of the last iterate.
    pub residual: f64,
}

const TOL: f64 = 1e-12;

/// Node layout: columns `Y = -n_left ..= n_right`, rows `n = 0 ..= n_top`,
/// all in units of `h`.
#[derive(Debug, Clone, Copy)]
struct Grid {
    n_left: usize,
    n_right: usize,
    n_t: usize,
    h: f64,
}

impl Grid {
    fn new(h: f64, b: f64, t_tilde: f64) -> Result<Self> {
        if !(h > 0.0 && b > 0.0 && t_tilde > 0.0) {
            return Err(Error::InvalidParameter("b, t_tilde and h must be positive".into()));
        }
        let steps = |x: f64| libm::ceil(x / h - 1e-9) as usize;
        let n_top = steps(t_tilde);
        Ok(Self {
            n_left: n_top,
            n_right: steps(b.max(t_tilde)),
            n_t: n_top + 1,
            h,
        })
    }

    fn of_field(w: &SpaceTimeField) -> Result<Self> {
        let h = w.h_y();
        if libm::fabs(w.h_t() - h) > 1e-12 * h || w.t0() != 0.0 {
            return Err(Error::Shape("Volterra grid needs h_t = h_y and t0 = 0".into()));
        }
        let n_left = libm::round(-w.y0() / h) as usize;
        if libm::fabs(w.y0() + n_left as f64 * h) > 1e-9 * h || n_left >= w.n_y() {
            return Err(Error::Shape("Volterra grid must start at y = -t_tilde".into()));
        }
        Ok(Self {
            n_left,
            n_right: w.n_y() - 1 - n_left,
            n_t: w.n_t(),
            h,
        })
    }

    fn n_y(&self) -> usize {
        self.n_left + self.n_right + 1
    }

    fn field(&self, values: Vec<f64>) -> Result<SpaceTimeField> {
        SpaceTimeField::from_values(
            values,
            self.n_y(),
            self.n_t,
            self.h,
            self.h,
            -(self.n_left as f64) * self.h,
            0.0,
        )
    }
}

/// `H(t-|y|)/2`, with the value 1/2 on the characteristic lines.
pub fn heaviside_w(h: f64, b: f64, t_tilde: f64) -> Result<SpaceTimeField> {
    let g = Grid::new(h, b, t_tilde)?;
    let mut vals = alloc::vec![0.0; g.n_y() * g.n_t];
    for j in 0..g.n_y() {
        let y = j as i64 - g.n_left as i64;
        for n in 0..g.n_t {
            if n as i64 >= y.abs() {
                vals[j * g.n_t + n] = 0.5;
            }
        }
    }
    g.field(vals)
}

/// `∫∫ p dξ dτ` over `[σa,σb] x [ρa,ρb]` (units of h). The integrand
/// `p(ξ)·len(ξ)` is quadratic between multiples of h/2, so Simpson is exact.
fn region_integral(p: &PotentialProfile, h: f64, sa: i64, sb: i64, ra: i64, rb: i64) -> f64 {
    let len = |xi: f64| -> f64 {
        let lo = (sa as f64 * h + xi).max(ra as f64 * h - xi);
        let hi = (sb as f64 * h + xi).min(rb as f64 * h - xi);
        (hi - lo).max(0.0)
    };
    let f = |xi: f64| p.value_at(xi) * len(xi);
    let half = 0.5 * h;
    let mut acc = 0.0;
    for u in (ra - sb)..(rb - sa) {
        let a = u as f64 * half;
        let b = a + half;
        acc += half / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
    }
    acc
}

/// One Jacobi sweep `w ← H/2 + K[w_prev]/2`.
pub fn picard_step(p: &PotentialProfile, w_prev: &SpaceTimeField) -> Result<SpaceTimeField> {
    let g = Grid::of_field(w_prev)?;
    if libm::fabs(p.h_y() - g.h) > 1e-12 * g.h {
        return Err(Error::Shape("potential and Volterra grid spacing differ".into()));
    }
    let (ny, nt, h) = (g.n_y(), g.n_t, g.h);
    let left = g.n_left as i64;
    let prev = w_prev.values();
    let pn = |y: i64| -> f64 {
        if y < 0 || y as usize >= p.len() {
            0.0
        } else {
            p.samples()[y as usize]
        }
    };
    // w at integer-rotated coordinates; σ = 0 or ρ = 0 is the front
    let w_at = |s: i64, r: i64| -> f64 {
        if s <= 0 || r <= 0 {
            return 0.5;
        }
        let y = (r - s) / 2;
        let n = ((r + s) / 2) as usize;
        let j = (y + left) as usize;
        prev[j * nt + n]
    };
    let idx = |y: i64, n: i64| -> Option<usize> {
        let j = y + left;
        if j < 0 || j as usize >= ny || n < 0 || n as usize >= nt {
            None
        } else {
            Some(j as usize * nt + n as usize)
        }
    };

    let mut big_i = alloc::vec![0.0; ny * nt];
    let mut w = alloc::vec![0.0; ny * nt];
    for n in 0..nt as i64 {
        for j in 0..ny as i64 {
            let y = j - left;
            let k = j as usize * nt + n as usize;
            if n < y.abs() {
                continue;
            }
            if n == y.abs() {
                w[k] = 0.5;
                continue;
            }
            let get = |ix: Option<usize>, arr: &[f64]| ix.map_or(0.0, |i| arr[i]);
            let mut val = get(idx(y - 1, n - 1), &big_i) + get(idx(y + 1, n - 1), &big_i)
                - get(idx(y, n - 2), &big_i);
            let sc = n - 1 - y;
            let rc = n - 1 + y;
            let (sa, sb, ra, rb) = ((sc - 1).max(0), sc + 1, (rc - 1).max(0), rc + 1);
            let pint = if sa == sc - 1 && ra == rc - 1 {
                2.0 * h * h * (2.0 / 3.0 * pn(y) + (pn(y - 1) + pn(y + 1)) / 6.0)
            } else {
                region_integral(p, h, sa, sb, ra, rb)
            };
            if pint != 0.0 {
                let wbar = 0.25 * (w_at(sa, ra) + w_at(sa, rb) + w_at(sb, ra) + w_at(sb, rb));
                val += pint * wbar;
            }
            big_i[k] = val;
            w[k] = 0.5 + 0.5 * val;
        }
    }
    g.field(w)
}

/// Picard iteration from `H/2` until the sup-norm change drops below 1e-12.
pub fn solve_w_volterra_report(
    p: &PotentialProfile,
    b: f64,
    t_tilde: f64,
    n_iter: usize,
) -> Result<VolterraSolution> {
    if t_tilde < 2.0 * p.support().min(p.b()) - 1e-9 {
        return Err(Error::Domain(alloc::format!(
            "t_tilde = {} is shorter than twice the potential support",
            t_tilde
        )));
    }
    let mut w = heaviside_w(p.h_y(), b, t_tilde)?;
    let mut residual = f64::INFINITY;
    for it in 1..=n_iter {
        let next = picard_step(p, &w)?;
        residual = next
            .values()
            .iter()
            .zip(w.values())
            .fold(0.0f64, |m, (a, b)| m.max(libm::fabs(a - b)));
        w = next;
        if !residual.is_finite() {
            break;
        }
        if residual < TOL {
            return Ok(VolterraSolution {
                w,
                iterations: it,
                residual,
            });
        }
    }
    Err(Error::Divergence {
        iterations: n_iter,
        residual,
    })
}

pub fn solve_w_volterra(
    p: &PotentialProfile,
    b: f64,
    t_tilde: f64,
    n_iter: usize,
) -> Result<SpaceTimeField> {
    solve_w_volterra_report(p, b, t_tilde, n_iter).map(|s| s.w)
}

/// `w(0,t)`, which equals `u(0,t)`.
pub fn trace_from_w(w: &SpaceTimeField) -> Result<TimeTrace> {
    let g = Grid::of_field(w)?;
    TimeTrace::new(w.row(g.n_left).to_vec(), w.h_t(), 0.0)
}

/// `v(y,t) = w(y, t+y)` on `[0,b] x [0,t_tilde]`, same steps as `w`.
pub fn v_from_w(w: &SpaceTimeField, b: f64, t_tilde: f64) -> Result<SpaceTimeField> {
    let g = Grid::of_field(w)?;
    let h = g.h;
    let n_y = libm::round(b / h) as usize + 1;
    let n_t = libm::round(t_tilde / h) as usize + 1;
    if n_y > g.n_right + 1 {
        return Err(Error::Domain("b exceeds the stored y range".into()));
    }
    let mut out = SpaceTimeField::zeros(n_y, n_t, h, h, 0.0, 0.0)?;
    for i in 0..n_y {
        let y = i as f64 * h;
        for n in 0..n_t {
            let t = n as f64 * h + y;
            let v = w.interp_t(g.n_left + i, t).ok_or_else(|| {
                Error::Domain(alloc::format!("w needed at t = {} beyond the stored range", t))
            })?;
            out.set(i, n, v);
        }
    }
    Ok(out)
}
