use alloc::vec::Vec;

use super::{BoundaryData, CarlemanParams, FieldV};
use crate::error::{Error, Result};
use crate::field::SpaceTimeField;
use crate::interp::{diff1, diff2};
use crate::medium::PotentialProfile;
use crate::trace::TimeTrace;

/// A linear functional of V: up to 9 `(i, n, coefficient)` terms.
#[derive(Clone, Copy)]
pub(crate) struct Row {
    pub terms: [(usize, usize, f64); 9],
    pub len: usize,
}

impl Row {
    fn new() -> Self {
        Self {
            terms: [(0, 0, 0.0); 9],
            len: 0,
        }
    }
    fn push(&mut self, i: usize, n: usize, c: f64) {
        self.terms[self.len] = (i, n, c);
        self.len += 1;
    }
    pub fn terms(&self) -> &[(usize, usize, f64)] {
        &self.terms[..self.len]
    }
    pub fn eval(&self, v: &[f64], nt: usize) -> f64 {
        self.terms().iter().map(|&(i, n, c)| c * v[i * nt + n]).sum()
    }
}

/// Time stencil for `d/dt` at row `n`: centered inside, one-sided at the ends.
fn dt_stencil(n: usize, nt: usize, ht: f64) -> [(usize, f64); 3] {
    let s = 1.0 / (2.0 * ht);
    if n == 0 {
        [(0, -3.0 * s), (1, 4.0 * s), (2, -s)]
    } else if n == nt - 1 {
        [(n, 3.0 * s), (n - 1, -4.0 * s), (n - 2, s)]
    } else {
        [(n + 1, s), (n - 1, -s), (n, 0.0)]
    }
}

/// Linear part `V_yy - 2 V_yt` at interior row `i`, time `n`.
pub(crate) fn linear_row(i: usize, n: usize, nt: usize, hy: f64, ht: f64) -> Row {
    let mut r = Row::new();
    let a = 1.0 / (hy * hy);
    r.push(i + 1, n, a);
    r.push(i, n, -2.0 * a);
    r.push(i - 1, n, a);
    let d = 1.0 / (2.0 * hy);
    for (m, c) in dt_stencil(n, nt, ht) {
        if c != 0.0 {
            r.push(i + 1, m, -2.0 * c * d);
            r.push(i - 1, m, 2.0 * c * d);
        }
    }
    r
}

/// Visit every squared term of the discrete H² norm with its row.
pub(crate) fn for_each_penalty_row(ny: usize, nt: usize, hy: f64, ht: f64, mut f: impl FnMut(&Row)) {
    let one = |terms: &[(usize, usize, f64)]| {
        let mut r = Row::new();
        for &(i, n, c) in terms {
            r.push(i, n, c);
        }
        r
    };
    let (iy, it) = (1.0 / hy, 1.0 / ht);
    let (iyy, itt, iyt) = (iy * iy, it * it, iy * it);
    for i in 0..ny {
        for n in 0..nt {
            f(&one(&[(i, n, 1.0)]));
            if i + 1 < ny {
                f(&one(&[(i + 1, n, iy), (i, n, -iy)]));
            }
            if n + 1 < nt {
                f(&one(&[(i, n + 1, it), (i, n, -it)]));
            }
            if i >= 1 && i + 1 < ny {
                f(&one(&[(i + 1, n, iyy), (i, n, -2.0 * iyy), (i - 1, n, iyy)]));
            }
            if n >= 1 && n + 1 < nt {
                f(&one(&[(i, n + 1, itt), (i, n, -2.0 * itt), (i, n - 1, itt)]));
            }
            if i + 1 < ny && n + 1 < nt {
                f(&one(&[
                    (i + 1, n + 1, iyt),
                    (i + 1, n, -iyt),
                    (i, n + 1, -iyt),
                    (i, n, iyt),
                ]));
            }
        }
    }
}

/// `ψ_λ(y,t) = exp(-2λ(y + βt))`
pub fn weight(lambda: f64, beta: f64, y: f64, t: f64) -> f64 {
    libm::exp(-2.0 * lambda * (y + beta * t))
}

/// Quadrature weight times ψ for the residual at interior row `i`, time `n`.
pub(crate) fn residual_weight(p: &CarlemanParams, f: &SpaceTimeField, i: usize, n: usize) -> f64 {
    let (ny, nt) = (f.n_y(), f.n_t());
    let wy = if i == 1 || i == ny - 2 { 0.5 } else { 1.0 };
    let wt = if n == 0 || n == nt - 1 { 0.5 } else { 1.0 };
    wy * wt * f.h_y() * f.h_t() * weight(p.lambda, p.beta, f.y(i), f.t(n))
}

/// `V_y(y_i, 0)` by the centered difference in y.
fn trace_vy0(v: &[f64], i: usize, nt: usize, hy: f64) -> f64 {
    (v[(i + 1) * nt] - v[(i - 1) * nt]) / (2.0 * hy)
}

/// `S(V)` on rows `1..=n_y-2`; rows 0 and `n_y-1` are left at zero.
pub fn nonlinear_operator(v: &FieldV) -> SpaceTimeField {
    let f = v.field();
    let (ny, nt, hy, ht) = (f.n_y(), f.n_t(), f.h_y(), f.h_t());
    let vals = f.values();
    let mut out = SpaceTimeField::zeros(ny, nt, hy, ht, f.y0(), f.t0()).expect("grid already validated");
    for i in 1..ny - 1 {
        let tr = trace_vy0(vals, i, nt, hy);
        for n in 0..nt {
            let s = linear_row(i, n, nt, hy, ht).eval(vals, nt) + 4.0 * tr * vals[i * nt + n];
            out.set(i, n, s);
        }
    }
    out
}

/// Squared discrete H² norm of a bare field.
pub fn h2_norm_sq(f: &SpaceTimeField) -> f64 {
    let (nt, vals) = (f.n_t(), f.values());
    let mut acc = 0.0;
    for_each_penalty_row(f.n_y(), nt, f.h_y(), f.h_t(), |r| {
        let x = r.eval(vals, nt);
        acc += x * x;
    });
    acc * f.h_y() * f.h_t()
}

pub fn cost(v: &FieldV, params: &CarlemanParams) -> f64 {
    let f = v.field();
    let s = nonlinear_operator(v);
    let mut acc = 0.0;
    for i in 1..f.n_y() - 1 {
        for n in 0..f.n_t() {
            let x = s.get(i, n);
            acc += residual_weight(params, f, i, n) * x * x;
        }
    }
    acc + params.gamma * h2_norm_sq(f)
}

/// Gradient with respect to all nodes, before the constraint chain rule.
fn full_gradient(v: &FieldV, params: &CarlemanParams) -> Vec<f64> {
    let f = v.field();
    let (ny, nt, hy, ht) = (f.n_y(), f.n_t(), f.h_y(), f.h_t());
    let vals = f.values();
    let s = nonlinear_operator(v);
    let mut g = alloc::vec![0.0; ny * nt];
    for i in 1..ny - 1 {
        let tr = trace_vy0(vals, i, nt, hy);
        let mut d_tr = 0.0;
        for n in 0..nt {
            let r = 2.0 * residual_weight(params, f, i, n) * s.get(i, n);
            for &(ii, m, c) in linear_row(i, n, nt, hy, ht).terms() {
                g[ii * nt + m] += r * c;
            }
            g[i * nt + n] += 4.0 * tr * r;
            d_tr += 4.0 * vals[i * nt + n] * r;
        }
        g[(i + 1) * nt] += d_tr / (2.0 * hy);
        g[(i - 1) * nt] -= d_tr / (2.0 * hy);
    }
    let scale = 2.0 * params.gamma * hy * ht;
    for_each_penalty_row(ny, nt, hy, ht, |r| {
        let x = scale * r.eval(vals, nt);
        for &(i, n, c) in r.terms() {
            g[i * nt + n] += x * c;
        }
    });
    g
}

/// Gradient of the discrete cost on the constraint set: the derivative with
/// respect to the free rows `2..=n_y-2`, zero on the constrained rows.
pub fn gradient(v: &FieldV, params: &CarlemanParams) -> SpaceTimeField {
    let f = v.field();
    let (ny, nt) = (f.n_y(), f.n_t());
    let mut g = full_gradient(v, params);
    for n in 0..nt {
        let g1 = g[nt + n];
        let gl = g[(ny - 1) * nt + n];
        g[2 * nt + n] += 0.25 * g1;
        g[(ny - 2) * nt + n] += 4.0 / 3.0 * gl;
        g[(ny - 3) * nt + n] -= gl / 3.0;
        g[n] = 0.0;
        g[nt + n] = 0.0;
        g[(ny - 1) * nt + n] = 0.0;
    }
    SpaceTimeField::from_values(g, ny, nt, f.h_y(), f.h_t(), f.y0(), f.t0()).expect("same grid")
}

/// Plain nodal inner product.
pub fn inner(a: &SpaceTimeField, b: &SpaceTimeField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum()
}

/// `J(V2) - J(V1) - <J'(V1), V2-V1> - γ/2 |V2-V1|²`
pub fn convexity_gap(v1: &FieldV, v2: &FieldV, params: &CarlemanParams) -> Result<f64> {
    if !v1.compatible(v2) {
        return Err(Error::Shape("fields differ in grid or boundary data".into()));
    }
    let f1 = v1.field();
    let diff: Vec<f64> = v2
        .field()
        .values()
        .iter()
        .zip(f1.values())
        .map(|(a, b)| a - b)
        .collect();
    let d = SpaceTimeField::from_values(diff, f1.n_y(), f1.n_t(), f1.h_y(), f1.h_t(), f1.y0(), f1.t0())?;
    let g = gradient(v1, params);
    Ok(cost(v2, params) - cost(v1, params) - inner(&g, &d) - 0.5 * params.gamma * h2_norm_sq(&d))
}

/// `q0 = f0'`, `q1 = f0'' + f1'`.
pub fn boundary_data_from_traces(f0: &TimeTrace, f1: &TimeTrace) -> Result<BoundaryData> {
    if !f0.same_sampling(f1) {
        return Err(Error::Shape("f0 and f1 sampled differently".into()));
    }
    if f0.len() < 5 {
        return Err(Error::Shape("traces need at least 5 samples".into()));
    }
    if f0.samples().iter().chain(f1.samples()).any(|v| !v.is_finite()) {
        return Err(Error::Input("traces contain non-finite samples".into()));
    }
    let dt = f0.dt();
    let d1 = diff1(f0.samples(), dt);
    let d2 = diff2(f0.samples(), dt);
    let e1 = diff1(f1.samples(), dt);
    let q1: Vec<f64> = d2.iter().zip(&e1).map(|(a, b)| a + b).collect();
    BoundaryData::new(TimeTrace::new(d1, dt, f0.t0())?, TimeTrace::new(q1, dt, f0.t0())?)
}

/// `V0 = q0(t) + q1(t) (y - y²/(2b))` on an `n_y`-row grid over `[0,b]`.
pub fn initial_guess(q: &BoundaryData, b: f64, n_y: usize) -> Result<FieldV> {
    if !(b > 0.0) {
        return Err(Error::InvalidParameter("b must be positive".into()));
    }
    let nt = q.len();
    let mut f = SpaceTimeField::on_rectangle(n_y, nt, b, q.q0.t_end() - q.q0.t0())?;
    for i in 0..n_y {
        let y = f.y(i);
        let shape = y - y * y / (2.0 * b);
        for n in 0..nt {
            f.set(i, n, q.q0.samples()[n] + q.q1.samples()[n] * shape);
        }
    }
    FieldV::unconstrained(f, q.clone())
}

/// `p = 4 V_y(y,0)`, zeroed beyond `support`.
pub fn extract_potential(v: &FieldV, support: f64) -> Result<PotentialProfile> {
    let f = v.field();
    let row0: Vec<f64> = (0..f.n_y()).map(|i| f.get(i, 0)).collect();
    let p: Vec<f64> = diff1(&row0, f.h_y()).into_iter().map(|d| 4.0 * d).collect();
    PotentialProfile::new(p, f.h_y(), support)
}
