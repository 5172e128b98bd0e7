//! Frozen Gauss–Newton metric for the descent.
//!
//! `P = (A E)^T W (A E) + γ K + ε I`, with `A` the linear part
//! `V_yy - 2 V_yt`, `E` the map from free rows to the full field, `W` the
//! weighted quadrature, and `K` the Gram matrix of the H² penalty. `P` is half
//! the Gauss–Newton Hessian of the linearized cost. It depends only on the
//! grid and the weight, so it is factored once per run.

use alloc::vec::Vec;

use super::operator::{for_each_penalty_row, linear_row, residual_weight};
use super::CarlemanParams;
use crate::error::{Error, Result};
use crate::field::SpaceTimeField;

/// Ridge relative to the node measure `h_y h_t`.
const RIDGE: f64 = 1e-8;

/// Cholesky factor of a symmetric positive-definite band matrix, stored by
/// rows: row `j` holds columns `j-kd ..= j`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    kd: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    /// Factor the lower band `a`, laid out like the factor itself.
    pub fn factor(mut a: Vec<f64>, n: usize, kd: usize) -> Result<Self> {
        let w = kd + 1;
        if a.len() != n * w {
            return Err(Error::Shape("band storage has the wrong length".into()));
        }
        for j in 0..n {
            let j0 = j.saturating_sub(kd);
            for k in j0..=j {
                let m0 = j0.max(k.saturating_sub(kd));
                let mut s = a[j * w + (k + kd - j)];
                let (rj, rk) = (j * w + kd - j, k * w + kd - k);
                for m in m0..k {
                    s -= a[rj + m] * a[rk + m];
                }
                if k == j {
                    if !(s > 0.0) {
                        return Err(Error::Divergence {
                            iterations: j,
                            residual: s,
                        });
                    }
                    a[j * w + kd] = libm::sqrt(s);
                } else {
                    a[j * w + (k + kd - j)] = s / a[k * w + kd];
                }
            }
        }
        Ok(Self { n, kd, l: a })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `x^T L L^T x`
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let (n, kd, w) = (self.n, self.kd, self.kd + 1);
        let mut y = alloc::vec![0.0; n];
        for j in 0..n {
            for m in j.saturating_sub(kd)..=j {
                y[m] += self.l[j * w + kd - j + m] * x[j];
            }
        }
        y.iter().map(|v| v * v).sum()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, kd, w) = (self.n, self.kd, self.kd + 1);
        for j in 0..n {
            let j0 = j.saturating_sub(kd);
            let mut s = x[j];
            for m in j0..j {
                s -= self.l[j * w + kd - j + m] * x[m];
            }
            x[j] = s / self.l[j * w + kd];
        }
        for j in (0..n).rev() {
            x[j] /= self.l[j * w + kd];
            let xj = x[j];
            for m in j.saturating_sub(kd)..j {
                x[m] -= self.l[j * w + kd - j + m] * xj;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Metric {
    chol: BandCholesky,
    n_y: usize,
    n_t: usize,
}

impl Metric {
    /// Assemble and factor `P` for the grid of `grid`.
    pub fn assemble(grid: &SpaceTimeField, params: &CarlemanParams) -> Result<Self> {
        let (ny, nt, hy, ht) = (grid.n_y(), grid.n_t(), grid.h_y(), grid.h_t());
        if ny < 5 || nt < 5 {
            return Err(Error::Shape("metric needs at least 5x5 nodes".into()));
        }
        let nf = ny - 3;
        let dim = nf * nt;
        let kd = 2 * nf + 2;
        let w = kd + 1;
        let mut band = alloc::vec![0.0; dim * w];

        // full-grid term -> free unknowns
        let lift = |terms: &[(usize, usize, f64)], out: &mut Vec<(usize, f64)>| {
            out.clear();
            for &(i, n, c) in terms {
                let at = |i: usize| n * nf + (i - 2);
                if i == 0 {
                } else if i == 1 {
                    out.push((at(2), 0.25 * c));
                } else if i == ny - 1 {
                    out.push((at(ny - 2), 4.0 / 3.0 * c));
                    out.push((at(ny - 3), -c / 3.0));
                } else {
                    out.push((at(i), c));
                }
            }
        };
        let add = |row: &[(usize, f64)], wt: f64, band: &mut [f64]| {
            for &(a, ca) in row {
                for &(b, cb) in row {
                    if b <= a {
                        band[a * w + (b + kd - a)] += wt * ca * cb;
                    }
                }
            }
        };

        let mut buf = Vec::with_capacity(16);
        for i in 1..ny - 1 {
            for n in 0..nt {
                let r = linear_row(i, n, nt, hy, ht);
                lift(r.terms(), &mut buf);
                add(&buf, residual_weight(params, grid, i, n), &mut band);
            }
        }
        let pw = params.gamma * hy * ht;
        for_each_penalty_row(ny, nt, hy, ht, |r| {
            lift(r.terms(), &mut buf);
            add(&buf, pw, &mut band);
        });
        for j in 0..dim {
            band[j * w + kd] += RIDGE * hy * ht;
        }
        let chol = BandCholesky::factor(band, dim, kd)?;
        Ok(Self { chol, n_y: ny, n_t: nt })
    }

    fn gather(&self, f: &SpaceTimeField) -> Vec<f64> {
        let (ny, nt) = (self.n_y, self.n_t);
        let nf = ny - 3;
        let mut x = alloc::vec![0.0; nf * nt];
        for i in 2..ny - 1 {
            for n in 0..nt {
                x[n * nf + (i - 2)] = f.get(i, n);
            }
        }
        x
    }

    /// `z^T P z` over the free rows of `f`.
    pub fn norm_sq(&self, f: &SpaceTimeField) -> f64 {
        self.chol.quad_form(&self.gather(f))
    }

    /// `P^{-1} g` for a gradient field; constrained rows of the result are zero.
    pub fn apply_inverse(&self, g: &SpaceTimeField) -> Result<SpaceTimeField> {
        let (ny, nt) = (self.n_y, self.n_t);
        if g.n_y() != ny || g.n_t() != nt {
            return Err(Error::Shape("gradient grid differs from the metric grid".into()));
        }
        let nf = ny - 3;
        let mut x = self.gather(g);
        self.chol.solve_in_place(&mut x);
        let mut d = SpaceTimeField::zeros(ny, nt, g.h_y(), g.h_t(), g.y0(), g.t0())?;
        for i in 2..ny - 1 {
            for n in 0..nt {
                d.set(i, n, x[n * nf + (i - 2)]);
            }
        }
        Ok(d)
    }
}
