//! Small 1D helpers: interpolation and difference stencils.

use alloc::vec::Vec;

/// Piecewise-linear interpolation on increasing nodes `xs`; clamps to the
/// end values outside the range.
pub fn lerp_sorted(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    debug_assert_eq!(n, ys.len());
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    // first index with xs[i] > x
    let i = xs.partition_point(|&v| v <= x);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let f = (x - x0) / (x1 - x0);
    ys[i - 1] * (1.0 - f) + ys[i] * f
}

/// Four-point Lagrange interpolation on increasing nodes `xs` (falls back to
/// linear with fewer than 4 nodes); clamps to the end values outside.
pub fn cubic_sorted(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if n < 4 {
        return lerp_sorted(xs, ys, x);
    }
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = xs.partition_point(|&v| v <= x);
    let j0 = i.saturating_sub(2).min(n - 4);
    let mut acc = 0.0;
    for a in j0..j0 + 4 {
        let mut w = 1.0;
        for b in j0..j0 + 4 {
            if a != b {
                w *= (x - xs[b]) / (xs[a] - xs[b]);
            }
        }
        acc += w * ys[a];
    }
    acc
}

/// Piecewise-linear interpolation on the uniform grid `x0 + i*h`; returns
/// `outside` beyond the grid.
pub fn lerp_uniform(vals: &[f64], x0: f64, h: f64, x: f64, outside: f64) -> f64 {
    let s = (x - x0) / h;
    let n = vals.len();
    if !(s >= 0.0) || s > (n - 1) as f64 {
        return outside;
    }
    let i = libm::floor(s) as usize;
    if i >= n - 1 {
        return vals[n - 1];
    }
    let f = s - i as f64;
    vals[i] * (1.0 - f) + vals[i + 1] * f
}

/// First derivative: centered inside, one-sided second order at the ends.
pub fn diff1(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = alloc::vec![0.0; n];
    if n < 3 {
        return d;
    }
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    d
}

/// Second derivative: centered inside, one-sided second order at the ends
/// (four-point stencil, so `n >= 4`).
pub fn diff2(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = alloc::vec![0.0; n];
    if n < 4 {
        return d;
    }
    let h2 = h * h;
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
    }
    d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
    d[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
    d
}

/// Relative L2 distance `|a-b| / |b|` (plain sums).
pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    libm::sqrt(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_exact_on_cubics_inside() {
        let h = 0.05;
        let v: Vec<f64> = (0..30).map(|i| (i as f64 * h).powi(2) * 3.0 - i as f64 * h).collect();
        let d1 = diff1(&v, h);
        let d2 = diff2(&v, h);
        for i in 0..30 {
            let x = i as f64 * h;
            assert!((d1[i] - (6.0 * x - 1.0)).abs() < 1e-10);
            assert!((d2[i] - 6.0).abs() < 1e-8);
        }
    }

    #[test]
    fn lerp_sorted_clamps() {
        let xs = [0.0, 1.0, 3.0];
        let ys = [1.0, 2.0, 6.0];
        assert_eq!(lerp_sorted(&xs, &ys, -1.0), 1.0);
        assert_eq!(lerp_sorted(&xs, &ys, 2.0), 4.0);
        assert_eq!(lerp_sorted(&xs, &ys, 5.0), 6.0);
    }
}
