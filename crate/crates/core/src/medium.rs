//! 1D media and the travel-time / potential transform chain.
//!
//! A medium `c(x) >= 1` equals one outside (0,1). With travel time
//! `y = ∫0^x sqrt(c)` and `Q(y) = c(x(y))^(-1/4)`, the potential is
//! `p = Q''/Q - 2 (Q'/Q)^2`. The inverse map integrates
//! `Q'' = pQ + 2 Q'^2/Q` from `Q(0)=1, Q'(0)=0` (the medium is unity to the
//! left of the source) together with `dx/dy = Q^2`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::interp::{cubic_sorted, diff1, diff2, lerp_sorted, lerp_uniform};

/// Threshold on `max|Δ²c| / (c̄-1)` above which second differences of the
/// medium are not trusted.
pub const ROUGHNESS_THRESHOLD: f64 = 0.25;

const UNITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MediumProfile {
    samples: Vec<f64>,
    x_min: f64,
    x_max: f64,
}

impl MediumProfile {
    pub fn new(samples: Vec<f64>, x_min: f64, x_max: f64) -> Result<Self> {
        let n = samples.len();
        if n < 3 {
            return Err(Error::InvalidMedium(alloc::format!("need at least 3 samples, got {n}")));
        }
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidMedium("x_min must be below x_max".into()));
        }
        let h = (x_max - x_min) / (n - 1) as f64;
        for (i, &c) in samples.iter().enumerate() {
            let x = x_min + i as f64 * h;
            if !c.is_finite() || c < 1.0 - UNITY_TOL {
                return Err(Error::InvalidMedium(alloc::format!("c({x}) = {c} is below 1")));
            }
            if (x <= 0.0 || x >= 1.0) && libm::fabs(c - 1.0) > UNITY_TOL {
                return Err(Error::InvalidMedium(alloc::format!(
                    "c({x}) = {c} but the medium must be 1 outside (0,1)"
                )));
            }
        }
        Ok(Self {
            samples,
            x_min,
            x_max,
        })
    }

    /// Sample `f` on the uniform grid, forcing unity outside (0,1).
    pub fn from_fn(x_min: f64, x_max: f64, n_x: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n_x < 3 {
            return Err(Error::InvalidMedium("need at least 3 samples".into()));
        }
        let h = (x_max - x_min) / (n_x - 1) as f64;
        let s = (0..n_x)
            .map(|i| {
                let x = x_min + i as f64 * h;
                if x > 0.0 && x < 1.0 {
                    f(x)
                } else {
                    1.0
                }
            })
            .collect();
        Self::new(s, x_min, x_max)
    }

    /// Unit medium on the grid.
    pub fn unity(x_min: f64, x_max: f64, n_x: usize) -> Result<Self> {
        Self::from_fn(x_min, x_max, n_x, |_| 1.0)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn n_x(&self) -> usize {
        self.samples.len()
    }
    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.samples.len() - 1) as f64
    }
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.h()
    }

    /// Upper bound c̄ (the sample maximum).
    pub fn c_bar(&self) -> f64 {
        self.samples.iter().fold(1.0, |m, &v| m.max(v))
    }

    /// Linear interpolation, unity outside the sampled range and outside (0,1).
    pub fn value_at(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return 1.0;
        }
        lerp_uniform(&self.samples, self.x_min, self.h(), x, 1.0)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.n_x() == other.n_x() && self.x_min == other.x_min && self.x_max == other.x_max
    }
}

/// Travel time on the nodes of a medium grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TravelTimeMap {
    x: Vec<f64>,
    y: Vec<f64>,
    b: f64,
}

impl TravelTimeMap {
    pub fn x_nodes(&self) -> &[f64] {
        &self.x
    }
    pub fn y_nodes(&self) -> &[f64] {
        &self.y
    }
    pub fn b(&self) -> f64 {
        self.b
    }

    /// y(x); slope one beyond the sampled range, where c = 1.
    pub fn y_of_x(&self, x: f64) -> f64 {
        let n = self.x.len();
        if x <= self.x[0] {
            return self.y[0] + (x - self.x[0]);
        }
        if x >= self.x[n - 1] {
            return self.y[n - 1] + (x - self.x[n - 1]);
        }
        lerp_sorted(&self.x, &self.y, x)
    }

    /// x(y), the monotone inverse.
    pub fn x_of_y(&self, y: f64) -> f64 {
        let n = self.y.len();
        if y <= self.y[0] {
            return self.x[0] + (y - self.y[0]);
        }
        if y >= self.y[n - 1] {
            return self.x[n - 1] + (y - self.y[n - 1]);
        }
        lerp_sorted(&self.y, &self.x, y)
    }
}

/// Composite trapezoid for `y(x) = ∫0^x sqrt(c)`. `b` is the smallest
/// multiple of `h_y` that is at least `max(y(x_max), sqrt(c̄))`.
pub fn travel_time(c: &MediumProfile, h_y: f64) -> Result<TravelTimeMap> {
    if !(h_y > 0.0) {
        return Err(Error::InvalidParameter("h_y must be positive".into()));
    }
    let n = c.n_x();
    let h = c.h();
    let s = c.samples();
    if s.iter().any(|&v| !(v >= 1.0 - UNITY_TOL)) {
        return Err(Error::InvalidMedium("samples below unity".into()));
    }
    let x: Vec<f64> = (0..n).map(|i| c.x(i)).collect();
    if c.x_min() > 0.0 {
        return Err(Error::InvalidMedium("grid must start at or left of x = 0".into()));
    }
    // c = 1 on [x_min, 0], so y(x_min) = x_min
    let mut y = alloc::vec![0.0; n];
    y[0] = c.x_min();
    for i in 1..n {
        y[i] = y[i - 1] + 0.5 * h * (libm::sqrt(s[i - 1]) + libm::sqrt(s[i]));
    }
    if y.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidMedium("travel time is not increasing".into()));
    }
    let need = y[n - 1].max(libm::sqrt(c.c_bar()));
    let b = libm::ceil(need / h_y - 1e-9) * h_y;
    Ok(TravelTimeMap { x, y, b })
}

/// Potential p(y) and Q(y) on the grid `y_j = j h_y`, `0 <= y_j <= b`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile {
    samples: Vec<f64>,
    q_samples: Option<Vec<f64>>,
    h_y: f64,
    support: f64,
}

impl PotentialProfile {
    /// `support` is the upper end `sqrt(c̄)` beyond which p is forced to zero.
    pub fn new(mut samples: Vec<f64>, h_y: f64, support: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Shape("potential needs at least 2 samples".into()));
        }
        if !(h_y > 0.0) {
            return Err(Error::InvalidParameter("h_y must be positive".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("potential has non-finite samples".into()));
        }
        for (j, v) in samples.iter_mut().enumerate() {
            if j as f64 * h_y > support + 1e-12 {
                *v = 0.0;
            }
        }
        Ok(Self {
            samples,
            q_samples: None,
            h_y,
            support,
        })
    }

    pub fn zeros(n: usize, h_y: f64) -> Result<Self> {
        let support = (n - 1) as f64 * h_y;
        Self::new(alloc::vec![0.0; n], h_y, support)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
    pub fn q_samples(&self) -> Option<&[f64]> {
        self.q_samples.as_deref()
    }
    pub fn h_y(&self) -> f64 {
        self.h_y
    }
    pub fn support(&self) -> f64 {
        self.support
    }
    pub fn len(&self) -> usize {
        self.samples.len()
    }
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
    pub fn b(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.h_y
    }
    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.h_y
    }

    /// Piecewise-linear p, zero outside `[0, b]`.
    pub fn value_at(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 0.0;
        }
        lerp_uniform(&self.samples, 0.0, self.h_y, y, 0.0)
    }

    pub fn sup(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
    }
}

/// `max|Δ²c| / (c̄ - 1)`; zero for a constant medium.
pub fn relative_roughness(c: &MediumProfile) -> f64 {
    let s = c.samples();
    let amp = c.c_bar() - 1.0;
    if amp <= UNITY_TOL {
        return 0.0;
    }
    let m = s
        .windows(3)
        .fold(0.0f64, |m, w| m.max(libm::fabs(w[2] - 2.0 * w[1] + w[0])));
    m / amp
}

/// c ↦ (p, Q) on the uniform y-grid with spacing `h_y` up to `b` of the
/// travel-time map.
///
/// Derivatives are taken in x with the chain rule `d/dy = c^(-1/2) d/dx`,
/// using `L = ln Q`: `p = L_yy - L_y^2`, with `L_xx` from the three-point
/// second difference. Values are then interpolated from
/// the travel-time nodes to the uniform grid by four-point interpolation.
pub fn potential_from_medium(c: &MediumProfile, h_y: f64) -> Result<PotentialProfile> {
    let rough = relative_roughness(c);
    if rough > ROUGHNESS_THRESHOLD {
        return Err(Error::Resolution {
            roughness: rough,
            threshold: ROUGHNESS_THRESHOLD,
        });
    }
    let tt = travel_time(c, h_y)?;
    let s = c.samples();
    let h = c.h();
    let l: Vec<f64> = s.iter().map(|&v| -0.25 * libm::log(v)).collect();
    let lx = diff1(&l, h);
    let lxx = diff2(&l, h);
    let cx = diff1(s, h);
    // L_yy = (L_xx - c_x L_x / 2c) / c and L_y^2 = L_x^2 / c
    let p_nodes: Vec<f64> = (0..s.len())
        .map(|i| (lxx[i] - 0.5 * cx[i] * lx[i] / s[i] - lx[i] * lx[i]) / s[i])
        .collect();
    let q_nodes: Vec<f64> = s.iter().map(|&v| libm::pow(v, -0.25)).collect();

    let support = libm::sqrt(c.c_bar());
    let n = libm::round(tt.b() / h_y) as usize + 1;
    let ys = tt.y_nodes();
    let mut p = alloc::vec![0.0; n];
    let mut q = alloc::vec![1.0; n];
    for j in 0..n {
        let y = j as f64 * h_y;
        if y <= support {
            p[j] = cubic_sorted(ys, &p_nodes, y);
        }
        q[j] = if y > ys[ys.len() - 1] {
            1.0
        } else {
            lerp_sorted(ys, &q_nodes, y)
        };
    }
    let mut prof = PotentialProfile::new(p, h_y, support)?;
    prof.q_samples = Some(q);
    Ok(prof)
}

const Q_MAX: f64 = 1e6;

/// RK4 solution of `Q'' = pQ + 2Q'^2/Q`, `x' = Q^2` on the p-grid.
/// Returns `(Q_j, x_j)`.
pub fn integrate_q(p: &PotentialProfile) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = p.h_y();
    let n = p.len();
    let rhs = |y: f64, s: [f64; 3]| -> [f64; 3] {
        let (q, dq) = (s[0], s[1]);
        [dq, p.value_at(y) * q + 2.0 * dq * dq / q, q * q]
    };
    // Q <= 0 or a blow-up of Q (c collapsing towards zero)
    let bad = |s: &[f64; 3]| !(s[0] > 0.0 && s[0] < Q_MAX) || !s[1].is_finite() || !s[2].is_finite();
    let mut st = [1.0, 0.0, 0.0];
    let mut qs = Vec::with_capacity(n);
    let mut xs = Vec::with_capacity(n);
    qs.push(1.0);
    xs.push(0.0);
    for j in 0..n - 1 {
        let y = j as f64 * h;
        let add = |a: &[f64; 3], k: &[f64; 3], f: f64| [a[0] + f * k[0], a[1] + f * k[1], a[2] + f * k[2]];
        let k1 = rhs(y, st);
        let s2 = add(&st, &k1, 0.5 * h);
        if bad(&s2) {
            return Err(Error::NonPhysicalPotential { y: y + 0.5 * h, q: s2[0] });
        }
        let k2 = rhs(y + 0.5 * h, s2);
        let s3 = add(&st, &k2, 0.5 * h);
        if bad(&s3) {
            return Err(Error::NonPhysicalPotential { y: y + 0.5 * h, q: s3[0] });
        }
        let k3 = rhs(y + 0.5 * h, s3);
        let s4 = add(&st, &k3, h);
        if bad(&s4) {
            return Err(Error::NonPhysicalPotential { y: y + h, q: s4[0] });
        }
        let k4 = rhs(y + h, s4);
        for m in 0..3 {
            st[m] += h / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
        }
        if bad(&st) {
            return Err(Error::NonPhysicalPotential { y: y + h, q: st[0] });
        }
        qs.push(st[0]);
        xs.push(st[2]);
    }
    Ok((qs, xs))
}

/// p ↦ c on the uniform grid `[x_min, x_max]` with `n_x` nodes.
///
/// Beyond the last integrated point the last value is held; the result is
/// unity outside (0,1) and clamped to at least one.
pub fn medium_from_potential(
    p: &PotentialProfile,
    x_min: f64,
    x_max: f64,
    n_x: usize,
) -> Result<MediumProfile> {
    let (qs, xs) = integrate_q(p)?;
    let cs: Vec<f64> = qs.iter().map(|&q| libm::pow(q, -4.0)).collect();
    let last_x = xs[xs.len() - 1];
    let last_c = cs[cs.len() - 1];
    MediumProfile::from_fn(x_min, x_max, n_x, |x| {
        let v = if x <= last_x { lerp_sorted(&xs, &cs, x) } else { last_c };
        v.max(1.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(x: f64) -> f64 {
        let s = libm::sin(core::f64::consts::PI * x);
        1.0 + 0.5 * s * s
    }

    #[test]
    fn unit_medium_has_identity_travel_time_and_zero_potential() {
        let c = MediumProfile::unity(-0.2, 1.2, 141).unwrap();
        let tt = travel_time(&c, 0.01).unwrap();
        for (x, y) in tt.x_nodes().iter().zip(tt.y_nodes()) {
            assert!((x - y).abs() < 1e-12);
        }
        let p = potential_from_medium(&c, 0.01).unwrap();
        assert!(p.samples().iter().all(|&v| v == 0.0));
        assert!(p.q_samples().unwrap().iter().all(|&q| (q - 1.0).abs() < 1e-15));
    }

    #[test]
    fn constant_four_gives_travel_time_two() {
        // c = 4 on (0,1) is not continuous, but travel time only needs samples
        let n = 1001;
        let mut s = alloc::vec![4.0; n];
        s[0] = 1.0;
        s[n - 1] = 1.0;
        let c = MediumProfile::new(s, 0.0, 1.0).unwrap();
        let tt = travel_time(&c, 0.01).unwrap();
        // end cells integrate sqrt(1) on one side: error is h/2 per end
        assert!((tt.y_nodes()[n - 1] - 2.0).abs() < 1.01e-3);
    }

    #[test]
    fn rejects_sub_unity_and_nonunit_exterior() {
        assert!(MediumProfile::new(alloc::vec![1.0, 0.9, 1.0], 0.0, 1.0).is_err());
        assert!(MediumProfile::new(alloc::vec![1.5, 1.2, 1.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn b_covers_sqrt_cbar() {
        let c = MediumProfile::from_fn(0.0, 1.0, 201, |x| 1.0 + 3.0 * libm::pow(libm::sin(core::f64::consts::PI * x), 4.0)).unwrap();
        let tt = travel_time(&c, 0.01).unwrap();
        assert!(tt.b() >= 2.0 - 1e-12);
        let c2 = MediumProfile::from_fn(0.0, 1.0, 201, bump).unwrap();
        let tt2 = travel_time(&c2, 0.01).unwrap();
        assert!(tt2.b() >= tt2.y_nodes()[200]);
    }

    #[test]
    fn coarse_medium_is_rejected() {
        let c = MediumProfile::from_fn(0.0, 1.0, 11, |x| if (0.45..0.55).contains(&x) { 2.0 } else { 1.0 }).unwrap();
        assert!(matches!(potential_from_medium(&c, 0.01), Err(Error::Resolution { .. })));
    }

    #[test]
    fn zero_potential_gives_unit_medium() {
        let p = PotentialProfile::zeros(101, 0.01).unwrap();
        let c = medium_from_potential(&p, 0.0, 1.0, 51).unwrap();
        assert!(c.samples().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn huge_positive_potential_is_non_physical() {
        let p = PotentialProfile::new(alloc::vec![400.0; 101], 0.01, 1.0).unwrap();
        assert!(matches!(
            medium_from_potential(&p, 0.0, 1.0, 51),
            Err(Error::NonPhysicalPotential { .. })
        ));
    }
}
