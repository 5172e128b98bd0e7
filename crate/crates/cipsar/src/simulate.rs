//! Synthetic 1D data: one forward solve per source plus a homogeneous
//! reference run on the same grid.

use cipsar_core::forward1d::{solve_wave_fd_with, FdConfig};
use cipsar_core::{MediumProfile, TimeTrace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Nodes of the phantom profile on [0,1].
pub const PHANTOM_NODES: usize = 2001;

/// `1 + amplitude sin⁴(π(x - x1)/(x2 - x1))` on `(x1, x2)`, one elsewhere.
pub fn bump_medium(amplitude: f64, support: [f64; 2], n_x: usize) -> cipsar_core::Result<MediumProfile> {
    let [x1, x2] = support;
    MediumProfile::from_fn(0.0, 1.0, n_x, |x| {
        if x <= x1 || x >= x2 {
            1.0
        } else {
            1.0 + amplitude * (std::f64::consts::PI * (x - x1) / (x2 - x1)).sin().powi(4)
        }
    })
}

#[derive(Debug, Clone)]
pub struct SimulatedSource {
    /// `u(0,t)` for the medium, noise included.
    pub trace: TimeTrace,
    /// `u(0,t)` for `c ≡ 1` on the same grid.
    pub reference: TimeTrace,
    /// Scattered part before noise.
    pub clean_scattered: TimeTrace,
}

/// Forward solve for `c` and the homogeneous reference. Noise with rms
/// `noise * rms(scattered)` is added to the trace from a ChaCha stream
/// keyed by `(seed, stream)`.
pub fn simulate_source(
    c: &MediumProfile,
    t_end: f64,
    fd_n_x: usize,
    noise: f64,
    seed: u64,
    stream: u64,
) -> cipsar_core::Result<SimulatedSource> {
    let cfg = FdConfig {
        n_x: fd_n_x,
        ..FdConfig::default()
    };
    let target = solve_wave_fd_with(c, t_end, &cfg)?;
    let unity = MediumProfile::unity(c.x_min(), c.x_max(), c.n_x())?;
    let ref_cfg = FdConfig {
        c_bar: Some(c.c_bar()),
        ..cfg
    };
    let reference = solve_wave_fd_with(&unity, t_end, &ref_cfg)?.f0;
    let f0 = target.f0;
    let scat: Vec<f64> = f0.samples().iter().zip(reference.samples()).map(|(a, b)| a - b).collect();
    let clean_scattered = TimeTrace::new(scat.clone(), f0.dt(), f0.t0())?;
    let mut vals = f0.samples().to_vec();
    if noise > 0.0 {
        let rms = (scat.iter().map(|v| v * v).sum::<f64>() / scat.len() as f64).sqrt();
        if rms > 0.0 {
            let dist = Normal::new(0.0, noise * rms).expect("finite positive sigma");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            for v in vals.iter_mut() {
                *v += dist.sample(&mut rng);
            }
        }
    }
    Ok(SimulatedSource {
        trace: TimeTrace::new(vals, f0.dt(), f0.t0())?,
        reference,
        clean_scattered,
    })
}
