//! Slant-range image built from per-source 1D reconstructions.
//!
//! Column `s` holds the profile recovered for source `s`; row `l` is the
//! range `range_origin + l * range_step`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::medium::MediumProfile;

#[derive(Debug, Clone, PartialEq)]
pub struct SlantRangeImage {
    /// Source-major: `values[s * n_range + l]`.
    values: Vec<f64>,
    n_sources: usize,
    n_range: usize,
    /// m
    source_step: f64,
    range_origin: f64,
    range_step: f64,
}

/// Range and source index bounds `(l1, l2, s1, s2)`, inclusive.
pub type Rect = (usize, usize, usize, usize);

impl SlantRangeImage {
    pub fn new(
        values: Vec<f64>,
        n_sources: usize,
        n_range: usize,
        source_step: f64,
        range_origin: f64,
        range_step: f64,
    ) -> Result<Self> {
        if n_sources == 0 || n_range == 0 || values.len() != n_sources * n_range {
            return Err(Error::Shape("image values do not match its dimensions".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 1.0) || !v.is_finite()) {
            return Err(Error::InvalidMedium(format!("image value {v} below the floor of 1")));
        }
        if !(source_step > 0.0 && range_step > 0.0) {
            return Err(Error::InvalidParameter("image steps must be positive".into()));
        }
        Ok(Self {
            values,
            n_sources,
            n_range,
            source_step,
            range_origin,
            range_step,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn n_sources(&self) -> usize {
        self.n_sources
    }
    pub fn n_range(&self) -> usize {
        self.n_range
    }
    pub fn source_step(&self) -> f64 {
        self.source_step
    }
    pub fn range_origin(&self) -> f64 {
        self.range_origin
    }
    pub fn range_step(&self) -> f64 {
        self.range_step
    }
    pub fn source_pos(&self, s: usize) -> f64 {
        s as f64 * self.source_step
    }
    pub fn range(&self, l: usize) -> f64 {
        self.range_origin + l as f64 * self.range_step
    }
    pub fn get(&self, s: usize, l: usize) -> f64 {
        self.values[s * self.n_range + l]
    }
    pub fn column(&self, s: usize) -> &[f64] {
        &self.values[s * self.n_range..(s + 1) * self.n_range]
    }
    pub fn max(&self) -> f64 {
        self.values.iter().fold(1.0, |m, &v| m.max(v))
    }

    /// Range index nearest to `r`, clamped to the image.
    pub fn range_index(&self, r: f64) -> usize {
        let l = libm::round((r - self.range_origin) / self.range_step);
        if l <= 0.0 {
            0
        } else {
            (l as usize).min(self.n_range - 1)
        }
    }
}

/// Stack profiles as columns. The line coordinate `x` maps to the range
/// `origin + scale * x`, which undoes the rescaling of the region of interest
/// to a unit interval.
pub fn assemble(lines: &[MediumProfile], source_step: f64, origin: f64, scale: f64) -> Result<SlantRangeImage> {
    let first = lines.first().ok_or_else(|| Error::Input("no profiles to assemble".into()))?;
    if lines.iter().any(|l| !l.same_grid(first)) {
        return Err(Error::Shape("profiles live on different grids".into()));
    }
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter("range scale must be positive".into()));
    }
    let values = lines.iter().flat_map(|l| l.samples().iter().copied()).collect();
    SlantRangeImage::new(
        values,
        lines.len(),
        first.n_x(),
        source_step,
        origin + scale * first.x_min(),
        scale * first.h(),
    )
}

fn check_rect(img: &SlantRangeImage, rect: Rect) -> Result<()> {
    let (l1, l2, s1, s2) = rect;
    if l1 > l2 || s1 > s2 || l2 >= img.n_range || s2 >= img.n_sources {
        return Err(Error::DegenerateSupport(format!(
            "rectangle [{l1},{l2}]x[{s1},{s2}] is empty or outside a {}x{} image",
            img.n_range, img.n_sources
        )));
    }
    Ok(())
}

/// In every column, values below half the column maximum over `[l1, l2]`
/// are replaced by that maximum.
pub fn max_fill(eps1: &SlantRangeImage, l1: usize, l2: usize) -> Result<SlantRangeImage> {
    check_rect(eps1, (l1, l2, 0, eps1.n_sources - 1))?;
    let nr = eps1.n_range;
    let mut eps2 = eps1.values.clone();
    for s in 0..eps1.n_sources {
        let col = &mut eps2[s * nr..(s + 1) * nr];
        let m = col[l1..=l2].iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v));
        for v in col.iter_mut() {
            if *v < 0.5 * m {
                *v = m;
            }
        }
    }
    SlantRangeImage::new(eps2, eps1.n_sources, nr, eps1.source_step, eps1.range_origin, eps1.range_step)
}

/// Max-fill within each column, then flood the rectangle with its maximum
/// and reset everything else to 1.
pub fn postprocess(eps1: &SlantRangeImage, rect: Rect) -> Result<SlantRangeImage> {
    check_rect(eps1, rect)?;
    let (l1, l2, s1, s2) = rect;
    let nr = eps1.n_range;
    let eps2 = max_fill(eps1, l1, l2)?.values;
    let mut top = f64::NEG_INFINITY;
    for s in s1..=s2 {
        for l in l1..=l2 {
            top = top.max(eps2[s * nr + l]);
        }
    }
    let mut comp = alloc::vec![1.0; eps2.len()];
    for s in s1..=s2 {
        for l in l1..=l2 {
            comp[s * nr + l] = top;
        }
    }
    SlantRangeImage::new(
        comp,
        eps1.n_sources,
        nr,
        eps1.source_step,
        eps1.range_origin,
        eps1.range_step,
    )
}

/// Binary PGM with sources across and range down; 1 maps to 0 and the image
/// maximum to 255.
pub fn to_pgm(img: &SlantRangeImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.n_sources, img.n_range).into_bytes();
    let top = img.max();
    for l in 0..img.n_range {
        for s in 0..img.n_sources {
            let v = img.get(s, l);
            let g = if top > 1.0 { libm::round(255.0 * (v - 1.0) / (top - 1.0)) } else { 0.0 };
            out.push(g.clamp(0.0, 255.0) as u8);
        }
    }
    out
}
