//! Window-based downsampling of labels and images.
//!
//! Every output pixel `(i, j)` owns the `f x f` window of input pixels
//! rooted at `(i * f, j * f)`. Labels become class frequencies over that
//! window; images become the window mean. Nearest-neighbor and bilinear
//! baselines use the half-pixel-center convention.
//!
//! Window sums are accumulated in `f64`, rows in order and columns in order
//! within each row, with one accumulator per output value. The row kernels
//! in [`kernel`] let a caller split the output by rows across threads and
//! still get bit-identical results.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::num::NonZeroUsize;

use crate::error::{Error, Result};
use crate::label::{HardLabelMap, ImagePlane, SoftLabelMap};

/// Window side length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor(NonZeroUsize);

impl Factor {
    pub fn new(f: usize) -> Result<Self> {
        NonZeroUsize::new(f).map(Self).ok_or(Error::ZeroFactor)
    }

    /// Factor `2^level` of a pyramid level.
    pub fn from_level(level: u32) -> Result<Self> {
        1usize
            .checked_shl(level)
            .filter(|&f| f != 0 && level < usize::BITS)
            .map(|f| Self(NonZeroUsize::new(f).expect("power of two")))
            .ok_or(Error::ZeroFactor)
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0.get()
    }

    /// Number of input pixels in one window.
    #[inline]
    pub fn area(self) -> usize {
        self.get() * self.get()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Height,
    Width,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Height => "height",
            Axis::Width => "width",
        })
    }
}

/// Smallest multiple of `factor` that is `>= size`.
pub fn padded_size(size: usize, factor: usize) -> usize {
    size.div_ceil(factor) * factor
}

/// Output dimensions for an `height x width` input, or the reason the
/// factor does not apply.
pub fn output_dims(height: usize, width: usize, factor: Factor) -> Result<(usize, usize)> {
    let f = factor.get();
    let min_side = height.min(width);
    if f > min_side {
        return Err(Error::FactorTooLarge { factor: f, min_side });
    }
    for (axis, size) in [(Axis::Height, height), (Axis::Width, width)] {
        if size % f != 0 {
            return Err(Error::NotDivisible {
                axis,
                size,
                factor: f,
                suggested_pad: padded_size(size, f),
            });
        }
    }
    Ok((height / f, width / f))
}

/// Row-band kernels behind the whole-grid functions.
///
/// Each kernel fills `out` with complete output rows starting at output row
/// `first_row`. `out.len()` must be a multiple of the output row length
/// (`out_width * C` for labels, `out_width` for images). Callers validate
/// dimensions with [`output_dims`] first.
pub mod kernel {
    use super::*;

    /// Class frequencies for output rows of a hard label.
    pub fn epd_label_rows(label: &HardLabelMap, factor: Factor, first_row: usize, out: &mut [f64]) {
        let f = factor.get();
        let c = label.num_classes();
        let row_len = (label.width() / f) * c;
        if row_len == 0 {
            return;
        }
        let area = factor.area() as f64;
        let mut counts = vec![0u32; row_len];
        for (n, out_row) in out.chunks_exact_mut(row_len).enumerate() {
            counts.iter_mut().for_each(|v| *v = 0);
            let top = (first_row + n) * f;
            for r in top..top + f {
                for (col, &class) in label.row(r).iter().enumerate() {
                    counts[(col / f) * c + usize::from(class)] += 1;
                }
            }
            for (dst, &count) in out_row.iter_mut().zip(&counts) {
                *dst = f64::from(count) / area;
            }
        }
    }

    /// Per-channel window means for output rows of a soft label.
    pub fn epd_soft_rows(soft: &SoftLabelMap, factor: Factor, first_row: usize, out: &mut [f64]) {
        let f = factor.get();
        let c = soft.num_classes();
        let width = soft.width();
        let row_len = (width / f) * c;
        if row_len == 0 {
            return;
        }
        let area = factor.area() as f64;
        let data = soft.data();
        for (n, out_row) in out.chunks_exact_mut(row_len).enumerate() {
            out_row.iter_mut().for_each(|v| *v = 0.0);
            let top = (first_row + n) * f;
            for r in top..top + f {
                let src = &data[r * width * c..(r + 1) * width * c];
                for (col, px) in src.chunks_exact(c).enumerate() {
                    let acc = &mut out_row[(col / f) * c..(col / f + 1) * c];
                    for (a, &p) in acc.iter_mut().zip(px) {
                        *a += p;
                    }
                }
            }
            out_row.iter_mut().for_each(|v| *v /= area);
        }
    }

    /// Window means for output rows of an image.
    pub fn image_mean_rows(img: &ImagePlane, factor: Factor, first_row: usize, out: &mut [f64]) {
        let f = factor.get();
        let width = img.width();
        let row_len = width / f;
        if row_len == 0 {
            return;
        }
        let area = factor.area() as f64;
        let data = img.data();
        for (n, out_row) in out.chunks_exact_mut(row_len).enumerate() {
            out_row.iter_mut().for_each(|v| *v = 0.0);
            let top = (first_row + n) * f;
            for r in top..top + f {
                for (col, &v) in data[r * width..(r + 1) * width].iter().enumerate() {
                    out_row[col / f] += v;
                }
            }
            out_row.iter_mut().for_each(|v| *v /= area);
        }
    }
}

/// Soft label holding the class frequencies of each `f x f` window.
///
/// Output pixel `(i, j, c)` is the number of class-`c` pixels in the window
/// divided by `f^2`, so uniform windows give `p_c = 1`, absent classes
/// `p_c = 0`, and windows straddling a boundary land strictly in between.
pub fn epd_label_downsample(label: &HardLabelMap, factor: Factor) -> Result<SoftLabelMap> {
    let (h, w) = output_dims(label.height(), label.width(), factor)?;
    let c = label.num_classes();
    let mut out = vec![0.0; h * w * c];
    kernel::epd_label_rows(label, factor, 0, &mut out);
    Ok(SoftLabelMap::from_parts(h, w, c, out))
}

/// Per-channel window mean of a soft label. On a one-hot input this is
/// identical to [`epd_label_downsample`] of the underlying hard label.
pub fn epd_soft_downsample(soft: &SoftLabelMap, factor: Factor) -> Result<SoftLabelMap> {
    let (h, w) = output_dims(soft.height(), soft.width(), factor)?;
    let c = soft.num_classes();
    let mut out = vec![0.0; h * w * c];
    kernel::epd_soft_rows(soft, factor, 0, &mut out);
    Ok(SoftLabelMap::from_parts(h, w, c, out))
}

/// Window mean of an image.
pub fn epd_image_downsample(img: &ImagePlane, factor: Factor) -> Result<ImagePlane> {
    let (h, w) = output_dims(img.height(), img.width(), factor)?;
    let mut out = vec![0.0; h * w];
    kernel::image_mean_rows(img, factor, 0, &mut out);
    Ok(ImagePlane::from_parts(h, w, out))
}

/// Samples the input pixel containing each window's center,
/// `(i * f + f / 2, j * f + f / 2)`.
pub fn nearest_label_downsample(label: &HardLabelMap, factor: Factor) -> Result<HardLabelMap> {
    let (h, w) = output_dims(label.height(), label.width(), factor)?;
    let f = factor.get();
    let half = f / 2;
    let mut out = Vec::with_capacity(h * w);
    for i in 0..h {
        let row = label.row(i * f + half);
        out.extend((0..w).map(|j| row[j * f + half]));
    }
    HardLabelMap::new(h, w, label.num_classes(), out)
}

/// Bilinear sample at each window's center, `((i + 0.5) f - 0.5,
/// (j + 0.5) f - 0.5)`, clamped to the pixel grid at the borders.
pub fn bilinear_image_downsample(img: &ImagePlane, factor: Factor) -> Result<ImagePlane> {
    let (h, w) = output_dims(img.height(), img.width(), factor)?;
    let f = factor.get() as f64;
    let taps = |i: usize, size: usize| {
        let max = (size - 1) as f64;
        let x = ((i as f64 + 0.5) * f - 0.5).clamp(0.0, max);
        let x0 = libm::floor(x);
        let lo = x0 as usize;
        let hi = (lo + 1).min(size - 1);
        (lo, hi, x - x0)
    };
    let cols: Vec<_> = (0..w).map(|j| taps(j, img.width())).collect();
    let mut out = Vec::with_capacity(h * w);
    for i in 0..h {
        let (r0, r1, wy) = taps(i, img.height());
        for &(c0, c1, wx) in &cols {
            let top = img.get(r0, c0) * (1.0 - wx) + img.get(r0, c1) * wx;
            let bottom = img.get(r1, c0) * (1.0 - wx) + img.get(r1, c1) * wx;
            out.push(top * (1.0 - wy) + bottom * wy);
        }
    }
    Ok(ImagePlane::from_parts(h, w, out))
}

/// Soft labels for pyramid levels `1..=max_level`, level `d` using factor
/// `2^d` on the base label. Ordered from the base toward the apex; empty
/// when `max_level == 0`.
pub fn build_pyramid(label: &HardLabelMap, max_level: u32) -> Result<Vec<SoftLabelMap>> {
    let wrap = |level, e| Error::PyramidLevel {
        level,
        source: alloc::boxed::Box::new(e),
    };
    // validate every level before doing any work
    for level in 1..=max_level {
        let f = Factor::from_level(level).map_err(|e| wrap(level, e))?;
        output_dims(label.height(), label.width(), f).map_err(|e| wrap(level, e))?;
    }
    (1..=max_level)
        .map(|level| {
            let f = Factor::from_level(level).map_err(|e| wrap(level, e))?;
            epd_label_downsample(label, f).map_err(|e| wrap(level, e))
        })
        .collect()
}
