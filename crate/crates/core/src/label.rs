//! Label and image grids shared by every other module.
//!
//! All grids are row-major. Soft labels store their probability vectors
//! pixel-interleaved: the `C` values of pixel `(r, c)` are contiguous at
//! `(r * width + c) * C`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest accepted `|sum(p) - 1|` for a soft-label pixel.
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

/// Grid of class indices, `0` being background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardLabelMap {
    height: usize,
    width: usize,
    classes: usize,
    data: Vec<u16>,
}

impl HardLabelMap {
    pub fn new(height: usize, width: usize, classes: usize, data: Vec<u16>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::EmptyGrid);
        }
        if classes < 2 {
            return Err(Error::TooFewClasses(classes));
        }
        if data.len() != height * width {
            return Err(Error::LengthMismatch {
                what: "hard label",
                expected: height * width,
                actual: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|&v| usize::from(v) >= classes) {
            return Err(Error::ClassOutOfRange {
                row: pos / width,
                col: pos % width,
                index: usize::from(data[pos]),
                classes,
            });
        }
        Ok(Self {
            height,
            width,
            classes,
            data,
        })
    }

    /// Map filled with a single class.
    pub fn filled(height: usize, width: usize, classes: usize, class: u16) -> Result<Self> {
        Self::new(height, width, classes, vec![class; height * width])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_classes(&self) -> usize {
        self.classes
    }

    pub fn data(&self) -> &[u16] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u16> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u16 {
        self.data[row * self.width + col]
    }

    pub fn row(&self, row: usize) -> &[u16] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    /// Pixel count of every class.
    pub fn class_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.classes];
        for &v in &self.data {
            counts[usize::from(v)] += 1;
        }
        counts
    }

    /// Same grid with a different class count. Fails if a stored index
    /// would fall out of range.
    pub fn with_num_classes(self, classes: usize) -> Result<Self> {
        Self::new(self.height, self.width, classes, self.data)
    }
}

/// Grid of per-pixel class probability vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftLabelMap {
    height: usize,
    width: usize,
    classes: usize,
    data: Vec<f64>,
}

impl SoftLabelMap {
    /// Builds a soft map from pixel-interleaved data, rejecting values outside
    /// `[0, 1]` and pixels whose probabilities do not sum to one.
    pub fn new(height: usize, width: usize, classes: usize, data: Vec<f64>) -> Result<Self> {
        check_shape(height, width, classes, data.len())?;
        validate_simplex(width, classes, &data)?;
        Ok(Self {
            height,
            width,
            classes,
            data,
        })
    }

    /// Builds a soft map from channel-planar data (all of channel 0, then all
    /// of channel 1, ...).
    pub fn from_planar(height: usize, width: usize, classes: usize, planar: &[f64]) -> Result<Self> {
        check_shape(height, width, classes, planar.len())?;
        let n = height * width;
        let mut data = vec![0.0; planar.len()];
        for k in 0..classes {
            for (p, &v) in planar[k * n..(k + 1) * n].iter().enumerate() {
                data[p * classes + k] = v;
            }
        }
        Self::new(height, width, classes, data)
    }

    /// Skips the simplex check. Callers guarantee the invariant by
    /// construction.
    pub(crate) fn from_parts(height: usize, width: usize, classes: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), height * width * classes);
        Self {
            height,
            width,
            classes,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_classes(&self) -> usize {
        self.classes
    }

    /// Pixel-interleaved values.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn pixel(&self, row: usize, col: usize) -> &[f64] {
        let start = (row * self.width + col) * self.classes;
        &self.data[start..start + self.classes]
    }

    pub fn pixels(&self) -> core::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.classes)
    }

    /// Probability of `class` at every pixel, row-major.
    pub fn channel(&self, class: usize) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().skip(class).step_by(self.classes).copied()
    }

    /// Channel-planar copy of the data.
    pub fn to_planar(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.data.len());
        for k in 0..self.classes {
            out.extend(self.channel(k));
        }
        out
    }

    /// Sum of every class channel over the whole grid.
    pub fn class_mass(&self) -> Vec<f64> {
        let mut mass = vec![0.0; self.classes];
        for px in self.pixels() {
            for (m, &p) in mass.iter_mut().zip(px) {
                *m += p;
            }
        }
        mass
    }

    /// Largest simplex deviation over all pixels, or the first violating
    /// pixel.
    pub fn validate(&self) -> Result<f64> {
        validate_simplex(self.width, self.classes, &self.data)
    }
}

fn check_shape(height: usize, width: usize, classes: usize, len: usize) -> Result<()> {
    if height == 0 || width == 0 {
        return Err(Error::EmptyGrid);
    }
    if classes < 2 {
        return Err(Error::TooFewClasses(classes));
    }
    if len != height * width * classes {
        return Err(Error::LengthMismatch {
            what: "soft label",
            expected: height * width * classes,
            actual: len,
        });
    }
    Ok(())
}

/// Checks that each pixel of pixel-interleaved `data` lies on the
/// probability simplex. Returns the largest `|sum - 1|` seen on success.
///
/// A pixel with a value outside `[0, 1]` reports the distance to the nearest
/// bound as its deviation; otherwise the deviation is `|sum - 1|`.
pub fn validate_simplex(width: usize, classes: usize, data: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (idx, px) in data.chunks_exact(classes).enumerate() {
        let (row, col) = (idx / width, idx % width);
        let mut sum = 0.0;
        for &p in px {
            if !p.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
            if !(0.0..=1.0).contains(&p) {
                let deviation = if p < 0.0 { -p } else { p - 1.0 };
                return Err(Error::SimplexViolation { row, col, deviation });
            }
            sum += p;
        }
        let deviation = libm::fabs(sum - 1.0);
        if deviation > SIMPLEX_TOLERANCE {
            return Err(Error::SimplexViolation { row, col, deviation });
        }
        worst = worst.max(deviation);
    }
    Ok(worst)
}

/// Embeds a hard label as a soft label with probability one on the stored
/// class.
pub fn one_hot(label: &HardLabelMap) -> SoftLabelMap {
    let c = label.num_classes();
    let mut data = vec![0.0; label.data().len() * c];
    for (i, &v) in label.data().iter().enumerate() {
        data[i * c + usize::from(v)] = 1.0;
    }
    SoftLabelMap::from_parts(label.height(), label.width(), c, data)
}

/// Index of the largest value; ties go to the lowest index.
#[inline]
pub fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in p.iter().enumerate().skip(1) {
        if v > p[best] {
            best = k;
        }
    }
    best
}

/// Most probable class per pixel, lowest index on ties.
pub fn argmax_to_hard(soft: &SoftLabelMap) -> HardLabelMap {
    let data = soft.pixels().map(|px| argmax(px) as u16).collect();
    HardLabelMap {
        height: soft.height(),
        width: soft.width(),
        classes: soft.num_classes(),
        data,
    }
}

/// Grid of scalar intensities (HU, or normalized to `[0, 1]`).
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePlane {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl ImagePlane {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::EmptyGrid);
        }
        if data.len() != height * width {
            return Err(Error::LengthMismatch {
                what: "image",
                expected: height * width,
                actual: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / width,
                col: pos % width,
            });
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::new(height, width, vec![value; height * width])
    }

    pub(crate) fn from_parts(height: usize, width: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), height * width);
        Self {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

/// Stack of equally sized image planes.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiChannelImage {
    channels: Vec<ImagePlane>,
}

impl MultiChannelImage {
    pub fn new(channels: Vec<ImagePlane>) -> Result<Self> {
        let first = channels.first().ok_or(Error::EmptyInput)?;
        let (h, w) = (first.height(), first.width());
        if let Some(bad) = channels
            .iter()
            .position(|ch| ch.height() != h || ch.width() != w)
        {
            return Err(Error::ChannelShape(bad));
        }
        Ok(Self { channels })
    }

    pub fn height(&self) -> usize {
        self.channels[0].height()
    }

    pub fn width(&self) -> usize {
        self.channels[0].width()
    }

    pub fn channels(&self) -> &[ImagePlane] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<ImagePlane> {
        self.channels
    }

    /// Applies `f` to every channel, keeping the channel order.
    pub fn try_map<F>(&self, f: F) -> Result<Self>
    where
        F: FnMut(&ImagePlane) -> Result<ImagePlane>,
    {
        Self::new(self.channels.iter().map(f).collect::<Result<_>>()?)
    }
}
