//! Hounsfield-unit windowing of CT slices into normalized channels.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::label::{ImagePlane, MultiChannelImage};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HuWindow {
    lo: f64,
    hi: f64,
}

impl HuWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidWindow { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn apply(&self, hu: f64) -> f64 {
        ((hu - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
}

/// Abdominal presets: adipose, muscle/soft tissue, wide.
pub const DEFAULT_WINDOWS: [(f64, f64); 3] = [(-190.0, -30.0), (-29.0, 150.0), (-1000.0, 1000.0)];

pub fn default_windows() -> [HuWindow; 3] {
    DEFAULT_WINDOWS.map(|(lo, hi)| HuWindow { lo, hi })
}

/// `clamp((v - lo) / (hi - lo), 0, 1)` per pixel.
pub fn hu_window(img: &ImagePlane, win: HuWindow) -> ImagePlane {
    let data = img.data().iter().map(|&v| win.apply(v)).collect();
    ImagePlane::from_parts(img.height(), img.width(), data)
}

/// One windowed channel per entry of `windows`, in order. Exactly three
/// windows are required.
pub fn stack_windows(img: &ImagePlane, windows: &[HuWindow]) -> Result<MultiChannelImage> {
    if windows.len() != 3 {
        return Err(Error::WindowCount {
            expected: 3,
            actual: windows.len(),
        });
    }
    MultiChannelImage::new(windows.iter().map(|&w| hu_window(img, w)).collect::<Vec<_>>())
}
