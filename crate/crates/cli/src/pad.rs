//! Padding to a multiple of the downsampling factor.

use epd_core::{HardLabelMap, ImagePlane};

/// Rows and columns appended at the bottom and right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Padding {
    pub rows: usize,
    pub cols: usize,
}

impl Padding {
    pub fn for_dims(height: usize, width: usize, factor: usize) -> Self {
        Self {
            rows: height.next_multiple_of(factor) - height,
            cols: width.next_multiple_of(factor) - width,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 && self.cols == 0
    }
}

/// Pads with background class 0.
pub fn pad_label(label: &HardLabelMap, pad: Padding) -> HardLabelMap {
    let (h, w) = (label.height() + pad.rows, label.width() + pad.cols);
    let mut data = vec![0u16; h * w];
    for r in 0..label.height() {
        data[r * w..r * w + label.width()].copy_from_slice(label.row(r));
    }
    HardLabelMap::new(h, w, label.num_classes(), data).expect("padding keeps classes valid")
}

/// Pads by replicating the last row and column.
pub fn pad_image(img: &ImagePlane, pad: Padding) -> ImagePlane {
    let (h, w) = (img.height() + pad.rows, img.width() + pad.cols);
    let data = (0..h * w)
        .map(|i| img.get((i / w).min(img.height() - 1), (i % w).min(img.width() - 1)))
        .collect();
    ImagePlane::new(h, w, data).expect("padding keeps values finite")
}
