//! Edge-preserving probabilistic downsampling (EPD) for segmentation data.
//!
//! Hard label maps are reduced to soft label maps whose pixels hold the class
//! frequencies of their source window, so partial coverage along object
//! boundaries survives downsampling. Images are reduced by window averaging.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, parallel
//! drivers and the command-line front end live in the `epd` crate.
#![no_std]

extern crate alloc;

pub mod downsample;
mod error;
pub mod label;
pub mod losses;
pub mod metrics;
pub mod preprocess;
pub mod synth;

pub use downsample::{
    bilinear_image_downsample, build_pyramid, epd_image_downsample, epd_label_downsample,
    epd_soft_downsample, nearest_label_downsample, Axis, Factor,
};
pub use error::{Error, Result};
pub use label::{HardLabelMap, ImagePlane, MultiChannelImage, SoftLabelMap, SIMPLEX_TOLERANCE};
