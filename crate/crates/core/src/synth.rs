//! Synthetic label generators, naive reference implementations, and the
//! class-area benchmark comparing EPD against nearest-neighbor sampling.
//!
//! The reference implementations here deliberately share no code with the
//! production kernels in [`crate::downsample`] and [`crate::metrics`].

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::downsample::{epd_label_downsample, nearest_label_downsample, output_dims, Factor};
use crate::error::{Error, Result};
use crate::label::{one_hot, HardLabelMap, SoftLabelMap};
use crate::metrics::SoftMetrics;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Class 1 on pixels whose center lies strictly inside the circle.
    Disk {
        center_row: f64,
        center_col: f64,
        radius: f64,
    },
    /// Class 1 on the side of a line the normal `(cos a, sin a)` (in
    /// `(row, col)` coordinates) points to. The line passes through the
    /// anchor.
    HalfPlane {
        angle_deg: f64,
        anchor_row: f64,
        anchor_col: f64,
    },
    /// Vertical stripes: column `x` is foreground when
    /// `(x + phase) % period < width`. Successive stripes cycle through the
    /// foreground classes.
    Stripes {
        width: usize,
        period: usize,
        phase: usize,
    },
    /// Independent uniform class per pixel.
    Random,
}

impl Shape {
    pub fn name(&self) -> &'static str {
        match self {
            Shape::Disk { .. } => "disk",
            Shape::HalfPlane { .. } => "half-plane",
            Shape::Stripes { .. } => "stripes",
            Shape::Random => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpec {
    pub shape: Shape,
    pub height: usize,
    pub width: usize,
    pub classes: usize,
    pub seed: u64,
}

impl ShapeSpec {
    pub fn new(shape: Shape, height: usize, width: usize, classes: usize) -> Self {
        Self {
            shape,
            height,
            width,
            classes,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// The same shape translated `cols` pixels to the right (a new seed for
    /// random maps).
    pub fn shifted(&self, cols: usize) -> Self {
        let mut out = self.clone();
        match &mut out.shape {
            Shape::Disk { center_col, .. } => *center_col += cols as f64,
            Shape::HalfPlane { anchor_col, .. } => *anchor_col += cols as f64,
            Shape::Stripes { phase, period, .. } => *phase = (*phase + *period - cols % *period) % *period,
            Shape::Random => out.seed = out.seed.wrapping_add(cols as u64),
        }
        out
    }
}

/// Renders `spec` into a hard label map. Deterministic for a given spec.
pub fn generate(spec: &ShapeSpec) -> Result<HardLabelMap> {
    let (h, w, c) = (spec.height, spec.width, spec.classes);
    if h == 0 || w == 0 {
        return Err(Error::EmptyGrid);
    }
    if c < 2 {
        return Err(Error::TooFewClasses(c));
    }
    let out_of_bounds = Error::OutOfBounds { height: h, width: w };
    let (hf, wf) = (h as f64, w as f64);
    let mut data = Vec::with_capacity(h * w);
    match spec.shape {
        Shape::Disk {
            center_row,
            center_col,
            radius,
        } => {
            if !(radius >= 0.0 && center_row.is_finite() && center_col.is_finite()) {
                return Err(Error::InvalidShape("radius"));
            }
            if center_row - radius < 0.0
                || center_col - radius < 0.0
                || center_row + radius > hf
                || center_col + radius > wf
            {
                return Err(out_of_bounds);
            }
            let r2 = radius * radius;
            for r in 0..h {
                let dy = r as f64 + 0.5 - center_row;
                for col in 0..w {
                    let dx = col as f64 + 0.5 - center_col;
                    data.push(u16::from(dy * dy + dx * dx < r2));
                }
            }
        }
        Shape::HalfPlane {
            angle_deg,
            anchor_row,
            anchor_col,
        } => {
            if !angle_deg.is_finite() {
                return Err(Error::InvalidShape("angle"));
            }
            if !(0.0..=hf).contains(&anchor_row) || !(0.0..=wf).contains(&anchor_col) {
                return Err(out_of_bounds);
            }
            let a = angle_deg.to_radians();
            let (ny, nx) = (libm::cos(a), libm::sin(a));
            for r in 0..h {
                for col in 0..w {
                    let s = ny * (r as f64 + 0.5 - anchor_row) + nx * (col as f64 + 0.5 - anchor_col);
                    data.push(u16::from(s >= 0.0));
                }
            }
        }
        Shape::Stripes { width, period, phase } => {
            if width == 0 || period < width {
                return Err(Error::InvalidShape("stripe width/period"));
            }
            if width > w {
                return Err(out_of_bounds);
            }
            let fg = c - 1;
            let row: Vec<u16> = (0..w)
                .map(|col| {
                    let x = col + phase;
                    if x % period < width {
                        (1 + (x / period) % fg) as u16
                    } else {
                        0
                    }
                })
                .collect();
            for _ in 0..h {
                data.extend_from_slice(&row);
            }
        }
        Shape::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            data.extend((0..h * w).map(|_| rng.random_range(0..c) as u16));
        }
    }
    HardLabelMap::new(h, w, c, data)
}

/// Uniformly random hard label.
pub fn random_label<R: Rng>(rng: &mut R, height: usize, width: usize, classes: usize) -> HardLabelMap {
    let data = (0..height * width).map(|_| rng.random_range(0..classes) as u16).collect();
    HardLabelMap::new(height, width, classes, data).expect("random classes are in range")
}

/// Random label made of axis-aligned rectangles painted over background,
/// closer to real segmentations than per-pixel noise.
pub fn random_blobs<R: Rng>(rng: &mut R, height: usize, width: usize, classes: usize, blobs: usize) -> HardLabelMap {
    let mut data = vec![0u16; height * width];
    for _ in 0..blobs {
        let class = rng.random_range(1..classes) as u16;
        let (r0, r1) = sorted_pair(rng, height);
        let (c0, c1) = sorted_pair(rng, width);
        for r in r0..=r1 {
            data[r * width + c0..=r * width + c1].fill(class);
        }
    }
    HardLabelMap::new(height, width, classes, data).expect("blob classes are in range")
}

fn sorted_pair<R: Rng>(rng: &mut R, n: usize) -> (usize, usize) {
    let a = rng.random_range(0..n);
    let b = rng.random_range(0..n);
    (a.min(b), a.max(b))
}

/// Random soft label. Each pixel is a normalized vector of random weights,
/// with some classes zeroed so exact 0 values also occur.
pub fn random_soft<R: Rng>(rng: &mut R, height: usize, width: usize, classes: usize) -> SoftLabelMap {
    let mut data = Vec::with_capacity(height * width * classes);
    let mut weights = vec![0.0; classes];
    for _ in 0..height * width {
        let keep = rng.random_range(0..classes);
        for (k, w) in weights.iter_mut().enumerate() {
            *w = if k == keep || rng.random_bool(0.7) { rng.random::<f64>() + 1e-3 } else { 0.0 };
        }
        let total: f64 = weights.iter().sum();
        data.extend(weights.iter().map(|w| w / total));
    }
    SoftLabelMap::new(height, width, classes, data).expect("normalized weights lie on the simplex")
}

/// Reference EPD: for every output pixel, walk its window, build a class
/// histogram and divide each bin by the window area.
pub fn oracle_epd(label: &HardLabelMap, factor: Factor) -> Result<SoftLabelMap> {
    let (out_h, out_w) = output_dims(label.height(), label.width(), factor)?;
    let f = factor.get();
    let classes = label.num_classes();
    let mut data = Vec::with_capacity(out_h * out_w * classes);
    for i in 0..out_h {
        for j in 0..out_w {
            let mut histogram = vec![0usize; classes];
            for di in 0..f {
                for dj in 0..f {
                    histogram[label.get(i * f + di, j * f + dj) as usize] += 1;
                }
            }
            let area = (f * f) as f64;
            data.extend(histogram.into_iter().map(|n| n as f64 / area));
        }
    }
    SoftLabelMap::new(out_h, out_w, classes, data)
}

/// Reference soft metrics computed one class at a time with separate sums.
pub fn oracle_soft_metrics(pred: &SoftLabelMap, target: &SoftLabelMap) -> Vec<SoftMetrics> {
    let n = (target.height() * target.width()) as f64;
    (0..target.num_classes())
        .map(|k| {
            let y: Vec<f64> = target.channel(k).collect();
            let p: Vec<f64> = pred.channel(k).collect();
            let t_mass: f64 = y.iter().sum();
            let p_mass: f64 = p.iter().sum();
            let inter: f64 = y.iter().zip(&p).map(|(a, b)| a * b).sum();
            let abs: f64 = y.iter().zip(&p).map(|(a, b)| (b - a).abs()).sum();
            let sq: f64 = y.iter().zip(&p).map(|(a, b)| (b - a) * (b - a)).sum();
            SoftMetrics {
                dice: (t_mass + p_mass > 0.0).then(|| 2.0 * inter / (t_mass + p_mass)),
                rad: (t_mass > 0.0).then(|| abs / t_mass),
                rd: (t_mass > 0.0).then(|| (p_mass - t_mass) / t_mass),
                rmse: Some(libm::sqrt(sq / n)),
            }
        })
        .collect()
}

/// Fraction of pixels where some class probability lies strictly inside
/// `(0, 1)`, i.e. pixels that carry boundary information.
pub fn edge_fraction(soft: &SoftLabelMap) -> f64 {
    let edges = soft
        .pixels()
        .filter(|px| px.iter().any(|&p| p > 0.0 && p < 1.0))
        .count();
    edges as f64 / (soft.height() * soft.width()) as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodResult {
    /// Worst relative area error over the foreground classes present in the
    /// input.
    pub mass_error: f64,
    pub edge_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaErrorReport {
    pub epd: MethodResult,
    pub nearest: MethodResult,
}

fn worst_relative_error(truth: &[u64], estimate: &[f64]) -> f64 {
    truth
        .iter()
        .zip(estimate)
        .skip(1)
        .filter(|(&t, _)| t > 0)
        .map(|(&t, &e)| libm::fabs(e - t as f64) / t as f64)
        .fold(0.0, f64::max)
}

/// Class-area estimates after downsampling by `factor`: `f^2` times the soft
/// class mass for EPD, `f^2` times the pixel count for nearest-neighbor.
pub fn area_error_benchmark(spec: &ShapeSpec, factor: Factor) -> Result<AreaErrorReport> {
    let label = generate(spec)?;
    let truth = label.class_counts();
    if truth.iter().skip(1).all(|&n| n == 0) {
        return Err(Error::EmptyForeground);
    }
    let area = factor.area() as f64;

    let soft = epd_label_downsample(&label, factor)?;
    let epd_est: Vec<f64> = soft.class_mass().iter().map(|m| m * area).collect();

    let nearest = nearest_label_downsample(&label, factor)?;
    let nn_est: Vec<f64> = nearest.class_counts().iter().map(|&n| n as f64 * area).collect();

    Ok(AreaErrorReport {
        epd: MethodResult {
            mass_error: worst_relative_error(&truth, &epd_est),
            edge_fraction: edge_fraction(&soft),
        },
        nearest: MethodResult {
            mass_error: worst_relative_error(&truth, &nn_est),
            edge_fraction: edge_fraction(&one_hot(&nearest)),
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BenchRow {
    pub method: &'static str,
    pub shape: &'static str,
    pub factor: usize,
    pub phase: usize,
    pub mass_error: f64,
    pub edge_fraction: f64,
}

/// Runs [`area_error_benchmark`] for every factor and every horizontal shift
/// `0..f` of the shape relative to the sampling grid.
pub fn bench_sweep(spec: &ShapeSpec, factors: &[Factor]) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &factor in factors {
        for phase in 0..factor.get() {
            let r = area_error_benchmark(&spec.shifted(phase), factor)?;
            for (method, m) in [("epd", r.epd), ("nearest", r.nearest)] {
                rows.push(BenchRow {
                    method,
                    shape: spec.shape.name(),
                    factor: factor.get(),
                    phase,
                    mass_error: m.mass_error,
                    edge_fraction: m.edge_fraction,
                });
            }
        }
    }
    Ok(rows)
}
