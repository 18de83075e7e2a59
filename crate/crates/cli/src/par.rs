//! Row-parallel drivers for the EPD window kernels.
//!
//! Output rows are split into bands and each band is filled by the same
//! kernel the serial functions use, so results are bit-identical for any
//! thread count.

use epd_core::downsample::{kernel, output_dims};
use epd_core::{Factor, HardLabelMap, ImagePlane, SoftLabelMap};
use rayon::prelude::*;

/// Environment variable capping worker threads; `0` or unset means one per
/// core.
pub const THREADS_ENV: &str = "EPD_THREADS";

pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

/// Pool sized by `threads` (0 = rayon default).
pub fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

fn fill_rows<F>(pool: &rayon::ThreadPool, out: &mut [f64], rows: usize, row_len: usize, fill: F)
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    if row_len == 0 || rows == 0 {
        return;
    }
    let band = rows.div_ceil(pool.current_num_threads() * 4).max(1);
    pool.install(|| {
        out.par_chunks_mut(band * row_len)
            .enumerate()
            .for_each(|(i, chunk)| fill(i * band, chunk));
    });
}

pub fn epd_label_downsample(pool: &rayon::ThreadPool, label: &HardLabelMap, factor: Factor) -> epd_core::Result<SoftLabelMap> {
    let (h, w) = output_dims(label.height(), label.width(), factor)?;
    let c = label.num_classes();
    let mut out = vec![0.0; h * w * c];
    fill_rows(pool, &mut out, h, w * c, |first, chunk| {
        kernel::epd_label_rows(label, factor, first, chunk)
    });
    SoftLabelMap::new(h, w, c, out)
}

pub fn epd_soft_downsample(pool: &rayon::ThreadPool, soft: &SoftLabelMap, factor: Factor) -> epd_core::Result<SoftLabelMap> {
    let (h, w) = output_dims(soft.height(), soft.width(), factor)?;
    let c = soft.num_classes();
    let mut out = vec![0.0; h * w * c];
    fill_rows(pool, &mut out, h, w * c, |first, chunk| {
        kernel::epd_soft_rows(soft, factor, first, chunk)
    });
    SoftLabelMap::new(h, w, c, out)
}

pub fn epd_image_downsample(pool: &rayon::ThreadPool, img: &ImagePlane, factor: Factor) -> epd_core::Result<ImagePlane> {
    let (h, w) = output_dims(img.height(), img.width(), factor)?;
    let mut out = vec![0.0; h * w];
    fill_rows(pool, &mut out, h, w, |first, chunk| {
        kernel::image_mean_rows(img, factor, first, chunk)
    });
    ImagePlane::new(h, w, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use epd_core::label::one_hot;
    use epd_core::synth::random_label;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parallel_matches_serial_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let label = random_label(&mut rng, 96, 64, 5);
        let img = ImagePlane::new(96, 64, (0..96 * 64).map(|_| rng.random_range(-1e8..1e8)).collect()).unwrap();
        for threads in [1, 2, 3, 8] {
            let p = pool(threads);
            for f in [1, 2, 4, 8, 16, 32] {
                let f = Factor::new(f).unwrap();
                assert_eq!(
                    epd_label_downsample(&p, &label, f).unwrap(),
                    epd_core::epd_label_downsample(&label, f).unwrap()
                );
                assert_eq!(
                    epd_soft_downsample(&p, &one_hot(&label), f).unwrap(),
                    epd_core::epd_soft_downsample(&one_hot(&label), f).unwrap()
                );
                let a = epd_image_downsample(&p, &img, f).unwrap();
                let b = epd_core::epd_image_downsample(&img, f).unwrap();
                assert!(a.data().iter().zip(b.data()).all(|(x, y)| x.to_bits() == y.to_bits()));
            }
        }
    }
}
