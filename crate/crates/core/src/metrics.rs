//! Quality measures comparing a stego image against its cover.
//!
//! Three criteria: plain pixel similarity, the mean of a 3x3
//! neighbor-average map, and the standard deviation of the difference
//! between the two maps. Generic over the float width; the crate root
//! exports f32/f64 aliases.

use crate::pbm::BinaryImage;
use num_traits::{Float, FromPrimitive};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("images are {aw}x{ah} and {bw}x{bh}; metrics need equal dimensions")]
    DimensionMismatch {
        aw: usize,
        ah: usize,
        bw: usize,
        bh: usize,
    },
}

/// All three criteria in one place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport<F> {
    /// Fraction of pixels the two images agree on.
    pub similarity: F,
    /// Mean of the first image's neighbor-average map.
    pub avg_original: F,
    /// Mean of the second image's neighbor-average map.
    pub avg_stego: F,
    pub avg_delta: F,
    /// Population standard deviation of the per-pixel map difference.
    pub std_dev_delta: F,
}

fn check_dims(a: &BinaryImage, b: &BinaryImage) -> Result<(), MetricsError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(MetricsError::DimensionMismatch {
            aw: a.width(),
            ah: a.height(),
            bw: b.width(),
            bh: b.height(),
        });
    }
    Ok(())
}

fn ratio<F: Float + FromPrimitive>(num: usize, den: usize) -> F {
    F::from_usize(num).unwrap() / F::from_usize(den).unwrap()
}

/// Fraction of positions where the two images match.
pub fn similarity<F: Float + FromPrimitive>(
    a: &BinaryImage,
    b: &BinaryImage,
) -> Result<F, MetricsError> {
    check_dims(a, b)?;
    let total = a.width() * a.height();
    Ok(ratio(total - a.hamming_distance(b), total))
}

/// Mean pixel value over the 3x3 window centered at each pixel, window
/// clipped at the borders, center included. Row-major, one value per pixel.
pub fn neighbor_average_map<F: Float + FromPrimitive>(img: &BinaryImage) -> Vec<F> {
    let (w, h) = (img.width(), img.height());
    let mut map = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let mut ones = 0usize;
            let mut cells = 0usize;
            for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                    ones += img.get(nx, ny) as usize;
                    cells += 1;
                }
            }
            map.push(ratio(ones, cells));
        }
    }
    map
}

/// Full report for an image pair.
pub fn compare<F: Float + FromPrimitive>(
    a: &BinaryImage,
    b: &BinaryImage,
) -> Result<MetricsReport<F>, MetricsError> {
    check_dims(a, b)?;
    let map_a = neighbor_average_map::<F>(a);
    let map_b = neighbor_average_map::<F>(b);
    let n = F::from_usize(map_a.len()).unwrap();

    let mean = |m: &[F]| m.iter().fold(F::zero(), |acc, &v| acc + v) / n;
    let avg_original = mean(&map_a);
    let avg_stego = mean(&map_b);

    // Welford's recurrence over the per-pixel map difference.
    let mut count = F::zero();
    let mut running_mean = F::zero();
    let mut m2 = F::zero();
    for (&va, &vb) in map_a.iter().zip(&map_b) {
        let d = vb - va;
        count = count + F::one();
        let delta = d - running_mean;
        running_mean = running_mean + delta / count;
        m2 = m2 + delta * (d - running_mean);
    }
    let std_dev_delta = (m2 / count).sqrt();

    Ok(MetricsReport {
        similarity: similarity(a, b)?,
        avg_original,
        avg_stego,
        avg_delta: (avg_stego - avg_original).abs(),
        std_dev_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn similarity_identical() {
        let img = BinaryImage::from_fn(9, 4, |x, y| ((x ^ y) & 1) as u8);
        assert_eq!(similarity::<f64>(&img, &img).unwrap(), 1.0);
    }

    #[test]
    fn similarity_one_pixel_off() {
        let a = BinaryImage::new(5, 5);
        let mut b = a.clone();
        b.set(2, 3, 1);
        assert_eq!(similarity::<f64>(&a, &b).unwrap(), 0.96);
        assert_eq!(similarity::<f64>(&b, &a).unwrap(), 0.96);
    }

    #[test]
    fn similarity_rejects_mismatched_dims() {
        let a = BinaryImage::new(5, 5);
        let b = BinaryImage::new(5, 6);
        assert!(similarity::<f64>(&a, &b).is_err());
    }

    #[test]
    fn map_of_blank_image() {
        let img = BinaryImage::new(4, 3);
        assert!(neighbor_average_map::<f64>(&img).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn map_of_single_cell() {
        let mut img = BinaryImage::new(1, 1);
        img.set(0, 0, 1);
        assert_eq!(neighbor_average_map::<f64>(&img), vec![1.0]);
    }

    #[test]
    fn map_center_pixel() {
        let mut img = BinaryImage::new(3, 3);
        img.set(1, 1, 1);
        let map = neighbor_average_map::<f64>(&img);
        assert!((map[4] - 1.0 / 9.0).abs() < 1e-15);
        // Corner windows hold 4 cells, one of them black.
        assert!((map[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn map_of_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let img = BinaryImage::from_fn(11, 7, |_, _| rng.gen_range(0..=1));
        let inv = BinaryImage::from_fn(11, 7, |x, y| 1 - img.get(x, y));
        let m = neighbor_average_map::<f64>(&img);
        let mi = neighbor_average_map::<f64>(&inv);
        for (a, b) in m.iter().zip(&mi) {
            assert!((a + b - 1.0).abs() < 1e-12);
            assert!((0.0..=1.0).contains(a));
        }
    }

    #[test]
    fn compare_identity() {
        let img = BinaryImage::from_fn(10, 10, |x, y| ((x + 2 * y) % 3 == 0) as u8);
        let r = compare::<f64>(&img, &img).unwrap();
        assert_eq!(r.similarity, 1.0);
        assert_eq!(r.avg_delta, 0.0);
        assert_eq!(r.std_dev_delta, 0.0);
    }

    #[test]
    fn compare_opposites() {
        let white = BinaryImage::new(5, 5);
        let black = BinaryImage::from_fn(5, 5, |_, _| 1);
        let r = compare::<f64>(&white, &black).unwrap();
        assert_eq!(r.similarity, 0.0);
        assert_eq!(r.avg_delta, 1.0);
        assert_eq!(r.std_dev_delta, 0.0);
    }

    #[test]
    fn std_dev_matches_two_pass_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let w = rng.gen_range(3..30);
            let h = rng.gen_range(3..30);
            let a = BinaryImage::from_fn(w, h, |_, _| rng.gen_range(0..=1));
            let b = BinaryImage::from_fn(w, h, |_, _| rng.gen_range(0..=1));
            let r = compare::<f64>(&a, &b).unwrap();

            let ma = neighbor_average_map::<f64>(&a);
            let mb = neighbor_average_map::<f64>(&b);
            let diffs: Vec<f64> = ma.iter().zip(&mb).map(|(x, y)| y - x).collect();
            let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
            let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / diffs.len() as f64;
            assert!((r.std_dev_delta - var.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn f32_and_f64_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let a = BinaryImage::from_fn(16, 16, |_, _| rng.gen_range(0..=1));
        let b = BinaryImage::from_fn(16, 16, |_, _| rng.gen_range(0..=1));
        let r64 = compare::<f64>(&a, &b).unwrap();
        let r32 = compare::<f32>(&a, &b).unwrap();
        assert!((r64.similarity - f64::from(r32.similarity)).abs() < 1e-6);
        assert!((r64.std_dev_delta - f64::from(r32.std_dev_delta)).abs() < 1e-5);
    }
}
