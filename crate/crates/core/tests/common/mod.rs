//! Helpers shared by the integration suites: deterministic image generators
//! and brute-force oracles kept independent of the library internals.
#![allow(dead_code)] // each test target uses a different subset

use pbmstego::{BinaryImage, BlockRef};
use rand::Rng;

/// Image with each pixel black with probability `density`.
pub fn random_image(rng: &mut impl Rng, w: usize, h: usize, density: f64) -> BinaryImage {
    BinaryImage::from_fn(w, h, |_, _| u8::from(rng.gen_bool(density)))
}

/// A single random 5x5 block guaranteed non-uniform.
pub fn random_nonuniform_block(rng: &mut impl Rng) -> (BinaryImage, BlockRef) {
    loop {
        let img = random_image(rng, 5, 5, 0.5);
        let ones: u32 = img.pixels().iter().map(|&p| u32::from(p)).sum();
        if ones != 0 && ones != 25 {
            return (img, BlockRef::at(0, 0));
        }
    }
}

/// Independent syndrome evaluation: per active index, row and column
/// parities via one-counting instead of XOR folding.
pub fn oracle_syndrome(img: &BinaryImage, block: &BlockRef, key: u8) -> u8 {
    let mut nibble = 0u8;
    for idx in (1..=5u8).filter(|&i| i != key) {
        let mut row_ones = 0u32;
        let mut col_ones = 0u32;
        for t in 1..=5u8 {
            let (x, y) = block.pixel(idx, t);
            row_ones += u32::from(img.get(x, y));
            let (x, y) = block.pixel(t, idx);
            col_ones += u32::from(img.get(x, y));
        }
        nibble = nibble << 1 | ((row_ones % 2) ^ (col_ones % 2)) as u8;
    }
    nibble
}

/// Scan indices of the uniform blocks of an image.
pub fn uniform_set(img: &BinaryImage) -> Vec<usize> {
    let blocks = pbmstego::partition(img).unwrap();
    blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| pbmstego::blockgrid::is_uniform(img, b))
        .map(|(i, _)| i)
        .collect()
}
