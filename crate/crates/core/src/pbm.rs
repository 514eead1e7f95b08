//! Reader and writer for netpbm bitmap (PBM) images, plain `P1` and raw `P4`.
//!
//! Pixels follow the PBM convention: 1 is black, 0 is white. Raw rasters pack
//! each row into `ceil(width/8)` bytes, most significant bit first, with zero
//! padding at the end of every row.

use thiserror::Error;

/// Hard cap on each image axis; headers beyond this are rejected.
pub const MAX_DIMENSION: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PbmError {
    #[error("unsupported magic number (expected P1 or P4)")]
    BadMagic,
    #[error("bad header: {0}")]
    BadHeader(&'static str),
    #[error("raster data shorter than the header promises")]
    Truncated,
    #[error("plain raster contains a character other than 0, 1 or whitespace")]
    BadDigit,
}

/// A black-and-white image. 1 is black, 0 is white.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl BinaryImage {
    /// All-white image of the given size.
    ///
    /// Panics if either dimension is zero.
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        BinaryImage {
            width,
            height,
            pixels: vec![0; width * height],
        }
    }

    /// Builds an image from a row-major pixel grid of 0/1 values.
    ///
    /// Panics if the grid length is not `width * height` or a value is not 0 or 1.
    pub fn from_pixels(width: usize, height: usize, pixels: Vec<u8>) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        assert_eq!(pixels.len(), width * height, "pixel grid size mismatch");
        assert!(
            pixels.iter().all(|&p| p <= 1),
            "pixel values must be 0 or 1"
        );
        BinaryImage {
            width,
            height,
            pixels,
        }
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y) & 1);
            }
        }
        Self::from_pixels(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Pixel value at column `x`, row `y`.
    pub fn get(&self, x: usize, y: usize) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[y * self.width + x] = value & 1;
    }

    /// Inverts the pixel at `(x, y)`.
    pub fn flip(&mut self, x: usize, y: usize) {
        self.pixels[y * self.width + x] ^= 1;
    }

    /// Row-major pixel grid.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Number of pixels that differ between two same-sized images.
    pub fn hamming_distance(&self, other: &BinaryImage) -> usize {
        assert_eq!(self.width, other.width);
        assert_eq!(self.height, other.height);
        self.pixels
            .iter()
            .zip(&other.pixels)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// Which PBM flavor a file uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbmVariant {
    /// Plain text, one ASCII digit per pixel.
    AsciiP1,
    /// Packed binary raster.
    RawP4,
}

/// Reads the magic number without decoding the raster.
pub fn sniff_variant(data: &[u8]) -> Result<PbmVariant, PbmError> {
    match data.get(..2) {
        Some(b"P1") => Ok(PbmVariant::AsciiP1),
        Some(b"P4") => Ok(PbmVariant::RawP4),
        _ => Err(PbmError::BadMagic),
    }
}

/// Decodes a PBM file (P1 or P4).
///
/// Comment lines starting with `#` are accepted between the magic number and
/// the dimensions. Row padding bits in a P4 raster are ignored, whatever their
/// value.
pub fn decode_pbm(data: &[u8]) -> Result<BinaryImage, PbmError> {
    let variant = sniff_variant(data)?;
    let mut pos = 2;

    let width = parse_dimension(data, &mut pos, true)?;
    let height = parse_dimension(data, &mut pos, false)?;

    match variant {
        PbmVariant::AsciiP1 => decode_p1_raster(data, pos, width, height),
        PbmVariant::RawP4 => {
            // Exactly one whitespace byte separates the header from the raster.
            match data.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                _ => return Err(PbmError::BadHeader("missing separator before raster")),
            }
            decode_p4_raster(&data[pos..], width, height)
        }
    }
}

fn parse_dimension(
    data: &[u8],
    pos: &mut usize,
    comments_allowed: bool,
) -> Result<usize, PbmError> {
    skip_separators(data, pos, comments_allowed);
    let start = *pos;
    while *pos < data.len() && data[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return Err(PbmError::BadHeader("missing or non-numeric dimension"));
    }
    let text = std::str::from_utf8(&data[start..*pos]).expect("digits are ascii");
    let value: usize = text
        .parse()
        .map_err(|_| PbmError::BadHeader("dimension out of range"))?;
    if value == 0 {
        return Err(PbmError::BadHeader("dimension must be positive"));
    }
    if value > MAX_DIMENSION {
        return Err(PbmError::BadHeader("dimension exceeds the 1e6 cap"));
    }
    Ok(value)
}

fn skip_separators(data: &[u8], pos: &mut usize, comments_allowed: bool) {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if comments_allowed && *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        return;
    }
}

fn decode_p1_raster(
    data: &[u8],
    mut pos: usize,
    width: usize,
    height: usize,
) -> Result<BinaryImage, PbmError> {
    let total = width * height;
    let mut pixels = Vec::new();
    while pixels.len() < total && pos < data.len() {
        match data[pos] {
            b'0' => pixels.push(0),
            b'1' => pixels.push(1),
            b if b.is_ascii_whitespace() => {}
            _ => return Err(PbmError::BadDigit),
        }
        pos += 1;
    }
    if pixels.len() < total {
        return Err(PbmError::Truncated);
    }
    Ok(BinaryImage::from_pixels(width, height, pixels))
}

fn decode_p4_raster(raster: &[u8], width: usize, height: usize) -> Result<BinaryImage, PbmError> {
    let row_bytes = width.div_ceil(8);
    if raster.len() < row_bytes * height {
        return Err(PbmError::Truncated);
    }
    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        let row = &raster[y * row_bytes..(y + 1) * row_bytes];
        for x in 0..width {
            let byte = row[x / 8];
            pixels.push((byte >> (7 - x % 8)) & 1);
        }
    }
    Ok(BinaryImage::from_pixels(width, height, pixels))
}

/// Encodes an image as PBM. Never emits comments; P4 rows are padded with
/// zero bits to a byte boundary.
pub fn encode_pbm(img: &BinaryImage, variant: PbmVariant) -> Vec<u8> {
    let mut out = Vec::new();
    match variant {
        PbmVariant::AsciiP1 => {
            out.extend_from_slice(format!("P1\n{} {}\n", img.width(), img.height()).as_bytes());
            for y in 0..img.height() {
                for x in 0..img.width() {
                    out.push(b'0' + img.get(x, y));
                }
                out.push(b'\n');
            }
        }
        PbmVariant::RawP4 => {
            out.extend_from_slice(format!("P4\n{} {}\n", img.width(), img.height()).as_bytes());
            for y in 0..img.height() {
                let mut byte = 0u8;
                for x in 0..img.width() {
                    byte |= img.get(x, y) << (7 - x % 8);
                    if x % 8 == 7 {
                        out.push(byte);
                        byte = 0;
                    }
                }
                if !img.width().is_multiple_of(8) {
                    out.push(byte);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smallest_p1() {
        let img = decode_pbm(b"P1\n1 1\n1\n").unwrap();
        assert_eq!((img.width(), img.height()), (1, 1));
        assert_eq!(img.get(0, 0), 1);
    }

    #[test]
    fn p4_with_comment_msb_first() {
        let mut data = b"P4\n# c\n5 5\n".to_vec();
        data.extend_from_slice(&[0x80, 0x00, 0x00, 0x00, 0x00]);
        let img = decode_pbm(&data).unwrap();
        assert_eq!((img.width(), img.height()), (5, 5));
        for y in 0..5 {
            for x in 0..5 {
                let expected = u8::from(x == 0 && y == 0);
                assert_eq!(img.get(x, y), expected, "pixel ({x},{y})");
            }
        }
    }

    #[test]
    fn p4_truncated_raster() {
        let mut data = b"P4\n5 5\n".to_vec();
        data.extend_from_slice(&[0xff; 4]);
        assert_eq!(decode_pbm(&data), Err(PbmError::Truncated));
    }

    #[test]
    fn p1_truncated_raster() {
        assert_eq!(decode_pbm(b"P1\n2 2\n1 0 1"), Err(PbmError::Truncated));
    }

    #[test]
    fn p1_bad_digit() {
        assert_eq!(decode_pbm(b"P1\n2 2\n1 0 2 1"), Err(PbmError::BadDigit));
    }

    #[test]
    fn bad_magics() {
        assert_eq!(decode_pbm(b"P2\n1 1\n1\n"), Err(PbmError::BadMagic));
        assert_eq!(decode_pbm(b"P5\n1 1\n1\n"), Err(PbmError::BadMagic));
        assert_eq!(decode_pbm(b""), Err(PbmError::BadMagic));
    }

    #[test]
    fn bad_headers() {
        assert!(matches!(
            decode_pbm(b"P1\nx 1\n1\n"),
            Err(PbmError::BadHeader(_))
        ));
        assert!(matches!(
            decode_pbm(b"P1\n1\n"),
            Err(PbmError::BadHeader(_))
        ));
        assert!(matches!(
            decode_pbm(b"P1\n0 1\n"),
            Err(PbmError::BadHeader(_))
        ));
        assert!(matches!(
            decode_pbm(b"P4\n1000001 1\n"),
            Err(PbmError::BadHeader(_))
        ));
    }

    #[test]
    fn encode_single_black_p4() {
        let mut img = BinaryImage::new(1, 1);
        img.set(0, 0, 1);
        let mut expected = b"P4\n1 1\n".to_vec();
        expected.push(0x80);
        assert_eq!(encode_pbm(&img, PbmVariant::RawP4), expected);
    }

    #[test]
    fn encode_single_white_p1() {
        let img = BinaryImage::new(1, 1);
        assert_eq!(encode_pbm(&img, PbmVariant::AsciiP1), b"P1\n1 1\n0\n");
    }

    #[test]
    fn nonzero_pad_bits_ignored_on_read() {
        // 5 wide: bits 5..8 of each row byte are padding. Stuff them with ones.
        let mut data = b"P4\n5 2\n".to_vec();
        data.extend_from_slice(&[0x87, 0x07]);
        let img = decode_pbm(&data).unwrap();
        assert_eq!(img.pixels(), &[1, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn p4_encoded_size_is_exact() {
        let img = BinaryImage::new(17, 3);
        let bytes = encode_pbm(&img, PbmVariant::RawP4);
        let header_len = b"P4\n17 3\n".len();
        assert_eq!(bytes.len(), header_len + 3 * 3);
    }

    fn arb_image() -> impl Strategy<Value = BinaryImage> {
        (1usize..=17, 1usize..=9).prop_flat_map(|(w, h)| {
            proptest::collection::vec(0u8..=1, w * h)
                .prop_map(move |px| BinaryImage::from_pixels(w, h, px))
        })
    }

    proptest! {
        #[test]
        fn round_trip_both_variants(img in arb_image()) {
            for variant in [PbmVariant::AsciiP1, PbmVariant::RawP4] {
                let encoded = encode_pbm(&img, variant);
                prop_assert_eq!(decode_pbm(&encoded).unwrap(), img.clone());
            }
        }

        #[test]
        fn p4_pad_bits_are_zero(img in arb_image()) {
            let encoded = encode_pbm(&img, PbmVariant::RawP4);
            let row_bytes = img.width().div_ceil(8);
            let raster = &encoded[encoded.len() - row_bytes * img.height()..];
            let pad = (8 - img.width() % 8) % 8;
            let mask = if pad == 0 { 0 } else { (1u8 << pad) - 1 };
            for row in raster.chunks(row_bytes) {
                prop_assert_eq!(row[row_bytes - 1] & mask, 0);
            }
        }
    }
}
