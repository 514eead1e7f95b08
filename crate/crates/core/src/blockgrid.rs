//! Partitioning a cover image into 5x5 carrier blocks and deciding which
//! blocks carry data.
//!
//! Blocks are scanned row major. Uniform blocks (all black or all white)
//! cannot hold a syndrome and are skipped everywhere. The first eight usable
//! blocks always carry the 32-bit length header; payload blocks follow at a
//! fixed stride so the touched blocks spread over the whole image.

use crate::pbm::BinaryImage;
use thiserror::Error;

/// Side length of a carrier block.
pub const BLOCK_SIZE: usize = 5;

/// Usable blocks reserved for the framed length header (32 bits, 4 per block).
pub const HEADER_BLOCKS: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("image is {width}x{height}; both dimensions must be at least {BLOCK_SIZE}")]
    ImageTooSmall { width: usize, height: usize },
    #[error("not enough usable blocks: need {needed_blocks}, have {usable_blocks}")]
    CapacityExceeded {
        needed_blocks: usize,
        usable_blocks: usize,
    },
    #[error("key list has {got} entries but the image has {needed} blocks")]
    KeyListTooShort { needed: usize, got: usize },
    #[error("key list line {line}: expected an integer in 1..=5")]
    BadKeyList { line: usize },
}

/// One 5x5 tile of the block grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRef {
    pub grid_row: usize,
    pub grid_col: usize,
    /// Pixel column of the top-left cell.
    pub origin_x: usize,
    /// Pixel row of the top-left cell.
    pub origin_y: usize,
}

impl BlockRef {
    pub fn at(grid_row: usize, grid_col: usize) -> Self {
        BlockRef {
            grid_row,
            grid_col,
            origin_x: BLOCK_SIZE * grid_col,
            origin_y: BLOCK_SIZE * grid_row,
        }
    }

    /// Image coordinates of block cell (`row`, `col`), both 1-based.
    pub fn pixel(&self, row: u8, col: u8) -> (usize, usize) {
        debug_assert!((1..=5).contains(&row) && (1..=5).contains(&col));
        (
            self.origin_x + col as usize - 1,
            self.origin_y + row as usize - 1,
        )
    }

    /// The 25 pixel positions of this block, row major.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=5u8).flat_map(move |row| (1..=5u8).map(move |col| self.pixel(row, col)))
    }

    /// Position of this block in row-major scan order.
    pub fn scan_index(&self, grid_cols: usize) -> usize {
        self.grid_row * grid_cols + self.grid_col
    }
}

/// Number of grid rows and columns that fit in the image.
pub fn grid_dims(img: &BinaryImage) -> (usize, usize) {
    (img.height() / BLOCK_SIZE, img.width() / BLOCK_SIZE)
}

/// Splits the image into 5x5 blocks in row-major scan order. Pixels in the
/// right/bottom margins (width or height mod 5) belong to no block.
pub fn partition(img: &BinaryImage) -> Result<Vec<BlockRef>, GridError> {
    if img.width() < BLOCK_SIZE || img.height() < BLOCK_SIZE {
        return Err(GridError::ImageTooSmall {
            width: img.width(),
            height: img.height(),
        });
    }
    let (rows, cols) = grid_dims(img);
    let mut blocks = Vec::with_capacity(rows * cols);
    for gr in 0..rows {
        for gc in 0..cols {
            blocks.push(BlockRef::at(gr, gc));
        }
    }
    Ok(blocks)
}

/// True when all 25 cells share one value.
pub fn is_uniform(img: &BinaryImage, block: &BlockRef) -> bool {
    let first = img.get(block.origin_x, block.origin_y);
    block.cells().all(|(x, y)| img.get(x, y) == first)
}

/// Embedding capacity of an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capacity {
    /// 4 bits for every block, uniform or not.
    pub gross_bits: usize,
    /// 4 bits for every non-uniform block.
    pub usable_bits: usize,
    /// Whole message bytes after the 32-bit header is paid for.
    pub net_payload_bytes: usize,
}

pub fn capacity(img: &BinaryImage) -> Capacity {
    let Ok(blocks) = partition(img) else {
        return Capacity {
            gross_bits: 0,
            usable_bits: 0,
            net_payload_bytes: 0,
        };
    };
    let usable = blocks.iter().filter(|b| !is_uniform(img, b)).count();
    let usable_bits = 4 * usable;
    Capacity {
        gross_bits: 4 * blocks.len(),
        usable_bits,
        net_payload_bytes: usable_bits.saturating_sub(32) / 8,
    }
}

/// Which blocks carry which part of the framed stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbedPlan {
    /// The first [`HEADER_BLOCKS`] usable blocks, carrying the length header.
    pub header_blocks: Vec<BlockRef>,
    /// Payload carriers, every `stride`-th usable block after the header.
    pub payload_blocks: Vec<BlockRef>,
    pub stride: usize,
    /// Key for each planned block, header first then payload. All 5 in
    /// unkeyed mode.
    pub keys: Vec<u8>,
}

impl EmbedPlan {
    /// Planned blocks in embed order, header then payload.
    pub fn blocks(&self) -> impl Iterator<Item = &BlockRef> {
        self.header_blocks.iter().chain(self.payload_blocks.iter())
    }
}

/// Picks carrier blocks from the usable list: the header goes into the first
/// eight, the payload into evenly strided blocks after them.
pub fn select_blocks(usable: &[BlockRef], payload_nibbles: usize) -> Result<EmbedPlan, GridError> {
    if usable.len() < HEADER_BLOCKS + payload_nibbles {
        return Err(GridError::CapacityExceeded {
            needed_blocks: HEADER_BLOCKS + payload_nibbles,
            usable_blocks: usable.len(),
        });
    }
    let stride = payload_stride(usable.len(), payload_nibbles);
    let payload_blocks = (0..payload_nibbles)
        .map(|k| usable[HEADER_BLOCKS + k * stride])
        .collect();
    Ok(EmbedPlan {
        header_blocks: usable[..HEADER_BLOCKS].to_vec(),
        payload_blocks,
        stride,
        keys: vec![5; HEADER_BLOCKS + payload_nibbles],
    })
}

/// Spacing between payload carriers within the usable list. The extractor
/// recomputes this from the header, so it must depend only on the usable
/// count and the nibble count.
pub fn payload_stride(usable_count: usize, payload_nibbles: usize) -> usize {
    (usable_count - HEADER_BLOCKS)
        .checked_div(payload_nibbles)
        .map_or(1, |stride| stride.max(1))
}

/// Per-block keys in scan order, derived from a shared 64-bit seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySequence {
    pub seed: u64,
    pub values: Vec<u8>,
}

/// Expands a seed into one key in 1..=5 per block, using a 64-bit linear
/// congruential step and the high state bits.
pub fn key_sequence(seed: u64, count: usize) -> KeySequence {
    let mut state = seed;
    let values = (0..count)
        .map(|_| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) % 5) as u8 + 1
        })
        .collect();
    KeySequence { seed, values }
}

/// Where per-block keys come from. Both sides must agree on this out of band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeySource {
    /// Every block uses key 5, the classic row/column-5 scheme.
    Unkeyed,
    /// Keys generated from a shared seed.
    Seed(u64),
    /// Explicit per-block keys in scan order.
    KeyList(Vec<u8>),
}

impl KeySource {
    /// One key per grid block in scan order.
    pub fn resolve(&self, block_count: usize) -> Result<Vec<u8>, GridError> {
        match self {
            KeySource::Unkeyed => Ok(vec![5; block_count]),
            KeySource::Seed(seed) => Ok(key_sequence(*seed, block_count).values),
            KeySource::KeyList(keys) => {
                if keys.len() < block_count {
                    return Err(GridError::KeyListTooShort {
                        needed: block_count,
                        got: keys.len(),
                    });
                }
                Ok(keys[..block_count].to_vec())
            }
        }
    }
}

/// Parses a key list file: one integer in 1..=5 per line, line i holding the
/// key for the i-th block in scan order. Blank lines are skipped.
pub fn parse_key_list(text: &str) -> Result<Vec<u8>, GridError> {
    let mut keys = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<u8>() {
            Ok(k) if (1..=5).contains(&k) => keys.push(k),
            _ => return Err(GridError::BadKeyList { line: idx + 1 }),
        }
    }
    Ok(keys)
}
