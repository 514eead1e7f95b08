//! The block-parity embedding scheme: 4 bits per 5x5 block, at most two
//! pixel flips.
//!
//! Each non-uniform block exposes a 4-bit syndrome: for the four active
//! indices (1..4 in unkeyed mode) the row parity is XORed with the column
//! parity of the same index. Flipping one off-diagonal cell toggles the
//! syndrome bits of its row and column indices, so any syndrome difference
//! of one or two bits costs one flip and any difference of three or four
//! bits costs two. Among the legal flip positions the scheme picks the one
//! whose pixels blend in best, measured by how few same-valued neighbors
//! they have in the cover.

use crate::blockgrid::{
    self, grid_dims, is_uniform, partition, select_blocks, BlockRef, GridError, KeySource,
    HEADER_BLOCKS,
};
use crate::payload::{self, BitSequence, PayloadError};
use crate::pbm::BinaryImage;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParityError {
    #[error("block is uniform and cannot carry data")]
    UniformBlock,
    #[error("empty difference set: a matching block needs no flip")]
    EmptyDiff,
    #[error("no viable flip candidate (block was uniform or the table is broken)")]
    NoViableCandidate,
    #[error("message of {message_bytes} bytes exceeds net capacity of {capacity_bytes} bytes ({} bytes over)", .message_bytes - .capacity_bytes)]
    CapacityExceeded {
        message_bytes: usize,
        capacity_bytes: usize,
    },
    #[error("the image does not hold a readable message")]
    NotAStegoImage,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Payload(#[from] PayloadError),
}

/// The 4-bit block syndrome, first active index in the most significant
/// position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Syndrome(u8);

impl Syndrome {
    /// The syndrome as a nibble.
    pub fn bits(self) -> u8 {
        self.0
    }

    /// Syndrome bit `n`, 1-based.
    pub fn bit(self, n: u8) -> u8 {
        debug_assert!((1..=4).contains(&n));
        (self.0 >> (4 - n)) & 1
    }
}

/// One or two distinct block cells to invert. Cells are (row, col), 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlipSet {
    first: (u8, u8),
    second: Option<(u8, u8)>,
}

impl FlipSet {
    pub fn single(cell: (u8, u8)) -> Self {
        FlipSet {
            first: cell,
            second: None,
        }
    }

    pub fn pair(a: (u8, u8), b: (u8, u8)) -> Self {
        assert_ne!(a, b, "flip cells must be distinct");
        FlipSet {
            first: a,
            second: Some(b),
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = (u8, u8)> + '_ {
        std::iter::once(self.first).chain(self.second)
    }

    /// Number of cells inverted: 1 or 2.
    pub fn flip_count(&self) -> usize {
        1 + usize::from(self.second.is_some())
    }
}

/// Row/column indices contributing to the syndrome: 1..=5 minus the key,
/// ascending.
fn active_indices(key: u8) -> [u8; 4] {
    assert!((1..=5).contains(&key), "key must be in 1..=5");
    let mut out = [0u8; 4];
    let mut n = 0;
    for idx in 1..=5 {
        if idx != key {
            out[n] = idx;
            n += 1;
        }
    }
    out
}

/// Computes the block syndrome under `key`.
///
/// For the n-th active index `i`, syndrome bit n is the XOR of all five bits
/// of block row `i` with all five bits of block column `i`.
pub fn syndrome(img: &BinaryImage, block: &BlockRef, key: u8) -> Result<Syndrome, ParityError> {
    if is_uniform(img, block) {
        return Err(ParityError::UniformBlock);
    }
    let mut bits = 0u8;
    for &idx in &active_indices(key) {
        let mut row_parity = 0;
        let mut col_parity = 0;
        for t in 1..=5u8 {
            let (x, y) = block.pixel(idx, t);
            row_parity ^= img.get(x, y);
            let (x, y) = block.pixel(t, idx);
            col_parity ^= img.get(x, y);
        }
        bits = bits << 1 | (row_parity ^ col_parity);
    }
    Ok(Syndrome(bits))
}

/// Reads the embedded nibble from a block: it is exactly the syndrome.
pub fn extract_block(img: &BinaryImage, block: &BlockRef, key: u8) -> Result<u8, ParityError> {
    syndrome(img, block, key).map(Syndrome::bits)
}

/// All flip sets that toggle exactly the mismatched syndrome positions, in
/// canonical order.
///
/// `diff` holds the 1-based syndrome positions where syndrome and nibble
/// disagree, ascending. Positions are mapped to actual row/column indices
/// through the active index set, then:
///
/// - one mismatch at index i: cell (i,key) or (key,i);
/// - two mismatches at i,j: cell (i,j) or (j,i) — one flip fixes both;
/// - three mismatches at i,j,k: a two-flip pair from three families,
///   (i,j)-like + (k,key)-like, (i,key)-like + (k,j)-like,
///   (key,j)-like + (k,i)-like, each expanded left to right;
/// - four mismatches at i,j,k,m: the same three families with m taking the
///   key's place.
pub fn flip_candidates(diff: &[u8], key: u8) -> Result<Vec<FlipSet>, ParityError> {
    if diff.is_empty() {
        return Err(ParityError::EmptyDiff);
    }
    assert!(diff.len() <= 4, "at most four syndrome positions exist");
    assert!(
        diff.windows(2).all(|w| w[0] < w[1]) && diff.iter().all(|&p| (1..=4).contains(&p)),
        "diff positions must be ascending values in 1..=4"
    );
    let active = active_indices(key);
    let idx = |pos: u8| active[pos as usize - 1];
    let k_cell = key;

    let candidates = match *diff {
        [a] => {
            let i = idx(a);
            vec![FlipSet::single((i, k_cell)), FlipSet::single((k_cell, i))]
        }
        [a, b] => {
            let (i, j) = (idx(a), idx(b));
            vec![FlipSet::single((i, j)), FlipSet::single((j, i))]
        }
        [a, b, c] => {
            let (i, j, k) = (idx(a), idx(b), idx(c));
            let mut out = Vec::with_capacity(12);
            expand_pairs(&mut out, [(i, j), (j, i)], [(k, k_cell), (k_cell, k)]);
            expand_pairs(&mut out, [(i, k_cell), (k_cell, i)], [(k, j), (j, k)]);
            expand_pairs(&mut out, [(k_cell, j), (j, k_cell)], [(k, i), (i, k)]);
            out
        }
        [a, b, c, d] => {
            let (i, j, k, m) = (idx(a), idx(b), idx(c), idx(d));
            let mut out = Vec::with_capacity(12);
            expand_pairs(&mut out, [(i, j), (j, i)], [(k, m), (m, k)]);
            expand_pairs(&mut out, [(i, m), (m, i)], [(k, j), (j, k)]);
            expand_pairs(&mut out, [(m, j), (j, m)], [(k, i), (i, k)]);
            out
        }
        _ => unreachable!("diff length checked above"),
    };
    Ok(candidates)
}

fn expand_pairs(out: &mut Vec<FlipSet>, firsts: [(u8, u8); 2], seconds: [(u8, u8); 2]) {
    for f in firsts {
        for s in seconds {
            out.push(FlipSet::pair(f, s));
        }
    }
}

/// How many in-bounds 8-neighbors of `(x, y)` share the cover value at
/// `(x, y)`. Flipping a low-cost pixel is less conspicuous.
pub fn adjacency_cost(cover: &BinaryImage, x: usize, y: usize) -> u32 {
    let value = cover.get(x, y);
    let mut count = 0;
    for dy in -1i64..=1 {
        for dx in -1i64..=1 {
            if dx == 0 && dy == 0 {
                continue;
            }
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if nx >= 0
                && ny >= 0
                && (nx as usize) < cover.width()
                && (ny as usize) < cover.height()
                && cover.get(nx as usize, ny as usize) == value
            {
                count += 1;
            }
        }
    }
    count
}

/// Picks the cheapest candidate that keeps the block non-uniform.
///
/// Candidates that would leave the stego block all one color are dropped:
/// the extractor would silently skip such a block and lose sync. Costs are
/// measured against the original cover so the choice does not depend on
/// embed order. Ties keep the earliest candidate.
pub fn choose_flip(
    cover: &BinaryImage,
    stego: &BinaryImage,
    block: &BlockRef,
    candidates: &[FlipSet],
) -> Result<FlipSet, ParityError> {
    if candidates.is_empty() {
        return Err(ParityError::NoViableCandidate);
    }
    let ones: i64 = block.cells().map(|(x, y)| i64::from(stego.get(x, y))).sum();
    let mut best: Option<(u32, FlipSet)> = None;
    for &candidate in candidates {
        let delta: i64 = candidate
            .cells()
            .map(|(r, c)| {
                let (x, y) = block.pixel(r, c);
                1 - 2 * i64::from(stego.get(x, y))
            })
            .sum();
        let new_ones = ones + delta;
        if new_ones == 0 || new_ones == 25 {
            continue;
        }
        let cost: u32 = candidate
            .cells()
            .map(|(r, c)| {
                let (x, y) = block.pixel(r, c);
                adjacency_cost(cover, x, y)
            })
            .sum();
        if best.is_none_or(|(b, _)| cost < b) {
            best = Some((cost, candidate));
        }
    }
    best.map(|(_, f)| f).ok_or(ParityError::NoViableCandidate)
}

/// Decides which cells to flip to make the block's syndrome equal `nibble`,
/// without mutating anything. `None` means the syndrome already matches.
pub fn flip_decision(
    cover: &BinaryImage,
    stego: &BinaryImage,
    block: &BlockRef,
    nibble: u8,
    key: u8,
) -> Result<Option<FlipSet>, ParityError> {
    debug_assert!(nibble < 16);
    let current = syndrome(stego, block, key)?;
    let mask = current.bits() ^ nibble;
    if mask == 0 {
        return Ok(None);
    }
    let diff: Vec<u8> = (1..=4).filter(|&n| mask >> (4 - n) & 1 == 1).collect();
    let candidates = flip_candidates(&diff, key)?;
    choose_flip(cover, stego, block, &candidates).map(Some)
}

/// Embeds one nibble into a block of the stego image, flipping at most two
/// pixels. Returns what was flipped.
pub fn embed_block(
    cover: &BinaryImage,
    stego: &mut BinaryImage,
    block: &BlockRef,
    nibble: u8,
    key: u8,
) -> Result<Option<FlipSet>, ParityError> {
    let decision = flip_decision(cover, stego, block, nibble, key)?;
    if let Some(flips) = decision {
        apply_flips(stego, block, flips);
    }
    Ok(decision)
}

/// Inverts the cells named by `flips` within `block`.
pub fn apply_flips(img: &mut BinaryImage, block: &BlockRef, flips: FlipSet) {
    for (r, c) in flips.cells() {
        let (x, y) = block.pixel(r, c);
        img.flip(x, y);
    }
}

/// What one embedded block did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockOutcome {
    pub block: BlockRef,
    pub nibble: u8,
    pub flips: Option<FlipSet>,
}

/// Audit trail of a whole-message embed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbedReport {
    pub blocks_used: usize,
    pub bits_embedded: usize,
    pub total_flips: usize,
    pub per_block: Vec<BlockOutcome>,
}

/// Hides `message` in a copy of `cover` and reports what changed.
///
/// The framed stream (32-bit length header, then the payload) is cut into
/// nibbles; the header fills the first eight usable blocks, the payload
/// spreads over the remaining usable blocks at an even stride. Uniform
/// blocks and margins are never touched.
pub fn embed_message(
    cover: &BinaryImage,
    message: &[u8],
    keys: &KeySource,
) -> Result<(BinaryImage, EmbedReport), ParityError> {
    let blocks = partition(cover)?;
    let (_, grid_cols) = grid_dims(cover);
    let keys_by_block = keys.resolve(blocks.len())?;
    let usable: Vec<BlockRef> = blocks
        .into_iter()
        .filter(|b| !is_uniform(cover, b))
        .collect();

    let net_capacity = (4 * usable.len()).saturating_sub(32) / 8;
    if message.len() > net_capacity {
        return Err(ParityError::CapacityExceeded {
            message_bytes: message.len(),
            capacity_bytes: net_capacity,
        });
    }

    let framed = payload::frame_message(message)?;
    let nibbles = payload::to_nibbles(&framed);
    let payload_nibbles = nibbles.len() - HEADER_BLOCKS;

    let mut plan = select_blocks(&usable, payload_nibbles)?;
    plan.keys = plan
        .blocks()
        .map(|b| keys_by_block[b.scan_index(grid_cols)])
        .collect();

    let mut stego = cover.clone();
    let mut per_block = Vec::with_capacity(nibbles.len());
    let mut total_flips = 0;
    for ((block, nibble), key) in plan.blocks().zip(&nibbles).zip(&plan.keys) {
        let flips = embed_block(cover, &mut stego, block, *nibble, *key)?;
        total_flips += flips.map_or(0, |f| f.flip_count());
        per_block.push(BlockOutcome {
            block: *block,
            nibble: *nibble,
            flips,
        });
    }

    let report = EmbedReport {
        blocks_used: per_block.len(),
        bits_embedded: 32 + message.len() * 8,
        total_flips,
        per_block,
    };
    Ok((stego, report))
}

/// Recovers the message embedded by [`embed_message`] under the same key
/// source.
pub fn extract_message(stego: &BinaryImage, keys: &KeySource) -> Result<Vec<u8>, ParityError> {
    let blocks = partition(stego)?;
    let (_, grid_cols) = grid_dims(stego);
    let keys_by_block = keys.resolve(blocks.len())?;
    let usable: Vec<BlockRef> = blocks
        .into_iter()
        .filter(|b| !is_uniform(stego, b))
        .collect();
    if usable.len() < HEADER_BLOCKS {
        return Err(ParityError::NotAStegoImage);
    }

    let mut bits = BitSequence::new();
    let key_of = |b: &BlockRef| keys_by_block[b.scan_index(grid_cols)];
    for block in &usable[..HEADER_BLOCKS] {
        bits.push_nibble(extract_block(stego, block, key_of(block))?);
    }
    let payload_bits = bits
        .bits()
        .iter()
        .fold(0u64, |acc, &b| acc << 1 | u64::from(b));

    // A garbage header can claim up to 2^32-1 bits; compare before casting.
    let payload_nibbles = payload_bits.div_ceil(4);
    if payload_nibbles > 0 {
        if ((usable.len() - HEADER_BLOCKS) as u64) < payload_nibbles {
            return Err(ParityError::NotAStegoImage);
        }
        let payload_nibbles = payload_nibbles as usize;
        let stride = blockgrid::payload_stride(usable.len(), payload_nibbles);
        for k in 0..payload_nibbles {
            let block = &usable[HEADER_BLOCKS + k * stride];
            bits.push_nibble(extract_block(stego, block, key_of(block))?);
        }
    }
    Ok(payload::unframe_message(&bits)?)
}
