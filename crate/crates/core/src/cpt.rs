//! Weight-matrix baseline scheme: r bits per m x n block, at most two flips.
//!
//! A block's residue is the weighted sum of the block XOR a key matrix,
//! modulo 2^r. Embedding means nudging the residue onto the wanted digit by
//! flipping one or two cells; as long as the weight matrix contains every
//! value in 1..2^r-1 such a flip set always exists. Unlike the parity
//! scheme, every block carries data: uniform blocks are not skipped and
//! carriers are not spread out.

use crate::parity::FlipSet;
use crate::payload::{self, BitSequence, PayloadError};
use crate::pbm::BinaryImage;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CptError {
    #[error("bad config: {0}")]
    InvalidConfig(String),
    #[error("block has {got} cells but the config wants {rows}x{cols}")]
    DimensionMismatch {
        got: usize,
        rows: usize,
        cols: usize,
    },
    #[error("no one- or two-flip solution exists; the weight matrix is invalid")]
    NoSolution,
    #[error("image of {width}x{height} cannot fit one {rows}x{cols} block")]
    ImageTooSmall {
        width: usize,
        height: usize,
        rows: usize,
        cols: usize,
    },
    #[error("message of {message_bytes} bytes exceeds capacity of {capacity_bytes} bytes ({} bytes over)", .message_bytes - .capacity_bytes)]
    CapacityExceeded {
        message_bytes: usize,
        capacity_bytes: usize,
    },
    #[error("the image does not hold a readable message")]
    NotAStegoImage,
    #[error(transparent)]
    Payload(#[from] PayloadError),
}

/// Key matrix, weight matrix and digit width for the baseline scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CptConfig {
    rows: usize,
    cols: usize,
    bits_per_block: u32,
    key: Vec<u8>,
    weights: Vec<u32>,
}

impl CptConfig {
    /// Validates and builds a config. `key` and `weights` are row-major
    /// m x n matrices; weights must live in [1, 2^r - 1] and cover every
    /// value in that range at least once.
    pub fn new(
        rows: usize,
        cols: usize,
        bits_per_block: u32,
        key: Vec<u8>,
        weights: Vec<u32>,
    ) -> Result<Self, CptError> {
        let fail = |msg: String| Err(CptError::InvalidConfig(msg));
        if rows == 0 || cols == 0 {
            return fail("block dimensions must be positive".into());
        }
        if rows > 255 || cols > 255 {
            return fail("block dimensions above 255 are not supported".into());
        }
        let cells = rows * cols;
        if bits_per_block == 0 {
            return fail("bits per block must be positive".into());
        }
        // r <= floor(log2(mn + 1))
        if bits_per_block >= 32 || (1usize << bits_per_block) > cells + 1 {
            return fail(format!(
                "{bits_per_block} bits per block exceeds the log2({cells}+1) bound"
            ));
        }
        if key.len() != cells {
            return fail(format!(
                "key matrix has {} cells, expected {cells}",
                key.len()
            ));
        }
        if key.iter().any(|&k| k > 1) {
            return fail("key matrix entries must be 0 or 1".into());
        }
        if weights.len() != cells {
            return fail(format!(
                "weight matrix has {} cells, expected {cells}",
                weights.len()
            ));
        }
        let modulus = 1u32 << bits_per_block;
        if weights.iter().any(|&w| w == 0 || w >= modulus) {
            return fail(format!("weights must lie in 1..={}", modulus - 1));
        }
        for wanted in 1..modulus {
            if !weights.contains(&wanted) {
                return fail(format!(
                    "weight matrix never takes value {wanted}; every value in 1..={} is required",
                    modulus - 1
                ));
            }
        }
        Ok(CptConfig {
            rows,
            cols,
            bits_per_block,
            key,
            weights,
        })
    }

    /// Zero key and weights cycling 1..2^r-1 in row-major order.
    pub fn repeating(rows: usize, cols: usize, bits_per_block: u32) -> Result<Self, CptError> {
        let cells = rows * cols;
        let top = (1u32 << bits_per_block) - 1;
        let weights = (0..cells).map(|i| (i as u32 % top) + 1).collect();
        Self::new(rows, cols, bits_per_block, vec![0; cells], weights)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bits_per_block(&self) -> u32 {
        self.bits_per_block
    }

    fn cells(&self) -> usize {
        self.rows * self.cols
    }

    fn modulus(&self) -> u32 {
        1 << self.bits_per_block
    }

    /// Parses the config file format: a `rows cols bits` line, then `rows`
    /// lines of 0/1 digits for the key matrix, then `rows` lines of
    /// space-separated weights. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, CptError> {
        let bad = |msg: String| CptError::InvalidConfig(msg);
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| bad("empty config".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(bad("first line must be: rows cols bits_per_block".into()));
        }
        let parse_usize = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| bad(format!("bad number {s:?}")))
        };
        let rows = parse_usize(fields[0])?;
        let cols = parse_usize(fields[1])?;
        let bits: u32 = fields[2]
            .parse()
            .map_err(|_| bad(format!("bad number {:?}", fields[2])))?;

        let mut key = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| bad(format!("missing key matrix row {}", r + 1)))?;
            if line.len() != cols || !line.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(bad(format!(
                    "key matrix row {} must be {cols} characters of 0/1",
                    r + 1
                )));
            }
            key.extend(line.bytes().map(|b| b - b'0'));
        }

        let mut weights = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| bad(format!("missing weight matrix row {}", r + 1)))?;
            let row: Result<Vec<u32>, _> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|_| bad(format!("bad weight {t:?}")))
                })
                .collect();
            let row = row?;
            if row.len() != cols {
                return Err(bad(format!(
                    "weight matrix row {} has {} entries, expected {cols}",
                    r + 1,
                    row.len()
                )));
            }
            weights.extend(row);
        }
        Self::new(rows, cols, bits, key, weights)
    }

    /// Renders the config in the format accepted by [`CptConfig::parse`].
    pub fn to_config_string(&self) -> String {
        let mut out = format!("{} {} {}\n", self.rows, self.cols, self.bits_per_block);
        for row in self.key.chunks(self.cols) {
            for &k in row {
                out.push(char::from(b'0' + k));
            }
            out.push('\n');
        }
        for row in self.weights.chunks(self.cols) {
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Weighted sum of block XOR key, modulo 2^r.
pub fn cpt_residue(block: &[u8], cfg: &CptConfig) -> Result<u32, CptError> {
    if block.len() != cfg.cells() {
        return Err(CptError::DimensionMismatch {
            got: block.len(),
            rows: cfg.rows,
            cols: cfg.cols,
        });
    }
    let sum: u32 = block
        .iter()
        .zip(&cfg.key)
        .zip(&cfg.weights)
        .map(|((&f, &k), &w)| u32::from(f ^ k) * w % cfg.modulus())
        .fold(0, |acc, term| (acc + term) % cfg.modulus());
    Ok(sum)
}

/// Reads the embedded digit from a block.
pub fn cpt_extract_block(block: &[u8], cfg: &CptConfig) -> Result<u32, CptError> {
    cpt_residue(block, cfg)
}

/// Makes the block's residue equal `digit` by flipping at most two cells,
/// searching single flips first, then pairs, in row-major order. Returns the
/// applied flips as 1-based (row, col) cells, or `None` when the residue
/// already matches.
pub fn cpt_embed_block(
    block: &mut [u8],
    cfg: &CptConfig,
    digit: u32,
) -> Result<Option<FlipSet>, CptError> {
    debug_assert!(digit < cfg.modulus());
    let current = cpt_residue(block, cfg)?;
    if current == digit {
        return Ok(None);
    }
    let modulus = cfg.modulus();
    let wanted = (digit + modulus - current) % modulus;
    // Flipping cell t moves the residue by +w[t] if (F^K)[t] is 0, else -w[t].
    let shifts: Vec<u32> = block
        .iter()
        .zip(&cfg.key)
        .zip(&cfg.weights)
        .map(|((&f, &k), &w)| if f ^ k == 0 { w } else { modulus - w })
        .collect();
    let cell = |t: usize| ((t / cfg.cols) as u8 + 1, (t % cfg.cols) as u8 + 1);

    if let Some(a) = shifts.iter().position(|&s| s == wanted) {
        block[a] ^= 1;
        return Ok(Some(FlipSet::single(cell(a))));
    }
    for (a, &first) in shifts.iter().enumerate() {
        for (offset, &second) in shifts[a + 1..].iter().enumerate() {
            if (first + second) % modulus == wanted {
                let b = a + 1 + offset;
                block[a] ^= 1;
                block[b] ^= 1;
                return Ok(Some(FlipSet::pair(cell(a), cell(b))));
            }
        }
    }
    Err(CptError::NoSolution)
}

/// Totals for one whole-message embed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CptReport {
    pub blocks_used: usize,
    pub bits_embedded: usize,
    pub total_flips: usize,
}

fn block_grid(img: &BinaryImage, cfg: &CptConfig) -> Result<(usize, usize), CptError> {
    let grid_rows = img.height() / cfg.rows;
    let grid_cols = img.width() / cfg.cols;
    if grid_rows == 0 || grid_cols == 0 {
        return Err(CptError::ImageTooSmall {
            width: img.width(),
            height: img.height(),
            rows: cfg.rows,
            cols: cfg.cols,
        });
    }
    Ok((grid_rows, grid_cols))
}

fn read_block(img: &BinaryImage, cfg: &CptConfig, grid_cols: usize, index: usize) -> Vec<u8> {
    let origin_x = (index % grid_cols) * cfg.cols;
    let origin_y = (index / grid_cols) * cfg.rows;
    let mut bits = Vec::with_capacity(cfg.cells());
    for r in 0..cfg.rows {
        for c in 0..cfg.cols {
            bits.push(img.get(origin_x + c, origin_y + r));
        }
    }
    bits
}

fn write_flips(
    img: &mut BinaryImage,
    cfg: &CptConfig,
    grid_cols: usize,
    index: usize,
    flips: FlipSet,
) {
    let origin_x = (index % grid_cols) * cfg.cols;
    let origin_y = (index / grid_cols) * cfg.rows;
    for (r, c) in flips.cells() {
        img.flip(origin_x + c as usize - 1, origin_y + r as usize - 1);
    }
}

/// Splits the framed stream into r-bit digits, zero padding the last one.
fn to_digits(bits: &BitSequence, r: u32) -> Vec<u32> {
    bits.bits()
        .chunks(r as usize)
        .map(|chunk| {
            let mut digit = 0u32;
            for i in 0..r as usize {
                digit = digit << 1 | chunk.get(i).map_or(0, |&b| u32::from(b));
            }
            digit
        })
        .collect()
}

/// Hides `message` in a copy of `cover`, one digit per block in scan order.
pub fn cpt_embed_message(
    cover: &BinaryImage,
    message: &[u8],
    cfg: &CptConfig,
) -> Result<(BinaryImage, CptReport), CptError> {
    let (grid_rows, grid_cols) = block_grid(cover, cfg)?;
    let total_blocks = grid_rows * grid_cols;
    let capacity_bytes = (cfg.bits_per_block as usize * total_blocks).saturating_sub(32) / 8;
    if message.len() > capacity_bytes {
        return Err(CptError::CapacityExceeded {
            message_bytes: message.len(),
            capacity_bytes,
        });
    }
    let framed = payload::frame_message(message)?;
    let digits = to_digits(&framed, cfg.bits_per_block);
    debug_assert!(digits.len() <= total_blocks);

    let mut stego = cover.clone();
    let mut total_flips = 0;
    for (index, &digit) in digits.iter().enumerate() {
        let mut block = read_block(&stego, cfg, grid_cols, index);
        if let Some(flips) = cpt_embed_block(&mut block, cfg, digit)? {
            total_flips += flips.flip_count();
            write_flips(&mut stego, cfg, grid_cols, index, flips);
        }
    }
    Ok((
        stego,
        CptReport {
            blocks_used: digits.len(),
            bits_embedded: 32 + message.len() * 8,
            total_flips,
        },
    ))
}

/// Recovers a message embedded by [`cpt_embed_message`] under the same
/// config.
pub fn cpt_extract_message(stego: &BinaryImage, cfg: &CptConfig) -> Result<Vec<u8>, CptError> {
    let (grid_rows, grid_cols) = block_grid(stego, cfg)?;
    let total_blocks = grid_rows * grid_cols;
    let r = cfg.bits_per_block;

    let mut bits = BitSequence::new();
    let mut index = 0;
    while bits.len() < 32 {
        if index >= total_blocks {
            return Err(CptError::NotAStegoImage);
        }
        let digit = cpt_extract_block(&read_block(stego, cfg, grid_cols, index), cfg)?;
        bits.push_low_bits(u64::from(digit), r as usize);
        index += 1;
    }
    let payload_bits = bits
        .bits()
        .iter()
        .take(32)
        .fold(0u64, |acc, &b| acc << 1 | u64::from(b));
    // A garbage header can claim up to 2^32-1 bits; compare before casting.
    let needed_blocks = (32 + payload_bits).div_ceil(u64::from(r));
    if needed_blocks > total_blocks as u64 {
        return Err(CptError::NotAStegoImage);
    }
    let needed_blocks = needed_blocks as usize;
    while index < needed_blocks {
        let digit = cpt_extract_block(&read_block(stego, cfg, grid_cols, index), cfg)?;
        bits.push_low_bits(u64::from(digit), r as usize);
        index += 1;
    }
    Ok(payload::unframe_message(&bits)?)
}
