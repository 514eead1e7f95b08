//! Framing between byte messages and the embedded bit stream.
//!
//! The wire layout is a 32-bit big-endian header holding the payload bit
//! count, followed by the payload bytes serialized most significant bit
//! first. Carriers work in 4-bit groups, so the stream is chunked into
//! nibbles with zero padding on the right.

use thiserror::Error;

/// Messages at or above this many bytes cannot be framed (the header counts bits).
pub const MAX_MESSAGE_BYTES: usize = 1 << 29;

const HEADER_BITS: usize = 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PayloadError {
    #[error("message too long to frame ({0} bytes, limit {MAX_MESSAGE_BYTES})")]
    TooLong(usize),
    #[error("bit stream too short: need {needed} bits, have {available}")]
    Underflow { needed: usize, available: usize },
    #[error("framed payload length {0} is not a whole number of bytes")]
    BadLength(u64),
}

/// An ordered sequence of bits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitSequence {
    bits: Vec<bool>,
}

impl BitSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitSequence { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Appends the 4 bits of `nibble`, most significant first.
    pub fn push_nibble(&mut self, nibble: u8) {
        debug_assert!(nibble < 16);
        for shift in (0..4).rev() {
            self.bits.push((nibble >> shift) & 1 == 1);
        }
    }

    /// Appends the low `count` bits of `value`, most significant first.
    pub fn push_low_bits(&mut self, value: u64, count: usize) {
        debug_assert!(count <= 64);
        for shift in (0..count).rev() {
            self.bits.push((value >> shift) & 1 == 1);
        }
    }
}

/// Frames a message: 32-bit payload bit count, then the payload bits.
pub fn frame_message(message: &[u8]) -> Result<BitSequence, PayloadError> {
    if message.len() >= MAX_MESSAGE_BYTES {
        return Err(PayloadError::TooLong(message.len()));
    }
    let payload_bits = (message.len() * 8) as u64;
    let mut seq = BitSequence::new();
    seq.push_low_bits(payload_bits, HEADER_BITS);
    for &byte in message {
        seq.push_low_bits(byte as u64, 8);
    }
    Ok(seq)
}

/// Recovers the message from a framed bit stream. Bits past the framed
/// length are ignored; they are carrier padding.
pub fn unframe_message(bits: &BitSequence) -> Result<Vec<u8>, PayloadError> {
    let available = bits.len();
    if available < HEADER_BITS {
        return Err(PayloadError::Underflow {
            needed: HEADER_BITS,
            available,
        });
    }
    let mut payload_bits: u64 = 0;
    for &bit in &bits.bits()[..HEADER_BITS] {
        payload_bits = payload_bits << 1 | u64::from(bit);
    }
    if !payload_bits.is_multiple_of(8) {
        return Err(PayloadError::BadLength(payload_bits));
    }
    let needed = HEADER_BITS + payload_bits as usize;
    if available < needed {
        return Err(PayloadError::Underflow { needed, available });
    }
    let mut message = Vec::with_capacity(payload_bits as usize / 8);
    for chunk in bits.bits()[HEADER_BITS..needed].chunks(8) {
        message.push(chunk.iter().fold(0u8, |acc, &b| acc << 1 | u8::from(b)));
    }
    Ok(message)
}

/// Splits a bit stream into 4-bit groups, zero padding the last one.
pub fn to_nibbles(bits: &BitSequence) -> Vec<u8> {
    bits.bits()
        .chunks(4)
        .map(|chunk| {
            let mut nibble = 0u8;
            for i in 0..4 {
                nibble = nibble << 1 | chunk.get(i).map_or(0, |&b| u8::from(b));
            }
            nibble
        })
        .collect()
}
