//! Data hiding in black-and-white PBM images.
//!
//! The main scheme tunes row/column parities of 5x5 pixel blocks so that
//! each usable block carries 4 message bits at a cost of at most two pixel
//! flips. A weight-matrix scheme is included as a baseline, along with the
//! codec for plain and raw PBM files and image-quality metrics.
//!
//! ```
//! use pbmstego::{embed_message, extract_message, BinaryImage, KeySource};
//!
//! let cover = BinaryImage::from_fn(40, 40, |x, y| ((x * 7 + y * 3) % 4 < 2) as u8);
//! let (stego, report) = embed_message(&cover, b"hi", &KeySource::Seed(42)).unwrap();
//! assert!(report.total_flips <= 2 * report.blocks_used);
//! assert_eq!(extract_message(&stego, &KeySource::Seed(42)).unwrap(), b"hi");
//! ```

pub mod blockgrid;
pub mod cpt;
pub mod metrics;
pub mod parity;
pub mod payload;
pub mod pbm;

pub use blockgrid::{
    capacity, key_sequence, parse_key_list, partition, select_blocks, BlockRef, Capacity,
    EmbedPlan, GridError, KeySequence, KeySource, BLOCK_SIZE, HEADER_BLOCKS,
};
pub use cpt::{cpt_embed_message, cpt_extract_message, CptConfig, CptError, CptReport};
pub use metrics::{compare, neighbor_average_map, similarity, MetricsError, MetricsReport};
pub use parity::{embed_message, extract_message, EmbedReport, FlipSet, ParityError, Syndrome};
pub use payload::{frame_message, to_nibbles, unframe_message, BitSequence, PayloadError};
pub use pbm::{decode_pbm, encode_pbm, BinaryImage, PbmError, PbmVariant};

/// Double-precision metrics report, the default for the CLI.
pub type MetricsReport64 = metrics::MetricsReport<f64>;
/// Single-precision metrics report.
pub type MetricsReport32 = metrics::MetricsReport<f32>;
