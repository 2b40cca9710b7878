//! Grouped block-compressed sparse rows over clause include masks.
//!
//! Each live clause mask is cut into fixed `B`-bit blocks and only the
//! non-zero ones are kept, each tagged with its block index. Two clauses
//! may share one index list (the union of theirs) when that saves bits;
//! which pairs share is a maximum-weight matching on the bit savings.

mod blocks;
pub mod matching;
mod ogbcsr;
mod stream;
mod sweep;

pub use blocks::{
    assemble_mask, extract_masks, pair_weight, to_block_rows, BlockGeometry, BlockRow, IncludeMaskSet, Mask,
};
pub use ogbcsr::{
    candidate_edges, decode, encode, encode_masks, encode_ungrouped, optimal_grouping, ClauseGroup, OgbcsrModel,
    Pairing,
};
pub use stream::{body_bits, OGB_MAGIC, OGB_VERSION};
pub use sweep::{sweep_block_size, CompressionReport, SweepReport};

use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_BLOCK_SIZE: usize = 16;

pub fn write_ogbcsr_file(path: &Path, c: &OgbcsrModel) -> Result<()> {
    std::fs::write(path, c.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_ogbcsr_file(path: &Path) -> Result<OgbcsrModel> {
    let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    OgbcsrModel::from_bytes(&data)
}
