use crate::error::{Error, Result};

use super::blocks::IncludeMaskSet;
use super::matching::MatchingStrategy;
use super::ogbcsr::{encode_masks, encode_ungrouped, OgbcsrModel};

/// Size accounting of one encoding against both dense baselines.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionReport {
    pub block_size: usize,
    pub clauses: usize,
    pub dead_clauses: usize,
    pub groups: usize,
    pub paired_groups: usize,
    pub size_bits: u64,
    pub ungrouped_bits: u64,
    pub file_bytes: usize,
    /// One bit per literal decision for every clause.
    pub dense_mask_bits: u64,
    /// One 8-bit automaton state per literal for every clause.
    pub dense_state_bits: u64,
}

impl CompressionReport {
    pub fn new(c: &OgbcsrModel, ungrouped_bits: u64) -> Self {
        let dense_mask_bits = (c.clause_count * c.geometry.mask_len) as u64;
        Self {
            block_size: c.block_size(),
            clauses: c.clause_count,
            dead_clauses: c.dead.len(),
            groups: c.groups.len(),
            paired_groups: c.groups.iter().filter(|g| g.arity() == 2).count(),
            size_bits: c.size_bits(),
            ungrouped_bits,
            file_bytes: c.to_bytes().len(),
            dense_mask_bits,
            dense_state_bits: 8 * dense_mask_bits,
        }
    }

    pub fn ratio_vs_mask(&self) -> f64 {
        ratio(self.dense_mask_bits, self.size_bits)
    }

    pub fn ratio_vs_state(&self) -> f64 {
        ratio(self.dense_state_bits, self.size_bits)
    }

    /// Whole-file ratio including headers and the group directory.
    pub fn file_ratio_vs_mask(&self) -> f64 {
        ratio(self.dense_mask_bits, 8 * self.file_bytes as u64)
    }

    pub fn to_text(&self) -> String {
        format!(
            "block_size: {}\nclauses: {}\ndead_clauses: {}\ngroups: {}\npaired_groups: {}\n\
             size_bits: {}\nungrouped_bits: {}\nfile_bytes: {}\ndense_mask_bits: {}\n\
             dense_state_bits: {}\nratio_vs_mask: {:.4}\nratio_vs_state: {:.4}\nfile_ratio_vs_mask: {:.4}\n",
            self.block_size,
            self.clauses,
            self.dead_clauses,
            self.groups,
            self.paired_groups,
            self.size_bits,
            self.ungrouped_bits,
            self.file_bytes,
            self.dense_mask_bits,
            self.dense_state_bits,
            self.ratio_vs_mask(),
            self.ratio_vs_state(),
            self.file_ratio_vs_mask(),
        )
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        f64::INFINITY
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub entries: Vec<CompressionReport>,
    /// Smallest `size_bits`; earliest candidate on ties.
    pub best_block_size: usize,
}

pub fn sweep_block_size(
    masks: &IncludeMaskSet,
    candidates: &[usize],
    matcher: &dyn MatchingStrategy,
) -> Result<SweepReport> {
    if candidates.is_empty() {
        return Err(Error::Config("block size sweep needs at least one candidate".into()));
    }
    let mut entries = Vec::with_capacity(candidates.len());
    for &b in candidates {
        let c = encode_masks(masks, b, matcher)?;
        let plain = encode_ungrouped(masks, b)?.size_bits();
        entries.push(CompressionReport::new(&c, plain));
    }
    let best = entries
        .iter()
        .enumerate()
        .min_by_key(|(i, e)| (e.size_bits, *i))
        .map(|(_, e)| e.block_size)
        .unwrap();
    Ok(SweepReport {
        entries,
        best_block_size: best,
    })
}
