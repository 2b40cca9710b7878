use bitvec::prelude::*;

use crate::ctm::CtmModel;
use crate::error::{Error, Result};

pub type Mask = BitVec<u64, Lsb0>;

/// Include masks of the live clauses of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncludeMaskSet {
    /// Literals per clause (2L).
    pub mask_len: usize,
    /// Total clauses in the source model, live and dead.
    pub clause_count: usize,
    /// `(clause id, mask)`, ascending by id, every mask non-empty.
    pub masks: Vec<(usize, Mask)>,
    /// Ids of clauses with no includes; they never fire at inference.
    pub dead: Vec<usize>,
}

impl IncludeMaskSet {
    pub fn from_masks(mask_len: usize, all: Vec<Mask>) -> Result<Self> {
        let clause_count = all.len();
        let mut masks = Vec::new();
        let mut dead = Vec::new();
        for (id, m) in all.into_iter().enumerate() {
            if m.len() != mask_len {
                return Err(Error::Mismatch(format!("mask {id} has {} bits, expected {mask_len}", m.len())));
            }
            if m.any() {
                masks.push((id, m));
            } else {
                dead.push(id);
            }
        }
        Ok(Self {
            mask_len,
            clause_count,
            masks,
            dead,
        })
    }

    pub fn total_includes(&self) -> usize {
        self.masks.iter().map(|(_, m)| m.count_ones()).sum()
    }
}

/// One mask per clause; empty masks are set aside as dead.
pub fn extract_masks(model: &CtmModel) -> IncludeMaskSet {
    let l2 = 2 * model.inputs();
    IncludeMaskSet::from_masks(l2, model.clauses().iter().map(|c| c.include_mask()).collect())
        .expect("model clauses share one width")
}

pub(crate) fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}

/// Block partition of a mask length and the field widths it implies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockGeometry {
    pub mask_len: usize,
    pub block_size: usize,
    pub num_blocks: usize,
    /// `ceil(log2(num_blocks))`.
    pub index_bits: u32,
    /// `ceil(log2(num_blocks + 1))`.
    pub count_bits: u32,
}

impl BlockGeometry {
    pub fn new(mask_len: usize, block_size: usize) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::Config("block size must be >= 1".into()));
        }
        if mask_len == 0 {
            return Err(Error::Config("mask length must be >= 1".into()));
        }
        let num_blocks = mask_len.div_ceil(block_size);
        Ok(Self {
            mask_len,
            block_size,
            num_blocks,
            index_bits: ceil_log2(num_blocks),
            count_bits: ceil_log2(num_blocks + 1),
        })
    }

    /// Encoded bits of a group with `blocks` shared indices and `members`
    /// payload rows.
    pub fn group_bits(&self, blocks: usize, members: usize) -> u64 {
        self.count_bits as u64
            + blocks as u64 * self.index_bits as u64
            + (members * blocks * self.block_size) as u64
    }
}

/// Non-zero blocks of one clause mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockRow {
    pub clause: usize,
    /// `(block index, B-bit payload)`, indices strictly increasing.
    pub blocks: Vec<(u32, Mask)>,
}

impl BlockRow {
    pub fn indices(&self) -> impl Iterator<Item = u32> + '_ {
        self.blocks.iter().map(|b| b.0)
    }
}

/// Cuts each mask into `ceil(2L / B)` blocks (the last one zero-padded)
/// and keeps the non-zero ones.
pub fn to_block_rows(masks: &IncludeMaskSet, geom: &BlockGeometry) -> Vec<BlockRow> {
    masks
        .masks
        .iter()
        .map(|(id, m)| BlockRow {
            clause: *id,
            blocks: mask_blocks(m, geom),
        })
        .collect()
}

pub(crate) fn mask_blocks(m: &BitSlice<u64, Lsb0>, geom: &BlockGeometry) -> Vec<(u32, Mask)> {
    let b = geom.block_size;
    (0..geom.num_blocks)
        .filter_map(|k| {
            let lo = k * b;
            let hi = ((k + 1) * b).min(m.len());
            let chunk = &m[lo..hi];
            chunk.any().then(|| {
                let mut payload = Mask::with_capacity(b);
                payload.extend_from_bitslice(chunk);
                payload.resize(b, false);
                (k as u32, payload)
            })
        })
        .collect()
}

/// Reassembles a full-length mask from aligned block payloads.
pub fn assemble_mask<'a>(
    geom: &BlockGeometry,
    blocks: impl IntoIterator<Item = (u32, &'a BitSlice<u64, Lsb0>)>,
) -> Mask {
    let mut m = bitvec![u64, Lsb0; 0; geom.num_blocks * geom.block_size];
    for (k, payload) in blocks {
        let lo = k as usize * geom.block_size;
        m[lo..lo + geom.block_size].copy_from_bitslice(payload);
    }
    m.truncate(geom.mask_len);
    m
}

/// Bits saved by storing `a` and `b` as one group; may be negative.
pub fn pair_weight(a: &BlockRow, b: &BlockRow, geom: &BlockGeometry) -> i64 {
    let union = union_len(a, b);
    geom.group_bits(a.blocks.len(), 1) as i64 + geom.group_bits(b.blocks.len(), 1) as i64
        - geom.group_bits(union, 2) as i64
}

fn union_len(a: &BlockRow, b: &BlockRow) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.blocks.len() && j < b.blocks.len() {
        match a.blocks[i].0.cmp(&b.blocks[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
        n += 1;
    }
    n + (a.blocks.len() - i) + (b.blocks.len() - j)
}
