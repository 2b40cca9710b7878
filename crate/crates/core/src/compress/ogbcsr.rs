use bitvec::prelude::*;

use crate::ctm::CtmModel;
use crate::error::{Error, Result};

use super::blocks::{assemble_mask, extract_masks, pair_weight, to_block_rows, BlockGeometry, BlockRow, IncludeMaskSet, Mask};
use super::matching::{Blossom, MatchingStrategy, WeightedEdge};

/// Clauses sharing one block-index list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseGroup {
    /// Clause ids, ascending; one or two of them.
    pub members: Vec<usize>,
    /// Sorted union of the members' non-zero block indices.
    pub block_indices: Vec<u32>,
    /// `payloads[m][k]`: B bits of member `m` at `block_indices[k]`.
    pub payloads: Vec<Vec<Mask>>,
}

impl ClauseGroup {
    fn from_rows(rows: &[&BlockRow], block_size: usize) -> Self {
        let mut rows: Vec<&BlockRow> = rows.to_vec();
        rows.sort_by_key(|r| r.clause);
        let mut block_indices: Vec<u32> = rows.iter().flat_map(|r| r.indices()).collect();
        block_indices.sort_unstable();
        block_indices.dedup();
        let payloads = rows
            .iter()
            .map(|r| {
                let mut it = r.blocks.iter().peekable();
                block_indices
                    .iter()
                    .map(|&k| match it.peek() {
                        Some((idx, p)) if *idx == k => {
                            it.next();
                            p.clone()
                        }
                        _ => bitvec![u64, Lsb0; 0; block_size],
                    })
                    .collect()
            })
            .collect();
        Self {
            members: rows.iter().map(|r| r.clause).collect(),
            block_indices,
            payloads,
        }
    }

    pub fn arity(&self) -> usize {
        self.members.len()
    }

    pub fn blocks(&self) -> usize {
        self.block_indices.len()
    }
}

/// Grouped block-compressed include masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OgbcsrModel {
    pub geometry: BlockGeometry,
    pub clause_count: usize,
    pub dead: Vec<usize>,
    pub groups: Vec<ClauseGroup>,
}

impl OgbcsrModel {
    /// Body size in bits under the group size model.
    pub fn size_bits(&self) -> u64 {
        self.groups
            .iter()
            .map(|g| self.geometry.group_bits(g.blocks(), g.arity()))
            .sum()
    }

    pub fn block_size(&self) -> usize {
        self.geometry.block_size
    }

    pub fn live_clauses(&self) -> usize {
        self.groups.iter().map(ClauseGroup::arity).sum()
    }

    pub fn total_includes(&self) -> usize {
        self.groups
            .iter()
            .flat_map(|g| g.payloads.iter().flatten())
            .map(|p| p.count_ones())
            .sum()
    }
}

/// Pairs of row positions chosen for sharing plus leftover singletons.
pub type Pairing = Vec<Vec<usize>>;

/// Positive-weight candidate edges between rows.
pub fn candidate_edges(rows: &[BlockRow], geom: &BlockGeometry) -> Vec<WeightedEdge> {
    let mut edges = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let w = pair_weight(&rows[i], &rows[j], geom);
            if w > 0 {
                edges.push((i, j, w));
            }
        }
    }
    edges
}

/// Groups rows by a matching over positive `pair_weight` edges.
pub fn optimal_grouping(rows: &[BlockRow], geom: &BlockGeometry, matcher: &dyn MatchingStrategy) -> Pairing {
    let edges = candidate_edges(rows, geom);
    let mate = matcher.solve(rows.len(), &edges);
    let mut groups = Vec::new();
    for (i, m) in mate.iter().enumerate() {
        match m {
            Some(j) if *j < i => {}
            Some(j) => groups.push(vec![i, *j]),
            None => groups.push(vec![i]),
        }
    }
    groups
}

fn build(masks: &IncludeMaskSet, geom: BlockGeometry, pairing: Option<&dyn MatchingStrategy>) -> OgbcsrModel {
    let rows = to_block_rows(masks, &geom);
    let pairs: Pairing = match pairing {
        Some(m) => optimal_grouping(&rows, &geom, m),
        None => (0..rows.len()).map(|i| vec![i]).collect(),
    };
    let mut groups: Vec<ClauseGroup> = pairs
        .iter()
        .map(|p| {
            let members: Vec<&BlockRow> = p.iter().map(|&i| &rows[i]).collect();
            ClauseGroup::from_rows(&members, geom.block_size)
        })
        .collect();
    groups.sort_by_key(|g| g.members[0]);
    OgbcsrModel {
        geometry: geom,
        clause_count: masks.clause_count,
        dead: masks.dead.clone(),
        groups,
    }
}

/// Encodes masks with pair sharing chosen by `matcher`.
pub fn encode_masks(masks: &IncludeMaskSet, block_size: usize, matcher: &dyn MatchingStrategy) -> Result<OgbcsrModel> {
    let geom = BlockGeometry::new(masks.mask_len, block_size)?;
    Ok(build(masks, geom, Some(matcher)))
}

/// Plain block CSR: every clause is its own group.
pub fn encode_ungrouped(masks: &IncludeMaskSet, block_size: usize) -> Result<OgbcsrModel> {
    let geom = BlockGeometry::new(masks.mask_len, block_size)?;
    Ok(build(masks, geom, None))
}

/// Full encoder with the exact matcher.
pub fn encode(model: &CtmModel, block_size: usize) -> Result<OgbcsrModel> {
    encode_masks(&extract_masks(model), block_size, &Blossom)
}

/// Inverse of `encode` at the mask level. Checks structure as it goes.
pub fn decode(c: &OgbcsrModel) -> Result<IncludeMaskSet> {
    let g = &c.geometry;
    let bad = |group: usize, detail: String| Error::Decode {
        artifact: "ogbcsr",
        offset: group as u64,
        detail,
    };
    let mut seen = vec![false; c.clause_count];
    for &d in &c.dead {
        if d >= c.clause_count || std::mem::replace(&mut seen[d], true) {
            return Err(bad(0, format!("dead clause id {d} invalid or repeated")));
        }
    }
    let mut masks = Vec::new();
    for (gi, group) in c.groups.iter().enumerate() {
        if group.members.is_empty() || group.members.len() > 2 {
            return Err(bad(gi, format!("arity {}", group.members.len())));
        }
        if group.payloads.len() != group.members.len() {
            return Err(bad(gi, "payload rows differ from member count".into()));
        }
        if group.block_indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad(gi, "block indices not strictly increasing".into()));
        }
        if group.block_indices.last().is_some_and(|&k| k as usize >= g.num_blocks) {
            return Err(bad(gi, "block index out of range".into()));
        }
        for (m, &id) in group.members.iter().enumerate() {
            if id >= c.clause_count || std::mem::replace(&mut seen[id], true) {
                return Err(bad(gi, format!("clause id {id} invalid or repeated")));
            }
            let row = &group.payloads[m];
            if row.len() != group.block_indices.len() || row.iter().any(|p| p.len() != g.block_size) {
                return Err(bad(gi, format!("payload shape of clause {id}")));
            }
            let mask = assemble_mask(g, group.block_indices.iter().copied().zip(row.iter().map(|p| p.as_bitslice())));
            let padded = g.num_blocks * g.block_size;
            if padded > g.mask_len && group.block_indices.last() == Some(&(g.num_blocks as u32 - 1)) {
                let tail = &row[row.len() - 1][g.block_size - (padded - g.mask_len)..];
                if tail.any() {
                    return Err(bad(gi, "bits set past the mask end".into()));
                }
            }
            if mask.not_any() {
                return Err(bad(gi, format!("clause {id} encodes an empty mask")));
            }
            masks.push((id, mask));
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(bad(c.groups.len(), format!("clause {missing} missing from encoding")));
    }
    masks.sort_by_key(|m| m.0);
    let mut dead = c.dead.clone();
    dead.sort_unstable();
    Ok(IncludeMaskSet {
        mask_len: g.mask_len,
        clause_count: c.clause_count,
        masks,
        dead,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compress::matching::Greedy;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_set(rng: &mut ChaCha8Rng, clauses: usize, len: usize, p: f64) -> IncludeMaskSet {
        let all = (0..clauses).map(|_| (0..len).map(|_| rng.random_bool(p)).collect()).collect();
        IncludeMaskSet::from_masks(len, all).unwrap()
    }

    #[test]
    fn identical_rows_pair_disjoint_rows_do_not() {
        let m: Mask = (0..64).map(|i| i < 20).collect();
        let set = IncludeMaskSet::from_masks(64, vec![m.clone(), m]).unwrap();
        let c = encode_masks(&set, 8, &Blossom).unwrap();
        assert_eq!(c.groups.len(), 1);
        assert_eq!(c.groups[0].members, vec![0, 1]);

        let a: Mask = (0..64).map(|i| i < 8).collect();
        let b: Mask = (0..64).map(|i| i >= 56).collect();
        let set = IncludeMaskSet::from_masks(64, vec![a, b]).unwrap();
        let c = encode_masks(&set, 8, &Blossom).unwrap();
        assert_eq!(c.groups.len(), 2);
        assert!(c.groups.iter().all(|g| g.arity() == 1));
    }

    #[test]
    fn dead_and_dense_extremes() {
        let set = IncludeMaskSet::from_masks(32, vec![Mask::repeat(false, 32); 5]).unwrap();
        let c = encode_masks(&set, 4, &Blossom).unwrap();
        assert_eq!(c.size_bits(), 0);
        assert_eq!(c.dead, vec![0, 1, 2, 3, 4]);
        assert_eq!(decode(&c).unwrap(), set);

        let set = IncludeMaskSet::from_masks(32, vec![Mask::repeat(true, 32); 4]).unwrap();
        let c = encode_masks(&set, 4, &Blossom).unwrap();
        assert!(c.size_bits() > 4 * 32, "dense masks cost more than raw bits");
    }

    #[test]
    fn random_roundtrip_all_block_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for trial in 0..60 {
            let len = rng.random_range(1..150);
            let n = rng.random_range(1..30);
            let set = random_set(&mut rng, n, len, [0.01, 0.05, 0.3][trial % 3]);
            for b in [1, 3, 4, 8, 16, 64, len] {
                let exact = encode_masks(&set, b, &Blossom).unwrap();
                let greedy = encode_masks(&set, b, &Greedy).unwrap();
                let plain = encode_ungrouped(&set, b).unwrap();
                assert_eq!(decode(&exact).unwrap(), set);
                assert_eq!(decode(&greedy).unwrap(), set);
                assert_eq!(decode(&plain).unwrap(), set);
                assert!(exact.size_bits() <= greedy.size_bits());
                assert!(greedy.size_bits() <= plain.size_bits());
                assert_eq!(exact.total_includes(), set.total_includes());
            }
        }
    }

    #[test]
    fn decode_rejects_broken_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let set = random_set(&mut rng, 6, 40, 0.1);
        let good = encode_masks(&set, 4, &Blossom).unwrap();

        let mut c = good.clone();
        c.groups[0].block_indices.reverse();
        if c.groups[0].block_indices.len() > 1 {
            assert!(decode(&c).is_err());
        }
        let mut c = good.clone();
        let dup = c.groups[0].members[0];
        c.groups.last_mut().unwrap().members[0] = dup;
        assert!(decode(&c).is_err());
        let mut c = good.clone();
        c.groups.pop();
        assert!(matches!(decode(&c), Err(Error::Decode { .. })));
    }
}
