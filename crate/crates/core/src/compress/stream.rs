//! Byte layout of a compressed model file.
//!
//! Header, byte-aligned, little-endian: magic `TKWSOGB1`, version u32,
//! B u32, index_bits u8, count_bits u8, max arity u8, reserved u8,
//! mask length (2L) u32, clause count u32, dead-bitmap length u32 followed
//! by the bitmap bytes, group count u32, then a group directory (arity u8
//! and member ids u16 per group) and the body length in bits as u64.
//!
//! Body, bit-packed LSB-first with no internal alignment: per group the
//! block count (count_bits), block indices (index_bits each), then for each
//! block the B-bit payload of every member in directory order. Its length
//! equals `OgbcsrModel::size_bits` exactly.

use bitvec::prelude::*;

use crate::error::{Error, Result};

use super::blocks::{BlockGeometry, Mask};
use super::ogbcsr::{ClauseGroup, OgbcsrModel};

pub const OGB_MAGIC: &[u8; 8] = b"TKWSOGB1";
pub const OGB_VERSION: u32 = 1;
const MAX_ARITY: u8 = 2;

fn push_bits(out: &mut BitVec<u8, Lsb0>, value: u64, width: u32) {
    if width > 0 {
        out.extend_from_bitslice(&value.view_bits::<Lsb0>()[..width as usize]);
    }
}

/// Serializes only the bit-packed body.
pub fn body_bits(c: &OgbcsrModel) -> BitVec<u8, Lsb0> {
    let g = &c.geometry;
    let mut out = BitVec::<u8, Lsb0>::new();
    for group in &c.groups {
        push_bits(&mut out, group.blocks() as u64, g.count_bits);
        for &k in &group.block_indices {
            push_bits(&mut out, k as u64, g.index_bits);
        }
        for k in 0..group.blocks() {
            for row in &group.payloads {
                out.extend_from_bitslice(&row[k]);
            }
        }
    }
    out
}

impl OgbcsrModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let g = &self.geometry;
        let mut out = Vec::new();
        out.extend_from_slice(OGB_MAGIC);
        out.extend_from_slice(&OGB_VERSION.to_le_bytes());
        out.extend_from_slice(&(g.block_size as u32).to_le_bytes());
        out.extend_from_slice(&[g.index_bits as u8, g.count_bits as u8, MAX_ARITY, 0]);
        out.extend_from_slice(&(g.mask_len as u32).to_le_bytes());
        out.extend_from_slice(&(self.clause_count as u32).to_le_bytes());
        out.extend_from_slice(&(self.clause_count as u32).to_le_bytes());
        let mut dead = bitvec![u8, Lsb0; 0; self.clause_count];
        for &d in &self.dead {
            dead.set(d, true);
        }
        out.extend_from_slice(dead.as_raw_slice());
        out.extend_from_slice(&(self.groups.len() as u32).to_le_bytes());
        for group in &self.groups {
            out.push(group.arity() as u8);
            for &m in &group.members {
                out.extend_from_slice(&(m as u16).to_le_bytes());
            }
        }
        let body = body_bits(self);
        out.extend_from_slice(&(body.len() as u64).to_le_bytes());
        out.extend_from_slice(body.as_raw_slice());
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let mut r = Reader { data, pos: 0 };
        let magic = r.take(8)?;
        if magic != OGB_MAGIC {
            return Err(Error::Header {
                artifact: "ogbcsr",
                detail: "magic mismatch".into(),
            });
        }
        let version = r.u32()?;
        if version != OGB_VERSION {
            return Err(Error::Header {
                artifact: "ogbcsr",
                detail: format!("version {version}, expected {OGB_VERSION}"),
            });
        }
        let block_size = r.u32()? as usize;
        let fields = r.take(4)?;
        let (index_bits, count_bits, max_arity) = (fields[0] as u32, fields[1] as u32, fields[2]);
        let mask_len = r.u32()? as usize;
        let geometry = BlockGeometry::new(mask_len, block_size).map_err(|e| r.err(e.to_string()))?;
        if geometry.index_bits != index_bits || geometry.count_bits != count_bits || max_arity != MAX_ARITY {
            return Err(r.err("field widths disagree with block geometry".into()));
        }
        let clause_count = r.u32()? as usize;
        let bitmap_len = r.u32()? as usize;
        if bitmap_len != clause_count {
            return Err(r.err(format!("dead bitmap covers {bitmap_len} of {clause_count} clauses")));
        }
        let bitmap = r.take(bitmap_len.div_ceil(8))?;
        let bitmap = bitmap.view_bits::<Lsb0>();
        let dead: Vec<usize> = bitmap[..bitmap_len].iter_ones().collect();
        if bitmap[bitmap_len..].any() {
            return Err(r.err("dead bitmap padding is not zero".into()));
        }
        let group_count = r.u32()? as usize;
        let mut directory = Vec::with_capacity(group_count.min(1 << 16));
        for _ in 0..group_count {
            let arity = r.take(1)?[0] as usize;
            if arity == 0 || arity > MAX_ARITY as usize {
                return Err(r.err(format!("group arity {arity}")));
            }
            let members = (0..arity).map(|_| r.u16().map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
            directory.push(members);
        }
        let body_len = r.u64()? as usize;
        let body_start = r.pos;
        let body_bytes = r.take(body_len.div_ceil(8))?;
        if r.pos != data.len() {
            return Err(r.err(format!("{} trailing bytes", data.len() - r.pos)));
        }
        let body = &body_bytes.view_bits::<Lsb0>()[..body_len];
        let mut bit = 0usize;
        let body_err = |bit: usize, detail: String| Error::Decode {
            artifact: "ogbcsr",
            offset: (body_start + bit / 8) as u64,
            detail,
        };
        let mut read = |width: usize| -> Result<&BitSlice<u8, Lsb0>> {
            if bit + width > body.len() {
                return Err(body_err(bit, "body ends inside a field".into()));
            }
            let s = &body[bit..bit + width];
            bit += width;
            Ok(s)
        };
        let load = |s: &BitSlice<u8, Lsb0>| if s.is_empty() { 0 } else { s.load_le::<u64>() };
        let mut groups = Vec::with_capacity(group_count);
        for members in directory {
            let blocks = load(read(count_bits as usize)?) as usize;
            if blocks == 0 || blocks > geometry.num_blocks {
                return Err(body_err(bit, format!("group block count {blocks}")));
            }
            let block_indices = (0..blocks)
                .map(|_| read(index_bits as usize).map(|s| load(s) as u32))
                .collect::<Result<Vec<_>>>()?;
            let mut payloads: Vec<Vec<Mask>> = vec![Vec::with_capacity(blocks); members.len()];
            for _ in 0..blocks {
                for row in payloads.iter_mut() {
                    let s = read(block_size)?;
                    let mut p = Mask::with_capacity(block_size);
                    p.extend_from_bitslice(s);
                    row.push(p);
                }
            }
            groups.push(ClauseGroup {
                members,
                block_indices,
                payloads,
            });
        }
        if bit != body.len() {
            return Err(body_err(bit, "unused body bits".into()));
        }
        let model = Self {
            geometry,
            clause_count,
            dead,
            groups,
        };
        super::decode(&model)?;
        Ok(model)
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, detail: String) -> Error {
        Error::Decode {
            artifact: "ogbcsr",
            offset: self.pos as u64,
            detail,
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(self.err(format!("need {n} bytes, {} left", self.data.len() - self.pos)));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
