use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const FEATURE_MAGIC: &[u8; 8] = b"TKWSFEAT";
pub const FEATURE_VERSION: u32 = 1;

/// Binary feature tensor of shape channels x bins x frames.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BooleanFeatureMap {
    channels: usize,
    bins: usize,
    frames: usize,
    bits: Vec<u8>,
}

impl BooleanFeatureMap {
    pub fn zeros(channels: usize, bins: usize, frames: usize) -> Self {
        Self {
            channels,
            bins,
            frames,
            bits: vec![0; channels * bins * frames],
        }
    }

    pub fn from_fn(
        channels: usize,
        bins: usize,
        frames: usize,
        mut bit: impl FnMut(usize, usize, usize) -> bool,
    ) -> Self {
        let mut m = Self::zeros(channels, bins, frames);
        for c in 0..channels {
            for f in 0..bins {
                for t in 0..frames {
                    m.set(c, f, t, bit(c, f, t));
                }
            }
        }
        m
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    /// Inputs per frame column (channels x bins).
    pub fn column_height(&self) -> usize {
        self.channels * self.bins
    }

    fn idx(&self, c: usize, f: usize, t: usize) -> usize {
        (c * self.bins + f) * self.frames + t
    }

    pub fn get(&self, c: usize, f: usize, t: usize) -> bool {
        self.bits[self.idx(c, f, t)] == 1
    }

    pub fn set(&mut self, c: usize, f: usize, t: usize, v: bool) {
        let i = self.idx(c, f, t);
        self.bits[i] = v as u8;
    }

    /// Element `h` of frame column `t`, where `h = c * bins + f`.
    pub fn column_bit(&self, t: usize, h: usize) -> bool {
        self.bits[h * self.frames + t] == 1
    }

    /// Flat 0/1 view, row-major over (channel, bin, frame).
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let row_bytes = self.frames.div_ceil(8);
        let mut out = Vec::with_capacity(24 + row_bytes * self.channels * self.bins);
        out.extend_from_slice(FEATURE_MAGIC);
        for v in [FEATURE_VERSION, self.channels as u32, self.bins as u32, self.frames as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for row in self.bits.chunks(self.frames.max(1)).take(self.channels * self.bins) {
            let mut packed = vec![0u8; row_bytes];
            for (t, &b) in row.iter().enumerate() {
                packed[t / 8] |= b << (t % 8);
            }
            out.extend_from_slice(&packed);
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let header = |detail: String| Error::Header {
            artifact: "feature",
            detail,
        };
        if data.len() < 24 {
            return Err(header(format!("{} bytes is shorter than the header", data.len())));
        }
        if &data[..8] != FEATURE_MAGIC {
            return Err(header("magic mismatch".into()));
        }
        let word = |i: usize| u32::from_le_bytes(data[8 + 4 * i..12 + 4 * i].try_into().unwrap());
        let version = word(0);
        if version != FEATURE_VERSION {
            return Err(header(format!("version {version}, expected {FEATURE_VERSION}")));
        }
        let (channels, bins, frames) = (word(1) as usize, word(2) as usize, word(3) as usize);
        let row_bytes = frames.div_ceil(8);
        let body = &data[24..];
        if body.len() != row_bytes * channels * bins {
            return Err(Error::Decode {
                artifact: "feature",
                offset: 24,
                detail: format!("body is {} bytes, expected {}", body.len(), row_bytes * channels * bins),
            });
        }
        let mut m = Self::zeros(channels, bins, frames);
        for (r, packed) in body.chunks(row_bytes.max(1)).enumerate().take(channels * bins) {
            for t in 0..frames {
                m.bits[r * frames + t] = (packed[t / 8] >> (t % 8)) & 1;
            }
            let pad = row_bytes * 8 - frames;
            if pad > 0 && packed[row_bytes - 1] >> (8 - pad) != 0 {
                return Err(Error::Decode {
                    artifact: "feature",
                    offset: (24 + (r + 1) * row_bytes - 1) as u64,
                    detail: "non-zero row padding".into(),
                });
            }
        }
        Ok(m)
    }
}

pub fn write_feature_file(path: &Path, map: &BooleanFeatureMap) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&map.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_feature_file(path: &Path) -> Result<BooleanFeatureMap> {
    let mut data = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut data))
        .map_err(|e| Error::io(path, e))?;
    BooleanFeatureMap::from_bytes(&data)
}
