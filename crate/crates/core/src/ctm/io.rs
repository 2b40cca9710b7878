use std::path::Path;

use crate::error::{Error, Result};

use super::{Clause, CtmConfig, CtmModel, FeatureDims};

pub const MODEL_MAGIC: &[u8; 8] = b"TKWSCTM1";
pub const MODEL_VERSION: u32 = 1;
const HEADER_WORDS: usize = 11;
const HEADER_LEN: usize = 8 + 4 * HEADER_WORDS;

/// Header words (u32 LE): version, C, F, T_frames, W, classes,
/// clauses_per_class, N, T, s as 16.16 fixed point, position_bits.
/// Each clause follows as one polarity byte (+1 / -1 two's complement)
/// and one byte per automaton holding `state - 1`.
impl CtmModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let c = &self.config;
        let mut out = Vec::with_capacity(HEADER_LEN + self.clauses().len() * (1 + 2 * self.inputs()));
        out.extend_from_slice(MODEL_MAGIC);
        let words = [
            MODEL_VERSION,
            self.dims.channels as u32,
            self.dims.bins as u32,
            self.dims.frames as u32,
            c.window_frames as u32,
            c.classes as u32,
            c.clauses_per_class as u32,
            c.states as u32,
            c.threshold,
            (c.specificity * 65536.0).round() as u32,
            c.position_bits as u32,
        ];
        for w in words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        for clause in self.clauses() {
            out.push(clause.polarity() as u8);
            out.extend(clause.states().iter().map(|&s| (s - 1) as u8));
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let header = |detail: String| Error::Header {
            artifact: "model",
            detail,
        };
        if data.len() < HEADER_LEN {
            return Err(header("truncated header".into()));
        }
        if &data[..8] != MODEL_MAGIC {
            return Err(header("magic mismatch".into()));
        }
        let w = |i: usize| u32::from_le_bytes(data[8 + 4 * i..12 + 4 * i].try_into().unwrap());
        if w(0) != MODEL_VERSION {
            return Err(header(format!("version {}, expected {MODEL_VERSION}", w(0))));
        }
        let dims = FeatureDims {
            channels: w(1) as usize,
            bins: w(2) as usize,
            frames: w(3) as usize,
        };
        let config = CtmConfig {
            window_frames: w(4) as usize,
            classes: w(5) as usize,
            clauses_per_class: w(6) as usize,
            states: w(7) as u16,
            threshold: w(8),
            specificity: w(9) as f64 / 65536.0,
            position_bits: match w(10) {
                0 => false,
                1 => true,
                v => return Err(header(format!("position_bits flag {v}"))),
            },
        };
        config.validate(&dims).map_err(|e| header(e.to_string()))?;
        let template = CtmModel::new(config.clone(), dims)?;
        let literals = 2 * template.inputs();
        let n_clauses = config.classes * config.clauses_per_class;
        let record = 1 + literals;
        let body = &data[HEADER_LEN..];
        if body.len() != n_clauses * record {
            return Err(Error::Decode {
                artifact: "model",
                offset: HEADER_LEN as u64,
                detail: format!("body is {} bytes, expected {}", body.len(), n_clauses * record),
            });
        }
        let n = config.states;
        let mut clauses = Vec::with_capacity(n_clauses);
        for (id, rec) in body.chunks(record).enumerate() {
            let offset = (HEADER_LEN + id * record) as u64;
            let polarity = rec[0] as i8;
            if polarity != template.polarity_of(id) {
                return Err(Error::Decode {
                    artifact: "model",
                    offset,
                    detail: format!("clause {id} polarity byte {:#04x}", rec[0]),
                });
            }
            let states: Vec<u16> = rec[1..].iter().map(|&b| b as u16 + 1).collect();
            if let Some(pos) = states.iter().position(|&s| s > 2 * n) {
                return Err(Error::Decode {
                    artifact: "model",
                    offset: offset + 1 + pos as u64,
                    detail: format!("state {} exceeds 2N = {}", states[pos], 2 * n),
                });
            }
            clauses.push(Clause::from_states(states, polarity, n));
        }
        CtmModel::from_clauses(config, dims, clauses)
    }
}

pub fn write_model_file(path: &Path, model: &CtmModel) -> Result<()> {
    std::fs::write(path, model.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_model_file(path: &Path) -> Result<CtmModel> {
    let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    CtmModel::from_bytes(&data)
}
