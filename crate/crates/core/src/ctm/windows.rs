use crate::frontend::BooleanFeatureMap;

/// Pre-packed literal inputs for every window position of one feature map.
///
/// Input `i` of window `p` is `fmap[col = p + i / H][h = i % H]` for
/// `i < W * H` (H = channels x bins), then `p > j` for position bit `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowInputs {
    inputs: usize,
    words: usize,
    positions: usize,
    data: Vec<u64>,
}

impl WindowInputs {
    pub fn new(fmap: &BooleanFeatureMap, window_frames: usize, position_bits: bool) -> Self {
        let height = fmap.column_height();
        let positions = fmap.frames() + 1 - window_frames;
        let conv_inputs = window_frames * height;
        let inputs = conv_inputs + if position_bits { positions - 1 } else { 0 };
        let words = inputs.div_ceil(64);
        let mut data = vec![0u64; positions * words];
        for p in 0..positions {
            let row = &mut data[p * words..(p + 1) * words];
            for w in 0..window_frames {
                for h in 0..height {
                    if fmap.column_bit(p + w, h) {
                        let i = w * height + h;
                        row[i / 64] |= 1 << (i % 64);
                    }
                }
            }
            if position_bits {
                for j in 0..p {
                    let i = conv_inputs + j;
                    row[i / 64] |= 1 << (i % 64);
                }
            }
        }
        Self {
            inputs,
            words,
            positions,
            data,
        }
    }

    /// Inputs per window (L).
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn positions(&self) -> usize {
        self.positions
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn window(&self, p: usize) -> &[u64] {
        &self.data[p * self.words..(p + 1) * self.words]
    }

    pub fn input(&self, p: usize, i: usize) -> bool {
        (self.window(p)[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Window `p` unpacked to booleans.
    pub fn window_bools(&self, p: usize) -> Vec<bool> {
        (0..self.inputs).map(|i| self.input(p, i)).collect()
    }
}
