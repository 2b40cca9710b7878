use super::{FrameConfig, MelSpectrogram};

/// Half-wave rectified frame-to-frame increase of each mel bin.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFluxMap {
    pub bins: usize,
    pub frames: usize,
    /// Row-major: `values[f * frames + t]`.
    pub values: Vec<f64>,
    pub config: FrameConfig,
}

impl SpectralFluxMap {
    pub fn get(&self, f: usize, t: usize) -> f64 {
        self.values[f * self.frames + t]
    }

    pub fn frame(&self, t: usize) -> Vec<f64> {
        (0..self.bins).map(|f| self.get(f, t)).collect()
    }
}

pub fn spectral_flux(mel: &MelSpectrogram) -> SpectralFluxMap {
    let (bins, frames) = (mel.bins, mel.frames);
    let mut values = vec![0.0; bins * frames];
    for f in 0..bins {
        let row = &mel.values[f * frames..(f + 1) * frames];
        for t in 1..frames {
            values[f * frames + t] = (row[t] - row[t - 1]).max(0.0);
        }
    }
    SpectralFluxMap {
        bins,
        frames,
        values,
        config: mel.config.clone(),
    }
}
