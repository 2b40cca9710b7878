use crate::error::{Error, Result};

use super::{BooleanFeatureMap, MelSpectrogram, SpectralFluxMap, CHANNELS};

/// Per-bin running threshold for one feature channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdState {
    pub theta: Vec<f64>,
    pub alpha: f64,
}

impl ThresholdState {
    pub fn new(theta: Vec<f64>, alpha: f64) -> Self {
        Self { theta, alpha }
    }

    pub fn from_first_frame(frame: &[f64], alpha: f64) -> Self {
        Self::new(frame.to_vec(), alpha)
    }

    fn step(&mut self, frame: &[f64]) {
        let a = self.alpha;
        for (th, &x) in self.theta.iter_mut().zip(frame) {
            *th = (1.0 - a) * *th + a * x;
        }
    }
}

/// Exponential moving average step: `theta' = (1 - alpha) theta + alpha x`.
pub fn update_threshold(state: &ThresholdState, frame_values: &[f64]) -> ThresholdState {
    let mut next = state.clone();
    next.step(frame_values);
    next
}

/// Streams frames in time order, comparing each value against the
/// threshold as it stood before that frame, then updating it.
pub fn binarize(
    mel: &MelSpectrogram,
    flux: &SpectralFluxMap,
    init: (ThresholdState, ThresholdState),
) -> Result<BooleanFeatureMap> {
    let (bins, frames) = (mel.bins, mel.frames);
    if flux.bins != bins || flux.frames != frames {
        return Err(Error::Mismatch(format!(
            "mel {bins}x{frames} vs flux {}x{}",
            flux.bins, flux.frames
        )));
    }
    if init.0.theta.len() != bins || init.1.theta.len() != bins {
        return Err(Error::Mismatch("threshold length differs from mel bins".into()));
    }
    let mut states = [init.0, init.1];
    let mut out = BooleanFeatureMap::zeros(CHANNELS, bins, frames);
    for t in 0..frames {
        let columns = [mel.frame(t), flux.frame(t)];
        for (c, (state, col)) in states.iter_mut().zip(&columns).enumerate() {
            for (f, (&x, &th)) in col.iter().zip(&state.theta).enumerate() {
                out.set(c, f, t, x >= th);
            }
            state.step(col);
        }
    }
    Ok(out)
}
