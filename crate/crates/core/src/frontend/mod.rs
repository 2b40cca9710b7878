//! Audio frontend: log-mel energies, per-bin spectral flux and streaming
//! threshold binarization into a two-channel Boolean feature map.

mod features;
mod flux;
mod mel;
mod threshold;
pub(crate) mod wav;

pub use features::{read_feature_file, write_feature_file, BooleanFeatureMap, FEATURE_MAGIC, FEATURE_VERSION};
pub use flux::{spectral_flux, SpectralFluxMap};
pub use mel::{hz_to_mel, mel_centres, mel_filterbank, mel_to_hz, mfsc, MelSpectrogram, LOG_EPS};
pub use threshold::{binarize, update_threshold, ThresholdState};
pub use wav::{fit_to_clip, load_clip, write_clip, AudioClip};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SAMPLE_RATE_HZ: u32 = 16_000;
pub const CLIP_SAMPLES: usize = 16_000;
/// Feature channels: log-mel (MFSC) and spectral flux.
pub const CHANNELS: usize = 2;

/// Framing and filterbank geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrameConfig {
    pub frame_len_samples: usize,
    pub hop_samples: usize,
    pub fft_size: usize,
    pub mel_bins: usize,
    pub fmin_hz: f64,
    pub fmax_hz: f64,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            frame_len_samples: 512,
            hop_samples: 256,
            fft_size: 512,
            mel_bins: 32,
            fmin_hz: 60.0,
            fmax_hz: 7600.0,
        }
    }
}

impl FrameConfig {
    pub fn validate(&self) -> Result<()> {
        let nyquist = SAMPLE_RATE_HZ as f64 / 2.0;
        if self.frame_len_samples == 0 || self.frame_len_samples > self.fft_size {
            return Err(Error::Config(format!(
                "frame_len_samples ({}) must be in 1..=fft_size ({})",
                self.frame_len_samples, self.fft_size
            )));
        }
        if self.frame_len_samples > CLIP_SAMPLES {
            return Err(Error::Config("frame longer than a clip".into()));
        }
        if self.hop_samples == 0 {
            return Err(Error::Config("hop_samples must be >= 1".into()));
        }
        if self.mel_bins < 2 {
            return Err(Error::Config("mel_bins must be >= 2".into()));
        }
        if !(0.0 <= self.fmin_hz && self.fmin_hz < self.fmax_hz && self.fmax_hz <= nyquist) {
            return Err(Error::Config(format!(
                "need 0 <= fmin_hz < fmax_hz <= {nyquist}, got {}..{}",
                self.fmin_hz, self.fmax_hz
            )));
        }
        Ok(())
    }

    /// Number of frames per 1 s clip.
    pub fn num_frames(&self) -> usize {
        1 + (CLIP_SAMPLES - self.frame_len_samples) / self.hop_samples
    }

    pub fn num_fft_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }
}

/// Full frontend configuration: framing plus threshold smoothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrontendConfig {
    #[serde(flatten)]
    pub frame: FrameConfig,
    pub alpha: f64,
}

impl Default for FrontendConfig {
    fn default() -> Self {
        Self {
            frame: FrameConfig::default(),
            alpha: 1.0 / 16.0,
        }
    }
}

impl FrontendConfig {
    pub fn validate(&self) -> Result<()> {
        self.frame.validate()?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha must be in (0, 1], got {}", self.alpha)));
        }
        Ok(())
    }
}

/// Full clip-to-bits path with default thresholds seeded from frame 0.
pub fn extract(clip: &AudioClip, cfg: &FrontendConfig) -> Result<BooleanFeatureMap> {
    cfg.validate()?;
    let mel = mfsc(clip, &cfg.frame)?;
    let flux = spectral_flux(&mel);
    let init = (
        ThresholdState::from_first_frame(&mel.frame(0), cfg.alpha),
        ThresholdState::from_first_frame(&flux.frame(0), cfg.alpha),
    );
    binarize(&mel, &flux, init)
}
