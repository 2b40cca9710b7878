use std::sync::Arc;

use rustfft::{num_complex::Complex, Fft, FftPlanner};

use crate::error::{Error, Result};

use super::{AudioClip, FrameConfig, CLIP_SAMPLES, SAMPLE_RATE_HZ};

/// Floor added before the log so silent frames stay finite (2^-20).
pub const LOG_EPS: f64 = 1.0 / 1_048_576.0;

/// Log-mel energies, `mel_bins` rows by `num_frames` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct MelSpectrogram {
    pub bins: usize,
    pub frames: usize,
    /// Row-major: `values[f * frames + t]`.
    pub values: Vec<f64>,
    pub config: FrameConfig,
}

impl MelSpectrogram {
    pub fn get(&self, f: usize, t: usize) -> f64 {
        self.values[f * self.frames + t]
    }

    /// One column (all bins at frame `t`).
    pub fn frame(&self, t: usize) -> Vec<f64> {
        (0..self.bins).map(|f| self.get(f, t)).collect()
    }

    pub fn from_fn(config: FrameConfig, mut value: impl FnMut(usize, usize) -> f64) -> Self {
        let bins = config.mel_bins;
        let frames = config.num_frames();
        let mut values = Vec::with_capacity(bins * frames);
        for f in 0..bins {
            for t in 0..frames {
                values.push(value(f, t));
            }
        }
        Self {
            bins,
            frames,
            values,
            config,
        }
    }
}

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters with unit peak, centres equally spaced on the mel
/// scale, each spanning its two neighbours' centres. Returns
/// `mel_bins` rows of `fft_size / 2 + 1` weights.
pub fn mel_filterbank(cfg: &FrameConfig) -> Vec<Vec<f64>> {
    let n_bins = cfg.num_fft_bins();
    let lo = hz_to_mel(cfg.fmin_hz);
    let hi = hz_to_mel(cfg.fmax_hz);
    let step = (hi - lo) / (cfg.mel_bins + 1) as f64;
    let edges: Vec<f64> = (0..cfg.mel_bins + 2)
        .map(|i| mel_to_hz(lo + step * i as f64))
        .collect();
    let bin_hz = SAMPLE_RATE_HZ as f64 / cfg.fft_size as f64;

    (0..cfg.mel_bins)
        .map(|f| {
            let (left, centre, right) = (edges[f], edges[f + 1], edges[f + 2]);
            (0..n_bins)
                .map(|k| {
                    let hz = k as f64 * bin_hz;
                    if hz > left && hz <= centre {
                        (hz - left) / (centre - left)
                    } else if hz > centre && hz < right {
                        (right - hz) / (right - centre)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Centre frequency (Hz) of each mel filter.
pub fn mel_centres(cfg: &FrameConfig) -> Vec<f64> {
    let lo = hz_to_mel(cfg.fmin_hz);
    let hi = hz_to_mel(cfg.fmax_hz);
    let step = (hi - lo) / (cfg.mel_bins + 1) as f64;
    (1..=cfg.mel_bins).map(|i| mel_to_hz(lo + step * i as f64)).collect()
}

fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / len as f64).cos())
        .collect()
}

struct PowerSpectrum {
    fft: Arc<dyn Fft<f64>>,
    window: Vec<f64>,
    buf: Vec<Complex<f64>>,
    fft_size: usize,
}

impl PowerSpectrum {
    fn new(cfg: &FrameConfig) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(cfg.fft_size);
        Self {
            fft,
            window: hann(cfg.frame_len_samples),
            buf: vec![Complex::default(); cfg.fft_size],
            fft_size: cfg.fft_size,
        }
    }

    fn compute(&mut self, frame: &[f64], out: &mut [f64]) {
        self.buf.iter_mut().for_each(|c| *c = Complex::default());
        for (i, (&x, &w)) in frame.iter().zip(&self.window).enumerate() {
            self.buf[i].re = x * w;
        }
        self.fft.process(&mut self.buf);
        for (k, o) in out.iter_mut().enumerate().take(self.fft_size / 2 + 1) {
            *o = self.buf[k].norm_sqr();
        }
    }
}

/// Log-mel spectral coefficients of one clip.
pub fn mfsc(clip: &AudioClip, cfg: &FrameConfig) -> Result<MelSpectrogram> {
    cfg.validate()?;
    if clip.samples.len() != CLIP_SAMPLES || clip.sample_rate_hz != SAMPLE_RATE_HZ {
        return Err(Error::Mismatch(format!(
            "clip must be {CLIP_SAMPLES} samples at {SAMPLE_RATE_HZ} Hz"
        )));
    }
    let weights = mel_filterbank(cfg);
    let frames = cfg.num_frames();
    let signal: Vec<f64> = clip.samples.iter().map(|&s| s as f64 / 32768.0).collect();
    let mut spectrum = PowerSpectrum::new(cfg);
    let mut power = vec![0.0; cfg.num_fft_bins()];
    let mut values = vec![0.0; cfg.mel_bins * frames];

    for t in 0..frames {
        let start = t * cfg.hop_samples;
        spectrum.compute(&signal[start..start + cfg.frame_len_samples], &mut power);
        for (f, row) in weights.iter().enumerate() {
            let energy: f64 = row.iter().zip(&power).map(|(w, p)| w * p).sum();
            values[f * frames + t] = (LOG_EPS + energy).ln();
        }
    }
    Ok(MelSpectrogram {
        bins: cfg.mel_bins,
        frames,
        values,
        config: cfg.clone(),
    })
}
