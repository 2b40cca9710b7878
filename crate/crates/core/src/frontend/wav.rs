use std::path::Path;

use crate::error::{Error, Result};

use super::{CLIP_SAMPLES, SAMPLE_RATE_HZ};

/// One second of 16 kHz mono PCM.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AudioClip {
    pub samples: Vec<i16>,
    pub sample_rate_hz: u32,
}

impl AudioClip {
    /// Pads or center-truncates arbitrary-length audio to one clip.
    pub fn from_samples(samples: &[i16]) -> Self {
        Self {
            samples: fit_to_clip(samples),
            sample_rate_hz: SAMPLE_RATE_HZ,
        }
    }

    pub fn silent() -> Self {
        Self::from_samples(&[])
    }
}

/// Zero-pads short input at the end, keeps the centre of long input.
pub fn fit_to_clip(samples: &[i16]) -> Vec<i16> {
    if samples.len() >= CLIP_SAMPLES {
        let start = (samples.len() - CLIP_SAMPLES) / 2;
        samples[start..start + CLIP_SAMPLES].to_vec()
    } else {
        let mut out = samples.to_vec();
        out.resize(CLIP_SAMPLES, 0);
        out
    }
}

/// Reads a 16-bit mono 16 kHz WAV file as one clip.
pub fn load_clip(path: &Path) -> Result<AudioClip> {
    let reader = hound::WavReader::open(path).map_err(|e| wav_error(path, e))?;
    let spec = reader.spec();
    if spec.sample_rate != SAMPLE_RATE_HZ {
        return Err(Error::AudioFormat {
            path: path.into(),
            detail: format!("sample rate {} Hz, expected {SAMPLE_RATE_HZ}", spec.sample_rate),
        });
    }
    if spec.channels != 1 {
        return Err(Error::AudioFormat {
            path: path.into(),
            detail: format!("{} channels, expected mono", spec.channels),
        });
    }
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(Error::AudioFormat {
            path: path.into(),
            detail: format!("{:?} {}-bit samples, expected PCM16", spec.sample_format, spec.bits_per_sample),
        });
    }
    let samples = reader
        .into_samples::<i16>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| wav_error(path, e))?;
    Ok(AudioClip::from_samples(&samples))
}

/// Reads the raw samples of a WAV file without fitting to one second.
pub(crate) fn load_raw(path: &Path) -> Result<Vec<i16>> {
    let reader = hound::WavReader::open(path).map_err(|e| wav_error(path, e))?;
    let spec = reader.spec();
    if spec.sample_rate != SAMPLE_RATE_HZ || spec.channels != 1 || spec.bits_per_sample != 16 {
        return Err(Error::AudioFormat {
            path: path.into(),
            detail: format!("{spec:?}"),
        });
    }
    reader
        .into_samples::<i16>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| wav_error(path, e))
}

pub fn write_clip(path: &Path, samples: &[i16]) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: SAMPLE_RATE_HZ,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| wav_error(path, e))?;
    for &s in samples {
        writer.write_sample(s).map_err(|e| wav_error(path, e))?;
    }
    writer.finalize().map_err(|e| wav_error(path, e))
}

fn wav_error(path: &Path, e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(source) => Error::io(path, source),
        other => Error::AudioFormat {
            path: path.into(),
            detail: other.to_string(),
        },
    }
}
