//! Synthetic stand-in corpus laid out like Speech Commands.
//!
//! Every command word is a fixed two-tone pattern at a random onset and
//! gain over low-level noise; filler words use three-tone patterns. The
//! tree carries the same list files and background-noise folder as the
//! real dataset so every downstream stage runs unchanged.

use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frontend::{write_clip, CLIP_SAMPLES, SAMPLE_RATE_HZ};

use super::{KEYWORDS, NOISE_DIR, TESTING_LIST, VALIDATION_LIST};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub clips_per_word: usize,
    pub unknown_words: Vec<String>,
    pub noise_files: usize,
    pub noise_seconds: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            clips_per_word: 30,
            unknown_words: vec!["bed".into(), "cat".into(), "tree".into()],
            noise_files: 2,
            noise_seconds: 12,
            seed: 0,
        }
    }
}

fn tone_pattern(word_index: usize, unknown: bool) -> Vec<f64> {
    let k = word_index as f64;
    if unknown {
        vec![450.0 + 210.0 * k, 3200.0 - 260.0 * k, 1200.0 + 90.0 * k]
    } else {
        vec![300.0 + 160.0 * k, 2600.0 - 170.0 * k]
    }
}

fn render(freqs: &[f64], rng: &mut ChaCha8Rng) -> Vec<i16> {
    let sr = SAMPLE_RATE_HZ as f64;
    let seg = (0.22 * sr) as usize;
    let onset = rng.random_range(0..(CLIP_SAMPLES - seg * freqs.len()).min((0.3 * sr) as usize));
    let gain = rng.random_range(3000.0..9000.0);
    let detune = rng.random_range(0.97..1.03);
    let mut out = vec![0f64; CLIP_SAMPLES];
    for (i, &f) in freqs.iter().enumerate() {
        for n in 0..seg {
            let t = n as f64 / sr;
            // raised-cosine envelope per tone
            let env = 0.5 - 0.5 * (TAU * n as f64 / seg as f64).cos();
            out[onset + i * seg + n] += gain * env * (TAU * f * detune * t).sin();
        }
    }
    out.iter().map(|&x| (x + rng.random_range(-300.0..300.0)).round() as i16).collect()
}

fn write(path: &Path, samples: &[i16]) -> Result<()> {
    if let Some(d) = path.parent() {
        std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    }
    write_clip(path, samples)
}

/// Writes a corpus under `root`. Clip `i` of a word goes to validation when
/// `i % 10 == 0`, to testing when `i % 10 == 1`, else to training.
pub fn synth_corpus(root: &Path, cfg: &SynthConfig) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut val, mut test) = (String::new(), String::new());
    let words = KEYWORDS
        .iter()
        .enumerate()
        .map(|(i, w)| (w.to_string(), tone_pattern(i, false)))
        .chain(cfg.unknown_words.iter().enumerate().map(|(i, w)| (w.clone(), tone_pattern(i, true))));
    for (word, freqs) in words {
        for i in 0..cfg.clips_per_word {
            let rel = format!("{word}/{:08x}_nohash_{i}.wav", rng.random::<u32>());
            write(&root.join(&rel), &render(&freqs, &mut rng))?;
            match i % 10 {
                0 => val.push_str(&format!("{rel}\n")),
                1 => test.push_str(&format!("{rel}\n")),
                _ => {}
            }
        }
    }
    for i in 0..cfg.noise_files {
        let n = cfg.noise_seconds * SAMPLE_RATE_HZ as usize;
        let amp = rng.random_range(500.0..2500.0);
        let noise: Vec<i16> = (0..n)
            .map(|t| {
                let m = 0.6 + 0.4 * (TAU * 0.5 * t as f64 / SAMPLE_RATE_HZ as f64).sin();
                (amp * m * rng.random_range(-1.0..1.0)) as i16
            })
            .collect();
        write(&root.join(NOISE_DIR).join(format!("noise_{i}.wav")), &noise)?;
    }
    let w = |name: &str, s: &str| {
        let p = root.join(name);
        std::fs::write(&p, s).map_err(|e| Error::io(&p, e))
    };
    w(VALIDATION_LIST, &val)?;
    w(TESTING_LIST, &test)
}
