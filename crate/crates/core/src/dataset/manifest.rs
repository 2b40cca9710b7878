use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::{load_clip, wav, AudioClip, CLIP_SAMPLES};

use super::{class_name, word_label, Split, GSC_VERSION, KEYWORDS, NOISE_DIR, NUM_CLASSES, SILENCE, TESTING_LIST, UNKNOWN, VALIDATION_LIST};

/// One clip. `path` is relative to the dataset root with `/` separators;
/// silence crops read `file.wav@offset` (offset in samples).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub label: usize,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub gsc_version: u32,
    pub seed: u64,
    pub entries: Vec<ManifestEntry>,
}

/// Clip counts found while scanning, before class balancing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanStats {
    pub listed_val: usize,
    pub listed_test: usize,
    pub found_val: usize,
    pub found_test: usize,
    pub found_train: usize,
}

impl Manifest {
    pub fn split(&self, s: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == s)
    }

    /// `counts[split][label]`.
    pub fn class_counts(&self) -> BTreeMap<Split, [usize; NUM_CLASSES]> {
        let mut out: BTreeMap<Split, [usize; NUM_CLASSES]> = Split::ALL.iter().map(|&s| (s, [0; NUM_CLASSES])).collect();
        for e in &self.entries {
            out.get_mut(&e.split).unwrap()[e.label] += 1;
        }
        out
    }
}

fn read_list(root: &Path, name: &str) -> Result<Vec<String>> {
    let p = root.join(name);
    let text = std::fs::read_to_string(&p).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::Dataset(format!("missing list file {}", p.display())),
        _ => Error::io(&p, e),
    })?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

fn sorted_dir(path: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(path).map_err(|e| Error::io(path, e))? {
        out.push(e.map_err(|e| Error::io(path, e))?.path());
    }
    out.sort();
    Ok(out)
}

fn is_wav(p: &Path) -> bool {
    p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("wav"))
}

/// Noise crops: each split gets its own contiguous share of every noise
/// file (80/10/10) so no audio is shared between splits.
fn silence_entries(root: &Path, counts: &BTreeMap<Split, usize>, rng: &mut ChaCha8Rng) -> Result<Vec<ManifestEntry>> {
    let dir = root.join(NOISE_DIR);
    let mut files = Vec::new();
    if dir.is_dir() {
        for p in sorted_dir(&dir)?.into_iter().filter(|p| is_wav(p)) {
            let len = wav::load_raw(&p)?.len();
            files.push((format!("{NOISE_DIR}/{}", p.file_name().unwrap().to_string_lossy()), len));
        }
    }
    let mut out = Vec::new();
    for (&split, &n) in counts {
        if n == 0 {
            continue;
        }
        let ranges: Vec<(&str, usize, usize)> = files
            .iter()
            .filter_map(|(name, len)| {
                let (a, b) = match split {
                    Split::Train => (0, len * 8 / 10),
                    Split::Val => (len * 8 / 10, len * 9 / 10),
                    Split::Test => (len * 9 / 10, *len),
                };
                (b >= a + CLIP_SAMPLES).then_some((name.as_str(), a, b - CLIP_SAMPLES))
            })
            .collect();
        if ranges.is_empty() {
            continue;
        }
        for _ in 0..n {
            let (name, lo, hi) = ranges[rng.random_range(0..ranges.len())];
            let offset = rng.random_range(lo..=hi);
            out.push(ManifestEntry {
                path: format!("{name}@{offset}"),
                label: SILENCE,
                split,
            });
        }
    }
    Ok(out)
}

/// Scans an extracted dataset directory into a balanced twelve-class manifest.
///
/// Splits come from the dataset's own list files. Per split, `unknown` is
/// subsampled and `silence` generated to the mean command-word class count.
pub fn build_manifest(root: &Path, seed: u64) -> Result<(Manifest, ScanStats)> {
    if !root.is_dir() {
        return Err(Error::MissingInput(format!("dataset root {} is not a directory", root.display())));
    }
    let val_list = read_list(root, VALIDATION_LIST)?;
    let test_list = read_list(root, TESTING_LIST)?;
    let val: HashSet<&str> = val_list.iter().map(String::as_str).collect();
    let test: HashSet<&str> = test_list.iter().map(String::as_str).collect();
    if let Some(dup) = val.intersection(&test).next() {
        return Err(Error::Dataset(format!("{dup} is listed for both validation and testing")));
    }
    let mut stats = ScanStats {
        listed_val: val_list.len(),
        listed_test: test_list.len(),
        ..Default::default()
    };

    let mut keyword = Vec::new();
    let mut unknown: BTreeMap<Split, Vec<ManifestEntry>> = BTreeMap::new();
    for dir in sorted_dir(root)?.into_iter().filter(|p| p.is_dir()) {
        let word = dir.file_name().unwrap().to_string_lossy().into_owned();
        if word == NOISE_DIR || word.starts_with('.') {
            continue;
        }
        for f in sorted_dir(&dir)?.into_iter().filter(|p| is_wav(p)) {
            let rel = format!("{word}/{}", f.file_name().unwrap().to_string_lossy());
            let split = if val.contains(rel.as_str()) {
                stats.found_val += 1;
                Split::Val
            } else if test.contains(rel.as_str()) {
                stats.found_test += 1;
                Split::Test
            } else {
                stats.found_train += 1;
                Split::Train
            };
            let label = word_label(&word);
            let e = ManifestEntry { path: rel, label, split };
            if label == UNKNOWN {
                unknown.entry(split).or_default().push(e);
            } else {
                keyword.push(e);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut targets = BTreeMap::new();
    for split in Split::ALL {
        let n = keyword.iter().filter(|e| e.split == split).count();
        targets.insert(split, (n as f64 / KEYWORDS.len() as f64).round() as usize);
    }
    let mut entries = keyword;
    for (split, mut pool) in unknown {
        pool.shuffle(&mut rng);
        pool.truncate(targets[&split]);
        entries.extend(pool);
    }
    entries.extend(silence_entries(root, &targets, &mut rng)?);
    entries.sort_by(|a, b| (a.split, a.label, &a.path).cmp(&(b.split, b.label, &b.path)));

    let m = Manifest {
        gsc_version: GSC_VERSION,
        seed,
        entries,
    };
    let mut empty = Vec::new();
    for (split, counts) in m.class_counts() {
        for (label, &c) in counts.iter().enumerate() {
            if c == 0 {
                empty.push(format!("{}/{}", split.as_str(), class_name(label)));
            }
        }
    }
    if !empty.is_empty() {
        return Err(Error::Dataset(format!("empty classes: {}", empty.join(", "))));
    }
    Ok((m, stats))
}

/// CSV `path,label,split` preceded by `# gsc_version=` and `# seed=` lines.
pub fn write_manifest(path: &Path, m: &Manifest) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    writeln!(f, "# gsc_version={}", m.gsc_version).map_err(io)?;
    writeln!(f, "# seed={}", m.seed).map_err(io)?;
    let mut w = csv::Writer::from_writer(f);
    for e in &m.entries {
        w.serialize(e).map_err(|e| Error::Dataset(format!("writing {}: {e}", path.display())))?;
    }
    w.flush().map_err(io)
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let meta = |key: &str| {
        text.lines()
            .take_while(|l| l.starts_with('#'))
            .find_map(|l| l.trim_start_matches('#').trim().strip_prefix(key)?.strip_prefix('=')?.trim().parse::<u64>().ok())
    };
    let version = meta("gsc_version").ok_or_else(|| Error::Header {
        artifact: "manifest",
        detail: "missing `# gsc_version=` line".into(),
    })?;
    if version != GSC_VERSION as u64 {
        return Err(Error::Header {
            artifact: "manifest",
            detail: format!("gsc_version {version}, expected {GSC_VERSION}"),
        });
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let mut entries = Vec::new();
    for (i, row) in r.deserialize::<ManifestEntry>().enumerate() {
        let e = row.map_err(|e| Error::Decode {
            artifact: "manifest",
            offset: i as u64 + 1,
            detail: e.to_string(),
        })?;
        if e.label >= NUM_CLASSES {
            return Err(Error::Decode {
                artifact: "manifest",
                offset: i as u64 + 1,
                detail: format!("label {} out of range", e.label),
            });
        }
        entries.push(e);
    }
    Ok(Manifest {
        gsc_version: GSC_VERSION,
        seed: meta("seed").unwrap_or(0),
        entries,
    })
}

/// Loads the audio behind one entry, cropping silence entries.
pub fn resolve_clip(root: &Path, e: &ManifestEntry) -> Result<AudioClip> {
    match e.path.rsplit_once('@') {
        Some((file, off)) => {
            let p = root.join(file);
            let offset: usize = off
                .parse()
                .map_err(|_| Error::Dataset(format!("bad crop offset in {}", e.path)))?;
            let raw = wav::load_raw(&p)?;
            if offset + CLIP_SAMPLES > raw.len() {
                return Err(Error::Dataset(format!("crop {} runs past the end of the file", e.path)));
            }
            Ok(AudioClip::from_samples(&raw[offset..offset + CLIP_SAMPLES]))
        }
        None => load_clip(&root.join(&e.path)),
    }
}
