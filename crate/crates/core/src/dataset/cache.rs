use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::frontend::{extract, read_feature_file, write_feature_file, BooleanFeatureMap, FrontendConfig};

use super::{resolve_clip, Manifest, ManifestEntry, Split};

/// `path,label,split,feature` for every cached entry, in manifest order.
pub const CACHE_INDEX: &str = "index.csv";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CacheSummary {
    pub computed: usize,
    pub skipped: usize,
    /// Entry path and error message of every clip that failed.
    pub failures: Vec<(String, String)>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct IndexRow {
    path: String,
    label: usize,
    split: Split,
    feature: String,
}

/// File name derived from the frontend settings, entry path and the bytes
/// of the source audio, so edits to any of them force a recompute.
fn cache_key(root: &Path, e: &ManifestEntry, cfg_text: &str) -> Result<String> {
    let file = e.path.rsplit_once('@').map_or(e.path.as_str(), |(f, _)| f);
    let p = root.join(file);
    let bytes = std::fs::read(&p).map_err(|err| Error::io(&p, err))?;
    let mut h = Sha256::new();
    h.update(b"tkws-feature-cache-1\0");
    h.update(cfg_text.as_bytes());
    h.update([0]);
    h.update(e.path.as_bytes());
    h.update([0]);
    h.update(&bytes);
    let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    Ok(format!("{hex}.feat"))
}

fn cache_one(root: &Path, e: &ManifestEntry, cfg: &FrontendConfig, cfg_text: &str, dir: &Path) -> Result<(String, bool)> {
    let name = cache_key(root, e, cfg_text)?;
    let out = dir.join(&name);
    if out.is_file() {
        return Ok((name, false));
    }
    let fmap = extract(&resolve_clip(root, e)?, cfg)?;
    // write then rename so an interrupted run never leaves a partial file
    let tmp = dir.join(format!("{name}.tmp"));
    write_feature_file(&tmp, &fmap)?;
    std::fs::rename(&tmp, &out).map_err(|err| Error::io(&out, err))?;
    Ok((name, true))
}

/// Extracts one feature file per manifest entry into `dir`.
///
/// Entries whose key already exists are skipped. Per-clip failures are
/// collected and left out of the index; the run itself only fails on errors
/// writing the index.
pub fn cache_features(manifest: &Manifest, root: &Path, cfg: &FrontendConfig, dir: &Path) -> Result<CacheSummary> {
    cfg.validate()?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let cfg_text = toml::to_string(cfg).map_err(|e| Error::Config(e.to_string()))?;
    let results: Vec<Result<(String, bool)>> = manifest
        .entries
        .par_iter()
        .map(|e| cache_one(root, e, cfg, &cfg_text, dir))
        .collect();
    let mut summary = CacheSummary::default();
    let index_path = dir.join(CACHE_INDEX);
    let mut w = csv::Writer::from_path(&index_path).map_err(|e| Error::Dataset(e.to_string()))?;
    for (e, r) in manifest.entries.iter().zip(results) {
        match r {
            Ok((feature, computed)) => {
                if computed {
                    summary.computed += 1;
                } else {
                    summary.skipped += 1;
                }
                w.serialize(IndexRow {
                    path: e.path.clone(),
                    label: e.label,
                    split: e.split,
                    feature,
                })
                .map_err(|e| Error::Dataset(e.to_string()))?;
            }
            Err(err) => summary.failures.push((e.path.clone(), err.to_string())),
        }
    }
    w.flush().map_err(|e| Error::io(&index_path, e))?;
    Ok(summary)
}

/// Cached feature maps and labels of one split, in index order.
pub fn load_split(dir: &Path, split: Split) -> Result<Vec<(String, BooleanFeatureMap, usize)>> {
    let index_path = dir.join(CACHE_INDEX);
    if !index_path.is_file() {
        return Err(Error::MissingInput(format!(
            "no feature cache index at {} (run `extract` first)",
            index_path.display()
        )));
    }
    let mut r = csv::Reader::from_path(&index_path).map_err(|e| Error::Dataset(e.to_string()))?;
    let rows: Vec<IndexRow> = r
        .deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Decode {
                artifact: "feature cache index",
                offset: i as u64 + 1,
                detail: e.to_string(),
            })
        })
        .collect::<Result<_>>()?;
    rows.into_par_iter()
        .filter(|row| row.split == split)
        .map(|row| Ok((row.path, read_feature_file(&dir.join(&row.feature))?, row.label)))
        .collect()
}
