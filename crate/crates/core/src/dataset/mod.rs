//! Speech Commands ingestion for the twelve-class task: ten command words,
//! everything else as `unknown` and background-noise crops as `silence`.

mod cache;
mod manifest;
pub mod synth;

pub use cache::{cache_features, load_split, CacheSummary, CACHE_INDEX};
pub use manifest::{build_manifest, read_manifest, resolve_clip, write_manifest, Manifest, ManifestEntry, ScanStats};

use serde::{Deserialize, Serialize};

pub const KEYWORDS: [&str; 10] = ["yes", "no", "up", "down", "left", "right", "on", "off", "stop", "go"];
pub const UNKNOWN: usize = 10;
pub const SILENCE: usize = 11;
pub const NUM_CLASSES: usize = 12;
pub const GSC_VERSION: u32 = 2;
pub const NOISE_DIR: &str = "_background_noise_";
pub const VALIDATION_LIST: &str = "validation_list.txt";
pub const TESTING_LIST: &str = "testing_list.txt";

pub fn class_name(label: usize) -> &'static str {
    match label {
        UNKNOWN => "_unknown_",
        SILENCE => "_silence_",
        k => KEYWORDS[k],
    }
}

/// Class of a word directory; non-command words are `UNKNOWN`.
pub fn word_label(word: &str) -> usize {
    KEYWORDS.iter().position(|&k| k == word).unwrap_or(UNKNOWN)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl std::str::FromStr for Split {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            _ => Err(crate::Error::Config(format!("unknown split `{s}` (train, val, test)"))),
        }
    }
}
