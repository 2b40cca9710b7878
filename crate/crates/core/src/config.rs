//! One TOML file shared by every `tkws` subcommand.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::accel::AccelConfig;
use crate::compress::DEFAULT_BLOCK_SIZE;
use crate::compress::matching::DEFAULT_MATCHER;
use crate::ctm::CtmConfig;
use crate::error::{Error, Result};
use crate::frontend::FrontendConfig;
use crate::schedule::{AnnealConfig, DEFAULT_NUM_PES, DEFAULT_SCHEDULER};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompressConfig {
    pub block_size: usize,
    pub matcher: String,
}

impl Default for CompressConfig {
    fn default() -> Self {
        Self {
            block_size: DEFAULT_BLOCK_SIZE,
            matcher: DEFAULT_MATCHER.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub num_pes: usize,
    pub scheduler: String,
    pub anneal: AnnealConfig,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            num_pes: DEFAULT_NUM_PES,
            scheduler: DEFAULT_SCHEDULER.into(),
            anneal: AnnealConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub frontend: FrontendConfig,
    pub ctm: CtmConfig,
    pub train: TrainConfig,
    pub compress: CompressConfig,
    pub schedule: ScheduleConfig,
    pub accel: AccelConfig,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::MissingInput(format!("config file {}", path.display())));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    /// The effective config as `# `-prefixed lines for text artifact headers.
    pub fn echo(&self) -> String {
        self.to_toml().lines().map(|l| format!("# {l}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip_and_partial_files() {
        let c = PipelineConfig::default();
        assert_eq!(PipelineConfig::from_toml(&c.to_toml()).unwrap(), c);
        let p = PipelineConfig::from_toml("seed = 9\n[ctm]\nclauses_per_class = 40\n[schedule]\nnum_pes = 4\n").unwrap();
        assert_eq!((p.seed, p.ctm.clauses_per_class, p.schedule.num_pes), (9, 40, 4));
        assert_eq!(p.ctm.threshold, CtmConfig::default().threshold);
        assert!(matches!(PipelineConfig::from_toml("sed = 1"), Err(Error::Config(_))));
        assert!(c.echo().lines().all(|l| l.starts_with('#')));
    }
}
