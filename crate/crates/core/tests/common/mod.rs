#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use tsetlin_kws::ctm::{train, CtmConfig, CtmModel, FeatureDims, WindowInputs};
use tsetlin_kws::dataset::synth::{synth_corpus, SynthConfig};
use tsetlin_kws::dataset::{build_manifest, cache_features, load_split, Split};
use tsetlin_kws::frontend::{BooleanFeatureMap, FrontendConfig};

pub struct Corpus {
    pub dir: TempDir,
    pub train: Vec<(BooleanFeatureMap, usize)>,
    pub val: Vec<(BooleanFeatureMap, usize)>,
    pub test: Vec<(BooleanFeatureMap, usize)>,
}

impl Corpus {
    pub fn root(&self) -> PathBuf {
        self.dir.path().join("data")
    }

    pub fn cache(&self) -> PathBuf {
        self.dir.path().join("cache")
    }

    pub fn dims(&self) -> FeatureDims {
        FeatureDims::of(&self.train[0].0)
    }
}

/// Synthetic corpus pushed through manifest and feature cache.
pub fn corpus(clips_per_word: usize, seed: u64) -> Corpus {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("data");
    synth_corpus(&root, &SynthConfig { clips_per_word, seed, ..Default::default() }).unwrap();
    let (m, _) = build_manifest(&root, seed).unwrap();
    let cache = dir.path().join("cache");
    let s = cache_features(&m, &root, &FrontendConfig::default(), &cache).unwrap();
    assert!(s.failures.is_empty());
    let load = |split| -> Vec<(BooleanFeatureMap, usize)> {
        load_split(&cache, split).unwrap().into_iter().map(|(_, f, y)| (f, y)).collect()
    };
    Corpus {
        train: load(Split::Train),
        val: load(Split::Val),
        test: load(Split::Test),
        dir,
    }
}

pub fn windows(model: &CtmModel, data: &[(BooleanFeatureMap, usize)]) -> Vec<(WindowInputs, usize)> {
    data.iter().map(|(f, y)| (model.window_inputs(f).unwrap(), *y)).collect()
}

pub fn trained_model(c: &Corpus, cfg: CtmConfig, epochs: usize, seed: u64) -> CtmModel {
    let mut m = CtmModel::new(cfg, c.dims()).unwrap();
    let tr = windows(&m, &c.train);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    train(&mut m, &tr, &[], epochs, &mut rng).unwrap();
    m
}

pub fn bin() -> &'static Path {
    Path::new(env!("CARGO_BIN_EXE_tkws"))
}
