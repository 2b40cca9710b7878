use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::BooleanFeatureMap;

use super::{Clause, EvalMode, WindowInputs};

/// Machine hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CtmConfig {
    pub classes: usize,
    pub clauses_per_class: usize,
    pub window_frames: usize,
    /// Vote clamp `T`.
    pub threshold: u32,
    /// Specificity `s`.
    pub specificity: f64,
    /// Automaton half-range `N`; states live in `1..=2N`.
    pub states: u16,
    pub position_bits: bool,
}

impl Default for CtmConfig {
    fn default() -> Self {
        Self {
            classes: 12,
            clauses_per_class: 256,
            window_frames: 16,
            threshold: 32,
            specificity: 5.0,
            states: 128,
            position_bits: false,
        }
    }
}

impl CtmConfig {
    pub fn validate(&self, dims: &FeatureDims) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.classes < 1 {
            return bad("need at least one class".into());
        }
        if self.clauses_per_class % 2 != 0 {
            return bad(format!("clauses_per_class ({}) must be even", self.clauses_per_class));
        }
        if self.window_frames < 1 || self.window_frames > dims.frames {
            return bad(format!(
                "window_frames ({}) must be in 1..={}",
                self.window_frames, dims.frames
            ));
        }
        if self.threshold == 0 {
            return bad("threshold must be positive".into());
        }
        if !(self.specificity > 1.0) {
            return bad(format!("specificity must exceed 1, got {}", self.specificity));
        }
        if self.states == 0 || self.states > 128 {
            // persisted as one byte per automaton
            return bad(format!("states must be in 1..=128, got {}", self.states));
        }
        Ok(())
    }
}

/// Shape of the feature maps a model consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureDims {
    pub channels: usize,
    pub bins: usize,
    pub frames: usize,
}

impl FeatureDims {
    pub fn of(fmap: &BooleanFeatureMap) -> Self {
        Self {
            channels: fmap.channels(),
            bins: fmap.bins(),
            frames: fmap.frames(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtmModel {
    pub config: CtmConfig,
    pub dims: FeatureDims,
    /// Class-major: clause `j` of class `c` is `clauses[c * clauses_per_class + j]`.
    clauses: Vec<Clause>,
}

impl CtmModel {
    /// Fresh model with every automaton at the exclude boundary.
    pub fn new(config: CtmConfig, dims: FeatureDims) -> Result<Self> {
        config.validate(&dims)?;
        let mut m = Self {
            config,
            dims,
            clauses: Vec::new(),
        };
        let inputs = m.inputs();
        let n = m.config.states;
        m.clauses = (0..m.config.classes * m.config.clauses_per_class)
            .map(|id| Clause::new(inputs, m.polarity_of(id), n))
            .collect();
        Ok(m)
    }

    pub fn from_clauses(config: CtmConfig, dims: FeatureDims, clauses: Vec<Clause>) -> Result<Self> {
        config.validate(&dims)?;
        let m = Self {
            config,
            dims,
            clauses,
        };
        if m.clauses.len() != m.config.classes * m.config.clauses_per_class {
            return Err(Error::Mismatch(format!(
                "{} clauses for {} x {}",
                m.clauses.len(),
                m.config.classes,
                m.config.clauses_per_class
            )));
        }
        for (id, c) in m.clauses.iter().enumerate() {
            if c.inputs() != m.inputs() || c.polarity() != m.polarity_of(id) {
                return Err(Error::Mismatch(format!("clause {id} has wrong width or polarity")));
            }
        }
        Ok(m)
    }

    /// Model whose every automaton independently sits just above (include)
    /// or at (exclude) the boundary with probability `include_prob`.
    /// Used to generate inference test cases.
    pub fn random(config: CtmConfig, dims: FeatureDims, include_prob: f64, rng: &mut impl rand::Rng) -> Result<Self> {
        if !(0.0..=1.0).contains(&include_prob) {
            return Err(Error::Config(format!("include probability {include_prob} outside [0, 1]")));
        }
        let mut m = Self::new(config, dims)?;
        let n = m.config.states;
        for c in m.clauses.iter_mut() {
            let states = (0..2 * c.inputs())
                .map(|_| if rng.random_bool(include_prob) { n + 1 } else { n })
                .collect();
            *c = Clause::from_states(states, c.polarity(), n);
        }
        Ok(m)
    }

    /// Window positions `P = frames - W + 1`.
    pub fn positions(&self) -> usize {
        self.dims.frames + 1 - self.config.window_frames
    }

    /// Inputs per window `L`.
    pub fn inputs(&self) -> usize {
        let conv = self.config.window_frames * self.dims.channels * self.dims.bins;
        if self.config.position_bits {
            conv + self.positions() - 1
        } else {
            conv
        }
    }

    /// First half of each class votes for it, second half against.
    pub fn polarity_of(&self, clause_id: usize) -> i8 {
        if clause_id % self.config.clauses_per_class < self.config.clauses_per_class / 2 {
            1
        } else {
            -1
        }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn class_clauses(&self, class: usize) -> &[Clause] {
        let k = self.config.clauses_per_class;
        &self.clauses[class * k..(class + 1) * k]
    }

    pub(crate) fn class_clauses_mut(&mut self, class: usize) -> &mut [Clause] {
        let k = self.config.clauses_per_class;
        &mut self.clauses[class * k..(class + 1) * k]
    }

    pub fn window_inputs(&self, fmap: &BooleanFeatureMap) -> Result<WindowInputs> {
        if FeatureDims::of(fmap) != self.dims {
            return Err(Error::Mismatch(format!(
                "feature map {:?} does not match model {:?}",
                FeatureDims::of(fmap),
                self.dims
            )));
        }
        Ok(WindowInputs::new(fmap, self.config.window_frames, self.config.position_bits))
    }

    pub fn clamp(&self, sum: i64) -> i32 {
        let t = self.config.threshold as i64;
        sum.clamp(-t, t) as i32
    }

    pub fn class_sum_with(&self, inputs: &WindowInputs, class: usize, mode: EvalMode) -> i32 {
        let sum: i64 = self
            .class_clauses(class)
            .iter()
            .filter(|c| c.fires(inputs, mode))
            .map(|c| c.polarity() as i64)
            .sum();
        self.clamp(sum)
    }

    /// Clamped inference-mode vote of one class.
    pub fn class_sum(&self, inputs: &WindowInputs, class: usize) -> i32 {
        self.class_sum_with(inputs, class, EvalMode::Inference)
    }

    pub fn class_sums(&self, inputs: &WindowInputs) -> Vec<i32> {
        (0..self.config.classes).map(|c| self.class_sum(inputs, c)).collect()
    }

    pub fn predict(&self, inputs: &WindowInputs) -> usize {
        argmax_lowest(&self.class_sums(inputs))
    }

    pub fn predict_fmap(&self, fmap: &BooleanFeatureMap) -> Result<usize> {
        Ok(self.predict(&self.window_inputs(fmap)?))
    }

    pub fn accuracy(&self, samples: &[(WindowInputs, usize)]) -> f64 {
        if samples.is_empty() {
            return 0.0;
        }
        let hits = samples.iter().filter(|(x, y)| self.predict(x) == *y).count();
        hits as f64 / samples.len() as f64
    }

    pub fn total_includes(&self) -> usize {
        self.clauses.iter().map(Clause::include_count).sum()
    }
}

/// Index of the largest value; ties resolve to the lowest index.
pub fn argmax_lowest(values: &[i32]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}
