//! Name-keyed registries for interchangeable strategies.
//!
//! Matching solvers and PE schedulers are each exposed behind a trait and
//! registered under a stable name, so the CLI and config files can pick an
//! implementation at runtime.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Anything that can be registered by name.
pub trait Named {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
}

pub struct Registry<T: ?Sized + Named> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Box<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Registers a strategy, replacing any earlier entry with the same name.
    pub fn register(&mut self, strategy: Box<T>) -> &mut Self {
        self.entries.insert(strategy.name(), strategy);
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn describe(&self) -> Vec<(&'static str, &'static str)> {
        self.entries
            .values()
            .map(|s| (s.name(), s.description()))
            .collect()
    }
}
