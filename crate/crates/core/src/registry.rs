//! Name-keyed registries of interchangeable strategies.
//!
//! Each algorithm family exposes a trait; implementations are boxed and
//! registered under a stable name so that configuration files and the CLI
//! can select them at runtime.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Something that can be registered: it knows its own name.
pub trait Named {
    fn name(&self) -> &'static str;
}

pub struct Registry<T: ?Sized> {
    family: &'static str,
    entries: BTreeMap<&'static str, Box<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(family: &'static str) -> Self {
        Self {
            family,
            entries: BTreeMap::new(),
        }
    }

    /// Register a strategy, replacing any previous entry with the same name.
    pub fn register(&mut self, strategy: Box<T>) -> &mut Self {
        self.entries.insert(strategy.name(), strategy);
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                family: self.family,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn family(&self) -> &'static str {
        self.family
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.values().map(|b| b.as_ref())
    }
}

impl<T: ?Sized> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("family", &self.family)
            .field("names", &self.entries.keys().collect::<Vec<_>>())
            .finish()
    }
}
