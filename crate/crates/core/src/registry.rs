//! Name-keyed lookup of interchangeable strategy implementations.

use std::fmt;

/// Anything that can be selected by name at runtime.
pub trait Named {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str {
        ""
    }
}

/// An ordered set of boxed strategies, looked up by [`Named::name`].
pub struct Registry<T: ?Sized + Named> {
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    /// Adds a strategy. A later registration with the same name replaces the earlier one.
    pub fn register(&mut self, entry: Box<T>) {
        if let Some(slot) = self.entries.iter_mut().find(|e| e.name() == entry.name()) {
            *slot = entry;
        } else {
            self.entries.push(entry);
        }
    }

    pub fn with(mut self, entry: Box<T>) -> Self {
        self.register(entry);
        self
    }

    pub fn get(&self, name: &str) -> Option<&T> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|e| e.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|e| e.as_ref())
    }
}

impl<T: ?Sized + Named> Default for Registry<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: ?Sized + Named> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}
