//! Name-keyed registries for interchangeable strategies.
//!
//! Simulation backends, timing models and device profiles are all selected
//! at runtime by a string taken from a config file or the command line. Each
//! kind keeps its own [`Registry`] of constructors; the built-in entries are
//! installed by `with_builtins()` on the owning module.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Constructor stored in a registry. `O` is the option bag a caller passes
/// when asking for an instance.
pub type Factory<T, O> = Box<dyn Fn(&O) -> Result<Box<T>> + Send + Sync>;

pub struct Registry<T: ?Sized, O> {
    kind: &'static str,
    entries: BTreeMap<String, Factory<T, O>>,
}

impl<T: ?Sized, O> Registry<T, O> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Registers `factory` under `name`, replacing any previous entry.
    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&O) -> Result<Box<T>> + Send + Sync + 'static,
    {
        self.entries.insert(name.to_string(), Box::new(factory));
    }

    pub fn build(&self, name: &str, options: &O) -> Result<Box<T>> {
        let factory = self.entries.get(name).ok_or_else(|| Error::UnknownName {
            kind: self.kind,
            name: name.to_string(),
        })?;
        factory(options)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

impl<T: ?Sized, O> fmt::Debug for Registry<T, O> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("entries", &self.entries.keys().collect::<Vec<_>>())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter {
        fn greet(&self) -> String;
    }

    struct Hello(String);

    impl Greeter for Hello {
        fn greet(&self) -> String {
            format!("hello {}", self.0)
        }
    }

    #[test]
    fn builds_registered_entries_by_name() {
        let mut reg: Registry<dyn Greeter, String> = Registry::new("greeter");
        reg.register("hello", |who: &String| Ok(Box::new(Hello(who.clone()))));
        let g = reg.build("hello", &"world".to_string()).unwrap();
        assert_eq!(g.greet(), "hello world");
        assert!(reg.contains("hello"));
        assert_eq!(reg.names().collect::<Vec<_>>(), vec!["hello"]);
    }

    #[test]
    fn unknown_name_is_reported() {
        let reg: Registry<dyn Greeter, ()> = Registry::new("greeter");
        let err = reg.build("nope", &()).err().unwrap();
        assert!(matches!(err, Error::UnknownName { kind: "greeter", .. }));
    }
}
