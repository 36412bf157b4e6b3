//! Interned indeterminates.
//!
//! A [`Symbol`] is a small copyable handle. Names are interned in an
//! append-only process-wide table so that monomials can compare symbols by
//! integer id. The id order is the variable order of the lexicographic
//! monomial ordering; it only affects internal layout, never equality.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u32);

#[derive(Default)]
struct Interner {
    names: Vec<&'static str>,
    ids: HashMap<&'static str, u32>,
}

fn interner() -> &'static RwLock<Interner> {
    static TABLE: OnceLock<RwLock<Interner>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(Interner::default()))
}

impl Symbol {
    /// Returns the symbol with the given name, interning it on first use.
    pub fn new(name: &str) -> Symbol {
        if let Some(&id) = interner().read().expect("symbol table poisoned").ids.get(name) {
            return Symbol(id);
        }
        let mut table = interner().write().expect("symbol table poisoned");
        if let Some(&id) = table.ids.get(name) {
            return Symbol(id);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        let id = table.names.len() as u32;
        table.names.push(leaked);
        table.ids.insert(leaked, id);
        Symbol(id)
    }

    pub fn name(self) -> &'static str {
        interner().read().expect("symbol table poisoned").names[self.0 as usize]
    }

    pub fn id(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_idempotent() {
        let a = Symbol::new("sym_test_a");
        let b = Symbol::new("sym_test_a");
        assert_eq!(a, b);
        assert_eq!(a.name(), "sym_test_a");
        assert_ne!(a, Symbol::new("sym_test_b"));
    }
}
