//! Hook for a content-addressed store of reduced Gröbner bases.
//!
//! The algebra layer consults the installed store before running Buchberger
//! and writes fresh results back. Stores must serialize their own writes.

use std::cell::RefCell;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use super::poly::Polynomial;
use super::ring::Ring;

pub trait BasisStore: Send + Sync {
    /// Returns the printed basis stored under `key`, if any.
    fn get(&self, key: &str) -> Option<Vec<String>>;
    fn put(&self, key: &str, basis: &[String]);
    /// Called when an entry returned by `get` could not be used.
    fn reject(&self, key: &str, reason: &str);
}

thread_local! {
    static STORE: RefCell<Option<Arc<dyn BasisStore>>> = const { RefCell::new(None) };
}

/// Installs (or with `None` removes) the basis store of the calling thread
/// and returns the previous one.
pub fn install_store(store: Option<Arc<dyn BasisStore>>) -> Option<Arc<dyn BasisStore>> {
    STORE.with(|s| s.replace(store))
}

pub(crate) fn current_store() -> Option<Arc<dyn BasisStore>> {
    STORE.with(|s| s.borrow().clone())
}

/// Hash of the canonicalized request: variables, field, order and the sorted
/// printed generators.
pub fn request_key(ring: &Ring, gens: &[Polynomial]) -> String {
    let mut printed: Vec<String> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| g.to_string())
        .collect();
    printed.sort();
    printed.dedup();
    let mut h = Sha256::new();
    h.update(ring.vars().join(",").as_bytes());
    h.update(b"|");
    h.update(ring.field().to_string().as_bytes());
    h.update(b"|");
    h.update(ring.order().name().as_bytes());
    for g in &printed {
        h.update(b"|");
        h.update(g.as_bytes());
    }
    let digest = h.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
