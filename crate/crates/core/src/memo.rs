//! Process-wide write-once tables.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, RwLock};

/// A table whose entries are computed at most once per key and then only read.
///
/// Builders run outside the lock; when two threads race on the same key the
/// first inserted value wins and both callers see it.
pub(crate) struct Memo<K, V> {
    table: RwLock<HashMap<K, Arc<V>>>,
}

impl<K: Eq + Hash + Clone, V> Memo<K, V> {
    pub(crate) fn new() -> Self {
        Memo {
            table: RwLock::new(HashMap::new()),
        }
    }

    pub(crate) fn get_or_insert_with(&self, key: &K, build: impl FnOnce() -> V) -> Arc<V> {
        if let Some(v) = self.table.read().expect("memo lock poisoned").get(key) {
            return Arc::clone(v);
        }
        let value = Arc::new(build());
        let mut table = self.table.write().expect("memo lock poisoned");
        Arc::clone(table.entry(key.clone()).or_insert(value))
    }
}
