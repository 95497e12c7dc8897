//! Fixed-capacity slot store with least-recently-used replacement.

use std::collections::HashMap;

use crate::slicing::Payload;

const NIL: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Node<K> {
    key: K,
    payload: Payload,
    prev: usize,
    next: usize,
}

/// Recency list over resident keys, most recent at the head. Insertion
/// counts as a touch.
#[derive(Debug, Clone)]
pub(crate) struct LruSlots<K> {
    capacity: usize,
    map: HashMap<K, usize>,
    nodes: Vec<Node<K>>,
    head: usize,
    tail: usize,
}

impl<K: Copy + Eq + std::hash::Hash> LruSlots<K> {
    pub fn new(capacity: usize) -> Self {
        LruSlots {
            capacity,
            map: HashMap::new(),
            nodes: Vec::new(),
            head: NIL,
            tail: NIL,
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    /// Looks up `key` without changing recency.
    pub fn peek(&self, key: &K) -> Option<Payload> {
        self.map.get(key).map(|&idx| self.nodes[idx].payload)
    }

    /// Looks up `key` and marks it most recently used.
    pub fn touch(&mut self, key: &K) -> Option<Payload> {
        let idx = *self.map.get(key)?;
        self.unlink(idx);
        self.push_front(idx);
        Some(self.nodes[idx].payload)
    }

    /// Inserts an absent key, evicting the least recently used one when full.
    pub fn insert(&mut self, key: K, payload: Payload) -> Option<K> {
        debug_assert!(!self.map.contains_key(&key));
        let mut evicted = None;
        let idx = if self.map.len() >= self.capacity {
            let victim = self.tail;
            self.unlink(victim);
            let old = self.nodes[victim].key;
            self.map.remove(&old);
            evicted = Some(old);
            self.nodes[victim].key = key;
            self.nodes[victim].payload = payload;
            victim
        } else {
            self.nodes.push(Node {
                key,
                payload,
                prev: NIL,
                next: NIL,
            });
            self.nodes.len() - 1
        };
        self.map.insert(key, idx);
        self.push_front(idx);
        evicted
    }

    /// Resident keys from most to least recently used.
    pub fn order(&self) -> Vec<K> {
        let mut out = Vec::with_capacity(self.len());
        let mut cur = self.head;
        while cur != NIL {
            out.push(self.nodes[cur].key);
            cur = self.nodes[cur].next;
        }
        out
    }

    fn unlink(&mut self, idx: usize) {
        let (prev, next) = (self.nodes[idx].prev, self.nodes[idx].next);
        if prev == NIL {
            self.head = next;
        } else {
            self.nodes[prev].next = next;
        }
        if next == NIL {
            self.tail = prev;
        } else {
            self.nodes[next].prev = prev;
        }
        self.nodes[idx].prev = NIL;
        self.nodes[idx].next = NIL;
    }

    fn push_front(&mut self, idx: usize) {
        self.nodes[idx].next = self.head;
        self.nodes[idx].prev = NIL;
        if self.head != NIL {
            self.nodes[self.head].prev = idx;
        }
        self.head = idx;
        if self.tail == NIL {
            self.tail = idx;
        }
    }
}
