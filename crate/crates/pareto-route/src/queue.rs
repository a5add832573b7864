//! Priority queue over explored labels keyed by reduced cost, with at most
//! one entry per node and node-addressed decrease-key.
//!
//! Heap mode orders entries by full lexicographic reduced cost with node-id
//! tie-break, so extractions are deterministic and lex non-decreasing over a
//! run. Bucket mode keys on the first reduced-cost component only, FIFO
//! within a bucket; the lex-order guarantees do not hold there and the
//! solvers' post-extraction dominance checks carry correctness instead.

use std::cmp::Ordering;
use std::collections::VecDeque;

use crate::label::LabelId;
use crate::model::{lex_cmp, lex_less, CostVector, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueueKind {
    Heap,
    Bucket,
}

#[derive(Clone, Debug)]
pub struct QueueEntry {
    pub node: NodeId,
    pub label: LabelId,
    pub key: CostVector,
}

pub enum SolverQueue {
    Heap(IndexedHeap),
    Bucket(BucketQueue),
}

impl SolverQueue {
    /// `key_hint` sizes the bucket array up front (the dominance bound's
    /// first component plus one); buckets still grow on demand.
    pub fn new(kind: QueueKind, node_count: usize, key_hint: u64) -> Self {
        match kind {
            QueueKind::Heap => SolverQueue::Heap(IndexedHeap::new(node_count)),
            QueueKind::Bucket => SolverQueue::Bucket(BucketQueue::new(node_count, key_hint)),
        }
    }

    pub fn insert(&mut self, entry: QueueEntry) {
        match self {
            SolverQueue::Heap(q) => q.insert(entry),
            SolverQueue::Bucket(q) => q.insert(entry),
        }
    }

    pub fn extract_min(&mut self) -> QueueEntry {
        match self {
            SolverQueue::Heap(q) => q.extract_min(),
            SolverQueue::Bucket(q) => q.extract_min(),
        }
    }

    /// Replaces the node's entry with a lex-smaller one and returns the
    /// displaced label.
    pub fn decrease_key(&mut self, node: NodeId, label: LabelId, key: CostVector) -> LabelId {
        match self {
            SolverQueue::Heap(q) => q.decrease_key(node, label, key),
            SolverQueue::Bucket(q) => q.decrease_key(node, label, key),
        }
    }

    pub fn contains(&self, node: NodeId) -> bool {
        match self {
            SolverQueue::Heap(q) => q.contains(node),
            SolverQueue::Bucket(q) => q.contains(node),
        }
    }

    pub fn get_path(&self, node: NodeId) -> (LabelId, &CostVector) {
        match self {
            SolverQueue::Heap(q) => q.get_path(node),
            SolverQueue::Bucket(q) => q.get_path(node),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SolverQueue::Heap(q) => q.len,
            SolverQueue::Bucket(q) => q.len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

const NO_POS: u32 = u32::MAX;

struct HeapSlot {
    key: CostVector,
    node: NodeId,
    label: LabelId,
}

/// Binary min-heap with per-node positions for decrease-key.
pub struct IndexedHeap {
    slots: Vec<HeapSlot>,
    pos: Vec<u32>,
    len: usize,
}

impl IndexedHeap {
    fn new(node_count: usize) -> Self {
        IndexedHeap {
            slots: Vec::new(),
            pos: vec![NO_POS; node_count],
            len: 0,
        }
    }

    fn less(&self, a: usize, b: usize) -> bool {
        match lex_cmp(&self.slots[a].key, &self.slots[b].key) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => self.slots[a].node < self.slots[b].node,
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.slots.swap(a, b);
        self.pos[self.slots[a].node as usize] = a as u32;
        self.pos[self.slots[b].node as usize] = b as u32;
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.less(i, parent) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        loop {
            let left = 2 * i + 1;
            if left >= self.slots.len() {
                break;
            }
            let right = left + 1;
            let mut best = left;
            if right < self.slots.len() && self.less(right, left) {
                best = right;
            }
            if self.less(best, i) {
                self.swap(i, best);
                i = best;
            } else {
                break;
            }
        }
    }

    fn insert(&mut self, entry: QueueEntry) {
        assert!(
            self.pos[entry.node as usize] == NO_POS,
            "queue already holds an entry for node {}",
            entry.node
        );
        let i = self.slots.len();
        self.pos[entry.node as usize] = i as u32;
        self.slots.push(HeapSlot {
            key: entry.key,
            node: entry.node,
            label: entry.label,
        });
        self.len += 1;
        self.sift_up(i);
    }

    fn extract_min(&mut self) -> QueueEntry {
        assert!(!self.slots.is_empty(), "extract_min on empty queue");
        let last = self.slots.len() - 1;
        self.swap(0, last);
        let slot = self.slots.pop().unwrap();
        self.pos[slot.node as usize] = NO_POS;
        self.len -= 1;
        if !self.slots.is_empty() {
            self.sift_down(0);
        }
        QueueEntry {
            node: slot.node,
            label: slot.label,
            key: slot.key,
        }
    }

    fn decrease_key(&mut self, node: NodeId, label: LabelId, key: CostVector) -> LabelId {
        let i = self.pos[node as usize];
        assert!(i != NO_POS, "decrease_key on node {node} absent from queue");
        let i = i as usize;
        assert!(
            lex_less(&key, &self.slots[i].key),
            "decrease_key requires a lex-smaller key"
        );
        let old = self.slots[i].label;
        self.slots[i].key = key;
        self.slots[i].label = label;
        self.sift_up(i);
        old
    }

    fn contains(&self, node: NodeId) -> bool {
        self.pos[node as usize] != NO_POS
    }

    fn get_path(&self, node: NodeId) -> (LabelId, &CostVector) {
        let i = self.pos[node as usize];
        assert!(i != NO_POS, "get_path on node {node} absent from queue");
        let slot = &self.slots[i as usize];
        (slot.label, &slot.key)
    }
}

/// Dial-style bucket queue keyed by the first reduced-cost component.
/// Stale pairs left behind by decrease-key are skipped on extraction; the
/// per-node slot decides which queued pair is alive.
pub struct BucketQueue {
    buckets: Vec<VecDeque<(NodeId, LabelId)>>,
    slots: Vec<Option<(LabelId, CostVector)>>,
    cursor: usize,
    len: usize,
}

const BUCKET_PREALLOC_CAP: usize = 1 << 20;

impl BucketQueue {
    fn new(node_count: usize, key_hint: u64) -> Self {
        let prealloc = (key_hint.saturating_add(1)).min(BUCKET_PREALLOC_CAP as u64) as usize;
        BucketQueue {
            buckets: (0..prealloc).map(|_| VecDeque::new()).collect(),
            slots: vec![None; node_count],
            cursor: 0,
            len: 0,
        }
    }

    fn bucket_of(&mut self, key1: u64) -> &mut VecDeque<(NodeId, LabelId)> {
        let idx = key1 as usize;
        if idx >= self.buckets.len() {
            self.buckets.resize_with(idx + 1, VecDeque::new);
        }
        &mut self.buckets[idx]
    }

    fn insert(&mut self, entry: QueueEntry) {
        assert!(
            self.slots[entry.node as usize].is_none(),
            "queue already holds an entry for node {}",
            entry.node
        );
        let key1 = entry.key.get(0);
        // Monotone reduced costs keep all new keys at or above the cursor.
        assert!(
            key1 as usize >= self.cursor || self.len == 0,
            "bucket insert below the min pointer"
        );
        self.bucket_of(key1).push_back((entry.node, entry.label));
        self.slots[entry.node as usize] = Some((entry.label, entry.key));
        self.len += 1;
    }

    fn extract_min(&mut self) -> QueueEntry {
        assert!(self.len > 0, "extract_min on empty queue");
        // The cursor never moves backward; scanning resumes where it stopped.
        loop {
            while self.cursor < self.buckets.len() && self.buckets[self.cursor].is_empty() {
                self.cursor += 1;
            }
            assert!(self.cursor < self.buckets.len(), "no non-empty bucket left");
            let (node, label) = self.buckets[self.cursor].pop_front().unwrap();
            let alive = matches!(&self.slots[node as usize], Some((l, _)) if *l == label);
            if !alive {
                continue;
            }
            let (_, key) = self.slots[node as usize].take().unwrap();
            self.len -= 1;
            debug_assert_eq!(key.get(0) as usize, self.cursor);
            return QueueEntry { node, label, key };
        }
    }

    fn decrease_key(&mut self, node: NodeId, label: LabelId, key: CostVector) -> LabelId {
        let slot = self.slots[node as usize]
            .as_ref()
            .unwrap_or_else(|| panic!("decrease_key on node {node} absent from queue"));
        assert!(
            lex_less(&key, &slot.1),
            "decrease_key requires a lex-smaller key"
        );
        let old = slot.0;
        let key1 = key.get(0);
        assert!(
            key1 as usize >= self.cursor,
            "bucket decrease_key below the min pointer"
        );
        self.bucket_of(key1).push_back((node, label));
        self.slots[node as usize] = Some((label, key));
        old
    }

    fn contains(&self, node: NodeId) -> bool {
        self.slots[node as usize].is_some()
    }

    fn get_path(&self, node: NodeId) -> (LabelId, &CostVector) {
        let slot = self.slots[node as usize]
            .as_ref()
            .unwrap_or_else(|| panic!("get_path on node {node} absent from queue"));
        (slot.0, &slot.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(c: &[u64]) -> CostVector {
        CostVector::new(c)
    }

    fn entry(node: NodeId, label: LabelId, key: &[u64]) -> QueueEntry {
        QueueEntry {
            node,
            label,
            key: cv(key),
        }
    }

    #[test]
    fn heap_orders_lexicographically() {
        let mut q = SolverQueue::new(QueueKind::Heap, 4, 100);
        assert!(q.is_empty());
        assert!(!q.contains(1));
        q.insert(entry(1, 10, &[3, 3]));
        q.insert(entry(2, 11, &[3, 4]));
        assert!(q.contains(1));
        let first = q.extract_min();
        assert_eq!(first.node, 1);
        assert_eq!(first.key, cv(&[3, 3]));
        assert!(!q.contains(1));
        assert_eq!(q.extract_min().node, 2);
    }

    #[test]
    fn both_modes_agree_on_distinct_first_components() {
        for kind in [QueueKind::Heap, QueueKind::Bucket] {
            let mut q = SolverQueue::new(kind, 4, 100);
            q.insert(entry(1, 0, &[1, 10]));
            q.insert(entry(2, 1, &[3, 3]));
            assert_eq!(q.extract_min().key, cv(&[1, 10]));
        }
    }

    #[test]
    fn decrease_key_changes_extraction_order() {
        let mut q = SolverQueue::new(QueueKind::Heap, 4, 100);
        q.insert(entry(2, 0, &[3, 4])); // node w
        q.insert(entry(1, 1, &[3, 3])); // node v
        let displaced = q.decrease_key(2, 2, cv(&[3, 2]));
        assert_eq!(displaced, 0);
        assert_eq!(q.extract_min().node, 2);
        assert_eq!(q.extract_min().node, 1);
    }

    #[test]
    #[should_panic(expected = "lex-smaller")]
    fn decrease_key_to_equal_key_forbidden() {
        let mut q = SolverQueue::new(QueueKind::Heap, 4, 100);
        q.insert(entry(1, 0, &[3, 4]));
        q.decrease_key(1, 1, cv(&[3, 4]));
    }

    #[test]
    #[should_panic(expected = "absent")]
    fn decrease_key_on_absent_node_forbidden() {
        let mut q = SolverQueue::new(QueueKind::Heap, 4, 100);
        q.decrease_key(1, 0, cv(&[1, 1]));
    }

    #[test]
    #[should_panic(expected = "already holds")]
    fn duplicate_node_insert_forbidden() {
        let mut q = SolverQueue::new(QueueKind::Bucket, 4, 100);
        q.insert(entry(1, 0, &[1, 1]));
        q.insert(entry(1, 1, &[2, 2]));
    }

    #[test]
    fn heap_ties_broken_by_node_id() {
        let mut q = SolverQueue::new(QueueKind::Heap, 4, 100);
        q.insert(entry(3, 0, &[2, 2]));
        q.insert(entry(1, 1, &[2, 2]));
        assert_eq!(q.extract_min().node, 1);
        assert_eq!(q.extract_min().node, 3);
    }

    #[test]
    fn bucket_fifo_within_bucket_and_tombstones() {
        let mut q = SolverQueue::new(QueueKind::Bucket, 6, 10);
        q.insert(entry(1, 0, &[5, 9]));
        q.insert(entry(2, 1, &[5, 1]));
        q.insert(entry(3, 2, &[4, 7]));
        // decrease node 1 within the same first component; its old pair
        // becomes a tombstone.
        q.decrease_key(1, 3, cv(&[5, 2]));
        assert_eq!(q.extract_min().node, 3);
        assert_eq!(q.extract_min().node, 2);
        let last = q.extract_min();
        assert_eq!(last.node, 1);
        assert_eq!(last.label, 3);
        assert!(q.is_empty());
    }

    #[test]
    fn randomized_heap_extracts_sorted() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = 40;
            let mut q = SolverQueue::new(QueueKind::Heap, n, 100);
            let mut keys = Vec::new();
            for node in 0..n as NodeId {
                if rng.gen_bool(0.7) {
                    let key = cv(&[rng.gen_range(0..20), rng.gen_range(0..20)]);
                    q.insert(QueueEntry {
                        node,
                        label: node,
                        key: key.clone(),
                    });
                    keys.push(key);
                }
            }
            let mut extracted = Vec::new();
            while !q.is_empty() {
                extracted.push(q.extract_min().key);
            }
            let mut sorted = keys.clone();
            sorted.sort_by(lex_cmp);
            assert_eq!(extracted, sorted);
        }
    }
}
