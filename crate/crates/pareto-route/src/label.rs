//! Path labels: the tuple encoding of an explored or permanent path via
//! head node, cost vectors and a predecessor reference.

use crate::model::{ArcId, CostVector, Graph, NodeId};
use crate::SolveError;

pub type LabelId = u32;

/// One explored or permanent path. `reduced` is always `cost` plus the
/// heuristic at `head`. The root label has neither predecessor nor last arc.
#[derive(Clone, Debug)]
pub struct Label {
    pub head: NodeId,
    pub cost: CostVector,
    pub reduced: CostVector,
    pub pred: Option<LabelId>,
    pub last_arc: Option<ArcId>,
}

/// Append-only label storage for one solver run. Labels are immutable once
/// created; discarded ones are simply never referenced again.
pub struct LabelArena {
    labels: Vec<Label>,
}

impl LabelArena {
    pub fn new() -> Self {
        LabelArena { labels: Vec::new() }
    }

    pub fn push(&mut self, label: Label) -> LabelId {
        let id = self.labels.len() as LabelId;
        self.labels.push(label);
        id
    }

    pub fn get(&self, id: LabelId) -> &Label {
        &self.labels[id as usize]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl Default for LabelArena {
    fn default() -> Self {
        Self::new()
    }
}

/// Follows predecessor references back to the root and returns the node
/// sequence from the source to the label's head.
pub fn reconstruct_path(
    arena: &LabelArena,
    id: LabelId,
    graph: &Graph,
) -> Result<Vec<NodeId>, SolveError> {
    let mut nodes = Vec::new();
    let mut current = Some(id);
    let limit = graph.node_count() + 1;
    while let Some(cur) = current {
        if nodes.len() > limit {
            return Err(SolveError::CorruptPredecessorChain);
        }
        let label = arena.get(cur);
        nodes.push(label.head);
        current = label.pred;
    }
    nodes.reverse();
    Ok(nodes)
}
