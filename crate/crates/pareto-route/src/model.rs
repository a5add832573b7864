//! Graph model, cost-vector arithmetic and the dominance / lexicographic
//! relations shared by every solver.

use smallvec::SmallVec;
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc as SharedArc;

use crate::ModelError;

pub type NodeId = u32;
pub type ArcId = u32;

/// Fixed-dimension vector of non-negative integer costs. Dimension is
/// between 2 and 8; components fit in `u64` with enough headroom that
/// summing costs along any simple path never overflows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CostVector {
    components: SmallVec<[u64; 4]>,
}

impl CostVector {
    pub fn new(components: &[u64]) -> Self {
        CostVector {
            components: SmallVec::from_slice(components),
        }
    }

    pub fn zero(dim: usize) -> Self {
        CostVector {
            components: smallvec::smallvec![0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn get(&self, i: usize) -> u64 {
        self.components[i]
    }

    pub fn components(&self) -> &[u64] {
        &self.components
    }

    pub fn add(&self, other: &CostVector) -> CostVector {
        assert_eq!(self.dim(), other.dim(), "cost vector dimension mismatch");
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a + b)
            .collect();
        CostVector { components }
    }

    /// Componentwise minimum (ideal point of `{self, other}`).
    pub fn component_min(&self, other: &CostVector) -> CostVector {
        assert_eq!(self.dim(), other.dim(), "cost vector dimension mismatch");
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| *a.min(b))
            .collect();
        CostVector { components }
    }

    /// Componentwise maximum.
    pub fn component_max(&self, other: &CostVector) -> CostVector {
        assert_eq!(self.dim(), other.dim(), "cost vector dimension mismatch");
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| *a.max(b))
            .collect();
        CostVector { components }
    }

    /// New vector with the trailing component appended.
    pub fn with_component(&self, value: u64) -> CostVector {
        let mut components = self.components.clone();
        components.push(value);
        CostVector { components }
    }

    /// The two components swapped; only meaningful for dimension 2.
    pub fn swapped(&self) -> CostVector {
        assert_eq!(self.dim(), 2, "component swap requires dimension 2");
        CostVector::new(&[self.components[1], self.components[0]])
    }
}

impl fmt::Debug for CostVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Strict Pareto dominance: `x <= y` componentwise and `x != y`.
pub fn dominates(x: &CostVector, y: &CostVector) -> bool {
    assert_eq!(x.dim(), y.dim(), "cost vector dimension mismatch");
    let mut strict = false;
    for (a, b) in x.components.iter().zip(&y.components) {
        if a > b {
            return false;
        }
        if a < b {
            strict = true;
        }
    }
    strict
}

/// Dominance-or-equivalence: `x <= y` componentwise, equality allowed.
pub fn dominates_or_equal(x: &CostVector, y: &CostVector) -> bool {
    assert_eq!(x.dim(), y.dim(), "cost vector dimension mismatch");
    x.components.iter().zip(&y.components).all(|(a, b)| a <= b)
}

pub fn lex_cmp(x: &CostVector, y: &CostVector) -> Ordering {
    assert_eq!(x.dim(), y.dim(), "cost vector dimension mismatch");
    x.components.cmp(&y.components)
}

/// Lexicographically smaller in the identity component order. Irreflexive.
pub fn lex_less(x: &CostVector, y: &CostVector) -> bool {
    lex_cmp(x, y) == Ordering::Less
}

/// Component order used by the lexicographic Dijkstra queries. Stored
/// 0-based; construction takes the conventional 1-based form.
#[derive(Clone, PartialEq, Eq)]
pub struct Permutation {
    order: SmallVec<[u8; 4]>,
}

impl Permutation {
    pub fn identity(dim: usize) -> Self {
        Permutation {
            order: (0..dim as u8).collect(),
        }
    }

    /// Build from 1-based component indices, e.g. `(2, 1, 3)`.
    pub fn from_one_based(order: &[usize]) -> Result<Self, ModelError> {
        let dim = order.len();
        let mut seen = vec![false; dim];
        for &i in order {
            if i == 0 || i > dim || seen[i - 1] {
                return Err(ModelError::InvalidPermutation);
            }
            seen[i - 1] = true;
        }
        Ok(Permutation {
            order: order.iter().map(|&i| (i - 1) as u8).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.order.len()
    }

    /// 0-based component index compared at position `pos`.
    pub fn component(&self, pos: usize) -> usize {
        self.order[pos] as usize
    }

    /// First component of the order, 0-based.
    pub fn first(&self) -> usize {
        self.order[0] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.order.iter().enumerate().all(|(i, &c)| i == c as usize)
    }

    /// Rearranges the components of `v` into this comparison order.
    pub fn apply(&self, v: &CostVector) -> CostVector {
        assert_eq!(self.dim(), v.dim(), "permutation dimension mismatch");
        let components = self.order.iter().map(|&c| v.get(c as usize)).collect();
        CostVector { components }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ(")?;
        for (i, c) in self.order.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c + 1)?;
        }
        write!(f, ")")
    }
}

/// Lexicographic comparison under a component permutation.
pub fn lex_cmp_by(x: &CostVector, y: &CostVector, order: &Permutation) -> Ordering {
    assert_eq!(x.dim(), y.dim(), "cost vector dimension mismatch");
    assert_eq!(x.dim(), order.dim(), "permutation dimension mismatch");
    for pos in 0..order.dim() {
        let c = order.component(pos);
        match x.get(c).cmp(&y.get(c)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

pub fn lex_less_by(x: &CostVector, y: &CostVector, order: &Permutation) -> bool {
    lex_cmp_by(x, y, order) == Ordering::Less
}

/// Whether some vector of a lex-sorted, mutually non-dominated frontier
/// dominates-or-equals `y`.
///
/// For dimension 2 this is the constant-time check: only the last
/// element's second component is inspected, valid because `y`'s first
/// component never falls below the last element's. For higher dimensions
/// a linear scan runs with early exit once the scanned first component
/// exceeds `y`'s.
pub fn set_dominates(frontier: &[CostVector], y: &CostVector) -> bool {
    let Some(last) = frontier.last() else {
        return false;
    };
    if y.dim() == 2 {
        debug_assert!(last.get(0) <= y.get(0));
        return last.get(1) <= y.get(1);
    }
    for entry in frontier {
        if entry.get(0) > y.get(0) {
            return false;
        }
        if dominates_or_equal(entry, y) {
            return true;
        }
    }
    false
}

#[derive(Clone, Debug)]
pub struct Arc {
    pub id: ArcId,
    pub tail: NodeId,
    pub head: NodeId,
    pub cost: CostVector,
}

/// Digraph in forward + reverse adjacency form with per-arc cost vectors.
/// Self-loops are dropped on construction; parallel arcs are kept.
#[derive(Clone, Debug)]
pub struct Graph {
    node_count: usize,
    dim: usize,
    arcs: Vec<Arc>,
    forward: Vec<Vec<ArcId>>,
    reverse: Vec<Vec<ArcId>>,
}

impl Graph {
    pub fn new(
        node_count: usize,
        dim: usize,
        arc_list: Vec<(NodeId, NodeId, CostVector)>,
    ) -> Result<Self, ModelError> {
        if !(2..=8).contains(&dim) {
            return Err(ModelError::UnsupportedDimension(dim));
        }
        let mut arcs = Vec::with_capacity(arc_list.len());
        let mut forward = vec![Vec::new(); node_count];
        let mut reverse = vec![Vec::new(); node_count];
        for (tail, head, cost) in arc_list {
            if tail as usize >= node_count || head as usize >= node_count {
                return Err(ModelError::NodeOutOfRange {
                    node: tail.max(head),
                    node_count,
                });
            }
            if cost.dim() != dim {
                return Err(ModelError::ArcDimensionMismatch {
                    expected: dim,
                    found: cost.dim(),
                });
            }
            if tail == head {
                // Self-loops can never lie on an efficient path.
                continue;
            }
            let id = arcs.len() as ArcId;
            forward[tail as usize].push(id);
            reverse[head as usize].push(id);
            arcs.push(Arc {
                id,
                tail,
                head,
                cost,
            });
        }
        Ok(Graph {
            node_count,
            dim,
            arcs,
            forward,
            reverse,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id as usize]
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn outgoing(&self, v: NodeId) -> &[ArcId] {
        &self.forward[v as usize]
    }

    pub fn incoming(&self, v: NodeId) -> &[ArcId] {
        &self.reverse[v as usize]
    }
}

/// A one-to-one query over a shared immutable graph.
#[derive(Clone)]
pub struct Instance {
    pub graph: SharedArc<Graph>,
    pub source: NodeId,
    pub target: NodeId,
}

impl Instance {
    pub fn new(graph: SharedArc<Graph>, source: NodeId, target: NodeId) -> Result<Self, ModelError> {
        let n = graph.node_count();
        if source as usize >= n || target as usize >= n {
            return Err(ModelError::NodeOutOfRange {
                node: source.max(target),
                node_count: n,
            });
        }
        if source == target {
            return Err(ModelError::SourceEqualsTarget(source));
        }
        Ok(Instance {
            graph,
            source,
            target,
        })
    }

    pub fn dim(&self) -> usize {
        self.graph.dim()
    }

    /// Same graph, different endpoints.
    pub fn with_pair(&self, source: NodeId, target: NodeId) -> Result<Self, ModelError> {
        Instance::new(self.graph.clone(), source, target)
    }

    /// The reversed biobjective instance: arcs reversed, endpoints swapped
    /// and the two cost components of every arc swapped.
    pub fn reversed(&self) -> Result<Instance, ModelError> {
        if self.dim() != 2 {
            return Err(ModelError::UnsupportedDimension(self.dim()));
        }
        let arc_list = self
            .graph
            .arcs()
            .iter()
            .map(|a| (a.head, a.tail, a.cost.swapped()))
            .collect();
        let graph = Graph::new(self.graph.node_count(), 2, arc_list)?;
        Instance::new(SharedArc::new(graph), self.target, self.source)
    }
}
