//! Preprocessing stage: one lexicographic one-to-all Dijkstra query per
//! preprocessing order yields the node potential (ideal points), the
//! per-node nadir values for dimension 2, the global dominance bound and
//! the shortcut tree.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::{BufRead, Write};

use crate::model::{ArcId, CostVector, Graph, Instance, NodeId, Permutation};
use crate::{FormatError, ModelError};

/// Shortest path tree of one lexicographic Dijkstra query. In the reverse
/// direction the tree hangs below the root via `parent_arc`: following
/// parent arcs from any reachable node walks a lex-minimal path to the
/// root, and `tree_cost(v) = cost(parent arc) + tree_cost(head(parent))`.
#[derive(Clone)]
pub struct LexTree {
    pub order: Permutation,
    parent_arc: Vec<Option<ArcId>>,
    tree_cost: Vec<Option<CostVector>>,
}

impl LexTree {
    pub fn reachable(&self, v: NodeId) -> bool {
        self.tree_cost[v as usize].is_some()
    }

    pub fn cost(&self, v: NodeId) -> Option<&CostVector> {
        self.tree_cost[v as usize].as_ref()
    }

    pub fn parent_arc(&self, v: NodeId) -> Option<ArcId> {
        self.parent_arc[v as usize]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reverse,
}

/// The canonical set of preprocessing orders: for each component i the
/// permutation starting with i followed by the remaining indices ascending.
pub fn preprocessing_orders(dim: usize) -> Vec<Permutation> {
    assert!(dim >= 2, "preprocessing orders need dimension >= 2");
    (1..=dim)
        .map(|first| {
            let mut order = vec![first];
            order.extend((1..=dim).filter(|&i| i != first));
            Permutation::from_one_based(&order).unwrap()
        })
        .collect()
}

struct LexHeapEntry {
    key: CostVector, // already permuted into comparison order
    node: NodeId,
}

impl PartialEq for LexHeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for LexHeapEntry {}
impl Ord for LexHeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed for min-heap behaviour; ties go to the smaller node id.
        other
            .key
            .components()
            .cmp(self.key.components())
            .then(other.node.cmp(&self.node))
    }
}
impl PartialOrd for LexHeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One-to-all Dijkstra processing labels in lex non-decreasing order with
/// respect to `order`. Reverse direction settles cost-to-root along
/// incoming arcs (the t-to-all query); forward settles cost-from-root.
pub fn lex_dijkstra(graph: &Graph, root: NodeId, direction: Direction, order: Permutation) -> LexTree {
    let n = graph.node_count();
    let mut tree_cost: Vec<Option<CostVector>> = vec![None; n];
    let mut parent_arc: Vec<Option<ArcId>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();

    tree_cost[root as usize] = Some(CostVector::zero(graph.dim()));
    heap.push(LexHeapEntry {
        key: CostVector::zero(graph.dim()),
        node: root,
    });

    while let Some(LexHeapEntry { node, .. }) = heap.pop() {
        if settled[node as usize] {
            continue;
        }
        settled[node as usize] = true;
        let base = tree_cost[node as usize].clone().unwrap();
        let arcs = match direction {
            Direction::Reverse => graph.incoming(node),
            Direction::Forward => graph.outgoing(node),
        };
        for &arc_id in arcs {
            let arc = graph.arc(arc_id);
            let next = match direction {
                Direction::Reverse => arc.tail,
                Direction::Forward => arc.head,
            };
            if settled[next as usize] {
                continue;
            }
            let candidate = base.add(&arc.cost);
            let improves = match &tree_cost[next as usize] {
                None => true,
                Some(current) => {
                    crate::model::lex_cmp_by(&candidate, current, &order) == Ordering::Less
                }
            };
            if improves {
                heap.push(LexHeapEntry {
                    key: order.apply(&candidate),
                    node: next,
                });
                tree_cost[next as usize] = Some(candidate);
                parent_arc[next as usize] = Some(arc_id);
            }
        }
    }

    LexTree {
        order,
        parent_arc,
        tree_cost,
    }
}

/// Componentwise minimum of a set of cost vectors.
pub fn ideal_point(costs: &[&CostVector]) -> CostVector {
    assert!(!costs.is_empty());
    costs
        .iter()
        .skip(1)
        .fold((*costs[0]).clone(), |acc, c| acc.component_min(c))
}

/// Node potential: the ideal point over all tree costs, per node.
/// Unreachable nodes yield `None`.
pub fn compute_heuristic(trees: &[LexTree], node_count: usize) -> Vec<Option<CostVector>> {
    (0..node_count as NodeId)
        .map(|v| {
            let costs: Vec<&CostVector> = trees.iter().filter_map(|t| t.cost(v)).collect();
            if costs.len() < trees.len() {
                None
            } else {
                Some(ideal_point(&costs))
            }
        })
        .collect()
}

/// Per-node nadir points for dimension 2, read off the two trees:
/// `beta_v = (c_1(T_(2,1)(v)), c_2(T_(1,2)(v)))`.
pub fn compute_nadir_2d(t12: &LexTree, t21: &LexTree, node_count: usize) -> Vec<Option<CostVector>> {
    assert!(t12.order.is_identity() && t21.order.first() == 1);
    (0..node_count as NodeId)
        .map(|v| match (t12.cost(v), t21.cost(v)) {
            (Some(a), Some(b)) => Some(CostVector::new(&[b.get(0), a.get(1)])),
            _ => None,
        })
        .collect()
}

/// Global dominance bound: componentwise maximum of the tree costs at the
/// source, plus epsilon in every dimension. Fails when the source cannot
/// reach the target.
pub fn compute_dominance_bound(
    trees: &[LexTree],
    source: NodeId,
    epsilon: u64,
) -> Result<CostVector, Infeasible> {
    let mut worst: Option<CostVector> = None;
    for tree in trees {
        let Some(cost) = tree.cost(source) else {
            return Err(Infeasible);
        };
        worst = Some(match worst {
            None => cost.clone(),
            Some(w) => w.component_max(cost),
        });
    }
    let eps = CostVector::new(&vec![epsilon; trees[0].order.dim()]);
    Ok(worst.unwrap().add(&eps))
}

/// The instance admits no source-target path at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Infeasible;

/// Everything the solvers consume from the preprocessing stage.
pub struct PreprocessData {
    pub dim: usize,
    /// Node potential; zero-filled at unreachable nodes, which the solvers
    /// never touch thanks to `reachable`.
    pub pi: Vec<CostVector>,
    pub reachable: Vec<bool>,
    /// Per-node nadir points, dimension 2 only.
    pub beta_node: Option<Vec<CostVector>>,
    /// Global dominance bound.
    pub beta_t: CostVector,
    /// The identity-order tree, kept whole for shortcut concatenation.
    pub shortcut: LexTree,
}

pub enum Preprocessed {
    Feasible(Box<PreprocessData>),
    Infeasible,
}

pub const DEFAULT_EPSILON: u64 = 1;

/// Runs the d lexicographic target-to-all queries and assembles the
/// heuristic, bounds and shortcut tree.
pub fn preprocess(inst: &Instance, epsilon: u64) -> Preprocessed {
    let graph = &*inst.graph;
    let dim = graph.dim();
    let n = graph.node_count();
    let orders = preprocessing_orders(dim);
    let trees: Vec<LexTree> = orders
        .into_iter()
        .map(|order| lex_dijkstra(graph, inst.target, Direction::Reverse, order))
        .collect();

    let beta_t = match compute_dominance_bound(&trees, inst.source, epsilon) {
        Ok(b) => b,
        Err(Infeasible) => return Preprocessed::Infeasible,
    };
    let pi_opt = compute_heuristic(&trees, n);
    let reachable: Vec<bool> = pi_opt.iter().map(|p| p.is_some()).collect();
    let pi: Vec<CostVector> = pi_opt
        .into_iter()
        .map(|p| p.unwrap_or_else(|| CostVector::zero(dim)))
        .collect();
    let beta_node = if dim == 2 {
        let nadir = compute_nadir_2d(&trees[0], &trees[1], n);
        Some(
            nadir
                .into_iter()
                .map(|b| b.unwrap_or_else(|| CostVector::zero(2)))
                .collect(),
        )
    } else {
        None
    };
    let shortcut = trees.into_iter().next().unwrap();

    let data = PreprocessData {
        dim,
        pi,
        reachable,
        beta_node,
        beta_t,
        shortcut,
    };
    debug_assert!(verify_monotone(graph, &data));
    Preprocessed::Feasible(Box::new(data))
}

/// Monotonicity of the potential along every arc with reachable head,
/// which also gives non-negative reduced arc costs.
pub fn verify_monotone(graph: &Graph, data: &PreprocessData) -> bool {
    for arc in graph.arcs() {
        if !data.reachable[arc.head as usize] {
            continue;
        }
        debug_assert!(data.reachable[arc.tail as usize]);
        let via = arc.cost.add(&data.pi[arc.head as usize]);
        if !crate::model::dominates_or_equal(&data.pi[arc.tail as usize], &via) {
            return false;
        }
    }
    true
}

const CACHE_VERSION: &str = "pareto-route-prep-v1";

/// Plain CSV cache for preprocessing results. One header line carrying the
/// dimension and dominance bound, then one row per node:
/// `node,reachable,pi...,beta_v...,shortcut_parent,shortcut_cost...`.
pub fn write_cache<W: Write>(data: &PreprocessData, mut out: W) -> std::io::Result<()> {
    let n = data.pi.len();
    write!(out, "{CACHE_VERSION},{},{}", data.dim, n)?;
    for i in 0..data.dim {
        write!(out, ",{}", data.beta_t.get(i))?;
    }
    writeln!(out)?;
    for v in 0..n {
        write!(out, "{v},{}", u8::from(data.reachable[v]))?;
        for i in 0..data.dim {
            write!(out, ",{}", data.pi[v].get(i))?;
        }
        if let Some(beta) = &data.beta_node {
            for i in 0..2 {
                write!(out, ",{}", beta[v].get(i))?;
            }
        }
        match data.shortcut.parent_arc(v as NodeId) {
            Some(a) => write!(out, ",{a}")?,
            None => write!(out, ",-")?,
        }
        match data.shortcut.cost(v as NodeId) {
            Some(c) => {
                for i in 0..data.dim {
                    write!(out, ",{}", c.get(i))?;
                }
            }
            None => {
                for _ in 0..data.dim {
                    write!(out, ",-")?;
                }
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_cache<R: BufRead>(input: R) -> Result<PreprocessData, FormatError> {
    let mut lines = input.lines().enumerate();
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| FormatError::new(0, "empty preprocessing cache"))?;
    let header = header.map_err(|e| FormatError::new(line_no + 1, e.to_string()))?;
    let fields: Vec<&str> = header.trim().split(',').collect();
    if fields.first() != Some(&CACHE_VERSION) || fields.len() < 3 {
        return Err(FormatError::new(1, "unrecognised cache header"));
    }
    let dim: usize = parse_field(fields[1], 1)?;
    let n: usize = parse_field(fields[2], 1)?;
    if fields.len() != 3 + dim {
        return Err(FormatError::new(1, "cache header field count mismatch"));
    }
    let beta_t = CostVector::new(
        &fields[3..]
            .iter()
            .map(|f| parse_field(f, 1))
            .collect::<Result<Vec<u64>, _>>()?,
    );

    let mut pi = Vec::with_capacity(n);
    let mut reachable = Vec::with_capacity(n);
    let mut beta_node: Vec<CostVector> = Vec::new();
    let mut parent_arc = Vec::with_capacity(n);
    let mut tree_cost = Vec::with_capacity(n);
    let per_row = 2 + dim + if dim == 2 { 2 } else { 0 } + 1 + dim;
    for (line_no, line) in lines {
        let line = line.map_err(|e| FormatError::new(line_no + 1, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != per_row {
            return Err(FormatError::new(line_no + 1, "cache row field count mismatch"));
        }
        let mut at = 1;
        let flag: u8 = parse_field(fields[at], line_no + 1)?;
        reachable.push(flag != 0);
        at += 1;
        let mut pi_row = Vec::with_capacity(dim);
        for _ in 0..dim {
            pi_row.push(parse_field(fields[at], line_no + 1)?);
            at += 1;
        }
        pi.push(CostVector::new(&pi_row));
        if dim == 2 {
            let b0 = parse_field(fields[at], line_no + 1)?;
            let b1 = parse_field(fields[at + 1], line_no + 1)?;
            beta_node.push(CostVector::new(&[b0, b1]));
            at += 2;
        }
        parent_arc.push(match fields[at] {
            "-" => None,
            f => Some(parse_field::<ArcId>(f, line_no + 1)?),
        });
        at += 1;
        if fields[at] == "-" {
            tree_cost.push(None);
        } else {
            let mut c = Vec::with_capacity(dim);
            for k in 0..dim {
                c.push(parse_field(fields[at + k], line_no + 1)?);
            }
            tree_cost.push(Some(CostVector::new(&c)));
        }
    }
    if pi.len() != n {
        return Err(FormatError::new(0, "cache row count mismatch"));
    }
    Ok(PreprocessData {
        dim,
        pi,
        reachable,
        beta_node: (dim == 2).then_some(beta_node),
        beta_t,
        shortcut: LexTree {
            order: Permutation::identity(dim),
            parent_arc,
            tree_cost,
        },
    })
}

fn parse_field<T: std::str::FromStr>(field: &str, line: usize) -> Result<T, FormatError> {
    field
        .trim()
        .parse()
        .map_err(|_| FormatError::new(line, format!("cannot parse field `{field}`")))
}

impl From<ModelError> for FormatError {
    fn from(e: ModelError) -> Self {
        FormatError::new(0, e.to_string())
    }
}
