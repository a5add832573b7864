//! Ground-truth frontier computation for tests, in two independent
//! flavours: exhaustive simple-path enumeration and a label-correcting
//! fixpoint over per-node Pareto sets. Neither shares code with the
//! solvers it checks.

use crate::model::{dominates_or_equal, lex_cmp, CostVector, Instance, NodeId};
use crate::OracleError;

/// Canonically lex-sorted set of mutually non-dominated cost vectors.
pub type FrontierSet = Vec<CostVector>;

/// Reduces a bag of cost vectors to its lex-sorted minimal (non-dominated,
/// duplicate-free) subset.
pub fn pareto_min(mut vectors: Vec<CostVector>) -> FrontierSet {
    vectors.sort_by(lex_cmp);
    vectors.dedup();
    if vectors.is_empty() {
        return vectors;
    }
    if vectors[0].dim() == 2 {
        // Staircase sweep: lex order makes a later vector dominated iff its
        // second component fails to drop.
        let mut out: Vec<CostVector> = Vec::new();
        for v in vectors {
            match out.last() {
                Some(last) if last.get(1) <= v.get(1) => {}
                _ => out.push(v),
            }
        }
        return out;
    }
    let mut out: Vec<CostVector> = Vec::new();
    for v in &vectors {
        if !vectors
            .iter()
            .any(|other| other != v && dominates_or_equal(other, v))
        {
            out.push(v.clone());
        }
    }
    out
}

pub const DFS_NODE_GUARD: usize = 64;
pub const LABEL_CORRECTING_NODE_GUARD: usize = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// Enumerate all simple source-target paths and filter the dominated
    /// ones. Exponential; guarded to small node counts.
    Dfs,
    /// Per-node Pareto sets iterated to a fixpoint; correct for
    /// non-negative costs.
    LabelCorrecting,
}

/// Frontier of the instance under the chosen mode.
pub fn enumerate_frontier(inst: &Instance, mode: OracleMode) -> Result<FrontierSet, OracleError> {
    match mode {
        OracleMode::Dfs => {
            if inst.graph.node_count() > DFS_NODE_GUARD {
                return Err(OracleError::GuardExceeded {
                    nodes: inst.graph.node_count(),
                    limit: DFS_NODE_GUARD,
                });
            }
            Ok(dfs_frontier(inst))
        }
        OracleMode::LabelCorrecting => {
            let sets = node_pareto_sets(inst)?;
            Ok(sets[inst.target as usize].clone())
        }
    }
}

fn dfs_frontier(inst: &Instance) -> FrontierSet {
    let graph = &*inst.graph;
    let mut on_path = vec![false; graph.node_count()];
    let mut costs = Vec::new();
    let mut stack: Vec<(NodeId, usize, CostVector)> = Vec::new();
    on_path[inst.source as usize] = true;
    stack.push((inst.source, 0, CostVector::zero(graph.dim())));
    while let Some((node, next_arc, cost)) = stack.pop() {
        if node == inst.target {
            costs.push(cost);
            on_path[node as usize] = false;
            continue;
        }
        let out = graph.outgoing(node);
        if next_arc >= out.len() {
            on_path[node as usize] = false;
            continue;
        }
        let arc = graph.arc(out[next_arc]);
        stack.push((node, next_arc + 1, cost.clone()));
        if !on_path[arc.head as usize] {
            on_path[arc.head as usize] = true;
            stack.push((arc.head, 0, cost.add(&arc.cost)));
        }
    }
    pareto_min(costs)
}

/// Pareto sets of source-to-v costs for every node, via worklist iteration
/// with full merges until nothing changes.
pub fn node_pareto_sets(inst: &Instance) -> Result<Vec<FrontierSet>, OracleError> {
    let graph = &*inst.graph;
    let n = graph.node_count();
    if n > LABEL_CORRECTING_NODE_GUARD {
        return Err(OracleError::GuardExceeded {
            nodes: n,
            limit: LABEL_CORRECTING_NODE_GUARD,
        });
    }
    let mut sets: Vec<FrontierSet> = vec![Vec::new(); n];
    sets[inst.source as usize].push(CostVector::zero(graph.dim()));
    let mut queued = vec![false; n];
    let mut worklist = std::collections::VecDeque::new();
    worklist.push_back(inst.source);
    queued[inst.source as usize] = true;
    while let Some(u) = worklist.pop_front() {
        queued[u as usize] = false;
        let base = sets[u as usize].clone();
        for &arc_id in graph.outgoing(u) {
            let arc = graph.arc(arc_id);
            let mut merged = sets[arc.head as usize].clone();
            merged.extend(base.iter().map(|c| c.add(&arc.cost)));
            let merged = pareto_min(merged);
            if merged != sets[arc.head as usize] {
                sets[arc.head as usize] = merged;
                if !queued[arc.head as usize] {
                    queued[arc.head as usize] = true;
                    worklist.push_back(arc.head);
                }
            }
        }
    }
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_random;
    use crate::model::{Graph, Instance};
    use crate::testgraphs::overtaking_example;
    use rand::{Rng, SeedableRng};
    use std::sync::Arc as SharedArc;

    fn cv(c: &[u64]) -> CostVector {
        CostVector::new(c)
    }

    #[test]
    fn example_frontier() {
        let inst = overtaking_example();
        let expected = vec![cv(&[1, 10]), cv(&[3, 4]), cv(&[4, 3])];
        assert_eq!(enumerate_frontier(&inst, OracleMode::Dfs).unwrap(), expected);
        assert_eq!(
            enumerate_frontier(&inst, OracleMode::LabelCorrecting).unwrap(),
            expected
        );
    }

    #[test]
    fn degenerate_instances() {
        let g = Graph::new(2, 2, vec![(0, 1, cv(&[5, 7]))]).unwrap();
        let inst = Instance::new(SharedArc::new(g), 0, 1).unwrap();
        assert_eq!(
            enumerate_frontier(&inst, OracleMode::Dfs).unwrap(),
            vec![cv(&[5, 7])]
        );
        let g = Graph::new(2, 2, vec![]).unwrap();
        let inst = Instance::new(SharedArc::new(g), 0, 1).unwrap();
        assert!(enumerate_frontier(&inst, OracleMode::Dfs).unwrap().is_empty());
        assert!(enumerate_frontier(&inst, OracleMode::LabelCorrecting)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn guard_refuses_large_instances() {
        let g = generate_random(100, 200, 2, 5, 0).unwrap();
        let inst = Instance::new(SharedArc::new(g), 0, 99).unwrap();
        assert!(matches!(
            enumerate_frontier(&inst, OracleMode::Dfs),
            Err(OracleError::GuardExceeded { .. })
        ));
    }

    #[test]
    fn modes_agree_on_small_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for seed in 0..60u64 {
            let n = rng.gen_range(2..=20);
            let m = rng.gen_range(1..=(n * (n - 1)).min(3 * n));
            let d = if seed % 2 == 0 { 2 } else { 3 };
            let g = generate_random(n, m, d, 8, seed).unwrap();
            let s = rng.gen_range(0..n as NodeId);
            let mut t = rng.gen_range(0..n as NodeId);
            if t == s {
                t = (t + 1) % n as NodeId;
            }
            let inst = Instance::new(SharedArc::new(g), s, t).unwrap();
            assert_eq!(
                enumerate_frontier(&inst, OracleMode::Dfs).unwrap(),
                enumerate_frontier(&inst, OracleMode::LabelCorrecting).unwrap(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn output_is_minimal_and_closed() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for seed in 0..30u64 {
            let n = rng.gen_range(2..=14);
            let m = rng.gen_range(1..=(n * (n - 1)).min(3 * n));
            let g = generate_random(n, m, 2, 6, seed).unwrap();
            let inst = Instance::new(SharedArc::new(g), 0, (n - 1) as NodeId).unwrap();
            let frontier = enumerate_frontier(&inst, OracleMode::Dfs).unwrap();
            for (i, a) in frontier.iter().enumerate() {
                for (j, b) in frontier.iter().enumerate() {
                    if i != j {
                        assert!(!dominates_or_equal(a, b));
                    }
                }
            }
        }
    }
}
