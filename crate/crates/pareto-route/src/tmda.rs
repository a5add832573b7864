//! Targeted multiobjective Dijkstra search for any dimension.
//!
//! One label-setting main loop drives three steps per iteration: extract
//! the lex-minimal explored path and make it permanent, promote a new
//! queue path for its head node out of the per-arc lists of waiting
//! explored paths, then propagate the extracted path along outgoing arcs.
//! Pruning uses the target frontier and the global dominance bound on
//! reduced costs, and per-node permanent lists on plain costs.

use std::collections::VecDeque;
use std::time::Instant;

use crate::label::{reconstruct_path, Label, LabelArena, LabelId};
use crate::model::{
    dominates, dominates_or_equal, lex_cmp, lex_less, CostVector, Graph, Instance, NodeId,
};
use crate::preprocess::PreprocessData;
use crate::queue::{QueueEntry, QueueKind, SolverQueue};
use crate::run::{EventLog, HeuristicMode, RunStats, Solution, SolveEvent, SolveOptions};
use crate::SolveError;

const DEADLINE_CHECK_MASK: u64 = 0xfff;

/// Node potential as the solver sees it: the computed ideal points or the
/// zero vector for the undirected baseline.
pub(crate) struct Heuristic<'a> {
    pi: &'a [CostVector],
    zero: CostVector,
    mode: HeuristicMode,
}

impl<'a> Heuristic<'a> {
    pub fn new(pre: &'a PreprocessData, mode: HeuristicMode) -> Self {
        Heuristic {
            pi: &pre.pi,
            zero: CostVector::zero(pre.dim),
            mode,
        }
    }

    #[inline]
    pub fn at(&self, v: NodeId) -> &CostVector {
        match self.mode {
            HeuristicMode::Computed => &self.pi[v as usize],
            HeuristicMode::Zero => &self.zero,
        }
    }
}

/// Whether some permanent cost at the target dominates-or-equals `y`.
/// Entries arrive in non-decreasing first component, so the scan stops
/// once that component exceeds `y`'s; for dimension 2 the last entry
/// decides alone.
fn frontier_dominates(arena: &LabelArena, frontier: &[LabelId], y: &CostVector) -> bool {
    let Some(&last) = frontier.last() else {
        return false;
    };
    if y.dim() == 2 {
        return arena.get(last).cost.get(1) <= y.get(1);
    }
    for &id in frontier {
        let cost = &arena.get(id).cost;
        if cost.get(0) > y.get(0) {
            return false;
        }
        if dominates_or_equal(cost, y) {
            return true;
        }
    }
    false
}

/// Dominance of a candidate cost against a node's permanent list, scanned
/// backwards from the lex-greatest entry. Constant time for dimension 2.
fn node_list_dominates(arena: &LabelArena, list: &[LabelId], y: &CostVector) -> bool {
    let Some(&last) = list.last() else {
        return false;
    };
    if y.dim() == 2 {
        return arena.get(last).cost.get(1) <= y.get(1);
    }
    list.iter()
        .rev()
        .any(|&id| dominates_or_equal(&arena.get(id).cost, y))
}

struct TmdaRun<'a> {
    graph: &'a Graph,
    target: NodeId,
    pre: &'a PreprocessData,
    heur: Heuristic<'a>,
    queue_kind: QueueKind,
    check_invariants: bool,
    arena: LabelArena,
    queue: SolverQueue,
    /// Per-arc lists of explored paths that are not queue paths, lex
    /// sorted in heap mode.
    nqp: Vec<VecDeque<LabelId>>,
    permanent: Vec<Vec<LabelId>>,
    insertions: u64,
    extractions: u64,
    events: EventLog,
    last_extracted: Option<CostVector>,
}

pub(crate) fn solve_tmda(
    inst: &Instance,
    pre: &PreprocessData,
    opts: &SolveOptions,
    started: Instant,
) -> Result<Solution, SolveError> {
    let graph = &*inst.graph;
    let mut run = TmdaRun {
        graph,
        target: inst.target,
        pre,
        heur: Heuristic::new(pre, opts.heuristic),
        queue_kind: opts.queue,
        check_invariants: opts.check_invariants,
        arena: LabelArena::new(),
        queue: SolverQueue::new(opts.queue, graph.node_count(), pre.beta_t.get(0)),
        nqp: vec![VecDeque::new(); graph.arc_count()],
        permanent: vec![Vec::new(); graph.node_count()],
        insertions: 0,
        extractions: 0,
        events: EventLog::new(opts.record_events),
        last_extracted: None,
    };
    let deadline = crate::run::deadline_from(opts, started);

    let root_reduced = run.heur.at(inst.source).clone();
    let root = run.arena.push(Label {
        head: inst.source,
        cost: CostVector::zero(pre.dim),
        reduced: root_reduced.clone(),
        pred: None,
        last_arc: None,
    });
    run.enqueue(QueueEntry {
        node: inst.source,
        label: root,
        key: root_reduced,
    });

    while !run.queue.is_empty() {
        if run.extractions & DEADLINE_CHECK_MASK == 0 {
            if let Some(d) = deadline {
                if Instant::now() > d {
                    return Err(SolveError::TimedOut);
                }
            }
        }
        run.iterate();
    }
    run.into_solution()
}

impl<'a> TmdaRun<'a> {
    fn enqueue(&mut self, entry: QueueEntry) {
        self.events.push(|| SolveEvent::QueueInsert {
            node: entry.node,
            key: entry.key.clone(),
        });
        self.insertions += 1;
        self.queue.insert(entry);
    }

    fn iterate(&mut self) {
        let entry = self.queue.extract_min();
        self.extractions += 1;
        self.events.push(|| SolveEvent::Extract {
            node: entry.node,
            key: entry.key.clone(),
        });
        if self.check_invariants && self.queue_kind == QueueKind::Heap {
            if let Some(prev) = &self.last_extracted {
                assert!(
                    lex_cmp(prev, &entry.key) != std::cmp::Ordering::Greater,
                    "extraction keys must be lex non-decreasing"
                );
            }
            self.last_extracted = Some(entry.key.clone());
        }
        let v = entry.node;
        let p = entry.label;

        // The frontier can grow between a label's insertion and its
        // extraction; a label overtaken that way is useless and, with
        // one-to-one pruning in play, not even guaranteed efficient at its
        // node. Re-checking here keeps the permanent lists efficient. The
        // static dominance bound needs no re-check.
        let overtaken = frontier_dominates(
            &self.arena,
            &self.permanent[self.target as usize],
            &entry.key,
        );
        if !overtaken {
            if v == self.target {
                self.make_target_permanent(p);
            } else {
                self.permanent[v as usize].push(p);
            }
        } else {
            self.events.push(|| SolveEvent::FrontierPrune {
                cost: entry.key.clone(),
            });
        }

        if let Some(next) = self.next_queue_path(v) {
            let key = self.arena.get(next).reduced.clone();
            self.enqueue(QueueEntry {
                node: v,
                label: next,
                key,
            });
        }
        if overtaken || v == self.target {
            return;
        }
        let outgoing: &'a [u32] = self.graph.outgoing(v);
        for &arc_id in outgoing {
            self.propagate(p, arc_id);
        }
    }

    /// Appends an extracted target path to the frontier. Heap mode keeps
    /// the frontier clean by extraction order alone; bucket mode can
    /// extract paths tied in the first reduced-cost component out of lex
    /// order, so an older tied entry the new path dominates is dropped
    /// here. The opposite direction was already handled by the
    /// post-extraction frontier check.
    fn make_target_permanent(&mut self, p: LabelId) {
        let cost = self.arena.get(p).cost.clone();
        let frontier = &mut self.permanent[self.target as usize];
        debug_assert!(!frontier
            .iter()
            .any(|&q| dominates_or_equal(&self.arena.get(q).cost, &cost)));
        let arena = &self.arena;
        let events = &mut self.events;
        frontier.retain(|&q| {
            let kept = !dominates(&cost, &arena.get(q).cost);
            if !kept {
                events.push(|| SolveEvent::FrontierPrune {
                    cost: arena.get(q).cost.clone(),
                });
            }
            kept
        });
        frontier.push(p);
        self.events.push(|| SolveEvent::FrontierAdd {
            cost,
            shortcut: false,
        });
    }

    /// Expansion of the freshly permanent path along one outgoing arc.
    fn propagate(&mut self, p: LabelId, arc_id: u32) {
        let arc = self.graph.arc(arc_id);
        let w = arc.head;
        if !self.pre.reachable[w as usize] {
            return;
        }
        let parent = self.arena.get(p);
        let cost = parent.cost.add(&arc.cost);
        let reduced = cost.add(self.heur.at(w));

        if frontier_dominates(&self.arena, &self.permanent[self.target as usize], &reduced)
            || dominates_or_equal(&self.pre.beta_t, &reduced)
        {
            return;
        }
        if node_list_dominates(&self.arena, &self.permanent[w as usize], &cost) {
            return;
        }

        if !self.queue.contains(w) {
            let label = self.arena.push(Label {
                head: w,
                cost,
                reduced: reduced.clone(),
                pred: Some(p),
                last_arc: Some(arc_id),
            });
            self.enqueue(QueueEntry {
                node: w,
                label,
                key: reduced,
            });
        } else {
            let (_, queue_key) = self.queue.get_path(w);
            if lex_less(&reduced, queue_key) {
                let label = self.arena.push(Label {
                    head: w,
                    cost,
                    reduced: reduced.clone(),
                    pred: Some(p),
                    last_arc: Some(arc_id),
                });
                self.events.push(|| SolveEvent::QueueInsert {
                    node: w,
                    key: reduced.clone(),
                });
                self.insertions += 1;
                let displaced = self.queue.decrease_key(w, label, reduced);
                let displaced_arc = self.arena.get(displaced).last_arc.expect("root is never displaced");
                self.nqp[displaced_arc as usize].push_front(displaced);
                self.check_nqp_sorted(displaced_arc);
            } else {
                let label = self.arena.push(Label {
                    head: w,
                    cost,
                    reduced,
                    pred: Some(p),
                    last_arc: Some(arc_id),
                });
                self.nqp[arc_id as usize].push_back(label);
                self.check_nqp_sorted(arc_id);
            }
        }
    }

    /// Searches the incoming arcs' waiting lists for a new queue path for
    /// `v` after an extraction there. The extracted path is already in the
    /// node's permanent list, so the dominance check against it comes for
    /// free. Entries failing any queue-path condition are deleted from the
    /// front of their list for good: a path pruned by the frontier or the
    /// bound, or dominated at the node's permanent list, can never become
    /// a queue path again, and keeping it would let a later displaced
    /// queue path land in front of a lex-smaller leftover. Each list
    /// contributes its first surviving entry; the lex-smallest candidate
    /// across lists is removed from its list and returned.
    fn next_queue_path(&mut self, v: NodeId) -> Option<LabelId> {
        let mut best: Option<(CostVector, u32)> = None;
        let incoming: &'a [u32] = self.graph.incoming(v);
        for &arc_id in incoming {
            while let Some(&candidate) = self.nqp[arc_id as usize].front() {
                let label = self.arena.get(candidate);
                let reduced = &label.reduced;
                if frontier_dominates(&self.arena, &self.permanent[self.target as usize], reduced)
                    || dominates_or_equal(&self.pre.beta_t, reduced)
                    || node_list_dominates(&self.arena, &self.permanent[v as usize], &label.cost)
                {
                    self.nqp[arc_id as usize].pop_front();
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((key, _)) => lex_less(&label.reduced, key),
                };
                if better {
                    best = Some((label.reduced.clone(), arc_id));
                }
                break;
            }
        }
        best.map(|(_, arc_id)| self.nqp[arc_id as usize].pop_front().unwrap())
    }

    fn check_nqp_sorted(&self, arc_id: u32) {
        if !self.check_invariants || self.queue_kind != QueueKind::Heap {
            return;
        }
        let list = &self.nqp[arc_id as usize];
        for pair in 0..list.len().saturating_sub(1) {
            let a = &self.arena.get(list[pair]).reduced;
            let b = &self.arena.get(list[pair + 1]).reduced;
            assert!(
                lex_cmp(a, b) != std::cmp::Ordering::Greater,
                "waiting list for arc {arc_id} lost its lex order"
            );
        }
    }

    fn into_solution(self) -> Result<Solution, SolveError> {
        let mut frontier_ids = self.permanent[self.target as usize].clone();
        frontier_ids.sort_by(|&a, &b| lex_cmp(&self.arena.get(a).cost, &self.arena.get(b).cost));
        let mut frontier = Vec::with_capacity(frontier_ids.len());
        let mut paths = Vec::with_capacity(frontier_ids.len());
        for id in frontier_ids {
            frontier.push(self.arena.get(id).cost.clone());
            paths.push(reconstruct_path(&self.arena, id, self.graph)?);
        }
        let permanent = self
            .permanent
            .iter()
            .map(|list| list.iter().map(|&id| self.arena.get(id).cost.clone()).collect())
            .collect();
        Ok(Solution {
            frontier,
            paths,
            permanent,
            stats: RunStats {
                insertions: self.insertions,
                extractions: self.extractions,
                solve_time: Default::default(),
                prep_time: Default::default(),
                events: self.events.events,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Graph;
    use crate::run::{solve, Algo, SolveOptions};
    use crate::testgraphs::overtaking_example;
    use std::sync::Arc as SharedArc;

    fn cv(c: &[u64]) -> CostVector {
        CostVector::new(c)
    }

    fn opts(queue: QueueKind) -> SolveOptions {
        SolveOptions {
            queue,
            record_events: true,
            check_invariants: true,
            ..SolveOptions::default()
        }
    }

    #[test]
    fn example_frontier_both_queues() {
        for queue in [QueueKind::Heap, QueueKind::Bucket] {
            let solution = solve(&overtaking_example(), Algo::Tmda, &opts(queue)).unwrap();
            assert_eq!(
                solution.frontier,
                vec![cv(&[1, 10]), cv(&[3, 4]), cv(&[4, 3])]
            );
        }
    }

    #[test]
    fn first_iteration_inserts_expected_keys() {
        let solution = solve(&overtaking_example(), Algo::Tmda, &opts(QueueKind::Heap)).unwrap();
        // After the root is extracted, the three expansions enter the
        // queue with their reduced costs.
        let inserts: Vec<(NodeId, CostVector)> = solution
            .stats
            .events
            .iter()
            .filter_map(|e| match e {
                SolveEvent::QueueInsert { node, key } => Some((*node, key.clone())),
                _ => None,
            })
            .collect();
        assert_eq!(inserts[0], (0, cv(&[1, 3]))); // root with pi(s)
        assert!(inserts[1..4].contains(&(1, cv(&[3, 3]))));
        assert!(inserts[1..4].contains(&(3, cv(&[1, 10]))));
        assert!(inserts[1..4].contains(&(2, cv(&[3, 4]))));
    }

    #[test]
    fn decrease_key_displaces_to_waiting_list() {
        // Traced by hand: the (s,v,t) path with reduced cost (3,5) is
        // displaced from the target slot by (s,w,t) with (3,4) and must
        // be pruned later rather than extracted.
        let solution = solve(&overtaking_example(), Algo::Tmda, &opts(QueueKind::Heap)).unwrap();
        let extracts: Vec<&CostVector> = solution
            .stats
            .events
            .iter()
            .filter_map(|e| match e {
                SolveEvent::Extract { key, .. } => Some(key),
                _ => None,
            })
            .collect();
        assert!(!extracts.contains(&&cv(&[3, 5])));
        assert_eq!(solution.stats.extractions, 7);
    }

    #[test]
    fn single_arc_and_stranded_source() {
        let g = Graph::new(2, 2, vec![(0, 1, cv(&[5, 7]))]).unwrap();
        let inst = crate::model::Instance::new(SharedArc::new(g), 0, 1).unwrap();
        let solution = solve(&inst, Algo::Tmda, &opts(QueueKind::Heap)).unwrap();
        assert_eq!(solution.frontier, vec![cv(&[5, 7])]);
        assert_eq!(solution.paths, vec![vec![0, 1]]);

        // No outgoing arcs at the source: infeasible, empty frontier.
        let g = Graph::new(3, 2, vec![(1, 2, cv(&[1, 1]))]).unwrap();
        let inst = crate::model::Instance::new(SharedArc::new(g), 0, 2).unwrap();
        let solution = solve(&inst, Algo::Tmda, &opts(QueueKind::Heap)).unwrap();
        assert!(solution.frontier.is_empty());
    }

    #[test]
    fn zero_heuristic_matches_computed() {
        for seed in 0..40u64 {
            let inst = crate::testgraphs::random_instance(seed, 25, &[2, 3], 9);
            let computed = solve(&inst, Algo::Tmda, &opts(QueueKind::Heap)).unwrap();
            let zero = solve(&inst, Algo::Mda, &opts(QueueKind::Heap)).unwrap();
            assert_eq!(computed.frontier, zero.frontier, "seed {seed}");
        }
    }

    #[test]
    fn bucket_repair_handles_first_component_ties() {
        // Two source-target paths with equal first component; FIFO bucket
        // order can make the dominated one permanent first, which the
        // frontier repair must undo.
        let g = Graph::new(
            5,
            2,
            vec![
                (0, 1, cv(&[5, 3])), // s -> a
                (1, 4, cv(&[0, 0])), // a -> t
                (0, 2, cv(&[5, 0])), // s -> b1
                (2, 3, cv(&[0, 1])), // b1 -> b2
                (3, 4, cv(&[0, 1])), // b2 -> t
            ],
        )
        .unwrap();
        let inst = crate::model::Instance::new(SharedArc::new(g), 0, 4).unwrap();
        for queue in [QueueKind::Heap, QueueKind::Bucket] {
            let solution = solve(&inst, Algo::Mda, &opts(queue)).unwrap();
            assert_eq!(solution.frontier, vec![cv(&[5, 2])], "{queue:?}");
        }
    }

    #[test]
    fn permanent_paths_reduced_consistency() {
        // Every stored reduced cost equals cost plus potential at the head.
        let inst = overtaking_example();
        let solution = solve(&inst, Algo::Tmda, &opts(QueueKind::Heap)).unwrap();
        // Spot-check through the frontier paths: re-summing arc costs
        // along each reported path reproduces the frontier vector.
        for (cost, path) in solution.frontier.iter().zip(&solution.paths) {
            let mut sum = CostVector::zero(2);
            for pair in path.windows(2) {
                let arc = inst
                    .graph
                    .arcs()
                    .iter()
                    .find(|a| a.tail == pair[0] && a.head == pair[1])
                    .unwrap();
                sum = sum.add(&arc.cost);
            }
            assert_eq!(&sum, cost);
        }
    }
}
