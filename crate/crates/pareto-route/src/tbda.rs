//! Biobjective specialisation of the targeted search.
//!
//! Dimensionality reduction turns every dominance check into one scalar
//! comparison: per node a single value carries the second cost component
//! of the latest extracted path, and the frontier is mirrored by its
//! smallest second component. Instead of per-arc waiting lists, per-arc
//! cursors into the permanent lists regenerate queue-path candidates
//! lazily. Extracted paths are concatenated with the precomputed
//! lexicographic tree to reach the target early; such shortcut paths can
//! overtake one another and the frontier tail is corrected in place.

use std::time::Instant;

use crate::btbda::{SearchSide, SharedBounds};
use crate::label::{reconstruct_path, Label, LabelArena, LabelId};
use crate::model::{lex_cmp, lex_less, CostVector, Graph, Instance, NodeId};
use crate::preprocess::PreprocessData;
use crate::queue::{QueueEntry, QueueKind, SolverQueue};
use crate::run::{EventLog, RunStats, Solution, SolveEvent, SolveOptions};
use crate::SolveError;

const DEADLINE_CHECK_MASK: u64 = 0xfff;

/// Pruning and stopping bounds in the coordinates of the running search.
/// Unidirectional runs own plain scalars; bidirectional runs look through
/// to the shared monotone state, where this search's pruning bound doubles
/// as the opposite search's stopping bound.
pub(crate) enum Bounds2d<'a> {
    Local { prune: u64, stop: u64 },
    Shared { shared: &'a SharedBounds, side: SearchSide },
}

impl Bounds2d<'_> {
    /// Upper bound on the second reduced-cost component of useful paths.
    fn prune_value(&self) -> u64 {
        match self {
            Bounds2d::Local { prune, .. } => *prune,
            Bounds2d::Shared { shared, side } => shared.prune_bound(*side),
        }
    }

    fn tighten_prune(&mut self, value: u64) {
        match self {
            Bounds2d::Local { prune, .. } => *prune = (*prune).min(value),
            Bounds2d::Shared { shared, side } => shared.tighten_prune(*side, value),
        }
    }

    /// First-component threshold at which this search stops.
    fn stop_value(&self) -> u64 {
        match self {
            Bounds2d::Local { stop, .. } => *stop,
            Bounds2d::Shared { shared, side } => shared.stop_bound(*side),
        }
    }

    /// Improvement to this search's second potential component at `v`,
    /// written by the opposite search. Zero when nothing is shared.
    fn raised_pi2(&self, v: NodeId) -> u64 {
        match self {
            Bounds2d::Local { .. } => 0,
            Bounds2d::Shared { shared, side } => shared.heuristic_raise(*side, v),
        }
    }

    /// First extraction at `v`: its first cost component tightens the
    /// opposite search's potential there.
    fn note_first_extraction(&self, v: NodeId, c1: u64) {
        if let Bounds2d::Shared { shared, side } = self {
            shared.raise_heuristic(side.opposite(), v, c1);
        }
    }
}

pub(crate) struct TbdaRun<'a> {
    graph: &'a Graph,
    target: NodeId,
    pre: &'a PreprocessData,
    queue_kind: QueueKind,
    shortcuts: bool,
    literal_nadir: bool,
    check_invariants: bool,
    arena: LabelArena,
    queue: SolverQueue,
    /// Second cost component of the latest extracted path per node.
    gamma: Vec<u64>,
    /// Per-arc cursor into the tail's permanent list for candidate
    /// regeneration.
    last_processed: Vec<usize>,
    permanent: Vec<Vec<LabelId>>,
    /// The frontier under construction; strictly increasing first and
    /// strictly decreasing second components.
    frontier: Vec<LabelId>,
    bounds: Bounds2d<'a>,
    insertions: u64,
    extractions: u64,
    events: EventLog,
    last_extracted: Option<CostVector>,
    done: bool,
}

pub(crate) fn solve_tbda(
    inst: &Instance,
    pre: &PreprocessData,
    opts: &SolveOptions,
    started: Instant,
) -> Result<Solution, SolveError> {
    let bounds = Bounds2d::Local {
        prune: pre.beta_t.get(1),
        stop: pre.beta_t.get(0),
    };
    let mut run = TbdaRun::new(inst, pre, opts, bounds);
    run.run(crate::run::deadline_from(opts, started))?;
    run.into_solution()
}

impl<'a> TbdaRun<'a> {
    pub fn new(
        inst: &'a Instance,
        pre: &'a PreprocessData,
        opts: &SolveOptions,
        bounds: Bounds2d<'a>,
    ) -> Self {
        let graph = &*inst.graph;
        assert_eq!(graph.dim(), 2);
        let mut run = TbdaRun {
            graph,
            target: inst.target,
            pre,
            queue_kind: opts.queue,
            shortcuts: opts.shortcuts,
            literal_nadir: opts.literal_nadir_check,
            check_invariants: opts.check_invariants,
            arena: LabelArena::new(),
            queue: SolverQueue::new(opts.queue, graph.node_count(), pre.beta_t.get(0)),
            gamma: vec![u64::MAX; graph.node_count()],
            last_processed: vec![0; graph.arc_count()],
            permanent: vec![Vec::new(); graph.node_count()],
            frontier: Vec::new(),
            bounds,
            insertions: 0,
            extractions: 0,
            events: EventLog::new(opts.record_events),
            last_extracted: None,
            done: false,
        };
        let root_reduced = pre.pi[inst.source as usize].clone();
        let root = run.arena.push(Label {
            head: inst.source,
            cost: CostVector::zero(2),
            reduced: root_reduced.clone(),
            pred: None,
            last_arc: None,
        });
        run.enqueue(QueueEntry {
            node: inst.source,
            label: root,
            key: root_reduced,
        });
        run
    }

    pub fn run(&mut self, deadline: Option<Instant>) -> Result<(), SolveError> {
        while !self.done {
            if self.extractions & DEADLINE_CHECK_MASK == 0 {
                if let Some(d) = deadline {
                    if Instant::now() > d {
                        return Err(SolveError::TimedOut);
                    }
                }
            }
            self.step();
        }
        Ok(())
    }

    fn enqueue(&mut self, entry: QueueEntry) {
        self.events.push(|| SolveEvent::QueueInsert {
            node: entry.node,
            key: entry.key.clone(),
        });
        self.insertions += 1;
        self.queue.insert(entry);
    }

    /// Potential second component at `v`, including any tightening shared
    /// in from the opposite search. Used in pruning comparisons only; the
    /// stored reduced costs always carry the static potential.
    #[inline]
    fn pi2(&self, v: NodeId) -> u64 {
        self.pre.pi[v as usize].get(1).max(self.bounds.raised_pi2(v))
    }

    /// One main-loop iteration. Returns false once the search finished.
    pub fn step(&mut self) -> bool {
        if self.done {
            return false;
        }
        if self.queue.is_empty() {
            self.done = true;
            return false;
        }
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
        let (cost, reduced) = {
            let label = self.arena.get(p);
            (label.cost.clone(), label.reduced.clone())
        };

        // Bidirectional stop: the opposite search already covers every
        // efficient cost vector from here on.
        if reduced.get(0) >= self.bounds.stop_value() {
            self.done = true;
            return false;
        }
        if v != self.target {
            if self.check_invariants && self.queue_kind == QueueKind::Heap {
                assert!(
                    self.gamma[v as usize] == u64::MAX || cost.get(1) < self.gamma[v as usize],
                    "extractions at one node must strictly improve the second component"
                );
            }
            self.gamma[v as usize] = cost.get(1);
        }

        if let Some(candidate) = self.next_candidate_path(&cost, v) {
            let key = self.arena.get(candidate).reduced.clone();
            self.enqueue(QueueEntry {
                node: v,
                label: candidate,
                key,
            });
        }

        let effective_reduced2 = cost.get(1) + self.pi2(v);
        if self.bounds.prune_value() <= effective_reduced2 {
            return true;
        }
        let first_visit = if v == self.target {
            self.frontier.is_empty()
        } else {
            self.permanent[v as usize].is_empty()
        };
        if first_visit {
            self.bounds.note_first_extraction(v, cost.get(0));
        }

        // Shortcut concatenation with the precomputed tree. An extracted
        // target path concatenates with the empty tree path, so this block
        // is also how target paths become permanent; with shortcuts off it
        // still runs for the target itself.
        if self.shortcuts || v == self.target {
            let beta_v = &self.pre.beta_node.as_ref().expect("biobjective data")[v as usize];
            let shortcut_cost =
                CostVector::new(&[reduced.get(0), cost.get(1) + beta_v.get(1)]);
            if self.bounds.prune_value() > shortcut_cost.get(1) {
                self.add_frontier_path(p, v, shortcut_cost);
                if self.pre.pi[v as usize].get(0) == beta_v.get(0) {
                    // No further efficient target path passes through v.
                    return true;
                }
            }
        }

        let mut success = false;
        let outgoing: &'a [u32] = self.graph.outgoing(v);
        for &arc_id in outgoing {
            success |= self.propagate(p, arc_id);
        }
        if success {
            self.permanent[v as usize].push(p);
        }
        true
    }

    /// Builds the labels of the tree path from `v` to the target on top of
    /// `p` and inserts the result into the frontier, replacing an overtaken
    /// last entry when the new path dominates it.
    fn add_frontier_path(&mut self, p: LabelId, v: NodeId, shortcut_cost: CostVector) {
        let label = self.materialize_shortcut(p, v);
        debug_assert_eq!(self.arena.get(label).cost, shortcut_cost);
        let replaced = match self.frontier.last() {
            Some(&last) => {
                let last_cost = &self.arena.get(last).cost;
                last_cost.get(0) == shortcut_cost.get(0) && last_cost.get(1) > shortcut_cost.get(1)
            }
            None => false,
        };
        if replaced {
            let old = self.frontier.pop().unwrap();
            let old_cost = self.arena.get(old).cost.clone();
            self.events.push(|| SolveEvent::FrontierReplace {
                old: old_cost,
                new: shortcut_cost.clone(),
            });
        } else {
            let shortcut = v != self.target;
            self.events.push(|| SolveEvent::FrontierAdd {
                cost: shortcut_cost.clone(),
                shortcut,
            });
        }
        self.frontier.push(label);
        self.bounds.tighten_prune(shortcut_cost.get(1));
        if self.check_invariants && self.frontier.len() >= 2 {
            let a = &self.arena.get(self.frontier[self.frontier.len() - 2]).cost;
            let b = &self.arena.get(self.frontier[self.frontier.len() - 1]).cost;
            assert!(
                a.get(0) < b.get(0) && a.get(1) > b.get(1),
                "frontier must stay a strictly monotone staircase"
            );
        }
    }

    fn materialize_shortcut(&mut self, p: LabelId, v: NodeId) -> LabelId {
        let mut current = p;
        let mut node = v;
        while node != self.target {
            let arc_id = self
                .pre
                .shortcut
                .parent_arc(node)
                .expect("extracted heads can reach the target");
            let arc = self.graph.arc(arc_id);
            let cost = self.arena.get(current).cost.add(&arc.cost);
            let reduced = cost.add(&self.pre.pi[arc.head as usize]);
            current = self.arena.push(Label {
                head: arc.head,
                cost,
                reduced,
                pred: Some(current),
                last_arc: Some(arc_id),
            });
            node = arc.head;
        }
        current
    }

    /// Expansion along one outgoing arc. The dominance check at the head
    /// node is the single comparison against the latest extraction there;
    /// the frontier check is the mirrored bound on reduced second
    /// components. Returns whether the path passed the dominance checks,
    /// regardless of whether the queue accepted it.
    fn propagate(&mut self, p: LabelId, arc_id: u32) -> bool {
        let arc = self.graph.arc(arc_id);
        let w = arc.head;
        if !self.pre.reachable[w as usize] {
            return false;
        }
        let cost = self.arena.get(p).cost.add(&arc.cost);
        if self.bounds.prune_value() <= cost.get(1) + self.pi2(w) {
            return false;
        }
        if w != self.target {
            let node_bound = if self.literal_nadir {
                self.pre.beta_node.as_ref().expect("biobjective data")[w as usize].get(1)
            } else {
                self.gamma[w as usize]
            };
            if node_bound <= cost.get(1) {
                return false;
            }
        }
        let reduced = cost.add(&self.pre.pi[w as usize]);
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
                // The displaced label is dropped; the cursors regenerate it
                // from the permanent lists if it is ever needed again.
                self.queue.decrease_key(w, label, reduced);
            }
        }
        true
    }

    /// Regenerates queue-path candidates for `v` by expanding permanent
    /// paths of its predecessors from the per-arc cursors. Skipped entries
    /// advance the cursor for good; the first survivor per list ends that
    /// list's scan with the cursor still pointing at it.
    fn next_candidate_path(&mut self, p_cost: &CostVector, v: NodeId) -> Option<LabelId> {
        let mut best: Option<(CostVector, CostVector, LabelId, u32)> = None;
        let incoming: &'a [u32] = self.graph.incoming(v);
        let prune = self.bounds.prune_value();
        let pi2_v = self.pi2(v);
        for &arc_id in incoming {
            let arc = self.graph.arc(arc_id);
            let u = arc.tail;
            loop {
                let idx = self.last_processed[arc_id as usize];
                let Some(&pu) = self.permanent[u as usize].get(idx) else {
                    break;
                };
                let cand_cost = self.arena.get(pu).cost.add(&arc.cost);
                let pruned = prune <= cand_cost.get(1) + pi2_v;
                let two_sided =
                    cand_cost.get(0) > p_cost.get(0) && cand_cost.get(1) < p_cost.get(1);
                if pruned || !two_sided {
                    self.last_processed[arc_id as usize] += 1;
                    continue;
                }
                let cand_reduced = cand_cost.add(&self.pre.pi[v as usize]);
                let better = match &best {
                    None => true,
                    Some((key, _, _, _)) => lex_less(&cand_reduced, key),
                };
                if better {
                    best = Some((cand_reduced, cand_cost, pu, arc_id));
                }
                break; // stop without advancing the cursor
            }
        }
        best.map(|(reduced, cost, pred, arc_id)| {
            self.arena.push(Label {
                head: v,
                cost,
                reduced,
                pred: Some(pred),
                last_arc: Some(arc_id),
            })
        })
    }

    pub fn into_solution(self) -> Result<Solution, SolveError> {
        let mut ids = self.frontier.clone();
        ids.sort_by(|&a, &b| lex_cmp(&self.arena.get(a).cost, &self.arena.get(b).cost));
        let mut frontier = Vec::with_capacity(ids.len());
        let mut paths = Vec::with_capacity(ids.len());
        for id in ids {
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

    /// Frontier entries with their labels, for the bidirectional merge.
    pub fn frontier_entries(&self) -> Vec<(CostVector, Vec<NodeId>)> {
        self.frontier
            .iter()
            .map(|&id| {
                let cost = self.arena.get(id).cost.clone();
                let path = reconstruct_path(&self.arena, id, self.graph)
                    .expect("frontier labels have sound predecessor chains");
                (cost, path)
            })
            .collect()
    }

    pub fn stats_parts(&self) -> (u64, u64, Vec<SolveEvent>) {
        (self.insertions, self.extractions, self.events.events.clone())
    }

    pub fn permanent_costs(&self, v: NodeId) -> Vec<CostVector> {
        self.permanent[v as usize]
            .iter()
            .map(|&id| self.arena.get(id).cost.clone())
            .collect()
    }
}
