//! Parallel bidirectional biobjective search: one forward search on the
//! instance and one backward search on the reversed instance (arcs
//! reversed, endpoints swapped, cost components swapped), coupled through
//! shared monotone bounds. Each search's pruning bound doubles as the
//! opposite search's stopping threshold, and each search's first
//! extraction per node tightens the opposite potential there. All shared
//! values move in one direction only, so stale reads are conservative.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use crate::model::{lex_cmp, CostVector, Instance, NodeId};
use crate::preprocess::{preprocess, PreprocessData, Preprocessed};
use crate::run::{BidiMode, RunStats, Solution, SolveOptions};
use crate::tbda::{Bounds2d, TbdaRun};
use crate::SolveError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchSide {
    Forward,
    Backward,
}

impl SearchSide {
    pub fn opposite(self) -> SearchSide {
        match self {
            SearchSide::Forward => SearchSide::Backward,
            SearchSide::Backward => SearchSide::Forward,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundAxis {
    /// Bound on the first cost component in original coordinates: the
    /// backward search's pruning bound and the forward stopping threshold.
    Beta1,
    /// Bound on the second component: forward pruning, backward stopping.
    Beta2,
}

/// Monotone state shared by the two searches. Bounds only ever decrease,
/// per-node heuristic raises only ever increase.
pub struct SharedBounds {
    beta1: AtomicU64,
    beta2: AtomicU64,
    /// Raises to the forward search's second potential component, written
    /// by the backward search. Values in original second-component units.
    fwd_pi2: Vec<AtomicU64>,
    /// Raises to the backward search's second potential component (first
    /// component in original coordinates), written by the forward search.
    bwd_pi1: Vec<AtomicU64>,
    share_heuristics: bool,
}

impl SharedBounds {
    pub fn new(node_count: usize, beta1: u64, beta2: u64, share_heuristics: bool) -> Self {
        SharedBounds {
            beta1: AtomicU64::new(beta1),
            beta2: AtomicU64::new(beta2),
            fwd_pi2: (0..node_count).map(|_| AtomicU64::new(0)).collect(),
            bwd_pi1: (0..node_count).map(|_| AtomicU64::new(0)).collect(),
            share_heuristics,
        }
    }

    pub fn bound(&self, which: BoundAxis) -> u64 {
        match which {
            BoundAxis::Beta1 => self.beta1.load(Ordering::Relaxed),
            BoundAxis::Beta2 => self.beta2.load(Ordering::Relaxed),
        }
    }

    /// Monotone minimum update; safe under any interleaving.
    pub fn tighten_bound(&self, which: BoundAxis, value: u64) {
        match which {
            BoundAxis::Beta1 => self.beta1.fetch_min(value, Ordering::Relaxed),
            BoundAxis::Beta2 => self.beta2.fetch_min(value, Ordering::Relaxed),
        };
    }

    /// Monotone maximum update of the potential raise that `side` reads.
    pub fn raise_heuristic(&self, side: SearchSide, node: NodeId, value: u64) {
        if !self.share_heuristics {
            return;
        }
        let slot = match side {
            SearchSide::Forward => &self.fwd_pi2[node as usize],
            SearchSide::Backward => &self.bwd_pi1[node as usize],
        };
        slot.fetch_max(value, Ordering::Relaxed);
    }

    pub fn heuristic_raise(&self, side: SearchSide, node: NodeId) -> u64 {
        if !self.share_heuristics {
            return 0;
        }
        match side {
            SearchSide::Forward => self.fwd_pi2[node as usize].load(Ordering::Relaxed),
            SearchSide::Backward => self.bwd_pi1[node as usize].load(Ordering::Relaxed),
        }
    }

    /// Pruning bound in the local coordinates of `side`.
    pub(crate) fn prune_bound(&self, side: SearchSide) -> u64 {
        match side {
            SearchSide::Forward => self.bound(BoundAxis::Beta2),
            SearchSide::Backward => self.bound(BoundAxis::Beta1),
        }
    }

    pub(crate) fn tighten_prune(&self, side: SearchSide, value: u64) {
        match side {
            SearchSide::Forward => self.tighten_bound(BoundAxis::Beta2, value),
            SearchSide::Backward => self.tighten_bound(BoundAxis::Beta1, value),
        }
    }

    /// Stopping threshold on the local first reduced-cost component: the
    /// bound the opposite search keeps lowering.
    pub(crate) fn stop_bound(&self, side: SearchSide) -> u64 {
        match side {
            SearchSide::Forward => self.bound(BoundAxis::Beta1),
            SearchSide::Backward => self.bound(BoundAxis::Beta2),
        }
    }
}

pub(crate) fn solve_bidirectional(
    inst: &Instance,
    pre: &PreprocessData,
    opts: &SolveOptions,
    started: Instant,
) -> Result<Solution, SolveError> {
    let node_count = inst.graph.node_count();
    let prep_started = Instant::now();
    let reversed = inst
        .reversed()
        .expect("dimension was checked before dispatch");
    let pre_bwd = match preprocess(&reversed, opts.epsilon) {
        Preprocessed::Feasible(data) => data,
        // Unreachable in practice: reversal preserves connectivity.
        Preprocessed::Infeasible => return Ok(Solution::empty(node_count)),
    };
    let extra_prep = prep_started.elapsed();
    let deadline = crate::run::deadline_from(opts, started);

    // The preprocessing bounds of the two searches describe the same
    // corner point in swapped coordinates; the minimum is safe either way.
    let beta1 = pre.beta_t.get(0).min(pre_bwd.beta_t.get(1));
    let beta2 = pre.beta_t.get(1).min(pre_bwd.beta_t.get(0));
    let shared = SharedBounds::new(node_count, beta1, beta2, opts.share_heuristics);

    let bounds_fwd = if opts.share_bounds {
        Bounds2d::Shared {
            shared: &shared,
            side: SearchSide::Forward,
        }
    } else {
        Bounds2d::Local {
            prune: pre.beta_t.get(1),
            stop: pre.beta_t.get(0),
        }
    };
    let bounds_bwd = if opts.share_bounds {
        Bounds2d::Shared {
            shared: &shared,
            side: SearchSide::Backward,
        }
    } else {
        Bounds2d::Local {
            prune: pre_bwd.beta_t.get(1),
            stop: pre_bwd.beta_t.get(0),
        }
    };

    let mut forward = TbdaRun::new(inst, pre, opts, bounds_fwd);
    let mut backward = TbdaRun::new(&reversed, &pre_bwd, opts, bounds_bwd);

    match opts.bidi_mode {
        BidiMode::Interleaved => {
            let mut steps: u64 = 0;
            loop {
                let fwd_active = forward.step();
                let bwd_active = backward.step();
                if !fwd_active && !bwd_active {
                    break;
                }
                steps += 1;
                if steps & 0xfff == 0 {
                    if let Some(d) = deadline {
                        if Instant::now() > d {
                            return Err(SolveError::TimedOut);
                        }
                    }
                }
            }
        }
        BidiMode::Parallel => {
            let backward_result = std::thread::scope(|scope| {
                let handle = scope.spawn(|| backward.run(deadline));
                let fwd = forward.run(deadline);
                let bwd = handle.join().expect("backward search panicked");
                fwd.and(bwd)
            });
            backward_result?;
        }
    }

    let (fwd_ins, fwd_ext, mut events) = forward.stats_parts();
    let (bwd_ins, bwd_ext, bwd_events) = backward.stats_parts();
    events.extend(bwd_events);

    // Union of the two half frontiers. Backward entries come in swapped
    // coordinates and reversed orientation. Equal cost vectors at the seam
    // keep the forward representative; an overtaken tail entry of one half
    // that the other half dominates is filtered by the staircase sweep.
    let mut entries: Vec<(CostVector, bool, Vec<NodeId>)> = Vec::new();
    for (cost, path) in forward.frontier_entries() {
        entries.push((cost, true, path));
    }
    for (cost, mut path) in backward.frontier_entries() {
        path.reverse();
        entries.push((cost.swapped(), false, path));
    }
    entries.sort_by(|a, b| lex_cmp(&a.0, &b.0).then(a.1.cmp(&b.1).reverse()));
    let mut frontier: Vec<CostVector> = Vec::new();
    let mut paths = Vec::new();
    for (cost, _, path) in entries {
        if let Some(last) = frontier.last() {
            if last.get(1) <= cost.get(1) {
                continue;
            }
        }
        frontier.push(cost);
        paths.push(path);
    }

    let permanent = (0..node_count)
        .map(|v| {
            forward.permanent_costs(v as NodeId)
        })
        .collect();

    Ok(Solution {
        frontier,
        paths,
        permanent,
        stats: RunStats {
            insertions: fwd_ins + bwd_ins,
            extractions: fwd_ext + bwd_ext,
            solve_time: Default::default(),
            prep_time: extra_prep,
            events,
        },
    })
}
