//! Solver selection, shared options, run statistics and the event trace.

use std::time::{Duration, Instant};

use crate::io::SolutionRecord;
use crate::model::{CostVector, Instance, NodeId};
use crate::preprocess::{preprocess, PreprocessData, Preprocessed, DEFAULT_EPSILON};
use crate::queue::QueueKind;
use crate::SolveError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    /// Targeted multiobjective search, any dimension.
    Tmda,
    /// Baseline without goal direction: zero potential, computed bound.
    Mda,
    /// Biobjective specialisation.
    Tbda,
    /// Parallel bidirectional biobjective search.
    Btbda,
}

impl Algo {
    pub fn tag(self) -> &'static str {
        match self {
            Algo::Tmda => "tmda",
            Algo::Mda => "mda",
            Algo::Tbda => "tbda",
            Algo::Btbda => "btbda",
        }
    }

    pub fn parse(s: &str) -> Option<Algo> {
        match s {
            "tmda" => Some(Algo::Tmda),
            "mda" => Some(Algo::Mda),
            "tbda" => Some(Algo::Tbda),
            "btbda" => Some(Algo::Btbda),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeuristicMode {
    Computed,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BidiMode {
    Parallel,
    /// Strict round-robin of the two searches on one thread; fully
    /// deterministic, used for reproducible tests.
    Interleaved,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub queue: QueueKind,
    pub heuristic: HeuristicMode,
    /// Shortcut concatenation with the precomputed tree (biobjective only).
    pub shortcuts: bool,
    /// Use the static per-node nadir instead of the dynamic extracted-path
    /// bound in the biobjective propagation check. Experimental; changes
    /// results and is excluded from the validated configurations.
    pub literal_nadir_check: bool,
    pub record_events: bool,
    /// Runtime assertions for the heap-mode ordering lemmas.
    pub check_invariants: bool,
    pub bidi_mode: BidiMode,
    /// Couple the two bidirectional searches through shared bounds. With
    /// sharing off each half simply computes its full frontier.
    pub share_bounds: bool,
    pub share_heuristics: bool,
    pub time_limit: Option<Duration>,
    pub epsilon: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            queue: QueueKind::Heap,
            heuristic: HeuristicMode::Computed,
            shortcuts: true,
            literal_nadir_check: false,
            record_events: false,
            check_invariants: false,
            bidi_mode: BidiMode::Parallel,
            share_bounds: true,
            share_heuristics: true,
            time_limit: None,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveEvent {
    Extract { node: NodeId, key: CostVector },
    QueueInsert { node: NodeId, key: CostVector },
    FrontierAdd { cost: CostVector, shortcut: bool },
    FrontierReplace { old: CostVector, new: CostVector },
    /// A frontier candidate dropped again: either an overtaken entry
    /// displaced by its dominator or a dominated extraction discarded.
    FrontierPrune { cost: CostVector },
}

#[derive(Debug, Default)]
pub struct RunStats {
    pub insertions: u64,
    pub extractions: u64,
    pub solve_time: Duration,
    pub prep_time: Duration,
    pub events: Vec<SolveEvent>,
}

/// Event sink that stays free when tracing is off.
pub(crate) struct EventLog {
    enabled: bool,
    pub events: Vec<SolveEvent>,
}

impl EventLog {
    pub fn new(enabled: bool) -> Self {
        EventLog {
            enabled,
            events: Vec::new(),
        }
    }

    #[inline]
    pub fn push(&mut self, make: impl FnOnce() -> SolveEvent) {
        if self.enabled {
            self.events.push(make());
        }
    }
}

/// Result of one solver run. The frontier is canonically lex-sorted and
/// mutually non-dominated; `paths` holds one source-to-target node
/// sequence per frontier vector, in the same order.
#[derive(Debug)]
pub struct Solution {
    pub frontier: Vec<CostVector>,
    pub paths: Vec<Vec<NodeId>>,
    /// Per-node costs of paths made permanent during the search.
    pub permanent: Vec<Vec<CostVector>>,
    pub stats: RunStats,
}

impl Solution {
    pub fn empty(node_count: usize) -> Self {
        Solution {
            frontier: Vec::new(),
            paths: Vec::new(),
            permanent: vec![Vec::new(); node_count],
            stats: RunStats::default(),
        }
    }
}

pub(crate) fn deadline_from(opts: &SolveOptions, started: Instant) -> Option<Instant> {
    opts.time_limit.map(|l| started + l)
}

/// Preprocesses the instance and runs the chosen solver. Preprocessing
/// time is kept out of the reported solve time. An infeasible instance
/// yields an empty frontier.
pub fn solve(inst: &Instance, algo: Algo, opts: &SolveOptions) -> Result<Solution, SolveError> {
    let dim = inst.dim();
    if matches!(algo, Algo::Tbda | Algo::Btbda) {
        if dim != 2 {
            return Err(SolveError::UnsupportedDimension {
                algo: algo.tag(),
                supported: 2,
                dim,
            });
        }
        if effective_heuristic(algo, opts) == HeuristicMode::Zero {
            return Err(SolveError::IncompatibleOptions(
                "the biobjective solvers require the computed heuristic".into(),
            ));
        }
    }

    let prep_started = Instant::now();
    let pre = match preprocess(inst, opts.epsilon) {
        Preprocessed::Feasible(data) => data,
        Preprocessed::Infeasible => {
            let mut solution = Solution::empty(inst.graph.node_count());
            solution.stats.prep_time = prep_started.elapsed();
            return Ok(solution);
        }
    };
    let prep_time = prep_started.elapsed();
    let mut solution = solve_preprocessed(inst, &pre, algo, opts)?;
    solution.stats.prep_time += prep_time;
    Ok(solution)
}

/// Runs the chosen solver against already-computed preprocessing data.
pub fn solve_preprocessed(
    inst: &Instance,
    pre: &PreprocessData,
    algo: Algo,
    opts: &SolveOptions,
) -> Result<Solution, SolveError> {
    let mut opts = opts.clone();
    opts.heuristic = effective_heuristic(algo, &opts);
    let started = Instant::now();
    let mut solution = match algo {
        Algo::Tmda | Algo::Mda => crate::tmda::solve_tmda(inst, pre, &opts, started),
        Algo::Tbda => crate::tbda::solve_tbda(inst, pre, &opts, started),
        Algo::Btbda => crate::btbda::solve_bidirectional(inst, pre, &opts, started),
    }?;
    // The bidirectional solver preprocesses its reversed half internally;
    // that share is already in prep_time and stays out of the solve time.
    solution.stats.solve_time = started.elapsed().saturating_sub(solution.stats.prep_time);
    Ok(solution)
}

fn effective_heuristic(algo: Algo, opts: &SolveOptions) -> HeuristicMode {
    match algo {
        Algo::Mda => HeuristicMode::Zero,
        _ => opts.heuristic,
    }
}

/// Assembles the CSV record for a finished run.
pub fn to_record(
    instance_name: &str,
    inst: &Instance,
    algo: Algo,
    opts: &SolveOptions,
    solution: &Solution,
    with_paths: bool,
) -> SolutionRecord {
    SolutionRecord {
        instance: instance_name.to_string(),
        source: inst.source,
        target: inst.target,
        algo: algo.tag().to_string(),
        queue: match opts.queue {
            QueueKind::Heap => "heap".to_string(),
            QueueKind::Bucket => "bucket".to_string(),
        },
        n_t: solution.frontier.len(),
        inserted: solution.stats.insertions,
        extracted: solution.stats.extractions,
        time_ms: solution.stats.solve_time.as_secs_f64() * 1e3,
        prep_ms: Some(solution.stats.prep_time.as_secs_f64() * 1e3),
        frontier: solution.frontier.clone(),
        paths: with_paths.then(|| solution.paths.clone()),
    }
}
