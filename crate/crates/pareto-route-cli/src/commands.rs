//! Subcommand definitions and everything except the benchmark harness.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc as SharedArc;
use std::time::Duration;

use clap::{Args, Subcommand, ValueEnum};

use crate::bench;
use pareto_route::generate::{generate_grid, generate_netmaker, generate_random};
use pareto_route::io::{
    parse_dimacs_gr, read_pairs, write_dimacs_gr, write_pairs, write_solution,
};
use pareto_route::model::{Graph, Instance, NodeId};
use pareto_route::oracle::{enumerate_frontier, OracleMode, LABEL_CORRECTING_NODE_GUARD};
use pareto_route::preprocess::{preprocess, read_cache, write_cache, Preprocessed};
use pareto_route::queue::QueueKind;
use pareto_route::run::{
    solve, solve_preprocessed, to_record, Algo, BidiMode, HeuristicMode, Solution, SolveEvent,
    SolveOptions,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<pareto_route::FormatError> for CliError {
    fn from(e: pareto_route::FormatError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<pareto_route::GenerateError> for CliError {
    fn from(e: pareto_route::GenerateError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<pareto_route::ModelError> for CliError {
    fn from(e: pareto_route::ModelError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<pareto_route::SolveError> for CliError {
    fn from(e: pareto_route::SolveError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Tmda,
    Mda,
    Tbda,
    Btbda,
}

impl AlgoArg {
    pub fn to_algo(self) -> Algo {
        match self {
            AlgoArg::Tmda => Algo::Tmda,
            AlgoArg::Mda => Algo::Mda,
            AlgoArg::Tbda => Algo::Tbda,
            AlgoArg::Btbda => Algo::Btbda,
        }
    }
}

impl fmt::Display for AlgoArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_algo().tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QueueArg {
    Heap,
    Bucket,
}

impl fmt::Display for QueueArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueueArg::Heap => "heap",
            QueueArg::Bucket => "bucket",
        })
    }
}

impl QueueArg {
    pub fn to_kind(self) -> QueueKind {
        match self {
            QueueArg::Heap => QueueKind::Heap,
            QueueArg::Bucket => QueueKind::Bucket,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HeuristicArg {
    Computed,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BidiArg {
    Parallel,
    Interleaved,
}

#[derive(Subcommand)]
pub enum Command {
    /// Write a generated instance as multi-stream DIMACS files.
    Generate(GenerateArgs),
    /// Solve one source-target query.
    Solve(SolveArgs),
    /// Check solver frontiers against the exhaustive oracle.
    Validate(ValidateArgs),
    /// Run a benchmark manifest and aggregate the results.
    Bench(bench::BenchArgs),
}

#[derive(Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub kind: GenerateKind,
}

#[derive(Subcommand)]
pub enum GenerateKind {
    /// Grid with a super source and super target, two cost components.
    Grid {
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        max_cost: u64,
        /// Output prefix; writes <prefix>.1.gr, <prefix>.2.gr, <prefix>.st.
        #[arg(long)]
        out: PathBuf,
    },
    /// Hamiltonian cycle plus random arcs, three banded cost components.
    Netmaker {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0)]
        extra_arcs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random source-target pairs to write alongside the graph.
        #[arg(long, default_value_t = 0)]
        pairs: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Uniform random digraph, suitable for oracle-checked validation.
    Random {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        arcs: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        max_cost: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        pairs: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
pub struct SolveArgs {
    /// One DIMACS .gr file per cost component, in component order.
    #[arg(short = 'g', long = "graph", required = true)]
    pub graphs: Vec<PathBuf>,
    /// Source node, 1-based as in the files.
    #[arg(long)]
    pub source: u64,
    /// Target node, 1-based.
    #[arg(long)]
    pub target: u64,
    #[arg(long, value_enum, default_value_t = AlgoArg::Tmda)]
    pub algo: AlgoArg,
    #[arg(long, value_enum, default_value_t = QueueArg::Heap)]
    pub queue: QueueArg,
    /// Shortcut concatenation in the biobjective solvers.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub shortcuts: bool,
    #[arg(long, value_enum, default_value_t = HeuristicArg::Computed)]
    pub heuristic: HeuristicArg,
    #[arg(long, value_enum, default_value_t = BidiArg::Parallel)]
    pub bidi: BidiArg,
    /// Experimental: the literal static nadir check in biobjective
    /// propagation; known to change results.
    #[arg(long, default_value_t = false)]
    pub literal_nadir: bool,
    /// Append a cost component equal to one on every arc.
    #[arg(long, default_value_t = false)]
    pub unit_component: bool,
    /// Abort the solve after this many seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Reuse or create a preprocessing cache file (per graph and target).
    #[arg(long)]
    pub prep_cache: Option<PathBuf>,
    /// Include the node sequence of every frontier path in the CSV.
    #[arg(long, default_value_t = false)]
    pub paths: bool,
    /// Write the solution CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ValidateArgs {
    #[arg(short = 'g', long = "graph", required = true)]
    pub graphs: Vec<PathBuf>,
    /// Pair file with `q <s> <t>` lines.
    #[arg(long)]
    pub pairs: PathBuf,
    /// Comma-separated list of solvers to check.
    #[arg(long, value_delimiter = ',', default_values_t = vec![AlgoArg::Tmda])]
    pub algos: Vec<AlgoArg>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![QueueArg::Heap, QueueArg::Bucket])]
    pub queues: Vec<QueueArg>,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub shortcuts: bool,
    #[arg(long, default_value_t = false)]
    pub literal_nadir: bool,
    #[arg(long, default_value_t = false)]
    pub unit_component: bool,
}

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(args) => generate(args),
        Command::Solve(args) => run_solve(args),
        Command::Validate(args) => validate(args),
        Command::Bench(args) => bench::run(args),
    }
}

pub fn load_graph(paths: &[PathBuf], unit_component: bool) -> Result<Graph, CliError> {
    if paths.len() < 2 && !(paths.len() == 1 && unit_component) {
        return Err(CliError::Usage(
            "need at least two cost streams (or one stream plus --unit-component)".into(),
        ));
    }
    let mut readers = Vec::with_capacity(paths.len().max(2));
    for path in paths {
        let file = File::open(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        readers.push(BufReader::new(file));
    }
    let graph = if paths.len() == 1 {
        // A single stream duplicated parses into a valid graph whose
        // second component is then replaced by the unit component.
        let file = File::open(&paths[0])
            .map_err(|e| CliError::Io(format!("{}: {e}", paths[0].display())))?;
        readers.push(BufReader::new(file));
        let doubled = parse_dimacs_gr(readers)?;
        let arc_list = doubled
            .arcs()
            .iter()
            .map(|a| {
                let c = pareto_route::model::CostVector::new(&[a.cost.get(0), 1]);
                (a.tail, a.head, c)
            })
            .collect();
        return Ok(Graph::new(doubled.node_count(), 2, arc_list)?);
    } else {
        parse_dimacs_gr(readers)?
    };
    Ok(if unit_component {
        pareto_route::io::synthesize_unit_component(&graph)
    } else {
        graph
    })
}

fn write_graph_streams(graph: &Graph, prefix: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    for component in 0..graph.dim() {
        let path = prefix.with_extension(format!("{}.gr", component + 1));
        let mut out = BufWriter::new(File::create(&path)?);
        write_dimacs_gr(graph, component, &mut out)?;
        out.flush()?;
        written.push(path);
    }
    Ok(written)
}

fn random_pairs(n: usize, count: usize, seed: u64) -> Vec<(NodeId, NodeId)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x7061_6972);
    let mut pairs = Vec::with_capacity(count);
    while pairs.len() < count {
        let s = rng.gen_range(0..n as NodeId);
        let t = rng.gen_range(0..n as NodeId);
        if s != t {
            pairs.push((s, t));
        }
    }
    pairs
}

fn generate(args: GenerateArgs) -> Result<(), CliError> {
    match args.kind {
        GenerateKind::Grid {
            width,
            height,
            seed,
            max_cost,
            out,
        } => {
            let (graph, source, target) = generate_grid(width, height, seed, max_cost)?;
            let files = write_graph_streams(&graph, &out)?;
            let pair_path = out.with_extension("st");
            let mut pair_out = BufWriter::new(File::create(&pair_path)?);
            write_pairs(&[(source, target)], &mut pair_out)?;
            pair_out.flush()?;
            println!(
                "grid {width}x{height}: {} nodes, {} arcs -> {} + {}",
                graph.node_count(),
                graph.arc_count(),
                files
                    .iter()
                    .map(|p| p.display().to_string())
                    .collect::<Vec<_>>()
                    .join(", "),
                pair_path.display()
            );
        }
        GenerateKind::Netmaker {
            nodes,
            extra_arcs,
            seed,
            pairs,
            out,
        } => {
            let graph = generate_netmaker(nodes, extra_arcs, seed)?;
            emit_graph_and_pairs(&graph, pairs, seed, &out)?;
        }
        GenerateKind::Random {
            nodes,
            arcs,
            dim,
            max_cost,
            seed,
            pairs,
            out,
        } => {
            let graph = generate_random(nodes, arcs, dim, max_cost, seed)?;
            emit_graph_and_pairs(&graph, pairs, seed, &out)?;
        }
    }
    Ok(())
}

fn emit_graph_and_pairs(graph: &Graph, pairs: usize, seed: u64, out: &Path) -> Result<(), CliError> {
    let files = write_graph_streams(graph, out)?;
    let mut names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    if pairs > 0 {
        let pair_path = out.with_extension("st");
        let mut pair_out = BufWriter::new(File::create(&pair_path)?);
        write_pairs(&random_pairs(graph.node_count(), pairs, seed), &mut pair_out)?;
        pair_out.flush()?;
        names.push(pair_path.display().to_string());
    }
    println!(
        "{} nodes, {} arcs, d={} -> {}",
        graph.node_count(),
        graph.arc_count(),
        graph.dim(),
        names.join(", ")
    );
    Ok(())
}

pub fn build_options(args: &SolveArgs) -> SolveOptions {
    SolveOptions {
        queue: args.queue.to_kind(),
        heuristic: match args.heuristic {
            HeuristicArg::Computed => HeuristicMode::Computed,
            HeuristicArg::Zero => HeuristicMode::Zero,
        },
        shortcuts: args.shortcuts,
        literal_nadir_check: args.literal_nadir,
        record_events: log::log_enabled!(log::Level::Debug),
        bidi_mode: match args.bidi {
            BidiArg::Parallel => BidiMode::Parallel,
            BidiArg::Interleaved => BidiMode::Interleaved,
        },
        time_limit: args.time_limit.map(Duration::from_secs_f64),
        ..SolveOptions::default()
    }
}

fn instance_for(graph: Graph, source_1b: u64, target_1b: u64) -> Result<Instance, CliError> {
    let n = graph.node_count() as u64;
    if source_1b < 1 || source_1b > n || target_1b < 1 || target_1b > n {
        return Err(CliError::Usage(format!(
            "source/target must lie in 1..={n}"
        )));
    }
    Ok(Instance::new(
        SharedArc::new(graph),
        (source_1b - 1) as NodeId,
        (target_1b - 1) as NodeId,
    )?)
}

fn log_events(solution: &Solution) {
    for event in &solution.stats.events {
        match event {
            SolveEvent::Extract { node, key } => {
                log::trace!("extract node {node} key {key:?}")
            }
            SolveEvent::QueueInsert { node, key } => {
                log::trace!("insert node {node} key {key:?}")
            }
            SolveEvent::FrontierAdd { cost, shortcut } => {
                log::debug!(
                    "frontier add {cost:?}{}",
                    if *shortcut { " via shortcut" } else { "" }
                )
            }
            SolveEvent::FrontierReplace { old, new } => {
                log::debug!("frontier replace {old:?} -> {new:?}")
            }
            SolveEvent::FrontierPrune { cost } => {
                log::debug!("frontier prune {cost:?}")
            }
        }
    }
}

fn run_solve(args: SolveArgs) -> Result<(), CliError> {
    let graph = load_graph(&args.graphs, args.unit_component)?;
    let inst = instance_for(graph, args.source, args.target)?;
    let algo = args.algo.to_algo();
    let opts = build_options(&args);

    let solution = match &args.prep_cache {
        Some(cache_path) if cache_path.exists() => {
            let pre = read_cache(BufReader::new(File::open(cache_path)?))?;
            if pre.dim != inst.dim() || pre.pi.len() != inst.graph.node_count() {
                return Err(CliError::Usage(format!(
                    "preprocessing cache {} does not match the instance",
                    cache_path.display()
                )));
            }
            solve_preprocessed(&inst, &pre, algo, &opts)?
        }
        Some(cache_path) => {
            let prep_started = std::time::Instant::now();
            match preprocess(&inst, opts.epsilon) {
                Preprocessed::Feasible(pre) => {
                    let mut out = BufWriter::new(File::create(cache_path)?);
                    write_cache(&pre, &mut out)?;
                    out.flush()?;
                    let mut solution = solve_preprocessed(&inst, &pre, algo, &opts)?;
                    solution.stats.prep_time += prep_started.elapsed();
                    solution
                }
                Preprocessed::Infeasible => Solution::empty(inst.graph.node_count()),
            }
        }
        None => solve(&inst, algo, &opts)?,
    };

    log_events(&solution);
    let name = args.graphs[0]
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into());
    let record = to_record(&name, &inst, algo, &opts, &solution, args.paths);
    println!(
        "n_t={} inserted={} extracted={} time_ms={:.3} prep_ms={:.3}",
        record.n_t, record.inserted, record.extracted, record.time_ms,
        record.prep_ms.unwrap_or(0.0)
    );
    for cost in &record.frontier {
        println!("f {cost:?}");
    }
    if let Some(out_path) = &args.out {
        let mut out = BufWriter::new(File::create(out_path)?);
        write_solution(&record, &mut out)?;
        out.flush()?;
    }
    Ok(())
}

fn validate(args: ValidateArgs) -> Result<(), CliError> {
    let graph = load_graph(&args.graphs, args.unit_component)?;
    if graph.node_count() > LABEL_CORRECTING_NODE_GUARD {
        eprintln!(
            "warning: {} nodes exceed the oracle guard of {LABEL_CORRECTING_NODE_GUARD}; skipping",
            graph.node_count()
        );
        return Ok(());
    }
    let graph = SharedArc::new(graph);
    let pairs = read_pairs(BufReader::new(File::open(&args.pairs)?))?;
    let n = graph.node_count() as u64;
    let mut failures = 0usize;
    for &(s, t) in &pairs {
        if u64::from(s) >= n || u64::from(t) >= n || s == t {
            return Err(CliError::Usage(format!(
                "pair ({},{}) invalid for {n} nodes",
                s + 1,
                t + 1
            )));
        }
        let inst = Instance::new(graph.clone(), s, t)?;
        let oracle = enumerate_frontier(&inst, OracleMode::LabelCorrecting)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        for algo in &args.algos {
            if matches!(algo, AlgoArg::Tbda | AlgoArg::Btbda) && inst.dim() != 2 {
                return Err(CliError::Usage(format!(
                    "{:?} requires two cost components, instance has {}",
                    algo,
                    inst.dim()
                )));
            }
            for queue in &args.queues {
                let opts = SolveOptions {
                    queue: queue.to_kind(),
                    shortcuts: args.shortcuts,
                    literal_nadir_check: args.literal_nadir,
                    check_invariants: true,
                    ..SolveOptions::default()
                };
                let solution = solve(&inst, algo.to_algo(), &opts)?;
                let ok = solution.frontier == oracle;
                println!(
                    "{} s={} t={} algo={} queue={} n_t={}",
                    if ok { "PASS" } else { "FAIL" },
                    s + 1,
                    t + 1,
                    algo,
                    queue,
                    solution.frontier.len()
                );
                if !ok {
                    failures += 1;
                }
            }
        }
    }
    if failures > 0 {
        return Err(CliError::Validation(format!(
            "{failures} run(s) diverged from the oracle"
        )));
    }
    Ok(())
}
