//! Batch benchmark driver: runs a manifest of instances over a solver
//! matrix, writes one CSV row per run, aggregates rounded geometric means
//! per solve-time interval, and emits baseline-versus-variant scatter
//! data for external plotting.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use clap::Args;
use pareto_route::io::read_pairs;
use pareto_route::model::{Instance, NodeId};
use pareto_route::run::{solve, SolveOptions};
use serde::Deserialize;
use std::sync::Arc as SharedArc;

use crate::commands::{load_graph, AlgoArg, CliError, QueueArg};

#[derive(Args)]
pub struct BenchArgs {
    /// TOML manifest listing instances, pair files and the solver matrix.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Directory for runs.csv, aggregate.csv and scatter.csv.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Per-run time limit in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
}

#[derive(Deserialize)]
struct Manifest {
    #[serde(default)]
    run: Vec<ManifestEntry>,
}

#[derive(Deserialize)]
struct ManifestEntry {
    name: String,
    graphs: Vec<PathBuf>,
    pairs: PathBuf,
    algos: Vec<String>,
    queues: Vec<String>,
    #[serde(default = "default_true")]
    shortcuts: bool,
    #[serde(default)]
    unit_component: bool,
}

fn default_true() -> bool {
    true
}

struct Job {
    entry_name: String,
    inst: Instance,
    source_1b: u64,
    target_1b: u64,
    algo: AlgoArg,
    queue: QueueArg,
    shortcuts: bool,
    /// Index of the baseline run this job compares against in the
    /// scatter output (the first algo/queue combination of its pair).
    baseline: usize,
}

struct RunResult {
    status: String,
    n_t: usize,
    inserted: u64,
    extracted: u64,
    time_ms: f64,
    prep_ms: f64,
}

/// Geometric mean; non-positive values are clamped to one millisecond
/// equivalents by the callers before they get here.
fn geometric_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let log_sum: f64 = values.iter().map(|v| v.ln()).sum();
    (log_sum / values.len() as f64).exp()
}

/// Solve-time intervals (seconds) used to group aggregate rows.
const TIME_BUCKETS: [(f64, f64); 5] = [
    (0.0, 0.5),
    (0.5, 5.0),
    (5.0, 50.0),
    (50.0, 500.0),
    (500.0, f64::INFINITY),
];

fn bucket_label(seconds: f64) -> String {
    for (lo, hi) in TIME_BUCKETS {
        if seconds > lo && seconds <= hi {
            return if hi.is_infinite() {
                format!("({lo},inf)")
            } else {
                format!("({lo},{hi}]")
            };
        }
    }
    // Zero-second runs land in the first interval.
    "(0,0.5]".to_string()
}

fn parse_algo(s: &str) -> Result<AlgoArg, CliError> {
    match s {
        "tmda" => Ok(AlgoArg::Tmda),
        "mda" => Ok(AlgoArg::Mda),
        "tbda" => Ok(AlgoArg::Tbda),
        "btbda" => Ok(AlgoArg::Btbda),
        other => Err(CliError::Usage(format!("unknown algo `{other}` in manifest"))),
    }
}

fn parse_queue(s: &str) -> Result<QueueArg, CliError> {
    match s {
        "heap" => Ok(QueueArg::Heap),
        "bucket" => Ok(QueueArg::Bucket),
        other => Err(CliError::Usage(format!("unknown queue `{other}` in manifest"))),
    }
}

pub fn run(args: BenchArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.manifest)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.manifest.display())))?;
    let manifest: Manifest =
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("manifest: {e}")))?;
    std::fs::create_dir_all(&args.out_dir)?;

    let mut jobs: Vec<Job> = Vec::new();
    let mut entry_errors: Vec<String> = Vec::new();
    for entry in &manifest.run {
        match prepare_entry(entry) {
            Ok(mut entry_jobs) => jobs.append(&mut entry_jobs),
            Err(e) => {
                // Per-entry failures are reported but do not abort the batch.
                entry_errors.push(format!("{}: {e}", entry.name));
                continue;
            }
        }
    }
    for err in &entry_errors {
        eprintln!("warning: skipping entry {err}");
    }

    let results: Vec<Option<RunResult>> = run_jobs(&jobs, &args);

    write_runs_csv(&args.out_dir.join("runs.csv"), &jobs, &results)?;
    write_aggregate_csv(&args.out_dir.join("aggregate.csv"), &jobs, &results)?;
    write_scatter_csv(&args.out_dir.join("scatter.csv"), &jobs, &results)?;
    println!(
        "{} runs across {} entries -> {}",
        jobs.len(),
        manifest.run.len(),
        args.out_dir.display()
    );
    Ok(())
}

fn prepare_entry(entry: &ManifestEntry) -> Result<Vec<Job>, CliError> {
    let graph = SharedArc::new(load_graph(&entry.graphs, entry.unit_component)?);
    let pairs = read_pairs(BufReader::new(File::open(&entry.pairs)?))?;
    let algos: Vec<AlgoArg> = entry
        .algos
        .iter()
        .map(|a| parse_algo(a))
        .collect::<Result<_, _>>()?;
    let queues: Vec<QueueArg> = entry
        .queues
        .iter()
        .map(|q| parse_queue(q))
        .collect::<Result<_, _>>()?;
    if algos.is_empty() || queues.is_empty() {
        return Err(CliError::Usage("empty algo or queue matrix".into()));
    }
    let n = graph.node_count() as u64;
    let mut jobs = Vec::new();
    for &(s, t) in &pairs {
        if u64::from(s) >= n || u64::from(t) >= n || s == t {
            return Err(CliError::Usage(format!(
                "pair ({},{}) invalid for {n} nodes",
                s + 1,
                t + 1
            )));
        }
        let inst = Instance::new(graph.clone(), s as NodeId, t as NodeId)?;
        let baseline = jobs.len();
        for &algo in &algos {
            for &queue in &queues {
                jobs.push(Job {
                    entry_name: entry.name.clone(),
                    inst: inst.clone(),
                    source_1b: u64::from(s) + 1,
                    target_1b: u64::from(t) + 1,
                    algo,
                    queue,
                    shortcuts: entry.shortcuts,
                    baseline,
                });
            }
        }
    }
    Ok(jobs)
}

fn run_jobs(jobs: &[Job], args: &BenchArgs) -> Vec<Option<RunResult>> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<RunResult>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    let workers = args.workers.max(1).min(jobs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= jobs.len() {
                    break;
                }
                let result = run_one(&jobs[index], args.time_limit);
                results.lock().unwrap()[index] = Some(result);
            });
        }
    });
    results.into_inner().unwrap()
}

fn run_one(job: &Job, time_limit: Option<f64>) -> RunResult {
    let opts = SolveOptions {
        queue: job.queue.to_kind(),
        shortcuts: job.shortcuts,
        time_limit: time_limit.map(Duration::from_secs_f64),
        ..SolveOptions::default()
    };
    match solve(&job.inst, job.algo.to_algo(), &opts) {
        Ok(solution) => RunResult {
            status: "ok".into(),
            n_t: solution.frontier.len(),
            inserted: solution.stats.insertions,
            extracted: solution.stats.extractions,
            time_ms: solution.stats.solve_time.as_secs_f64() * 1e3,
            prep_ms: solution.stats.prep_time.as_secs_f64() * 1e3,
        },
        Err(e) => RunResult {
            status: match e {
                pareto_route::SolveError::TimedOut => "timeout".into(),
                other => format!("error:{other}"),
            },
            n_t: 0,
            inserted: 0,
            extracted: 0,
            time_ms: 0.0,
            prep_ms: 0.0,
        },
    }
}

fn algo_tag(a: AlgoArg) -> &'static str {
    a.to_algo().tag()
}

fn queue_tag(q: QueueArg) -> &'static str {
    match q {
        QueueArg::Heap => "heap",
        QueueArg::Bucket => "bucket",
    }
}

fn write_runs_csv(
    path: &PathBuf,
    jobs: &[Job],
    results: &[Option<RunResult>],
) -> Result<(), CliError> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "instance,s,t,algo,queue,status,n_t,inserted,extracted,time_ms,prep_ms"
    )?;
    for (job, result) in jobs.iter().zip(results) {
        let r = result.as_ref().expect("all jobs ran");
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{:.3},{:.3}",
            job.entry_name,
            job.source_1b,
            job.target_1b,
            algo_tag(job.algo),
            queue_tag(job.queue),
            r.status,
            r.n_t,
            r.inserted,
            r.extracted,
            r.time_ms,
            r.prep_ms
        )?;
    }
    out.flush()?;
    Ok(())
}

fn write_aggregate_csv(
    path: &PathBuf,
    jobs: &[Job],
    results: &[Option<RunResult>],
) -> Result<(), CliError> {
    // Groups: (entry, algo, queue, baseline-time interval). The interval
    // comes from the baseline combination's solve time of the same pair.
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<(String, String, String, String), Vec<&RunResult>> = BTreeMap::new();
    for (job, result) in jobs.iter().zip(results) {
        let r = result.as_ref().expect("all jobs ran");
        if r.status != "ok" {
            continue;
        }
        let Some(base) = results[job.baseline].as_ref() else {
            continue;
        };
        if base.status != "ok" {
            continue;
        }
        let bucket = bucket_label(base.time_ms / 1e3);
        groups
            .entry((
                job.entry_name.clone(),
                algo_tag(job.algo).to_string(),
                queue_tag(job.queue).to_string(),
                bucket,
            ))
            .or_default()
            .push(r);
    }
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "instance,algo,queue,time_bucket,count,geo_n_t,geo_inserted,geo_time_ms"
    )?;
    for ((name, algo, queue, bucket), rows) in groups {
        let clamp = |v: f64| v.max(1e-3);
        let n_t = geometric_mean(&rows.iter().map(|r| clamp(r.n_t as f64)).collect::<Vec<_>>());
        let inserted =
            geometric_mean(&rows.iter().map(|r| clamp(r.inserted as f64)).collect::<Vec<_>>());
        let time =
            geometric_mean(&rows.iter().map(|r| clamp(r.time_ms)).collect::<Vec<_>>());
        writeln!(
            out,
            "{name},{algo},{queue},{bucket},{},{:.0},{:.0},{time:.3}",
            rows.len(),
            n_t,
            inserted
        )?;
    }
    out.flush()?;
    Ok(())
}

fn write_scatter_csv(
    path: &PathBuf,
    jobs: &[Job],
    results: &[Option<RunResult>],
) -> Result<(), CliError> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "instance,s,t,algo,queue,baseline_time_ms,time_ms")?;
    for (index, (job, result)) in jobs.iter().zip(results).enumerate() {
        if index == job.baseline {
            continue;
        }
        let r = result.as_ref().expect("all jobs ran");
        let Some(base) = results[job.baseline].as_ref() else {
            continue;
        };
        if r.status != "ok" || base.status != "ok" {
            continue;
        }
        writeln!(
            out,
            "{},{},{},{},{},{:.3},{:.3}",
            job.entry_name,
            job.source_1b,
            job.target_1b,
            algo_tag(job.algo),
            queue_tag(job.queue),
            base.time_ms,
            r.time_ms
        )?;
    }
    out.flush()?;
    Ok(())
}
