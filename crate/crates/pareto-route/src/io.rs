//! Benchmark instance and solution formats: multi-stream DIMACS `.gr`
//! graphs (one file per cost component), `q <s> <t>` pair files and the
//! solution CSV.

use std::io::{BufRead, Write};

use crate::model::{CostVector, Graph, NodeId};
use crate::FormatError;

/// Parses one DIMACS `.gr` stream per cost component into a graph.
///
/// Every stream must carry the same `p sp <n> <m>` line and, after sorting
/// arcs by `(tail, head, occurrence index)`, the same topology; component k
/// of each arc cost comes from stream k. Node ids are 1-based on disk and
/// 0-based in memory.
pub fn parse_dimacs_gr<R: BufRead>(streams: Vec<R>) -> Result<Graph, FormatError> {
    assert!(streams.len() >= 2, "need one stream per cost component, d >= 2");
    let mut parsed = Vec::with_capacity(streams.len());
    for stream in streams {
        parsed.push(parse_single_gr(stream)?);
    }
    let (n, m) = (parsed[0].0, parsed[0].1);
    for p in &parsed {
        if p.0 != n || p.1 != m {
            return Err(FormatError::new(0, "problem lines differ across cost streams"));
        }
    }
    // Canonical arc order: (tail, head, occurrence). A stable sort keeps
    // parallel arcs in file order, which defines their occurrence index.
    let mut sorted: Vec<Vec<(NodeId, NodeId, u64)>> = Vec::with_capacity(parsed.len());
    for (_, _, mut arcs) in parsed {
        arcs.sort_by_key(|&(t, h, _)| (t, h));
        sorted.push(arcs);
    }
    let first = &sorted[0];
    for other in &sorted[1..] {
        for (a, b) in first.iter().zip(other) {
            if (a.0, a.1) != (b.0, b.1) {
                return Err(FormatError::new(
                    0,
                    format!("topology mismatch across streams at arc ({},{})", a.0 + 1, a.1 + 1),
                ));
            }
        }
    }
    let dim = sorted.len();
    let arc_list = (0..first.len())
        .map(|i| {
            let (tail, head, _) = first[i];
            let cost = CostVector::new(&sorted.iter().map(|s| s[i].2).collect::<Vec<_>>());
            (tail, head, cost)
        })
        .collect();
    Graph::new(n, dim, arc_list).map_err(FormatError::from)
}

type RawArcs = (usize, usize, Vec<(NodeId, NodeId, u64)>);

fn parse_single_gr<R: BufRead>(stream: R) -> Result<RawArcs, FormatError> {
    let mut problem: Option<(usize, usize)> = None;
    let mut arcs: Vec<(NodeId, NodeId, u64)> = Vec::new();
    for (idx, line) in stream.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| FormatError::new(line_no, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("p") => {
                if problem.is_some() {
                    return Err(FormatError::new(line_no, "duplicate problem line"));
                }
                if fields.next() != Some("sp") {
                    return Err(FormatError::new(line_no, "expected `p sp <n> <m>`"));
                }
                let n = parse_num(fields.next(), line_no)?;
                let m = parse_num(fields.next(), line_no)?;
                problem = Some((n as usize, m as usize));
            }
            Some("a") => {
                let (n, _) = problem
                    .ok_or_else(|| FormatError::new(line_no, "arc before problem line"))?;
                let tail: u64 = parse_num(fields.next(), line_no)?;
                let head: u64 = parse_num(fields.next(), line_no)?;
                let weight_field = fields
                    .next()
                    .ok_or_else(|| FormatError::new(line_no, "missing arc weight"))?;
                if weight_field.starts_with('-') {
                    return Err(FormatError::new(line_no, "negative arc weight"));
                }
                let weight: u64 = weight_field
                    .parse()
                    .map_err(|_| FormatError::new(line_no, "malformed arc weight"))?;
                if tail < 1 || tail as usize > n || head < 1 || head as usize > n {
                    return Err(FormatError::new(line_no, "arc endpoint out of range"));
                }
                arcs.push((tail as NodeId - 1, head as NodeId - 1, weight));
            }
            Some(other) => {
                return Err(FormatError::new(line_no, format!("unknown line type `{other}`")));
            }
            None => unreachable!(),
        }
    }
    let (n, m) = problem.ok_or_else(|| FormatError::new(0, "missing problem line"))?;
    if arcs.len() != m {
        return Err(FormatError::new(
            0,
            format!("problem line declares {m} arcs, found {}", arcs.len()),
        ));
    }
    Ok((n, m, arcs))
}

fn parse_num(field: Option<&str>, line: usize) -> Result<u64, FormatError> {
    field
        .ok_or_else(|| FormatError::new(line, "missing numeric field"))?
        .parse()
        .map_err(|_| FormatError::new(line, "malformed numeric field"))
}

/// Writes component `component` of the graph as a DIMACS `.gr` stream.
pub fn write_dimacs_gr<W: Write>(graph: &Graph, component: usize, mut out: W) -> std::io::Result<()> {
    writeln!(out, "p sp {} {}", graph.node_count(), graph.arc_count())?;
    for arc in graph.arcs() {
        writeln!(
            out,
            "a {} {} {}",
            arc.tail + 1,
            arc.head + 1,
            arc.cost.get(component)
        )?;
    }
    Ok(())
}

/// Appends a trailing cost component equal to one on every arc.
pub fn synthesize_unit_component(graph: &Graph) -> Graph {
    let arc_list = graph
        .arcs()
        .iter()
        .map(|a| (a.tail, a.head, a.cost.with_component(1)))
        .collect();
    Graph::new(graph.node_count(), graph.dim() + 1, arc_list)
        .expect("adding a component keeps the graph valid")
}

/// Source-target pairs, 1-based on disk as in the DIMACS query convention.
pub fn read_pairs<R: BufRead>(input: R) -> Result<Vec<(NodeId, NodeId)>, FormatError> {
    let mut pairs = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| FormatError::new(line_no, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut fields = line.split_whitespace();
        if fields.next() != Some("q") {
            return Err(FormatError::new(line_no, "expected `q <s> <t>`"));
        }
        let s = parse_num(fields.next(), line_no)?;
        let t = parse_num(fields.next(), line_no)?;
        if s < 1 || t < 1 {
            return Err(FormatError::new(line_no, "pair ids are 1-based"));
        }
        pairs.push((s as NodeId - 1, t as NodeId - 1));
    }
    Ok(pairs)
}

pub fn write_pairs<W: Write>(pairs: &[(NodeId, NodeId)], mut out: W) -> std::io::Result<()> {
    for (s, t) in pairs {
        writeln!(out, "q {} {}", s + 1, t + 1)?;
    }
    Ok(())
}

/// One solver run: identification, run statistics and the frontier.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionRecord {
    pub instance: String,
    pub source: NodeId,
    pub target: NodeId,
    pub algo: String,
    pub queue: String,
    pub n_t: usize,
    pub inserted: u64,
    pub extracted: u64,
    pub time_ms: f64,
    /// Preprocessing time; written as a tenth CSV column when present.
    pub prep_ms: Option<f64>,
    /// Lex-sorted, mutually non-dominated frontier cost vectors.
    pub frontier: Vec<CostVector>,
    /// Node sequences for each frontier path, when recorded.
    pub paths: Option<Vec<Vec<NodeId>>>,
}

const CSV_HEADER: &str = "instance,s,t,algo,queue,n_t,inserted,extracted,time_ms";

/// CSV layout: the header row, one record row, one `f,<c1>,...,<cd>` line
/// per frontier vector and optionally one `p,<v1>,...` line per path.
pub fn write_solution<W: Write>(record: &SolutionRecord, mut out: W) -> std::io::Result<()> {
    match record.prep_ms {
        Some(prep) => {
            writeln!(out, "{CSV_HEADER},prep_ms")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                record.instance,
                record.source + 1,
                record.target + 1,
                record.algo,
                record.queue,
                record.n_t,
                record.inserted,
                record.extracted,
                record.time_ms,
                prep
            )?;
        }
        None => {
            writeln!(out, "{CSV_HEADER}")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                record.instance,
                record.source + 1,
                record.target + 1,
                record.algo,
                record.queue,
                record.n_t,
                record.inserted,
                record.extracted,
                record.time_ms
            )?;
        }
    }
    for cost in &record.frontier {
        write!(out, "f")?;
        for i in 0..cost.dim() {
            write!(out, ",{}", cost.get(i))?;
        }
        writeln!(out)?;
    }
    if let Some(paths) = &record.paths {
        for path in paths {
            write!(out, "p")?;
            for v in path {
                write!(out, ",{}", v + 1)?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn read_solution<R: BufRead>(input: R) -> Result<SolutionRecord, FormatError> {
    let mut lines = input.lines().enumerate();
    let header = loop {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| FormatError::new(0, "empty solution file"))?;
        let line = line.map_err(|e| FormatError::new(idx + 1, e.to_string()))?;
        if !line.trim().is_empty() {
            break line;
        }
    };
    let header = header.trim();
    let with_prep = match header {
        h if h == CSV_HEADER => false,
        h if h == format!("{CSV_HEADER},prep_ms") => true,
        _ => return Err(FormatError::new(1, "unrecognised solution CSV header")),
    };

    let (idx, row) = lines
        .next()
        .ok_or_else(|| FormatError::new(1, "missing record row"))?;
    let row = row.map_err(|e| FormatError::new(idx + 1, e.to_string()))?;
    let fields: Vec<&str> = row.trim().split(',').map(str::trim).collect();
    let expected = if with_prep { 10 } else { 9 };
    if fields.len() != expected {
        return Err(FormatError::new(idx + 1, "record row field count mismatch"));
    }
    let source: u64 = parse_csv(fields[1], idx + 1)?;
    let target: u64 = parse_csv(fields[2], idx + 1)?;
    if source < 1 || target < 1 {
        return Err(FormatError::new(idx + 1, "node ids are 1-based"));
    }
    let mut record = SolutionRecord {
        instance: fields[0].to_string(),
        source: source as NodeId - 1,
        target: target as NodeId - 1,
        algo: fields[3].to_string(),
        queue: fields[4].to_string(),
        n_t: parse_csv(fields[5], idx + 1)?,
        inserted: parse_csv(fields[6], idx + 1)?,
        extracted: parse_csv(fields[7], idx + 1)?,
        time_ms: parse_csv(fields[8], idx + 1)?,
        prep_ms: if with_prep {
            Some(parse_csv(fields[9], idx + 1)?)
        } else {
            None
        },
        frontier: Vec::new(),
        paths: None,
    };

    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(|e| FormatError::new(line_no, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match fields[0] {
            "f" => {
                let components: Vec<u64> = fields[1..]
                    .iter()
                    .map(|f| parse_csv(f, line_no))
                    .collect::<Result<_, _>>()?;
                if components.len() < 2 {
                    return Err(FormatError::new(line_no, "frontier vector needs >= 2 components"));
                }
                record.frontier.push(CostVector::new(&components));
            }
            "p" => {
                let nodes: Vec<NodeId> = fields[1..]
                    .iter()
                    .map(|f| parse_csv::<u64>(f, line_no).map(|v| v as NodeId - 1))
                    .collect::<Result<_, _>>()?;
                record.paths.get_or_insert_with(Vec::new).push(nodes);
            }
            other => {
                return Err(FormatError::new(line_no, format!("unknown row tag `{other}`")));
            }
        }
    }
    if record.frontier.len() != record.n_t {
        return Err(FormatError::new(0, "frontier line count differs from n_t"));
    }
    Ok(record)
}

fn parse_csv<T: std::str::FromStr>(field: &str, line: usize) -> Result<T, FormatError> {
    field
        .trim()
        .parse()
        .map_err(|_| FormatError::new(line, format!("cannot parse field `{field}`")))
}
