//! Acceptance suite. Each test covers one numbered criterion, pins its
//! tolerances in code and prints one PASS line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use std::sync::Arc as SharedArc;
use std::time::{Duration, Instant};

use pareto_route::generate::{generate_grid, generate_random};
use pareto_route::model::{dominates, CostVector, Instance, NodeId};
use pareto_route::oracle::{enumerate_frontier, node_pareto_sets, OracleMode};
use pareto_route::preprocess::{
    compute_dominance_bound, compute_heuristic, ideal_point, lex_dijkstra, preprocessing_orders,
    Direction,
};
use pareto_route::queue::QueueKind;
use pareto_route::run::{solve, Algo, BidiMode, HeuristicMode, SolveEvent, SolveOptions};
use pareto_route::testgraphs::{overtaking_example, random_instance};

fn cv(c: &[u64]) -> CostVector {
    CostVector::new(c)
}

fn checked_opts(queue: QueueKind) -> SolveOptions {
    SolveOptions {
        queue,
        check_invariants: true,
        ..SolveOptions::default()
    }
}

fn assert_no_duplicates(frontier: &[CostVector], context: &str) {
    for pair in frontier.windows(2) {
        assert_ne!(pair[0], pair[1], "duplicate frontier vector in {context}");
    }
}

/// Every solver/queue/flag combination applicable to the instance.
fn all_configurations(dim: usize) -> Vec<(Algo, SolveOptions, String)> {
    let mut configs = Vec::new();
    for queue in [QueueKind::Heap, QueueKind::Bucket] {
        for heuristic in [HeuristicMode::Computed, HeuristicMode::Zero] {
            let opts = SolveOptions {
                queue,
                heuristic,
                check_invariants: true,
                ..SolveOptions::default()
            };
            configs.push((Algo::Tmda, opts, format!("tmda/{queue:?}/{heuristic:?}")));
        }
        if dim == 2 {
            for shortcuts in [true, false] {
                let opts = SolveOptions {
                    queue,
                    shortcuts,
                    check_invariants: true,
                    ..SolveOptions::default()
                };
                configs.push((Algo::Tbda, opts, format!("tbda/{queue:?}/shortcuts={shortcuts}")));
            }
            for bidi_mode in [BidiMode::Interleaved, BidiMode::Parallel] {
                let opts = SolveOptions {
                    queue,
                    bidi_mode,
                    check_invariants: true,
                    ..SolveOptions::default()
                };
                configs.push((Algo::Btbda, opts, format!("btbda/{queue:?}/{bidi_mode:?}")));
            }
        }
    }
    configs
}

#[test]
fn criterion_01_reference_example_end_to_end() {
    let started = Instant::now();
    let inst = overtaking_example();
    let expected = vec![cv(&[1, 10]), cv(&[3, 4]), cv(&[4, 3])];

    for queue in [QueueKind::Heap, QueueKind::Bucket] {
        let solution = solve(&inst, Algo::Tmda, &checked_opts(queue)).unwrap();
        assert_eq!(solution.frontier, expected, "tmda {queue:?}");
        for shortcuts in [true, false] {
            let opts = SolveOptions {
                queue,
                shortcuts,
                check_invariants: true,
                ..SolveOptions::default()
            };
            let solution = solve(&inst, Algo::Tbda, &opts).unwrap();
            assert_eq!(solution.frontier, expected, "tbda {queue:?} shortcuts={shortcuts}");
        }
        for bidi_mode in [BidiMode::Interleaved, BidiMode::Parallel] {
            let opts = SolveOptions {
                queue,
                bidi_mode,
                check_invariants: true,
                ..SolveOptions::default()
            };
            let solution = solve(&inst, Algo::Btbda, &opts).unwrap();
            assert_eq!(solution.frontier, expected, "btbda {queue:?} {bidi_mode:?}");
        }
    }

    // Shortcuts on, heap queue: the run trace must show the (3,5)
    // shortcut entering the frontier and being replaced by (3,4).
    let opts = SolveOptions {
        queue: QueueKind::Heap,
        shortcuts: true,
        record_events: true,
        check_invariants: true,
        ..SolveOptions::default()
    };
    let solution = solve(&inst, Algo::Tbda, &opts).unwrap();
    let mut added_at: Option<usize> = None;
    let mut replaced_at: Option<usize> = None;
    for (i, event) in solution.stats.events.iter().enumerate() {
        match event {
            SolveEvent::FrontierAdd { cost, shortcut: true } if cost == &cv(&[3, 5]) => {
                added_at.get_or_insert(i);
            }
            SolveEvent::FrontierReplace { old, new }
                if old == &cv(&[3, 5]) && new == &cv(&[3, 4]) =>
            {
                replaced_at.get_or_insert(i);
            }
            _ => {}
        }
    }
    let (a, r) = (
        added_at.expect("the (3,5) shortcut must enter the frontier"),
        replaced_at.expect("the (3,5) entry must be replaced by (3,4)"),
    );
    assert!(a < r, "addition must precede replacement");

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "criterion 1 budget is 1 s");
    println!("criterion 01 PASS: reference-example frontier and shortcut-replacement trace ({elapsed:?})");
}

#[test]
fn criterion_02_preprocessing_unit_values() {
    // Ideal point of the three lexicographic tree costs: the componentwise
    // minimum. Each order's tree realises the true minimum of its first
    // component, so admissibility forces exactly these values.
    let ideal = ideal_point(&[&cv(&[4, 7, 3]), &cv(&[8, 2, 4]), &cv(&[5, 3, 2])]);
    assert_eq!(ideal, cv(&[4, 2, 2]));

    let inst = overtaking_example();
    let orders = preprocessing_orders(2);
    let trees: Vec<_> = orders
        .into_iter()
        .map(|o| lex_dijkstra(&inst.graph, inst.target, Direction::Reverse, o))
        .collect();
    let pi = compute_heuristic(&trees, 4);
    assert_eq!(pi[1].as_ref().unwrap(), &cv(&[2, 2])); // v
    assert_eq!(pi[2].as_ref().unwrap(), &cv(&[1, 2])); // w
    let nadir = pareto_route::preprocess::compute_nadir_2d(&trees[0], &trees[1], 4);
    assert_eq!(nadir[1].as_ref().unwrap(), &cv(&[3, 4])); // beta_v
    println!("criterion 02 PASS: preprocessing unit values match exactly");
}

#[test]
fn criterion_03_heuristic_laws() {
    let started = Instant::now();
    let mut feasible = 0usize;
    for seed in 0..500u64 {
        let inst = random_instance(seed, 200, &[2, 3], 10);
        let graph = &*inst.graph;
        let orders = preprocessing_orders(graph.dim());
        let trees: Vec<_> = orders
            .into_iter()
            .map(|o| lex_dijkstra(graph, inst.target, Direction::Reverse, o))
            .collect();
        let pi = compute_heuristic(&trees, graph.node_count());

        // Monotonicity on every arc with reachable head, which is exactly
        // non-negativity of all reduced arc costs.
        for arc in graph.arcs() {
            if let Some(pi_head) = &pi[arc.head as usize] {
                let via = arc.cost.add(pi_head);
                let pi_tail = pi[arc.tail as usize]
                    .as_ref()
                    .expect("tail of an arc into a reachable node is reachable");
                assert!(
                    pareto_route::model::dominates_or_equal(pi_tail, &via),
                    "monotonicity violated on seed {seed}"
                );
            }
        }
        // The potential never exceeds any single tree cost.
        for tree in &trees {
            for v in 0..graph.node_count() as NodeId {
                if let (Some(p), Some(c)) = (&pi[v as usize], tree.cost(v)) {
                    assert!(pareto_route::model::dominates_or_equal(p, c));
                }
            }
        }

        // The dominance bound must not strictly dominate any efficient
        // cost vector.
        if let Ok(beta_t) = compute_dominance_bound(&trees, inst.source, 1) {
            feasible += 1;
            let frontier = enumerate_frontier(&inst, OracleMode::LabelCorrecting).unwrap();
            for vector in &frontier {
                assert!(
                    !dominates(&beta_t, vector),
                    "dominance bound dominates an efficient vector on seed {seed}"
                );
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "criterion 3 budget is 60 s");
    println!(
        "criterion 03 PASS: heuristic laws on 500 instances ({feasible} feasible) in {elapsed:?}"
    );
}

#[test]
fn criterion_04_oracle_equivalence() {
    let started = Instant::now();
    let mut runs = 0usize;
    for seed in 0..1000u64 {
        let inst = random_instance(seed, 40, &[2, 3], 10);
        let oracle = enumerate_frontier(&inst, OracleMode::LabelCorrecting).unwrap();
        for (algo, opts, tag) in all_configurations(inst.dim()) {
            let solution = solve(&inst, algo, &opts).unwrap();
            assert_eq!(solution.frontier, oracle, "seed {seed} config {tag}");
            assert_no_duplicates(&solution.frontier, &format!("seed {seed} config {tag}"));
            runs += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(300), "criterion 4 budget is 5 min");
    println!("criterion 04 PASS: {runs} solver runs equal the oracle in {elapsed:?}");
}

#[test]
fn criterion_05_lex_order_invariants() {
    // check_invariants additionally asserts the waiting-list ordering
    // after every mutation inside the solver.
    for seed in 0..200u64 {
        let inst = random_instance(seed, 60, &[2, 3], 10);
        let opts = SolveOptions {
            queue: QueueKind::Heap,
            record_events: true,
            check_invariants: true,
            ..SolveOptions::default()
        };
        let solution = solve(&inst, Algo::Tmda, &opts).unwrap();
        let mut last: Option<&CostVector> = None;
        for event in &solution.stats.events {
            if let SolveEvent::Extract { key, .. } = event {
                if let Some(prev) = last {
                    assert!(
                        pareto_route::model::lex_cmp(prev, key) != std::cmp::Ordering::Greater,
                        "extraction keys regressed on seed {seed}"
                    );
                }
                last = Some(key);
            }
        }
    }
    println!("criterion 05 PASS: heap-mode extraction order and waiting-list order hold");
}

#[test]
fn criterion_06_permanent_labels_efficient() {
    for seed in 0..100u64 {
        let inst = random_instance(seed, 30, &[2, 3], 10);
        let solution = solve(&inst, Algo::Tmda, &checked_opts(QueueKind::Heap)).unwrap();
        let sets = node_pareto_sets(&inst).unwrap();
        for (v, list) in solution.permanent.iter().enumerate() {
            for cost in list {
                assert!(
                    sets[v].contains(cost),
                    "permanent label at node {v} not efficient on seed {seed}"
                );
            }
        }
    }
    println!("criterion 06 PASS: every permanent label is efficient at its node");
}

#[test]
fn criterion_07_bidirectional_equivalence() {
    for seed in 0..200u64 {
        let inst = random_instance(seed, 40, &[2], 10);
        let reference = solve(&inst, Algo::Tbda, &checked_opts(QueueKind::Heap)).unwrap();
        for queue in [QueueKind::Heap, QueueKind::Bucket] {
            for bidi_mode in [BidiMode::Interleaved, BidiMode::Parallel] {
                for share_bounds in [true, false] {
                    let opts = SolveOptions {
                        queue,
                        bidi_mode,
                        share_bounds,
                        share_heuristics: share_bounds,
                        check_invariants: true,
                        ..SolveOptions::default()
                    };
                    let solution = solve(&inst, Algo::Btbda, &opts).unwrap();
                    assert_eq!(
                        solution.frontier, reference.frontier,
                        "seed {seed} {queue:?} {bidi_mode:?} share={share_bounds}"
                    );
                }
            }
        }
    }
    println!("criterion 07 PASS: bidirectional union equals the unidirectional frontier");
}

#[test]
fn criterion_08_goal_direction_effect() {
    let mut computed_insertions = Vec::with_capacity(100);
    let mut zero_insertions = Vec::with_capacity(100);
    for seed in 0..100u64 {
        let (graph, s, t) = generate_grid(100, 100, seed, 10).unwrap();
        let inst = Instance::new(SharedArc::new(graph), s, t).unwrap();
        for (mode, bucket) in [
            (HeuristicMode::Computed, &mut computed_insertions),
            (HeuristicMode::Zero, &mut zero_insertions),
        ] {
            let opts = SolveOptions {
                queue: QueueKind::Heap,
                heuristic: mode,
                ..SolveOptions::default()
            };
            let started = Instant::now();
            let solution = solve(&inst, Algo::Tmda, &opts).unwrap();
            let elapsed = started.elapsed();
            assert!(
                elapsed < Duration::from_secs(10),
                "seed {seed} {mode:?} exceeded the 10 s per-instance budget"
            );
            bucket.push(solution.stats.insertions);
        }
    }
    let median = |values: &mut Vec<u64>| {
        values.sort_unstable();
        values[values.len() / 2]
    };
    let computed = median(&mut computed_insertions);
    let zero = median(&mut zero_insertions);
    assert!(
        computed <= zero,
        "goal direction must not increase median insertions ({computed} vs {zero})"
    );
    println!(
        "criterion 08 PASS: median insertions {computed} (guided) <= {zero} (unguided) on 100 grids"
    );
}

#[test]
fn criterion_09_queue_mode_differential() {
    // Same instance family as criterion 4. The bucket queue asserts
    // internally that its minimum pointer never regresses.
    for seed in 0..1000u64 {
        let inst = random_instance(seed, 40, &[2, 3], 10);
        let heap = solve(&inst, Algo::Tmda, &checked_opts(QueueKind::Heap)).unwrap();
        let bucket = solve(&inst, Algo::Tmda, &checked_opts(QueueKind::Bucket)).unwrap();
        assert_eq!(heap.frontier, bucket.frontier, "tmda seed {seed}");
        if inst.dim() == 2 {
            let heap2 = solve(&inst, Algo::Tbda, &checked_opts(QueueKind::Heap)).unwrap();
            let bucket2 = solve(&inst, Algo::Tbda, &checked_opts(QueueKind::Bucket)).unwrap();
            assert_eq!(heap2.frontier, bucket2.frontier, "tbda seed {seed}");
        }
    }
    println!("criterion 09 PASS: heap and bucket frontiers identical, pointer monotone");
}

#[test]
fn criterion_10_io_round_trips() {
    use pareto_route::io::{parse_dimacs_gr, read_solution, write_dimacs_gr, write_solution, SolutionRecord};
    use pareto_route::oracle::pareto_min;
    use rand::{Rng, SeedableRng};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xd1ce);
    let mut cases = 0usize;

    // Fuzzed graph write/parse consistency.
    for seed in 0..500u64 {
        let n = rng.gen_range(2..40usize);
        let m = rng.gen_range(0..(n * (n - 1)).min(120));
        let d = rng.gen_range(2..=4usize);
        let max_cost = rng.gen_range(1..=1000u64);
        let graph = generate_random(n, m.max(1), d, max_cost, seed).unwrap();
        let mut streams = Vec::new();
        for component in 0..d {
            let mut buf = Vec::new();
            write_dimacs_gr(&graph, component, &mut buf).unwrap();
            streams.push(buf);
        }
        let parsed =
            parse_dimacs_gr(streams.iter().map(|s| std::io::BufReader::new(&s[..])).collect())
                .unwrap();
        assert_eq!(parsed.node_count(), graph.node_count());
        assert_eq!(parsed.arc_count(), graph.arc_count());
        let key = |g: &pareto_route::model::Graph| {
            let mut v: Vec<_> = g
                .arcs()
                .iter()
                .map(|a| (a.tail, a.head, a.cost.components().to_vec()))
                .collect();
            v.sort();
            v
        };
        assert_eq!(key(&parsed), key(&graph), "graph round trip seed {seed}");
        cases += 1;
    }

    // Fuzzed solution record round trip.
    for seed in 0..500u64 {
        let d = rng.gen_range(2..=4usize);
        let raw: Vec<CostVector> = (0..rng.gen_range(0..20usize))
            .map(|_| {
                CostVector::new(&(0..d).map(|_| rng.gen_range(0..500u64)).collect::<Vec<_>>())
            })
            .collect();
        let frontier = pareto_min(raw);
        let paths = if !frontier.is_empty() && rng.gen_bool(0.5) {
            Some(
                frontier
                    .iter()
                    .map(|_| {
                        (0..rng.gen_range(1..6usize))
                            .map(|_| rng.gen_range(0..99u32) as NodeId)
                            .collect()
                    })
                    .collect(),
            )
        } else {
            None
        };
        let record = SolutionRecord {
            instance: format!("inst-{seed}"),
            source: rng.gen_range(0..1000),
            target: rng.gen_range(0..1000),
            algo: ["tmda", "mda", "tbda", "btbda"][rng.gen_range(0..4)].to_string(),
            queue: ["heap", "bucket"][rng.gen_range(0..2)].to_string(),
            n_t: frontier.len(),
            inserted: rng.gen(),
            extracted: rng.gen(),
            time_ms: rng.gen_range(0..10_000_000u64) as f64 / 128.0,
            prep_ms: rng
                .gen_bool(0.5)
                .then(|| rng.gen_range(0..1_000_000u64) as f64 / 64.0),
            frontier,
            paths,
        };
        let mut buf = Vec::new();
        write_solution(&record, &mut buf).unwrap();
        let back = read_solution(std::io::BufReader::new(&buf[..])).unwrap();
        assert_eq!(back, record, "solution round trip seed {seed}");
        cases += 1;
    }

    assert_eq!(cases, 1000);
    println!("criterion 10 PASS: {cases} fuzzed round-trip cases");
}
