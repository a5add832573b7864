//! Deterministic instance generators for the benchmark families: grid
//! graphs with super source/target, NetMaker-style synthetic graphs and
//! small uniform random digraphs for oracle-checked tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

use crate::model::{CostVector, Graph, NodeId};
use crate::GenerateError;

/// Grid of `width` columns and `height` rows, every cell connected to its
/// four neighbours in both directions, a super source feeding the leftmost
/// column and the rightmost column feeding a super target. Biobjective,
/// each cost component uniform in `[1, max_cost]`.
///
/// Returns the graph with its designated source and target.
pub fn generate_grid(
    width: usize,
    height: usize,
    seed: u64,
    max_cost: u64,
) -> Result<(Graph, NodeId, NodeId), GenerateError> {
    if width == 0 || height == 0 || max_cost == 0 {
        return Err(GenerateError::InvalidParams(
            "grid needs width, height and max cost >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = width * height;
    let source = cells as NodeId;
    let target = cells as NodeId + 1;
    let cell = |col: usize, row: usize| (col * height + row) as NodeId;

    let mut arcs: Vec<(NodeId, NodeId)> = Vec::new();
    for col in 0..width {
        for row in 0..height {
            if col > 0 {
                arcs.push((cell(col, row), cell(col - 1, row)));
            }
            if col + 1 < width {
                arcs.push((cell(col, row), cell(col + 1, row)));
            }
            if row > 0 {
                arcs.push((cell(col, row), cell(col, row - 1)));
            }
            if row + 1 < height {
                arcs.push((cell(col, row), cell(col, row + 1)));
            }
        }
    }
    for row in 0..height {
        arcs.push((source, cell(0, row)));
    }
    for row in 0..height {
        arcs.push((cell(width - 1, row), target));
    }

    let arc_list = arcs
        .into_iter()
        .map(|(t, h)| {
            let cost = CostVector::new(&[
                rng.gen_range(1..=max_cost),
                rng.gen_range(1..=max_cost),
            ]);
            (t, h, cost)
        })
        .collect();
    let graph = Graph::new(cells + 2, 2, arc_list)?;
    Ok((graph, source, target))
}

const NETMAKER_BANDS: [(u64, u64); 3] = [(1, 333), (334, 666), (667, 1000)];

/// NetMaker-style synthetic graph: a Hamiltonian cycle over a random node
/// permutation plus `extra_arcs` random non-duplicate arcs. Costs are three
/// dimensional; per arc, each of the bands [1,333], [334,666] and
/// [667,1000] is assigned to exactly one component.
pub fn generate_netmaker(
    node_count: usize,
    extra_arcs: usize,
    seed: u64,
) -> Result<Graph, GenerateError> {
    if node_count < 2 {
        return Err(GenerateError::InvalidParams("netmaker needs >= 2 nodes".into()));
    }
    let capacity = node_count * (node_count - 1) - node_count;
    if extra_arcs > capacity {
        return Err(GenerateError::InvalidParams(format!(
            "at most {capacity} extra arcs fit beside the cycle"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<NodeId> = (0..node_count as NodeId).collect();
    perm.shuffle(&mut rng);

    let mut used: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut arcs: Vec<(NodeId, NodeId)> = Vec::with_capacity(node_count + extra_arcs);
    for i in 0..node_count {
        let pair = (perm[i], perm[(i + 1) % node_count]);
        used.insert(pair);
        arcs.push(pair);
    }
    while arcs.len() < node_count + extra_arcs {
        let tail = rng.gen_range(0..node_count as NodeId);
        let head = rng.gen_range(0..node_count as NodeId);
        if tail == head || !used.insert((tail, head)) {
            continue;
        }
        arcs.push((tail, head));
    }

    let arc_list = arcs
        .into_iter()
        .map(|(t, h)| {
            let mut bands = NETMAKER_BANDS;
            bands.shuffle(&mut rng);
            let cost = CostVector::new(&[
                rng.gen_range(bands[0].0..=bands[0].1),
                rng.gen_range(bands[1].0..=bands[1].1),
                rng.gen_range(bands[2].0..=bands[2].1),
            ]);
            (t, h, cost)
        })
        .collect();
    Ok(Graph::new(node_count, 3, arc_list)?)
}

/// Uniform random digraph: `arc_count` distinct ordered pairs with costs
/// uniform in `[1, max_cost]` per component. Suits oracle-checked tests.
pub fn generate_random(
    node_count: usize,
    arc_count: usize,
    dim: usize,
    max_cost: u64,
    seed: u64,
) -> Result<Graph, GenerateError> {
    if node_count < 2 || !(2..=8).contains(&dim) || max_cost == 0 {
        return Err(GenerateError::InvalidParams(
            "random graph needs >= 2 nodes, 2 <= d <= 8, max cost >= 1".into(),
        ));
    }
    let capacity = node_count * (node_count - 1);
    if arc_count > capacity {
        return Err(GenerateError::InvalidParams(format!(
            "at most {capacity} distinct arcs fit"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut arc_list = Vec::with_capacity(arc_count);
    while arc_list.len() < arc_count {
        let tail = rng.gen_range(0..node_count as NodeId);
        let head = rng.gen_range(0..node_count as NodeId);
        if tail == head || !used.insert((tail, head)) {
            continue;
        }
        let cost: Vec<u64> = (0..dim).map(|_| rng.gen_range(1..=max_cost)).collect();
        arc_list.push((tail, head, CostVector::new(&cost)));
    }
    Ok(Graph::new(node_count, dim, arc_list)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_dimacs_gr;

    #[test]
    fn tiny_grids_match_construction_counts() {
        let (g, s, t) = generate_grid(1, 1, 0, 10).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.arc_count(), 2);
        assert_ne!(s, t);

        let (g, _, _) = generate_grid(2, 1, 0, 10).unwrap();
        // two grid arcs (both directions) + source arc + target arc
        assert_eq!(g.arc_count(), 4);
        let grid_arcs = g
            .arcs()
            .iter()
            .filter(|a| (a.tail as usize) < 2 && (a.head as usize) < 2)
            .count();
        assert_eq!(grid_arcs, 2);
    }

    #[test]
    fn grid_node_count_formula() {
        let (g, _, _) = generate_grid(300, 300, 1, 10).unwrap();
        assert_eq!(g.node_count(), 90_002);
    }

    #[test]
    fn generators_deterministic_per_seed() {
        for seed in [0, 7] {
            let (a, _, _) = generate_grid(5, 4, seed, 10).unwrap();
            let (b, _, _) = generate_grid(5, 4, seed, 10).unwrap();
            let dump = |g: &Graph| {
                let mut buf = Vec::new();
                write_dimacs_gr(g, 0, &mut buf).unwrap();
                write_dimacs_gr(g, 1, &mut buf).unwrap();
                buf
            };
            assert_eq!(dump(&a), dump(&b));

            let x = generate_netmaker(20, 15, seed).unwrap();
            let y = generate_netmaker(20, 15, seed).unwrap();
            assert_eq!(
                x.arcs().iter().map(|a| (a.tail, a.head)).collect::<Vec<_>>(),
                y.arcs().iter().map(|a| (a.tail, a.head)).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn netmaker_shape() {
        let g = generate_netmaker(3, 0, 42).unwrap();
        assert_eq!(g.arc_count(), 3);
        // Every node on the cycle exactly once in each direction.
        for v in 0..3 {
            assert_eq!(g.outgoing(v).len(), 1);
            assert_eq!(g.incoming(v).len(), 1);
        }
        // One component per band on every arc.
        let g = generate_netmaker(30, 40, 7).unwrap();
        for arc in g.arcs() {
            let mut hit = [false; 3];
            for i in 0..3 {
                let c = arc.cost.get(i);
                for (b, &(lo, hi)) in NETMAKER_BANDS.iter().enumerate() {
                    if (lo..=hi).contains(&c) {
                        assert!(!hit[b], "two components in one band");
                        hit[b] = true;
                    }
                }
            }
            assert!(hit.iter().all(|&h| h));
        }
    }

    #[test]
    fn netmaker_rejects_overfull() {
        assert!(generate_netmaker(3, 4, 0).is_err());
        assert!(generate_netmaker(3, 3, 0).is_ok());
    }

    #[test]
    fn random_graph_shape() {
        let g = generate_random(10, 25, 3, 10, 5).unwrap();
        assert_eq!(g.arc_count(), 25);
        assert_eq!(g.dim(), 3);
        let mut seen = HashSet::new();
        for arc in g.arcs() {
            assert_ne!(arc.tail, arc.head);
            assert!(seen.insert((arc.tail, arc.head)));
        }
    }
}
