//! Small fixed instances shared by unit, integration and CLI tests.

use std::sync::Arc as SharedArc;

use crate::generate::generate_random;
use crate::model::{CostVector, Graph, Instance, NodeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Four-node biobjective instance with frontier {(1,10),(3,4),(4,3)}.
/// Node ids: s=0, v=1, w=2, t=3.
pub fn overtaking_example() -> Instance {
    let cv = |a, b| CostVector::new(&[a, b]);
    let graph = Graph::new(
        4,
        2,
        vec![
            (0, 1, cv(1, 1)),
            (0, 3, cv(1, 10)),
            (0, 2, cv(2, 2)),
            (1, 3, cv(2, 4)),
            (2, 3, cv(1, 2)),
            (1, 2, cv(2, 0)),
        ],
    )
    .unwrap();
    Instance::new(SharedArc::new(graph), 0, 3).unwrap()
}

/// Random instance for differential tests: node count in `2..=max_nodes`,
/// arc count between one and roughly six per node, dimension drawn from
/// `dims`, costs in `1..=max_cost`. Endpoints are random and distinct;
/// the instance may well be infeasible, which the solvers must handle.
pub fn random_instance(seed: u64, max_nodes: usize, dims: &[usize], max_cost: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(17));
    let n = rng.gen_range(2..=max_nodes.max(2));
    let max_arcs = (n * (n - 1)).min(6 * n).max(1);
    let m = rng.gen_range(1..=max_arcs);
    let dim = dims[rng.gen_range(0..dims.len())];
    let graph = generate_random(n, m, dim, max_cost, seed).unwrap();
    let s = rng.gen_range(0..n as NodeId);
    let mut t = rng.gen_range(0..n as NodeId);
    if t == s {
        t = (t + 1) % n as NodeId;
    }
    Instance::new(SharedArc::new(graph), s, t).unwrap()
}
