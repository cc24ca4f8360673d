//! Deterministic fixture graphs shared by the benchmarks.

use netcurv_core::eadp::{build_cut_network, CutNetwork};
use netcurv_core::random::{connected_gnp, rng};
use netcurv_core::{Direction, EadpInstance, Graph, Measure};

/// Cycle on `n` nodes.
pub fn cycle(n: usize) -> Graph {
    let labels = (0..n).map(|i| i.to_string()).collect();
    Graph::new(labels, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
}

/// `w × h` grid.
pub fn grid(w: usize, h: usize) -> Graph {
    let labels = (0..w * h).map(|i| format!("{}_{}", i / w, i % w)).collect();
    let mut edges = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let v = r * w + c;
            if c + 1 < w {
                edges.push((v, v + 1));
            }
            if r + 1 < h {
                edges.push((v, v + w));
            }
        }
    }
    Graph::new(labels, edges).expect("valid grid")
}

/// Connected G(n, p) with a fixed seed.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    connected_gnp(n, p, &mut rng(seed)).expect("valid parameters")
}

/// Cut network for an increase instance whose removable set is every edge off a
/// BFS spanning tree of `g`, capped at `limit` edges.
pub fn eadp_network(g: &Graph, d: usize, limit: usize) -> CutNetwork {
    let mut parent = vec![usize::MAX; g.n()];
    let mut seen = vec![false; g.n()];
    let mut queue = std::collections::VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    let off_tree = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| parent[a] != b && parent[b] != a)
        .map(|(i, _)| i)
        .take(limit);
    let tilde = g.edge_set_from_ids(off_tree);
    let base = netcurv_core::geometric_curvature(g, d).expect("small fixture");
    let inst = EadpInstance::new(g.clone(), tilde, base + 2, Direction::Increase, Measure::Geometric { d })
        .expect("valid instance");
    build_cut_network(&inst).expect("network builds")
}
