//! Independent oracles and instance generators shared by the integration tests.
//! Nothing here calls into the library's algorithms; only the graph accessors.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use itertools::Itertools;
use netcurv_core::random::{connected_gnp, gnp};
use netcurv_core::{Direction, EdgeSet, Graph, Rational64};
use rand::seq::SliceRandom;
use rand::Rng;

/// BFS distances from `s`; `None` for unreachable nodes.
pub fn bfs(g: &Graph, s: usize) -> Vec<Option<u64>> {
    let mut dist = vec![None; g.n()];
    dist[s] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        let dv = dist[v].unwrap();
        for &w in g.neighbors(v) {
            if dist[w].is_none() {
                dist[w] = Some(dv + 1);
                q.push_back(w);
            }
        }
    }
    dist
}

pub fn all_distances(g: &Graph) -> Vec<Vec<u64>> {
    (0..g.n()).map(|s| bfs(g, s).into_iter().map(|d| d.expect("connected")).collect()).collect()
}

/// Connectivity by union-find over the edge list.
pub fn connected_uf(n: usize, edges: &[(usize, usize)]) -> bool {
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut parent: Vec<usize> = (0..n).collect();
    let mut comps = n;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    comps <= 1
}

/// Triangles as Σ over edges of common neighbours, divided by three.
pub fn triangles_common_neighbours(g: &Graph) -> usize {
    let mut total = 0;
    for &(a, b) in g.edges() {
        let na: HashSet<usize> = g.neighbors(a).iter().copied().collect();
        total += g.neighbors(b).iter().filter(|c| na.contains(c)).count();
    }
    assert_eq!(total % 3, 0);
    total / 3
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    adj
}

/// Simple cycles with 3..=d nodes, each as its set of edge ids. Every cycle is
/// found from its smallest node in both directions and deduplicated by edge set.
pub fn cycles_as_edge_sets(g: &Graph, d: usize) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut id = vec![vec![usize::MAX; n]; n];
    for (i, &(a, b)) in g.edges().iter().enumerate() {
        id[a][b] = i;
        id[b][a] = i;
    }
    let mut found: HashSet<Vec<usize>> = HashSet::new();
    fn walk(
        g: &Graph,
        id: &[Vec<usize>],
        d: usize,
        start: usize,
        path: &mut Vec<usize>,
        found: &mut HashSet<Vec<usize>>,
    ) {
        let last = *path.last().unwrap();
        for &w in g.neighbors(last) {
            if w == start && path.len() >= 3 {
                let mut es: Vec<usize> = path.windows(2).map(|p| id[p[0]][p[1]]).collect();
                es.push(id[last][start]);
                es.sort_unstable();
                found.insert(es);
            } else if w > start && !path.contains(&w) && path.len() < d {
                path.push(w);
                walk(g, id, d, start, path, found);
                path.pop();
            }
        }
    }
    for s in 0..n {
        walk(g, &id, d, s, &mut vec![s], &mut found);
    }
    let mut out: Vec<Vec<usize>> = found.into_iter().collect();
    out.sort();
    out
}

pub fn curvature_oracle(g: &Graph, d: usize) -> i64 {
    g.n() as i64 - g.m() as i64 + cycles_as_edge_sets(g, d).len() as i64
}

/// Curvature after deleting `ids`, by counting the cycles that survive.
pub fn curvature_after(g: &Graph, cycles: &[Vec<usize>], ids: &[usize]) -> i64 {
    let del: HashSet<usize> = ids.iter().copied().collect();
    let alive = cycles.iter().filter(|c| c.iter().all(|e| !del.contains(e))).count();
    g.n() as i64 - (g.m() - ids.len()) as i64 + alive as i64
}

/// Four-point hyperbolicity by checking every quadruple.
pub fn four_point_oracle(g: &Graph) -> Rational64 {
    let d = all_distances(g);
    let mut best = 0u64;
    for q in (0..g.n()).combinations(4) {
        let (a, b, c, e) = (q[0], q[1], q[2], q[3]);
        let mut s = [d[a][b] + d[c][e], d[a][c] + d[b][e], d[a][e] + d[b][c]];
        s.sort_unstable();
        best = best.max(s[2] - s[1]);
    }
    Rational64::new(best as i64, 2)
}

/// Maximum of |E(S)| / |S| over all nonempty node subsets.
pub fn densest_oracle(g: &Graph) -> Rational64 {
    let n = g.n();
    assert!(n <= 16);
    let mut best = Rational64::from(0);
    for mask in 1u32..(1 << n) {
        let e = g.edges().iter().filter(|&&(a, b)| mask >> a & 1 == 1 && mask >> b & 1 == 1).count();
        let r = Rational64::new(e as i64, mask.count_ones() as i64);
        if r > best {
            best = r;
        }
    }
    best
}

/// Fewest edge deletions leaving no triangle.
pub fn opt_tdp(g: &Graph) -> usize {
    let tris: Vec<[usize; 3]> = {
        let adj = adjacency(g.n(), g.edges());
        let mut id = vec![vec![0; g.n()]; g.n()];
        for (i, &(a, b)) in g.edges().iter().enumerate() {
            id[a][b] = i;
            id[b][a] = i;
        }
        (0..g.n())
            .combinations(3)
            .filter(|t| adj[t[0]][t[1]] && adj[t[1]][t[2]] && adj[t[0]][t[2]])
            .map(|t| [id[t[0]][t[1]], id[t[1]][t[2]], id[t[0]][t[2]]])
            .collect()
    };
    for k in 0..=g.m() {
        for del in (0..g.m()).combinations(k) {
            if tris.iter().all(|t| t.iter().any(|e| del.contains(e))) {
                return k;
            }
        }
    }
    unreachable!("deleting every edge removes every triangle")
}

/// Size of a minimum node cover.
pub fn min_node_cover(g: &Graph) -> usize {
    for k in 0..=g.n() {
        for s in (0..g.n()).combinations(k) {
            if g.edges().iter().all(|(a, b)| s.contains(a) || s.contains(b)) {
                return k;
            }
        }
    }
    unreachable!("all nodes cover every edge")
}

/// Smallest subset of `tilde` (edge ids) reaching `gamma`; lexicographically first.
pub fn brute_eadp(g: &Graph, d: usize, tilde: &[usize], gamma: i64, dir: Direction) -> Option<Vec<usize>> {
    let cycles = cycles_as_edge_sets(g, d);
    for k in 0..=tilde.len() {
        for pos in (0..tilde.len()).combinations(k) {
            let ids: Vec<usize> = pos.iter().map(|&p| tilde[p]).collect();
            let c = curvature_after(g, &cycles, &ids);
            let ok = match dir {
                Direction::Increase => c >= gamma,
                Direction::Decrease => c <= gamma,
            };
            if ok {
                return Some(ids);
            }
        }
    }
    None
}

pub fn meets(value: i64, gamma: i64, dir: Direction) -> bool {
    match dir {
        Direction::Increase => value >= gamma,
        Direction::Decrease => value <= gamma,
    }
}

/// Random EADP instance on a connected graph with 4..=8 nodes. Ẽ is drawn from the
/// edges off a random spanning tree so that G ∖ Ẽ stays connected.
pub struct RandomEadp {
    pub graph: Graph,
    pub tilde: EdgeSet,
    pub tilde_ids: Vec<usize>,
    pub gamma: i64,
    pub direction: Direction,
    pub base: i64,
}

pub fn random_eadp<R: Rng>(rng: &mut R, d: usize, direction: Direction, max_tilde: usize) -> RandomEadp {
    loop {
        let n = rng.random_range(4..=8);
        let p = rng.random_range(0.35..0.8);
        let g = connected_gnp(n, p, rng).unwrap();
        let mut order: Vec<usize> = (0..g.m()).collect();
        order.shuffle(rng);
        // Random spanning tree by Kruskal over a shuffled edge order.
        let mut tree: Vec<(usize, usize)> = Vec::new();
        let mut off = Vec::new();
        for &e in &order {
            let mut trial = tree.clone();
            trial.push(g.edges()[e]);
            if count_components(n, &trial) < count_components(n, &tree) {
                tree = trial;
            } else {
                off.push(e);
            }
        }
        if off.is_empty() {
            continue;
        }
        let k = rng.random_range(1..=off.len().min(max_tilde));
        let mut tilde_ids: Vec<usize> = off[..k].to_vec();
        tilde_ids.sort_unstable();
        let cycles = cycles_as_edge_sets(&g, d);
        let base = curvature_oracle(&g, d);
        // Reachable curvature range over all subsets of Ẽ; γ runs one step past it.
        let reach: Vec<i64> = (0..=k)
            .flat_map(|j| tilde_ids.iter().copied().combinations(j))
            .map(|ids| curvature_after(&g, &cycles, &ids))
            .collect();
        let gamma = match direction {
            Direction::Increase => {
                let top = reach.iter().copied().max().unwrap().max(base);
                base + rng.random_range(1..=top - base + 1)
            }
            Direction::Decrease => {
                let bottom = reach.iter().copied().min().unwrap().min(base);
                base - rng.random_range(1..=base - bottom + 1)
            }
        };
        let tilde = g.edge_set_from_ids(tilde_ids.iter().copied());
        return RandomEadp { graph: g, tilde, tilde_ids, gamma, direction, base };
    }
}

fn count_components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut seen = vec![false; n];
    let adj = adjacency(n, edges);
    let mut comps = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        comps += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if adj[v][w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    comps
}

/// G(n, p) with n drawn from `sizes`, not necessarily connected.
pub fn random_graph<R: Rng>(rng: &mut R, sizes: std::ops::RangeInclusive<usize>, p: f64) -> Graph {
    let n = rng.random_range(sizes);
    gnp(n, p, rng).unwrap()
}

pub fn random_connected<R: Rng>(rng: &mut R, sizes: std::ops::RangeInclusive<usize>, p: f64) -> Graph {
    let n = rng.random_range(sizes);
    connected_gnp(n, p, rng).unwrap()
}

pub fn ids_to_set(g: &Graph, ids: &[usize]) -> EdgeSet {
    g.edge_set_from_ids(ids.iter().copied())
}

/// The dense fixture: edge `a b` with six common neighbours `x1..x6` joined by a
/// path, plus two pendant nodes.
pub fn dense_fixture() -> Graph {
    let mut text = String::from("a b\n");
    for i in 1..=6 {
        text.push_str(&format!("a x{i}\nb x{i}\n"));
    }
    for i in 1..6 {
        text.push_str(&format!("x{i} x{}\n", i + 1));
    }
    text.push_str("x1 p1\nx6 p2\n");
    netcurv_core::parse_edge_list(&text).unwrap()
}
