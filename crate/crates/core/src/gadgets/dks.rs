//! Dense-k-subgraph on degree-3 graphs to geometric EADP, and the cycle-and-path
//! blow-up that produces such graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use super::{counts, params, Builder, Discrepancy, GadgetInstance, GadgetOutput};
use crate::cycles::geometric_curvature;
use crate::eadp::{Direction, EadpInstance};
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, Graph};
use crate::measure::Measure;

/// Search nodes examined before the association search gives up.
pub const DEFAULT_ASSOCIATION_BUDGET: usize = 500_000;

/// Triangles glued along shared edges, one triangle per input node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Association {
    pub vertices: usize,
    /// Corner vertices of the triangle of each input node.
    pub triangles: Vec<[usize; 3]>,
    /// Shared edge of each input edge, by input edge id.
    pub shared: Vec<(usize, usize)>,
    /// All edges of the triangle complex, sorted.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    Shared(usize),
    Private(usize),
}

/// Triangle sides are indexed `(i, r)`: side `r` of node `i` joins corners `r` and
/// `r + 1 mod 3` and is shared with the `r`-th neighbour when there is one.
struct Search<'g> {
    g: &'g Graph,
    order: Vec<usize>,
    budget: usize,
    visited: usize,
}

fn find(parent: &[usize], mut x: usize) -> usize {
    while parent[x] != x {
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (a, b) = (find(parent, a), find(parent, b));
    if a != b {
        parent[a.max(b)] = a.min(b);
    }
}

impl Search<'_> {
    fn side(&self, i: usize, r: usize) -> (usize, usize, Side) {
        let label = match self.g.neighbors(i).get(r) {
            Some(&j) => Side::Shared(self.g.edge_id(i, j).unwrap()),
            None => Side::Private(i),
        };
        (3 * i + r, 3 * i + (r + 1) % 3, label)
    }

    fn position(&self, i: usize, j: usize) -> usize {
        self.g.neighbors(i).iter().position(|&x| x == j).unwrap()
    }

    /// Exact on a complete gluing. On partial gluings the first two tests can only
    /// get worse as classes merge; the triangle test may also reject a few states
    /// that later merges would repair, which costs completeness, not validity.
    fn consistent(&self, parent: &[usize]) -> bool {
        let n = self.g.n();
        let mut tris = HashSet::with_capacity(n);
        for i in 0..n {
            let mut c = [find(parent, 3 * i), find(parent, 3 * i + 1), find(parent, 3 * i + 2)];
            if c[0] == c[1] || c[1] == c[2] || c[0] == c[2] {
                return false;
            }
            c.sort_unstable();
            tris.insert(c);
        }
        let mut pairs: HashMap<(usize, usize), Side> = HashMap::new();
        for i in 0..n {
            for r in 0..3 {
                let (a, b, label) = self.side(i, r);
                let (a, b) = (find(parent, a), find(parent, b));
                let k = (a.min(b), a.max(b));
                match pairs.get(&k) {
                    Some(&l) if l != label => return false,
                    Some(_) => {}
                    None => {
                        pairs.insert(k, label);
                    }
                }
            }
        }
        let mut adj: HashMap<usize, BTreeSet<usize>> = HashMap::new();
        for &(a, b) in pairs.keys() {
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }
        for &(x, y) in pairs.keys() {
            for &z in adj[&x].intersection(&adj[&y]) {
                if z > y && !tris.contains(&[x, y, z]) {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, idx: usize, parent: &[usize]) -> Result<Option<Vec<usize>>> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::InvalidInstance(format!(
                "association condition violated: no node-triangle association found within {} search steps",
                self.budget
            )));
        }
        if !self.consistent(parent) {
            return Ok(None);
        }
        if idx == self.order.len() {
            return Ok(Some(parent.to_vec()));
        }
        let (i, j) = self.g.edges()[self.order[idx]];
        let (a, b, _) = self.side(i, self.position(i, j));
        let (c, d, _) = self.side(j, self.position(j, i));
        for twisted in [true, false] {
            let mut p = parent.to_vec();
            if twisted {
                union(&mut p, a, c);
                union(&mut p, b, d);
            } else {
                union(&mut p, a, d);
                union(&mut p, b, c);
            }
            if let Some(found) = self.run(idx + 1, &p)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }
}

/// Edges in breadth-first order so that short cycles close early.
fn closing_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut rank = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if rank[s] != usize::MAX {
            continue;
        }
        rank[s] = next;
        next += 1;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in g.neighbors(v) {
                if rank[w] == usize::MAX {
                    rank[w] = next;
                    next += 1;
                    q.push_back(w);
                }
            }
        }
    }
    let mut ids: Vec<usize> = (0..g.m()).collect();
    ids.sort_by_key(|&e| {
        let (a, b) = g.edges()[e];
        (rank[a].max(rank[b]), rank[a].min(rank[b]))
    });
    ids
}

/// Finds triangles for the nodes of `g` such that adjacent nodes share exactly one
/// edge, distinct nodes have distinct triangles, and no other triangle arises.
/// Every node must have degree 2 or 3.
pub fn associate(g: &Graph, budget: usize) -> Result<Association> {
    if let Some(v) = (0..g.n()).find(|&v| !(2..=3).contains(&g.degree(v))) {
        return Err(Error::InvalidInstance(format!(
            "association condition violated: node {} has degree {}",
            g.label(v),
            g.degree(v)
        )));
    }
    let mut search = Search { g, order: closing_order(g), budget, visited: 0 };
    let start: Vec<usize> = (0..3 * g.n()).collect();
    let parent = search.run(0, &start)?.ok_or_else(|| {
        Error::InvalidInstance("association condition violated: no node-triangle association found".into())
    })?;
    let mut id = HashMap::new();
    let mut vertex = vec![0; 3 * g.n()];
    for (c, slot) in vertex.iter_mut().enumerate() {
        let r = find(&parent, c);
        let next = id.len();
        *slot = *id.entry(r).or_insert(next);
    }
    let triangles = (0..g.n()).map(|i| [vertex[3 * i], vertex[3 * i + 1], vertex[3 * i + 2]]).collect();
    let mut edges = BTreeSet::new();
    let mut shared = vec![(0, 0); g.m()];
    for i in 0..g.n() {
        for r in 0..3 {
            let (a, b, label) = search.side(i, r);
            let (a, b) = (vertex[a].min(vertex[b]), vertex[a].max(vertex[b]));
            edges.insert((a, b));
            if let Side::Shared(e) = label {
                shared[e] = (a, b);
            }
        }
    }
    Ok(Association { vertices: id.len(), triangles, shared, edges: edges.into_iter().collect() })
}

/// Splits every edge into a path of `mu` edges; returns the graph and, per original
/// edge (in the order given), its first sub-edge.
fn split_edges(edges: &[(String, String)], mu: usize) -> (Builder, Vec<(String, String)>) {
    let mut b = Builder::default();
    let mut first = Vec::with_capacity(edges.len());
    for (e, (a, c)) in edges.iter().enumerate() {
        let mut path = vec![a.clone()];
        path.extend((1..mu).map(|k| format!("s{}_{k}", e + 1)));
        path.push(c.clone());
        for w in path.windows(2) {
            b.edge(&w[0], &w[1]);
        }
        first.push((path[0].clone(), path[1].clone()));
    }
    (b, first)
}

/// Dense-k-subgraph on a graph with all degrees 2 or 3 to geometric EADP with
/// `d = 3·mu`.
///
/// Each input node gets a node triangle on vertices `v{c}`; adjacent nodes share one
/// edge, and the shared edges form Ẽ. Every triangle vertex hangs off `w0` by a
/// path `w0, w{j}_1, w{j}_2, w{j}_3, v{j}`. For `mu > 1` every edge becomes a
/// path of `mu` edges and Ẽ takes the first piece of each shared edge.
/// γ = 𝔠(G) + t − k, so `t > k` is required.
pub fn gen_dks_eadp(g: &Graph, k: usize, t: usize, mu: usize) -> Result<GadgetOutput> {
    if mu == 0 {
        return Err(Error::InvalidParameter("mu must be positive".into()));
    }
    if t <= k {
        return Err(Error::InvalidParameter(format!("need t > k for an increase target, got k = {k}, t = {t}")));
    }
    let assoc = associate(g, DEFAULT_ASSOCIATION_BUDGET)?;
    let v = |c: usize| format!("v{}", c + 1);
    let l = assoc.vertices;
    let mut edges: Vec<(String, String)> = assoc.edges.iter().map(|&(a, b)| (v(a), v(b))).collect();
    for j in 0..l {
        let w = |s: usize| format!("w{}_{s}", j + 1);
        edges.push(("w0".into(), w(1)));
        edges.push((w(1), w(2)));
        edges.push((w(2), w(3)));
        edges.push((w(3), v(j)));
    }
    let (b, first) = split_edges(&edges, mu);
    let graph = b.build()?;
    let position: HashMap<(usize, usize), usize> = assoc.edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let tilde: EdgeSet = assoc
        .shared
        .iter()
        .map(|e| {
            let (a, b) = &first[position[e]];
            (a.clone(), b.clone())
        })
        .collect();
    let d = 3 * mu;
    let c = geometric_curvature(&graph, d)?;
    let gamma = c + t as i64 - k as i64;
    let inst = EadpInstance::new(graph, tilde, gamma, Direction::Increase, Measure::Geometric { d })?;
    let delta_prime = inst.delta_prime()?;
    if delta_prime != g.n() {
        return Err(Error::InvalidInstance(format!(
            "association condition violated: {delta_prime} short cycles meet the shared edges, expected {}",
            g.n()
        )));
    }
    let (n1, m1, li, mui) = (g.n() as i64, g.m() as i64, l as i64, mu as i64);
    let complex_edges = assoc.edges.len() as i64;
    let without = inst.curvature_without(inst.tilde_ids())?.to_integer();
    let expected = counts(&[
        ("tilde_edges", m1),
        ("delta_prime", n1),
        ("nodes", li + 3 * li + 1 + (mui - 1) * (complex_edges + 4 * li)),
        ("edges", mui * (complex_edges + 4 * li)),
        ("gamma", c + t as i64 - k as i64),
        ("full_deletion_curvature", c + m1 - n1),
    ]);
    let observed = counts(&[
        ("tilde_edges", inst.tilde().len() as i64),
        ("delta_prime", delta_prime as i64),
        ("nodes", inst.graph().n() as i64),
        ("edges", inst.graph().m() as i64),
        ("gamma", inst.gamma()),
        ("full_deletion_curvature", without),
    ]);
    let node_map: BTreeMap<String, String> = (0..g.n())
        .map(|i| {
            let tri = assoc.triangles[i].map(v);
            (g.label(i).to_string(), tri.join(","))
        })
        .collect();
    GadgetOutput {
        construction: "dks-eadp",
        parameters: params(&[
            ("k", k.to_string()),
            ("t", t.to_string()),
            ("mu", mu.to_string()),
            ("d", d.to_string()),
            ("triangle_vertices", l.to_string()),
        ]),
        instance: GadgetInstance::Eadp(inst),
        expected_counts: expected,
        observed_counts: observed,
        discrepancies: Vec::new(),
        node_map,
        auxiliary: BTreeMap::from([("input".to_string(), g.clone())]),
    }
    .finish()
}

/// Each input node becomes a cycle `c{i}_1 .. c{i}_n` (n = input order) and each
/// input edge a path of `alpha·n + 3` edges between distinct cycle nodes of its two
/// ends. A node's k-th neighbour attaches at cycle position k.
pub fn gen_feige_seltser(g: &Graph, alpha: usize) -> Result<GadgetOutput> {
    let n = g.n();
    if n < 3 {
        return Err(Error::InvalidParameter("node cycles need at least three input nodes".into()));
    }
    let cyc = |i: usize, k: usize| format!("c{}_{}", i + 1, k + 1);
    let mut b = Builder::default();
    for i in 0..n {
        for k in 0..n {
            b.edge(&cyc(i, k), &cyc(i, (k + 1) % n));
        }
    }
    let len = alpha * n + 3;
    for &(a, c) in g.edges() {
        let pa = g.neighbors(a).iter().position(|&x| x == c).unwrap();
        let pc = g.neighbors(c).iter().position(|&x| x == a).unwrap();
        let mut path = vec![cyc(a, pa)];
        path.extend((1..len).map(|s| format!("p{}_{}_{s}", a + 1, c + 1)));
        path.push(cyc(c, pc));
        for w in path.windows(2) {
            b.edge(&w[0], &w[1]);
        }
    }
    let out = b.build()?;
    let max_degree = (0..out.n()).map(|v| out.degree(v)).max().unwrap_or(0);
    if max_degree > 3 {
        return Err(Error::Internal(format!("blow-up has a node of degree {max_degree}")));
    }
    let (ni, mi, ai) = (n as i64, g.m() as i64, alpha as i64);
    let expected = counts(&[
        ("nodes", ni * ni + (ai * ni + 2) * mi),
        ("edges", ni * ni + (ai * ni + 3) * mi),
        ("max_degree_at_most_3", 1),
    ]);
    let observed = counts(&[
        ("nodes", out.n() as i64),
        ("edges", out.m() as i64),
        ("max_degree_at_most_3", i64::from(max_degree <= 3)),
    ]);
    let discrepancies = vec![Discrepancy {
        name: "nodes".into(),
        formula_value: ni * ni + (ai * ni + 1) * mi,
        constructed_value: out.n() as i64,
        note: "a path of alpha*n+3 edges has alpha*n+2 interior nodes; the published node count uses alpha*n+1".into(),
    }];
    let node_map = (0..n).map(|i| (g.label(i).to_string(), format!("c{}", i + 1))).collect();
    GadgetOutput {
        construction: "feige-seltser",
        parameters: params(&[("n", n.to_string()), ("m", g.m().to_string()), ("alpha", alpha.to_string())]),
        instance: GadgetInstance::Graph(out),
        expected_counts: expected,
        observed_counts: observed,
        discrepancies,
        node_map,
        auxiliary: BTreeMap::from([("input".to_string(), g.clone())]),
    }
    .finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;

    fn cycle(n: usize) -> Graph {
        let text: String = (0..n).map(|i| format!("{} {}\n", i, (i + 1) % n)).collect();
        parse_edge_list(&text).unwrap()
    }

    #[test]
    fn c5_becomes_a_wheel() {
        let a = associate(&cycle(5), DEFAULT_ASSOCIATION_BUDGET).unwrap();
        assert_eq!(a.vertices, 6);
        assert_eq!(a.edges.len(), 10);
        let common: Vec<usize> = (0..6).filter(|&x| a.triangles.iter().all(|t| t.contains(&x))).collect();
        assert_eq!(common.len(), 1, "all five triangles share one hub");
    }

    #[test]
    fn triangle_input_is_rejected() {
        assert!(associate(&cycle(3), DEFAULT_ASSOCIATION_BUDGET).is_err());
        let star = parse_edge_list("a b\na c\na d\nb c").unwrap();
        assert!(associate(&star, DEFAULT_ASSOCIATION_BUDGET).is_err());
    }

    #[test]
    fn dks_on_c5() {
        let out = gen_dks_eadp(&cycle(5), 3, 4, 1).unwrap();
        assert_eq!(out.observed_counts["tilde_edges"], 5);
        assert!(gen_dks_eadp(&cycle(5), 3, 3, 1).is_err());
        let split = gen_dks_eadp(&cycle(5), 3, 4, 2).unwrap();
        assert_eq!(split.observed_counts["edges"], 2 * out.observed_counts["edges"]);
    }

    #[test]
    fn feige_seltser_k3() {
        let k3 = parse_edge_list("a b\nb c\nc a").unwrap();
        let out = gen_feige_seltser(&k3, 1).unwrap();
        assert_eq!(out.observed_counts["nodes"], 9 + 3 * 5);
        assert_eq!(out.observed_counts["edges"], 9 + 3 * 6);
    }
}
