//! Max-flow / min-cut (Dinic) and the densest-subgraph computation built on it.

use std::collections::VecDeque;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Capacity {
    Finite(i128),
    Infinite,
}

impl Capacity {
    pub fn is_infinite(self) -> bool {
        matches!(self, Capacity::Infinite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub cap: Capacity,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowNetwork {
    n: usize,
    source: usize,
    sink: usize,
    arcs: Vec<Arc>,
}

impl FlowNetwork {
    pub fn new(n: usize, source: usize, sink: usize) -> Result<FlowNetwork> {
        if source == sink || source >= n || sink >= n {
            return Err(Error::InvalidParameter("source and sink must be distinct nodes".into()));
        }
        Ok(FlowNetwork { n, source, sink, arcs: Vec::new() })
    }

    /// Adds an arc and returns its id.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: Capacity) -> usize {
        assert!(from < self.n && to < self.n, "arc endpoint out of range");
        if let Capacity::Finite(c) = cap {
            assert!(c >= 0, "negative capacity");
        }
        self.arcs.push(Arc { from, to, cap });
        self.arcs.len() - 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Capacity of the cut leaving `side`; `None` when an infinite arc crosses it.
    pub fn cut_capacity(&self, side: &[bool]) -> Option<i128> {
        let mut total = 0i128;
        for a in &self.arcs {
            if side[a.from] && !side[a.to] {
                match a.cap {
                    Capacity::Finite(c) => total += c,
                    Capacity::Infinite => return None,
                }
            }
        }
        Some(total)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutResult {
    pub flow_value: i128,
    /// Nodes reachable from the source in the final residual network (the
    /// inclusion-minimal minimum cut).
    pub source_side: Vec<usize>,
    pub cut_arcs: Vec<usize>,
}

impl CutResult {
    pub fn side_mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.source_side {
            m[v] = true;
        }
        m
    }
}

struct Residual {
    head: Vec<usize>,
    cap: Vec<i128>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn push(&mut self, a: usize, b: usize, c: i128) {
        self.adj[a].push(self.head.len());
        self.head.push(b);
        self.cap.push(c);
        self.adj[b].push(self.head.len());
        self.head.push(a);
        self.cap.push(0);
    }
}

pub fn max_flow(net: &FlowNetwork) -> Result<CutResult> {
    let finite: i128 = net
        .arcs
        .iter()
        .map(|a| match a.cap {
            Capacity::Finite(c) => c,
            Capacity::Infinite => 0,
        })
        .sum();
    let inf = finite + 1;
    let mut r = Residual { head: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); net.n] };
    for a in &net.arcs {
        let c = match a.cap {
            Capacity::Finite(c) => c,
            Capacity::Infinite => inf,
        };
        r.push(a.from, a.to, c);
    }
    let (s, t) = (net.source, net.sink);
    let mut total = 0i128;
    let mut level = vec![usize::MAX; net.n];
    let mut it = vec![0usize; net.n];
    loop {
        level.fill(usize::MAX);
        level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &e in &r.adj[x] {
                let y = r.head[e];
                if r.cap[e] > 0 && level[y] == usize::MAX {
                    level[y] = level[x] + 1;
                    q.push_back(y);
                }
            }
        }
        if level[t] == usize::MAX {
            break;
        }
        it.fill(0);
        loop {
            let f = augment(&mut r, &level, &mut it, s, t, i128::MAX);
            if f == 0 {
                break;
            }
            total += f;
            if total >= inf {
                return Err(Error::InfiniteFlow);
            }
        }
    }
    let mut seen = vec![false; net.n];
    seen[s] = true;
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        for &e in &r.adj[x] {
            let y = r.head[e];
            if r.cap[e] > 0 && !seen[y] {
                seen[y] = true;
                q.push_back(y);
            }
        }
    }
    let cut_arcs: Vec<usize> =
        (0..net.arcs.len()).filter(|&i| seen[net.arcs[i].from] && !seen[net.arcs[i].to]).collect();
    if cut_arcs.iter().any(|&i| net.arcs[i].cap.is_infinite()) {
        return Err(Error::InfiniteFlow);
    }
    Ok(CutResult { flow_value: total, source_side: (0..net.n).filter(|&v| seen[v]).collect(), cut_arcs })
}

fn augment(r: &mut Residual, level: &[usize], it: &mut [usize], x: usize, t: usize, limit: i128) -> i128 {
    if x == t {
        return limit;
    }
    while it[x] < r.adj[x].len() {
        let e = r.adj[x][it[x]];
        let y = r.head[e];
        if r.cap[e] > 0 && level[y] == level[x] + 1 {
            let f = augment(r, level, it, y, t, limit.min(r.cap[e]));
            if f > 0 {
                r.cap[e] -= f;
                r.cap[e ^ 1] += f;
                return f;
            }
        }
        it[x] += 1;
    }
    0
}

type Q = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensestSubgraph {
    /// Node labels in graph order.
    pub nodes: Vec<String>,
    pub node_ids: Vec<usize>,
    pub edges: usize,
    #[serde(serialize_with = "crate::measure::ser_ratio")]
    pub density: num_rational::Rational64,
}

/// Goldberg network for guess `g`: a min cut below `m·n·q` exposes a node set
/// with density above `g`. With `force`, that node is pinned to the source side.
fn goldberg(graph: &Graph, g: Q, force: Option<usize>) -> Result<(i128, Vec<usize>)> {
    let n = graph.n();
    let m = graph.m() as i128;
    let (p, q) = (*g.numer(), *g.denom());
    let (s, t) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2, s, t)?;
    for v in 0..n {
        let cap = if force == Some(v) { Capacity::Infinite } else { Capacity::Finite(q * m) };
        net.add_arc(s, v, cap);
        net.add_arc(v, t, Capacity::Finite(q * m + 2 * p - q * graph.degree(v) as i128));
    }
    for &(a, b) in graph.edges() {
        net.add_arc(a, b, Capacity::Finite(q));
        net.add_arc(b, a, Capacity::Finite(q));
    }
    let cut = max_flow(&net)?;
    let side = cut.source_side.into_iter().filter(|&v| v < n).collect();
    Ok((cut.flow_value, side))
}

fn density(graph: &Graph, nodes: &[usize]) -> Q {
    Q::new(graph.induced_edge_count(nodes) as i128, nodes.len() as i128)
}

/// Maximum-density node set `S` (edges inside `S` over `|S|`). Among optimal
/// sets the smallest is returned, ties broken by label order.
pub fn densest_subgraph(graph: &Graph) -> Result<DensestSubgraph> {
    let n = graph.n();
    if graph.m() == 0 {
        return Err(Error::InvalidParameter("densest subgraph needs at least one edge".into()));
    }
    let base = graph.m() as i128 * n as i128;
    let all: Vec<usize> = (0..n).collect();
    let mut lo = density(graph, &all);
    let mut hi = Q::new(n as i128 - 1, 2).max(lo);
    let gap = Q::new(1, (n as i128 * (n as i128 - 1)).max(1));
    while hi - lo >= gap {
        let mid = (lo + hi) / 2;
        let (cut, side) = goldberg(graph, mid, None)?;
        if cut < base * *mid.denom() {
            let d = density(graph, &side);
            debug_assert!(d > mid);
            lo = d;
        } else {
            hi = mid;
        }
    }
    let rho = lo;
    // Each optimal set contains the smallest optimal set through one of its nodes.
    let mut best: Option<Vec<usize>> = None;
    for v in 0..n {
        let (cut, side) = goldberg(graph, rho, Some(v))?;
        if cut != base * *rho.denom() || side.is_empty() {
            continue;
        }
        if density(graph, &side) != rho {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => (side.len(), labels_of(graph, &side)) < (b.len(), labels_of(graph, b)),
        };
        if better {
            best = Some(side);
        }
    }
    let nodes = best.ok_or_else(|| Error::Internal("no optimal densest set recovered".into()))?;
    let edges = graph.induced_edge_count(&nodes);
    Ok(DensestSubgraph {
        nodes: nodes.iter().map(|&v| graph.label(v).to_string()).collect(),
        node_ids: nodes,
        edges,
        density: num_rational::Rational64::new(*rho.numer() as i64, *rho.denom() as i64),
    })
}

fn labels_of<'a>(graph: &'a Graph, nodes: &[usize]) -> Vec<&'a str> {
    let mut v: Vec<&str> = nodes.iter().map(|&x| graph.label(x)).collect();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;
    use num_rational::Rational64;

    #[test]
    fn single_arc() {
        let mut net = FlowNetwork::new(2, 0, 1).unwrap();
        net.add_arc(0, 1, Capacity::Finite(5));
        let r = max_flow(&net).unwrap();
        assert_eq!(r.flow_value, 5);
        assert_eq!(r.source_side, vec![0]);
        assert_eq!(r.cut_arcs, vec![0]);
    }

    #[test]
    fn diamond() {
        let mut net = FlowNetwork::new(4, 0, 3).unwrap();
        for (a, b) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            net.add_arc(a, b, Capacity::Finite(1));
        }
        assert_eq!(max_flow(&net).unwrap().flow_value, 2);
    }

    #[test]
    fn infinite_path_is_an_error() {
        let mut net = FlowNetwork::new(3, 0, 2).unwrap();
        net.add_arc(0, 1, Capacity::Infinite);
        net.add_arc(1, 2, Capacity::Infinite);
        assert!(matches!(max_flow(&net), Err(Error::InfiniteFlow)));
    }

    #[test]
    fn infinite_arcs_never_cut() {
        let mut net = FlowNetwork::new(4, 0, 3).unwrap();
        net.add_arc(0, 1, Capacity::Finite(1));
        net.add_arc(1, 2, Capacity::Infinite);
        net.add_arc(2, 3, Capacity::Finite(1));
        let r = max_flow(&net).unwrap();
        assert_eq!(r.flow_value, 1);
        assert!(r.cut_arcs.iter().all(|&a| !net.arcs()[a].cap.is_infinite()));
    }

    #[test]
    fn densest_basic() {
        let e = parse_edge_list("a b").unwrap();
        assert_eq!(densest_subgraph(&e).unwrap().density, Rational64::new(1, 2));
        let c = parse_edge_list("a b\nb c\nc d\nd e\ne a").unwrap();
        let r = densest_subgraph(&c).unwrap();
        assert_eq!(r.density, Rational64::from(1));
        assert_eq!(r.nodes.len(), 5);
        let lonely = parse_edge_list("a\nb").unwrap();
        assert!(densest_subgraph(&lonely).is_err());
    }

    #[test]
    fn densest_prefers_small_sets() {
        // Two disjoint triangles: either has density 1; the whole graph too.
        let g = parse_edge_list("a b\nb c\nc a\nx y\ny z\nz x").unwrap();
        let r = densest_subgraph(&g).unwrap();
        assert_eq!(r.density, Rational64::from(1));
        assert_eq!(r.nodes, vec!["a", "b", "c"]);
    }

    #[test]
    fn densest_k4_with_tail() {
        let g = parse_edge_list("1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n4 5\n5 6").unwrap();
        let r = densest_subgraph(&g).unwrap();
        assert_eq!(r.density, Rational64::new(3, 2));
        assert_eq!(r.edges, 6);
    }
}
