//! Simple undirected graphs with string labels, hop distances and edge-set surgery.
//!
//! Nodes carry string labels; dense `usize` ids are used internally and follow
//! the order in which labels were first seen.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<usize>>,
    /// Sorted `(a, b)` pairs with `a < b`; the position is the edge id.
    edges: Vec<(usize, usize)>,
    edge_ids: HashMap<(usize, usize), usize>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'.' || c == b'-')
}

impl Graph {
    /// Builds a graph from labels and index pairs. Rejects self-loops, duplicates and
    /// out-of-range ids.
    pub fn new(labels: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        if labels.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate node label {l}")));
            }
        }
        let n = labels.len();
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidParameter(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::SelfLoop { line: 0, label: labels[a].clone() });
            }
            if !set.insert(key(a, b)) {
                return Err(Error::DuplicateEdge { line: 0, a: labels[a].clone(), b: labels[b].clone() });
            }
        }
        Ok(Self::assemble(labels, index, set.into_iter().collect()))
    }

    fn assemble(labels: Vec<String>, index: HashMap<String, usize>, edges: Vec<(usize, usize)>) -> Graph {
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        let mut edge_ids = HashMap::with_capacity(edges.len());
        for (id, &(a, b)) in edges.iter().enumerate() {
            adj[a].push(b);
            adj[b].push(a);
            edge_ids.insert((a, b), id);
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        Graph { labels, index, adj, edges, edge_ids }
    }

    /// Builds a graph from labelled edges; node order is first appearance, with
    /// `extra_nodes` appended (if new) after the edge endpoints.
    pub fn from_labeled_edges<S: AsRef<str>>(edges: &[(S, S)], extra_nodes: &[S]) -> Result<Graph> {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut intern = |s: &str| -> usize {
            if let Some(&i) = index.get(s) {
                return i;
            }
            index.insert(s.to_string(), labels.len());
            labels.push(s.to_string());
            labels.len() - 1
        };
        let mut pairs = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let (a, b) = (intern(a.as_ref()), intern(b.as_ref()));
            pairs.push((a, b));
        }
        for s in extra_nodes {
            intern(s.as_ref());
        }
        Graph::new(labels, pairs)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn node(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    /// Neighbours of `v`, sorted by id.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges as sorted id pairs; the slice position is the edge id.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_ids.get(&key(a, b)).copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_ids.contains_key(&key(a, b))
    }

    /// Label-based view of all edges.
    pub fn edge_set(&self) -> EdgeSet {
        self.edge_set_from_ids(0..self.m())
    }

    pub fn edge_set_from_ids(&self, ids: impl IntoIterator<Item = usize>) -> EdgeSet {
        let mut s = EdgeSet::new();
        for id in ids {
            let (a, b) = self.edges[id];
            s.insert(&self.labels[a], &self.labels[b]);
        }
        s
    }

    /// Edge ids of a label-based edge set; errors if any edge is absent.
    pub fn edge_ids_of(&self, set: &EdgeSet) -> Result<Vec<usize>> {
        let mut ids = Vec::with_capacity(set.len());
        for (a, b) in set.iter() {
            let id = match (self.index_of(a), self.index_of(b)) {
                (Some(x), Some(y)) => self.edge_id(x, y),
                _ => None,
            };
            ids.push(id.ok_or_else(|| Error::MissingEdge(a.to_string(), b.to_string()))?);
        }
        ids.sort_unstable();
        Ok(ids)
    }

    /// Hop distances from `src`; `None` marks unreachable nodes.
    pub fn bfs(&self, src: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n()];
        dist[src] = Some(0);
        let mut q = VecDeque::from([src]);
        while let Some(x) = q.pop_front() {
            let dx = dist[x].unwrap();
            for &y in &self.adj[x] {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    q.push_back(y);
                }
            }
        }
        dist
    }

    pub fn all_pairs_distances(&self) -> DistanceMatrix {
        let n = self.n();
        let mut d = vec![UNREACHABLE; n * n];
        for s in 0..n {
            for (t, x) in self.bfs(s).into_iter().enumerate() {
                if let Some(x) = x {
                    d[s * n + t] = x;
                }
            }
        }
        DistanceMatrix { n, d }
    }

    pub fn is_connected(&self) -> bool {
        self.bfs(0).iter().all(Option::is_some)
    }

    /// Errors with [`Error::Disconnected`] unless the graph is connected.
    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    pub fn diameter(&self) -> Result<u32> {
        self.all_pairs_distances().diameter()
    }

    pub fn remove_edges(&self, set: &EdgeSet) -> Result<Graph> {
        let ids = self.edge_ids_of(set)?;
        Ok(self.remove_edge_ids(&ids))
    }

    /// Same nodes, minus the given edge ids (ids out of range are ignored).
    pub fn remove_edge_ids(&self, ids: &[usize]) -> Graph {
        let mut drop = vec![false; self.m()];
        for &i in ids {
            if i < drop.len() {
                drop[i] = true;
            }
        }
        let kept = self.edges.iter().zip(&drop).filter(|(_, &d)| !d).map(|(&e, _)| e).collect();
        Self::assemble(self.labels.clone(), self.index.clone(), kept)
    }

    pub fn connected_after_removal(&self, set: &EdgeSet) -> Result<bool> {
        Ok(self.remove_edges(set)?.is_connected())
    }

    /// Number of edges with both endpoints in `nodes`.
    pub fn induced_edge_count(&self, nodes: &[usize]) -> usize {
        let mut inside = vec![false; self.n()];
        for &v in nodes {
            inside[v] = true;
        }
        self.edges.iter().filter(|&&(a, b)| inside[a] && inside[b]).count()
    }

    /// Equal label sets and equal labelled edge sets.
    pub fn same_as(&self, other: &Graph) -> bool {
        let a: BTreeSet<&String> = self.labels.iter().collect();
        let b: BTreeSet<&String> = other.labels.iter().collect();
        a == b && self.edge_set() == other.edge_set()
    }

    /// Edge-list text: one edge per line, isolated nodes on their own line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(a, b) in &self.edges {
            out.push_str(&self.labels[a]);
            out.push(' ');
            out.push_str(&self.labels[b]);
            out.push('\n');
        }
        for v in 0..self.n() {
            if self.adj[v].is_empty() {
                out.push_str(&self.labels[v]);
                out.push('\n');
            }
        }
        out
    }
}

/// Parses the edge-list format: two labels per line, `#` comments and blank lines
/// ignored. A line with a single label declares an isolated node.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() > 2 {
            return Err(Error::Parse { line, msg: format!("expected at most two labels, got {}", toks.len()) });
        }
        if let Some(bad) = toks.iter().find(|s| !valid_label(s)) {
            return Err(Error::Parse { line, msg: format!("invalid label {bad:?}") });
        }
        let mut ids = [0usize; 2];
        for (k, s) in toks.iter().enumerate() {
            ids[k] = match index.get(*s) {
                Some(&i) => i,
                None => {
                    index.insert(s.to_string(), labels.len());
                    labels.push(s.to_string());
                    labels.len() - 1
                }
            };
        }
        if toks.len() == 2 {
            let (a, b) = (ids[0], ids[1]);
            if a == b {
                return Err(Error::SelfLoop { line, label: toks[0].to_string() });
            }
            if !seen.insert(key(a, b)) {
                return Err(Error::DuplicateEdge { line, a: toks[0].to_string(), b: toks[1].to_string() });
            }
            edges.push(key(a, b));
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptyGraph);
    }
    edges.sort_unstable();
    Ok(Graph::assemble(labels, index, edges))
}

pub const UNREACHABLE: u32 = u32::MAX;

/// Row-major hop-count matrix; [`UNREACHABLE`] marks disconnected pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u32>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> Option<u32> {
        let x = self.d[a * self.n + b];
        (x != UNREACHABLE).then_some(x)
    }

    /// Raw entry; [`UNREACHABLE`] when disconnected.
    #[inline]
    pub fn raw(&self, a: usize, b: usize) -> u32 {
        self.d[a * self.n + b]
    }

    pub fn row(&self, a: usize) -> &[u32] {
        &self.d[a * self.n..(a + 1) * self.n]
    }

    pub fn is_connected(&self) -> bool {
        !self.d.contains(&UNREACHABLE)
    }

    pub fn diameter(&self) -> Result<u32> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(self.d.iter().copied().max().unwrap_or(0))
    }
}

/// A set of undirected edges keyed by label; each pair is stored with the
/// lexicographically smaller label first.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeSet(BTreeSet<(String, String)>);

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    fn norm(a: &str, b: &str) -> (String, String) {
        if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        }
    }

    pub fn insert(&mut self, a: &str, b: &str) -> bool {
        self.0.insert(Self::norm(a, b))
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        self.0.contains(&Self::norm(a, b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Parses the same edge-list format as graphs (single-label lines are rejected).
    pub fn parse(text: &str) -> Result<EdgeSet> {
        let mut s = EdgeSet::new();
        for (no, raw) in text.lines().enumerate() {
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = t.split_whitespace().collect();
            if toks.len() != 2 || !toks.iter().all(|x| valid_label(x)) {
                return Err(Error::Parse { line: no + 1, msg: "expected two labels".into() });
            }
            if !s.insert(toks[0], toks[1]) {
                return Err(Error::DuplicateEdge { line: no + 1, a: toks[0].into(), b: toks[1].into() });
            }
        }
        Ok(s)
    }
}

impl<A: AsRef<str>, B: AsRef<str>> FromIterator<(A, B)> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = (A, B)>>(iter: I) -> Self {
        let mut s = EdgeSet::new();
        for (a, b) in iter {
            s.insert(a.as_ref(), b.as_ref());
        }
        s
    }
}

impl fmt::Display for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (a, b)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}-{b}")?;
        }
        write!(f, "}}")
    }
}
