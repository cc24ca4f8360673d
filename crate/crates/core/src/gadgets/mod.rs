//! Generators for the reduction gadgets, each returning the instance together
//! with the counts the construction promises.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::cycles::geometric_curvature;
use crate::eadp::EadpInstance;
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, Graph};
use crate::gromov::SlimOptions;
use crate::measure::Measure;
use crate::tadp::TadpInstance;

mod dks;

pub use dks::{associate, gen_dks_eadp, gen_feige_seltser, Association, DEFAULT_ASSOCIATION_BUDGET};

#[derive(Debug, Clone)]
pub enum GadgetInstance {
    Tadp(TadpInstance),
    Eadp(EadpInstance),
    Graph(Graph),
}

/// A published count that the construction does not reproduce exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub name: String,
    pub formula_value: i64,
    pub constructed_value: i64,
    pub note: String,
}

#[derive(Debug, Clone)]
pub struct GadgetOutput {
    pub construction: &'static str,
    pub parameters: BTreeMap<String, String>,
    pub instance: GadgetInstance,
    /// Counts predicted by the construction's formulas.
    pub expected_counts: BTreeMap<String, i64>,
    /// The same counts measured on the generated graphs.
    pub observed_counts: BTreeMap<String, i64>,
    pub discrepancies: Vec<Discrepancy>,
    /// Input node label to gadget node label.
    pub node_map: BTreeMap<String, String>,
    /// Named side graphs (the input, distinguished subgraphs).
    pub auxiliary: BTreeMap<String, Graph>,
}

impl GadgetOutput {
    pub fn tadp(&self) -> Option<&TadpInstance> {
        match &self.instance {
            GadgetInstance::Tadp(t) => Some(t),
            _ => None,
        }
    }

    pub fn eadp(&self) -> Option<&EadpInstance> {
        match &self.instance {
            GadgetInstance::Eadp(e) => Some(e),
            _ => None,
        }
    }

    pub fn graph(&self) -> Option<&Graph> {
        match &self.instance {
            GadgetInstance::Graph(g) => Some(g),
            _ => None,
        }
    }

    /// Names whose observed value differs from the expected one.
    pub fn mismatches(&self) -> Vec<String> {
        self.expected_counts
            .iter()
            .filter(|(k, v)| self.observed_counts.get(*k) != Some(v))
            .map(|(k, _)| k.clone())
            .collect()
    }

    fn finish(self) -> Result<Self> {
        let bad = self.mismatches();
        if !bad.is_empty() {
            let detail: Vec<String> = bad
                .iter()
                .map(|k| format!("{k}: expected {}, got {:?}", self.expected_counts[k], self.observed_counts.get(k)))
                .collect();
            return Err(Error::Internal(format!("{} counts: {}", self.construction, detail.join("; "))));
        }
        Ok(self)
    }
}

/// Incremental graph assembly with labels interned on first use.
#[derive(Default)]
pub(crate) struct Builder {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    seen: std::collections::HashSet<(usize, usize)>,
}

impl Builder {
    pub(crate) fn node(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        self.index.insert(label.to_string(), self.labels.len());
        self.labels.push(label.to_string());
        self.labels.len() - 1
    }

    /// Adds an edge; returns false if it was already present.
    pub(crate) fn edge(&mut self, a: &str, b: &str) -> bool {
        let (a, b) = (self.node(a), self.node(b));
        let k = if a < b { (a, b) } else { (b, a) };
        if !self.seen.insert(k) {
            return false;
        }
        self.edges.push(k);
        true
    }

    pub(crate) fn build(&self) -> Result<Graph> {
        Graph::new(self.labels.clone(), self.edges.iter().copied())
    }
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn counts(pairs: &[(&str, i64)]) -> BTreeMap<String, i64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn triangle_count(g: &Graph) -> usize {
    let mut t = 0;
    for &(a, b) in g.edges() {
        t += g.neighbors(a).iter().filter(|&&c| c > b && g.has_edge(b, c)).count();
    }
    t
}

/// Triangle deletion to geometric TADP with d = 3.
///
/// Nodes `v{i}` copy the input, `w{i}_1`, `w{i}_2` chain consecutive copies and
/// `v{i}_{j}` closes a triangle over each input edge. G₂ drops the copied edges.
pub fn gen_tdp_tadp(g: &Graph) -> Result<GadgetOutput> {
    let n = g.n();
    let m = g.m();
    if n < 2 {
        return Err(Error::InvalidParameter("the triangle deletion gadget needs at least two nodes".into()));
    }
    let v = |i: usize| format!("v{}", i + 1);
    let mut b1 = Builder::default();
    let mut b2 = Builder::default();
    for i in 0..n {
        b1.node(&v(i));
        b2.node(&v(i));
    }
    for i in 0..n - 1 {
        let (w1, w2) = (format!("w{}_1", i + 1), format!("w{}_2", i + 1));
        for b in [&mut b1, &mut b2] {
            b.edge(&v(i), &w1);
            b.edge(&w1, &w2);
            b.edge(&w2, &v(i + 1));
        }
    }
    for &(a, c) in g.edges() {
        let t = format!("v{}_{}", a + 1, c + 1);
        for b in [&mut b1, &mut b2] {
            b.edge(&v(a), &t);
            b.edge(&t, &v(c));
        }
    }
    for &(a, c) in g.edges() {
        b1.edge(&v(a), &v(c));
    }
    let g1 = b1.build()?;
    let g2 = b2.build()?;
    let (ni, mi) = (n as i64, m as i64);
    let tri = triangle_count(g) as i64;
    let expected = counts(&[
        ("nodes", 3 * ni + mi - 2),
        ("edges_g1", 3 * ni + 3 * mi - 3),
        ("edges_g2", 3 * ni + 2 * mi - 3),
        ("triangles_g2", 0),
        ("curvature_g1", (3 * ni + mi - 2) - (3 * ni + 3 * mi - 3) + tri + mi),
        ("curvature_g2", (3 * ni + mi - 2) - (3 * ni + 2 * mi - 3)),
    ]);
    let observed = counts(&[
        ("nodes", g1.n() as i64),
        ("edges_g1", g1.m() as i64),
        ("edges_g2", g2.m() as i64),
        ("triangles_g2", triangle_count(&g2) as i64),
        ("curvature_g1", geometric_curvature(&g1, 3)?),
        ("curvature_g2", geometric_curvature(&g2, 3)?),
    ]);
    let node_map = (0..n).map(|i| (g.label(i).to_string(), v(i))).collect();
    let inst = TadpInstance::new(g1, g2, Measure::Geometric { d: 3 })?;
    GadgetOutput {
        construction: "tdp-tadp",
        parameters: params(&[("n", n.to_string()), ("m", m.to_string()), ("d", "3".into())]),
        instance: GadgetInstance::Tadp(inst),
        expected_counts: expected,
        observed_counts: observed,
        discrepancies: Vec::new(),
        node_map,
        auxiliary: BTreeMap::from([("input".to_string(), g.clone())]),
    }
    .finish()
}

/// Minimum node cover to geometric TADP with cycle bound `d ≥ 4`.
///
/// Each input node becomes a `d`-cycle `v{i}_1 .. v{i}_d`; each input edge
/// becomes two paths joining the first and second nodes of the two cycles so
/// that, with both cross edges, they close a `d`-cycle. G₂ drops every
/// cross edge `v{i}_1 v{i}_2`. The input must be connected.
pub fn gen_mnc_tadp(g: &Graph, d: usize) -> Result<GadgetOutput> {
    if d < 4 {
        return Err(Error::InvalidParameter(format!("node cover gadget needs d >= 4, got {d}")));
    }
    if !g.is_connected() {
        return Err(Error::InvalidParameter("node cover gadget needs a connected input".into()));
    }
    let (n, m) = (g.n(), g.m());
    let vn = |i: usize, k: usize| format!("v{}_{}", i + 1, k);
    let mut b1 = Builder::default();
    let mut b2 = Builder::default();
    for i in 0..n {
        for k in 1..=d {
            let next = if k == d { 1 } else { k + 1 };
            b1.edge(&vn(i, k), &vn(i, next));
            if k != 1 {
                b2.edge(&vn(i, k), &vn(i, next));
            } else {
                b2.node(&vn(i, 1));
                b2.node(&vn(i, 2));
            }
        }
    }
    let len1 = (d - 2).div_ceil(2);
    let len2 = (d - 2) / 2;
    for &(a, c) in g.edges() {
        for (layer, len) in [(1usize, len1), (2, len2)] {
            let mut path = vec![vn(a, layer)];
            for s in 1..len {
                path.push(format!("u{}_{}_{}_{}", a + 1, c + 1, s, layer));
            }
            path.push(vn(c, layer));
            for w in path.windows(2) {
                b1.edge(&w[0], &w[1]);
                b2.edge(&w[0], &w[1]);
            }
        }
    }
    let g1 = b1.build()?;
    let g2 = b2.build()?;
    // Every node cycle and edge cycle has exactly d nodes.
    if len1 + len2 + 2 != d {
        return Err(Error::Internal(format!("edge cycle length {} for d = {d}", len1 + len2 + 2)));
    }
    let (ni, mi, di) = (n as i64, m as i64, d as i64);
    let c1 = geometric_curvature(&g1, d)?;
    let c2 = geometric_curvature(&g2, d)?;
    let expected = counts(&[
        ("nodes", di * ni + (di - 4) * mi),
        ("edges_g1", di * ni + (di - 2) * mi),
        ("edges_g2", (di - 1) * ni + (di - 2) * mi),
        ("curvature_drop", mi),
    ]);
    let observed = counts(&[
        ("nodes", g1.n() as i64),
        ("edges_g1", g1.m() as i64),
        ("edges_g2", g2.m() as i64),
        ("curvature_drop", c1 - c2),
    ]);
    let node_map = (0..n).map(|i| (g.label(i).to_string(), format!("v{}", i + 1))).collect();
    let inst = TadpInstance::new(g1, g2, Measure::Geometric { d })?;
    GadgetOutput {
        construction: "mnc-tadp",
        parameters: params(&[("n", n.to_string()), ("m", m.to_string()), ("d", d.to_string())]),
        instance: GadgetInstance::Tadp(inst),
        expected_counts: expected,
        observed_counts: observed,
        discrepancies: Vec::new(),
        node_map,
        auxiliary: BTreeMap::from([("input".to_string(), g.clone())]),
    }
    .finish()
}

fn require_cubic(g: &Graph) -> Result<()> {
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) != 3) {
        return Err(Error::InvalidParameter(format!(
            "input must be cubic; node {} has degree {}",
            g.label(v),
            g.degree(v)
        )));
    }
    if g.n() < 4 {
        return Err(Error::InvalidParameter("cubic input needs at least four nodes".into()));
    }
    Ok(())
}

/// Gadget nodes `v{j}` for the input (with `v1`, `v{n}` the path ends) and the three
/// pendant nodes; `v{j}_{k}` are the spokes from the hub `u`.
fn cubic_names(g: &Graph, start: usize, end: usize) -> Vec<String> {
    let n = g.n();
    let mut names = vec![String::new(); n];
    names[start] = "v1".into();
    names[end] = format!("v{n}");
    let mut next = 2;
    for (v, name) in names.iter_mut().enumerate() {
        if v != start && v != end {
            *name = format!("v{next}");
            next += 1;
        }
    }
    names
}

/// Hamiltonian path in cubic graphs to slim-hyperbolicity TADP.
///
/// G₁ is the spoke graph G″ plus a clique on `w0 ..` joined to the hub `u` through
/// `w0`; G₂ keeps G″ and, inside the clique, only a copy of the broom-cycle graph
/// H (exposed as the auxiliary graph `H`).
pub fn gen_cubic_hp_gromov(g: &Graph, v1: &str, vn: &str) -> Result<GadgetOutput> {
    require_cubic(g)?;
    let (start, end) = (g.node(v1)?, g.node(vn)?);
    if start == end {
        return Err(Error::InvalidParameter("path ends must differ".into()));
    }
    let n = g.n();
    let half = n / 2;
    let names = cubic_names(g, start, end);
    let vj = |j: usize| format!("v{j}");
    // Spoke j runs u = v{j}_0, v{j}_1, .., v{j}_{n/2}, v{j}_{n/2+1} = v{j}.
    let spoke = |j: usize| -> Vec<String> {
        let mut p = vec!["u".to_string()];
        p.extend((1..=half).map(|k| format!("v{j}_{k}")));
        p.push(vj(j));
        p
    };
    let mut gpp = Builder::default();
    for &(a, b) in g.edges() {
        gpp.edge(&names[a], &names[b]);
    }
    let pendant = [(vj(0), vj(1)), (vj(n), vj(n + 1)), (vj(n + 1), vj(n + 2))];
    for (a, b) in &pendant {
        gpp.edge(a, b);
    }
    for j in 0..=n + 2 {
        for w in spoke(j).windows(2) {
            gpp.edge(&w[0], &w[1]);
        }
    }
    let g2p = gpp.build()?;

    // Ê = (E″ ∖ E) ∪ {v_j v_{j+1}} with set-union semantics.
    let mut hat = Builder::default();
    hat.node("u");
    for (a, b) in &pendant {
        hat.edge(a, b);
    }
    for j in 0..=n + 2 {
        for w in spoke(j).windows(2) {
            hat.edge(&w[0], &w[1]);
        }
    }
    let mut duplicates = 0;
    for j in 0..=n + 1 {
        if !hat.edge(&vj(j), &vj(j + 1)) {
            duplicates += 1;
        }
    }
    let hat_g = hat.build()?;

    // Number H along its long cycle u, spoke 0, v0 .. v_{n+2}, spoke n+2 back.
    let mut order: Vec<String> = spoke(0);
    order.extend((1..=n + 2).map(vj));
    let mut back = spoke(n + 2);
    back.pop();
    back.reverse();
    back.pop();
    order.extend(back);
    for j in 1..=n + 1 {
        order.extend((1..=half).map(|k| format!("v{j}_{k}")));
    }
    if order.len() != g2p.n() {
        return Err(Error::Internal(format!("H numbering covers {} of {} nodes", order.len(), g2p.n())));
    }
    let wmap: HashMap<&str, String> = order.iter().enumerate().map(|(i, s)| (s.as_str(), format!("w{i}"))).collect();
    let mut hb = Builder::default();
    for i in 0..order.len() {
        hb.node(&format!("w{i}"));
    }
    for &(a, b) in hat_g.edges() {
        hb.edge(&wmap[hat_g.label(a)], &wmap[hat_g.label(b)]);
    }
    let h = hb.build()?;

    let vpp = g2p.n();
    let mut b1 = Builder::default();
    let mut b2 = Builder::default();
    for b in [&mut b1, &mut b2] {
        for &(a, c) in g2p.edges() {
            b.edge(g2p.label(a), g2p.label(c));
        }
        for i in 0..vpp {
            b.node(&format!("w{i}"));
        }
        b.edge("u", "w0");
    }
    for i in 0..vpp {
        for j in i + 1..vpp {
            b1.edge(&format!("w{i}"), &format!("w{j}"));
        }
    }
    for &(a, c) in h.edges() {
        b2.edge(h.label(a), h.label(c));
    }
    let g1 = b1.build()?;
    let g2 = b2.build()?;

    let ni = n as i64;
    let e_in = g.m() as i64;
    let epp = ni * ni / 2 + 4 * ni + 6;
    let hat_formula = epp - e_in + ni + 2;
    let expected = counts(&[
        ("nodes_g2pp", (ni * ni + 5 * ni) / 2 + 4),
        ("edges_g2pp", epp),
        ("nodes", ni * ni + 5 * ni + 8),
        ("edges_g1", (ni.pow(4) + 10 * ni.pow(3) + 43 * ni * ni + 102 * ni + 104) / 8),
        ("nodes_h", (ni * ni + 5 * ni) / 2 + 4),
        ("edges_h", hat_formula - duplicates),
        ("edges_g2", epp + hat_formula - duplicates + 1),
    ]);
    let observed = counts(&[
        ("nodes_g2pp", g2p.n() as i64),
        ("edges_g2pp", g2p.m() as i64),
        ("nodes", g1.n() as i64),
        ("edges_g1", g1.m() as i64),
        ("nodes_h", h.n() as i64),
        ("edges_h", h.m() as i64),
        ("edges_g2", g2.m() as i64),
    ]);
    let discrepancies = vec![
        Discrepancy {
            name: "edges_h".into(),
            formula_value: hat_formula,
            constructed_value: h.m() as i64,
            note: format!("{duplicates} path edges v_j v_(j+1) already lie in E'' minus E"),
        },
        Discrepancy {
            name: "edges_g2".into(),
            formula_value: ni * ni + 15 * ni / 2 + 12,
            constructed_value: g2.m() as i64,
            note: "follows from the deduplicated edges_h".into(),
        },
    ];
    let node_map = (0..n).map(|v| (g.label(v).to_string(), names[v].clone())).collect();
    let inst = TadpInstance::new(g1, g2, Measure::GromovSlim(SlimOptions::default()))?;
    GadgetOutput {
        construction: "cubic-hp-gromov",
        parameters: params(&[("n", n.to_string()), ("v1", v1.to_string()), ("vn", vn.to_string())]),
        instance: GadgetInstance::Tadp(inst),
        expected_counts: expected,
        observed_counts: observed,
        discrepancies,
        node_map,
        auxiliary: BTreeMap::from([("input".to_string(), g.clone()), ("H".to_string(), h), ("G''".to_string(), g2p)]),
    }
    .finish()
}

/// The input edges off a Hamiltonian path from `v1` to `vn`, in gadget labels.
/// Deleting them from G₁ leaves a copy of H next to the clique.
pub fn completeness_deletion_set(gadget: &GadgetOutput, path: &[&str]) -> Result<EdgeSet> {
    if gadget.construction != "cubic-hp-gromov" {
        return Err(Error::InvalidParameter("completeness set applies to the cubic path gadget".into()));
    }
    let g = &gadget.auxiliary["input"];
    let n = g.n();
    let ids: Vec<usize> = path.iter().map(|l| g.node(l)).collect::<Result<_>>()?;
    let mut seen = vec![false; n];
    for &v in &ids {
        seen[v] = true;
    }
    let ends_ok = ids.first().map(|&v| g.label(v)) == Some(gadget.parameters["v1"].as_str())
        && ids.last().map(|&v| g.label(v)) == Some(gadget.parameters["vn"].as_str());
    if ids.len() != n || seen.iter().any(|s| !s) || !ends_ok || ids.windows(2).any(|w| !g.has_edge(w[0], w[1])) {
        return Err(Error::InvalidParameter(format!(
            "{} is not a Hamiltonian path from {} to {}",
            path.join("-"),
            gadget.parameters["v1"],
            gadget.parameters["vn"]
        )));
    }
    let on_path: std::collections::HashSet<(usize, usize)> =
        ids.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();
    let mut out = EdgeSet::new();
    for &(a, b) in g.edges() {
        if !on_path.contains(&(a, b)) {
            out.insert(&gadget.node_map[g.label(a)], &gadget.node_map[g.label(b)]);
        }
    }
    if out.len() != n / 2 + 1 {
        return Err(Error::Internal(format!("deletion set has {} edges, expected {}", out.len(), n / 2 + 1)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;

    fn k4() -> Graph {
        parse_edge_list("1 2\n1 3\n1 4\n2 3\n2 4\n3 4").unwrap()
    }

    #[test]
    fn tdp_counts_on_k4() {
        let out = gen_tdp_tadp(&k4()).unwrap();
        assert_eq!(out.observed_counts["nodes"], 16);
        assert_eq!(out.observed_counts["edges_g1"], 27);
        assert_eq!(out.observed_counts["edges_g2"], 21);
        let t = out.tadp().unwrap();
        assert_eq!(t.curvature_g1(), (-1).into());
        assert_eq!(t.target(), (-5).into());
    }

    #[test]
    fn tdp_single_edge() {
        let out = gen_tdp_tadp(&parse_edge_list("a b").unwrap()).unwrap();
        assert_eq!(out.observed_counts["nodes"], 5);
        assert_eq!(out.observed_counts["edges_g1"], 6);
        assert_eq!(out.observed_counts["edges_g2"], 5);
    }

    #[test]
    fn mnc_on_k2() {
        let out = gen_mnc_tadp(&parse_edge_list("a b").unwrap(), 4).unwrap();
        assert_eq!(out.observed_counts["nodes"], 8);
        assert_eq!(out.observed_counts["edges_g1"], 10);
        assert_eq!(out.observed_counts["edges_g2"], 8);
        let t = out.tadp().unwrap();
        assert_eq!(t.curvature_g1(), 1.into());
        assert_eq!(t.target(), 0.into());
        assert!(gen_mnc_tadp(&k4(), 3).is_err());
    }

    #[test]
    fn cubic_counts_on_k4() {
        let out = gen_cubic_hp_gromov(&k4(), "1", "4").unwrap();
        assert_eq!(out.observed_counts["nodes"], 44);
        assert_eq!(out.auxiliary["H"].n(), 22);
        assert_eq!(out.discrepancies[0].formula_value - out.discrepancies[0].constructed_value, 3);
        let e = completeness_deletion_set(&out, &["1", "2", "3", "4"]).unwrap();
        assert_eq!(e.len(), 3);
        assert!(completeness_deletion_set(&out, &["1", "3", "2"]).is_err());
        assert!(gen_cubic_hp_gromov(&parse_edge_list("a b\nb c\nc a").unwrap(), "a", "b").is_err());
    }
}
