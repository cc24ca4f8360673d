//! Bounded-length simple cycles and the geometric curvature built on them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeSet, Graph};

pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

/// All simple cycles with at most `max_nodes` nodes.
///
/// Each cycle is stored once, starting at its smallest node id and oriented so
/// the second node is smaller than the last.
#[derive(Debug, Clone)]
pub struct CycleCatalog {
    max_nodes: usize,
    cycles: Vec<Vec<usize>>,
    cycle_edges: Vec<Vec<usize>>,
    per_edge: Vec<Vec<usize>>,
}

impl CycleCatalog {
    pub fn max_nodes(&self) -> usize {
        self.max_nodes
    }

    pub fn count(&self) -> usize {
        self.cycles.len()
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// Edge ids of cycle `c`, sorted.
    pub fn cycle_edges(&self, c: usize) -> &[usize] {
        &self.cycle_edges[c]
    }

    /// Ids of the cycles through edge `e`.
    pub fn cycles_through(&self, e: usize) -> &[usize] {
        &self.per_edge[e]
    }

    /// Cycles containing at least one of the given edges, sorted.
    pub fn cycles_hit(&self, edge_ids: &[usize]) -> Vec<usize> {
        let mut hit = vec![false; self.count()];
        for &e in edge_ids {
            for &c in &self.per_edge[e] {
                hit[c] = true;
            }
        }
        (0..self.count()).filter(|&c| hit[c]).collect()
    }

    pub fn cycle_labels<'g>(&self, g: &'g Graph, c: usize) -> Vec<&'g str> {
        self.cycles[c].iter().map(|&v| g.label(v)).collect()
    }
}

pub fn enumerate_cycles(g: &Graph, d: usize) -> Result<CycleCatalog> {
    enumerate_cycles_capped(g, d, DEFAULT_CYCLE_CAP)
}

pub fn enumerate_cycles_capped(g: &Graph, d: usize, cap: usize) -> Result<CycleCatalog> {
    if d < 3 {
        return Err(Error::InvalidParameter(format!("cycle bound d must be at least 3, got {d}")));
    }
    let n = g.n();
    let mut cycles = Vec::new();
    let mut on_path = vec![false; n];
    let mut path = Vec::with_capacity(d);
    for root in 0..n {
        path.push(root);
        on_path[root] = true;
        extend(g, d, cap, root, &mut path, &mut on_path, &mut cycles)?;
        on_path[root] = false;
        path.pop();
    }
    let mut per_edge = vec![Vec::new(); g.m()];
    let mut cycle_edges = Vec::with_capacity(cycles.len());
    for (c, cyc) in cycles.iter().enumerate() {
        let k = cyc.len();
        let mut es: Vec<usize> =
            (0..k).map(|i| g.edge_id(cyc[i], cyc[(i + 1) % k]).expect("cycle edge present")).collect();
        es.sort_unstable();
        for &e in &es {
            per_edge[e].push(c);
        }
        cycle_edges.push(es);
    }
    Ok(CycleCatalog { max_nodes: d, cycles, cycle_edges, per_edge })
}

fn extend(
    g: &Graph,
    d: usize,
    cap: usize,
    root: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    let last = *path.last().unwrap();
    for &w in g.neighbors(last) {
        if w <= root || on_path[w] {
            continue;
        }
        path.push(w);
        if path.len() >= 3 && path[1] < w && g.has_edge(w, root) {
            if out.len() >= cap {
                return Err(Error::CycleOverflow(cap));
            }
            out.push(path.clone());
        }
        if path.len() < d {
            on_path[w] = true;
            extend(g, d, cap, root, path, on_path, out)?;
            on_path[w] = false;
        }
        path.pop();
    }
    Ok(())
}

/// 𝔠²_d = |V| − |E| + number of cycles with at most `d` nodes.
pub fn geometric_curvature(g: &Graph, d: usize) -> Result<i64> {
    let cat = enumerate_cycles(g, d)?;
    Ok(curvature_from_count(g.n(), g.m(), cat.count()))
}

pub fn curvature_from_count(n: usize, m: usize, cycles: usize) -> i64 {
    n as i64 - m as i64 + cycles as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurvatureValue {
    pub p: u8,
    pub d: usize,
    pub value: i64,
}

/// Alternating face count truncated at order `p` (0, 1 or 2).
pub fn euler_characteristic(g: &Graph, d: usize, p: u8) -> Result<CurvatureValue> {
    let value = match p {
        0 => g.n() as i64,
        1 => g.n() as i64 - g.m() as i64,
        2 => geometric_curvature(g, d)?,
        _ => return Err(Error::Unsupported(format!("face order p = {p}; only p <= 2 is implemented"))),
    };
    Ok(CurvatureValue { p, d, value })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DeletionCurvature {
    pub value: i64,
    pub m1: usize,
    pub delta1: usize,
}

/// Curvature of `G ∖ E₁`, recomputed from scratch and checked against
/// 𝔠(G) + m₁ − Δ₁.
pub fn curvature_after_deletion(g: &Graph, d: usize, e1: &EdgeSet) -> Result<DeletionCurvature> {
    let ids = g.edge_ids_of(e1)?;
    let cat = enumerate_cycles(g, d)?;
    let delta1 = cat.cycles_hit(&ids).len();
    let before = curvature_from_count(g.n(), g.m(), cat.count());
    let value = geometric_curvature(&g.remove_edge_ids(&ids), d)?;
    let predicted = before + ids.len() as i64 - delta1 as i64;
    if value != predicted {
        return Err(Error::Internal(format!("deletion identity failed: recount {value}, predicted {predicted}")));
    }
    Ok(DeletionCurvature { value, m1: ids.len(), delta1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;

    fn k4() -> Graph {
        parse_edge_list("1 2\n1 3\n1 4\n2 3\n2 4\n3 4").unwrap()
    }

    #[test]
    fn counts_on_cliques() {
        let k3 = parse_edge_list("a b\nb c\nc a").unwrap();
        assert_eq!(enumerate_cycles(&k3, 3).unwrap().count(), 1);
        assert_eq!(enumerate_cycles(&k4(), 3).unwrap().count(), 4);
        assert_eq!(enumerate_cycles(&k4(), 4).unwrap().count(), 7);
        assert!(matches!(enumerate_cycles(&k3, 2), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn canonical_form() {
        let cat = enumerate_cycles(&k4(), 4).unwrap();
        for c in cat.cycles() {
            assert_eq!(c[0], *c.iter().min().unwrap());
            assert!(c[1] < c[c.len() - 1]);
        }
    }

    #[test]
    fn euler_orders() {
        let g = k4();
        assert_eq!(euler_characteristic(&g, 3, 0).unwrap().value, 4);
        assert_eq!(euler_characteristic(&g, 3, 1).unwrap().value, -2);
        assert_eq!(euler_characteristic(&g, 3, 2).unwrap().value, 2);
        assert!(matches!(euler_characteristic(&g, 3, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn deletion_on_k4() {
        let g = k4();
        let one: EdgeSet = [("1", "2")].into_iter().collect();
        let r = curvature_after_deletion(&g, 3, &one).unwrap();
        assert_eq!(r, DeletionCurvature { value: 1, m1: 1, delta1: 2 });
        let none = curvature_after_deletion(&g, 3, &EdgeSet::new()).unwrap();
        assert_eq!(none.value, 2);
    }

    #[test]
    fn tree_has_unit_curvature() {
        let t = parse_edge_list("a b\nb c\nb d\nd e").unwrap();
        for d in 3..6 {
            assert_eq!(geometric_curvature(&t, d).unwrap(), 1);
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(enumerate_cycles_capped(&k4(), 4, 5), Err(Error::CycleOverflow(5))));
    }
}
