//! Targeted anomaly detection: the fewest edges of E₁ ∖ E₂ whose deletion brings
//! the curvature of G₁ to exactly that of G₂.

use itertools::Itertools;
use num_rational::Rational64;
use num_traits::Signed;
use serde::Serialize;

use crate::cycles::{curvature_from_count, enumerate_cycles, CycleCatalog};
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, Graph};
use crate::measure::Measure;

pub const DEFAULT_TADP_CAP: usize = 22;

#[derive(Debug, Clone)]
pub struct TadpInstance {
    g1: Graph,
    g2: Graph,
    measure: Measure,
    /// Edge ids of G₁ not present in G₂, ascending.
    diff: Vec<usize>,
    c1: Rational64,
    c2: Rational64,
    catalog: Option<CycleCatalog>,
}

impl TadpInstance {
    pub fn new(g1: Graph, g2: Graph, measure: Measure) -> Result<Self> {
        let mut l1: Vec<&String> = g1.labels().iter().collect();
        let mut l2: Vec<&String> = g2.labels().iter().collect();
        l1.sort();
        l2.sort();
        if l1 != l2 {
            return Err(Error::InvalidInstance("G1 and G2 have different node sets".into()));
        }
        let e2 = g2.edge_set();
        let e1 = g1.edge_set();
        if !e2.is_subset(&e1) {
            return Err(Error::InvalidInstance("E2 is not contained in E1".into()));
        }
        if e2.len() == e1.len() {
            return Err(Error::InvalidInstance("E2 must be a strict subset of E1".into()));
        }
        if !g1.is_connected() || !g2.is_connected() {
            return Err(Error::InvalidInstance("G1 and G2 must both be connected".into()));
        }
        let diff: Vec<usize> = g1
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| !e2.contains(g1.label(a), g1.label(b)))
            .map(|(i, _)| i)
            .collect();
        let catalog = match measure {
            Measure::Geometric { d } => Some(enumerate_cycles(&g1, d)?),
            _ => None,
        };
        let c1 = match &catalog {
            Some(c) => curvature_from_count(g1.n(), g1.m(), c.count()).into(),
            None => measure.evaluate(&g1)?,
        };
        let c2 = measure.evaluate(&g2)?;
        Ok(TadpInstance { g1, g2, measure, diff, c1, c2, catalog })
    }

    pub fn g1(&self) -> &Graph {
        &self.g1
    }

    pub fn g2(&self) -> &Graph {
        &self.g2
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    /// E₁ ∖ E₂ as edge ids of G₁.
    pub fn removable_ids(&self) -> &[usize] {
        &self.diff
    }

    pub fn removable(&self) -> EdgeSet {
        self.g1.edge_set_from_ids(self.diff.iter().copied())
    }

    pub fn curvature_g1(&self) -> Rational64 {
        self.c1
    }

    /// The target 𝔠(G₂).
    pub fn target(&self) -> Rational64 {
        self.c2
    }

    /// Curvature of G₁ minus the given edge ids; `None` when the measure is
    /// undefined because the deletion disconnects the graph.
    pub fn curvature_without(&self, ids: &[usize]) -> Result<Option<Rational64>> {
        if let Some(cat) = &self.catalog {
            let hit = cat.cycles_hit(ids).len();
            return Ok(Some(Rational64::from(self.c1.to_integer() + ids.len() as i64 - hit as i64)));
        }
        let h = self.g1.remove_edge_ids(ids);
        if !h.is_connected() {
            return Ok(None);
        }
        self.measure.evaluate(&h).map(Some)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TadpMethod {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TadpOutcome {
    pub method: TadpMethod,
    /// `None` when no deletion set reaches the target.
    pub edges: Option<EdgeSet>,
    #[serde(serialize_with = "crate::measure::ser_ratio")]
    pub target: Rational64,
    /// Subsets (exact) or candidate evaluations (greedy).
    pub evaluations: u64,
}

impl TadpOutcome {
    pub fn found(&self) -> bool {
        self.edges.is_some()
    }

    pub fn size(&self) -> Option<usize> {
        self.edges.as_ref().map(EdgeSet::len)
    }
}

/// Exhaustive search by increasing cardinality, ascending edge ids within a
/// cardinality. For the geometric measure only sizes compatible with the
/// deletion identity are examined.
pub fn tadp_exact(inst: &TadpInstance, size_cap: usize) -> Result<TadpOutcome> {
    let r = inst.diff.len();
    if r > size_cap {
        return Err(Error::CapExceeded { size: r, cap: size_cap });
    }
    let mut evaluations = 0u64;
    let band = inst.catalog.as_ref().map(|cat| {
        let delta_prime = cat.cycles_hit(&inst.diff).len() as i64;
        // m₁ − Δ₁ = 𝔠(G₂) − 𝔠(G₁) with 0 ≤ Δ₁ ≤ Δ′.
        let shift = (inst.c2 - inst.c1).to_integer();
        (shift, delta_prime)
    });
    for k in 0..=r {
        if let Some((shift, dp)) = band {
            let need = k as i64 - shift;
            if need < 0 || need > dp {
                continue;
            }
        }
        for combo in (0..r).combinations(k) {
            evaluations += 1;
            let ids: Vec<usize> = combo.iter().map(|&i| inst.diff[i]).collect();
            if inst.curvature_without(&ids)? == Some(inst.c2) {
                return Ok(TadpOutcome {
                    method: TadpMethod::Exact,
                    edges: Some(inst.g1.edge_set_from_ids(ids)),
                    target: inst.c2,
                    evaluations,
                });
            }
        }
    }
    Ok(TadpOutcome { method: TadpMethod::Exact, edges: None, target: inst.c2, evaluations })
}

/// Repeatedly deletes the edge that brings the curvature closest to the target,
/// preferring the smallest edge id on ties; fails when no deletion gets closer.
pub fn tadp_greedy(inst: &TadpInstance) -> Result<TadpOutcome> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut current = inst.c1;
    let mut evaluations = 0u64;
    loop {
        if current == inst.c2 {
            return Ok(TadpOutcome {
                method: TadpMethod::Greedy,
                edges: Some(inst.g1.edge_set_from_ids(chosen)),
                target: inst.c2,
                evaluations,
            });
        }
        let gap = (current - inst.c2).abs();
        let mut best: Option<(Rational64, usize, Rational64)> = None;
        for &e in &inst.diff {
            if chosen.contains(&e) {
                continue;
            }
            let mut ids = chosen.clone();
            ids.push(e);
            evaluations += 1;
            let Some(v) = inst.curvature_without(&ids)? else { continue };
            let g = (v - inst.c2).abs();
            if g < gap && best.as_ref().is_none_or(|(bg, _, _)| g < *bg) {
                best = Some((g, e, v));
            }
        }
        match best {
            Some((_, e, v)) => {
                chosen.push(e);
                current = v;
            }
            None => return Ok(TadpOutcome { method: TadpMethod::Greedy, edges: None, target: inst.c2, evaluations }),
        }
    }
}

/// 𝔠(G₁) − 𝔠(G₂).
pub fn curvature_gap(inst: &TadpInstance) -> Rational64 {
    inst.c1 - inst.c2
}

/// Checks a proposed deletion set against the target by recomputing from scratch.
pub fn verify_deletion(inst: &TadpInstance, e3: &EdgeSet) -> Result<bool> {
    let ids = inst.g1.edge_ids_of(e3)?;
    if ids.iter().any(|e| !inst.diff.contains(e)) {
        return Ok(false);
    }
    let h = inst.g1.remove_edge_ids(&ids);
    if !inst.measure.is_geometric() && !h.is_connected() {
        return Ok(false);
    }
    Ok(inst.measure.evaluate(&h)? == inst.c2)
}
