//! Extremal anomaly detection: can deleting edges from a prescribed set push the
//! curvature past a target, and with how few deletions?
//!
//! For the geometric measure the decision goes through a minimum s-t cut and the
//! optimisation through an LP relaxation with threshold rounding. An exhaustive
//! oracle covers every measure.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cycles::{curvature_from_count, enumerate_cycles, CycleCatalog};
use crate::error::{Error, Result};
use crate::flow::{max_flow, Capacity, FlowNetwork};
use crate::graph::{EdgeSet, Graph};
use crate::lp::{self, LpStatus, Rat};
use crate::measure::Measure;

pub const DEFAULT_EXACT_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Target above the current curvature.
    Increase,
    /// Target below the current curvature.
    Decrease,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "increase" => Ok(Direction::Increase),
            "decrease" => Ok(Direction::Decrease),
            _ => Err(Error::InvalidParameter(format!("direction must be increase or decrease, got {s:?}"))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Increase => "increase",
            Direction::Decrease => "decrease",
        })
    }
}

#[derive(Debug, Clone)]
pub struct EadpInstance {
    graph: Graph,
    tilde: EdgeSet,
    tilde_ids: Vec<usize>,
    gamma: i64,
    direction: Direction,
    measure: Measure,
    base: Rational64,
    catalog: Option<CycleCatalog>,
}

impl EadpInstance {
    pub fn new(graph: Graph, tilde: EdgeSet, gamma: i64, direction: Direction, measure: Measure) -> Result<Self> {
        let tilde_ids = graph.edge_ids_of(&tilde)?;
        if !graph.is_connected() {
            return Err(Error::InvalidInstance("graph is not connected".into()));
        }
        if !graph.remove_edge_ids(&tilde_ids).is_connected() {
            return Err(Error::InvalidInstance("graph minus the removable set is not connected".into()));
        }
        let catalog = match measure {
            Measure::Geometric { d } => Some(enumerate_cycles(&graph, d)?),
            _ => None,
        };
        let base = match &catalog {
            Some(c) => curvature_from_count(graph.n(), graph.m(), c.count()).into(),
            None => measure.evaluate(&graph)?,
        };
        let g = Rational64::from(gamma);
        let ok = match direction {
            Direction::Increase => g > base,
            Direction::Decrease => g < base,
        };
        if !ok {
            return Err(Error::InvalidInstance(format!(
                "gamma {gamma} is not on the {direction} side of the current curvature {base}"
            )));
        }
        Ok(EadpInstance { graph, tilde, tilde_ids, gamma, direction, measure, base, catalog })
    }

    /// Geometric measure with the direction read off the sign of γ − 𝔠(G).
    pub fn geometric(graph: Graph, tilde: EdgeSet, gamma: i64, d: usize) -> Result<Self> {
        let c = crate::cycles::geometric_curvature(&graph, d)?;
        let direction = match gamma.cmp(&c) {
            std::cmp::Ordering::Greater => Direction::Increase,
            std::cmp::Ordering::Less => Direction::Decrease,
            std::cmp::Ordering::Equal => {
                return Err(Error::InvalidInstance(format!("gamma equals the current curvature {c}")))
            }
        };
        Self::new(graph, tilde, gamma, direction, Measure::Geometric { d })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn tilde(&self) -> &EdgeSet {
        &self.tilde
    }

    /// Edge ids of Ẽ in label order.
    pub fn tilde_ids(&self) -> &[usize] {
        &self.tilde_ids
    }

    pub fn gamma(&self) -> i64 {
        self.gamma
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn base_curvature(&self) -> Rational64 {
        self.base
    }

    fn catalog(&self) -> Result<&CycleCatalog> {
        self.catalog.as_ref().ok_or_else(|| {
            Error::Unsupported(format!(
                "{} measure: only the geometric measure has a cut formulation",
                self.measure.name()
            ))
        })
    }

    fn base_int(&self) -> i64 {
        self.base.to_integer()
    }

    /// Δ: number of cycles in the catalog.
    pub fn delta(&self) -> Result<usize> {
        Ok(self.catalog()?.count())
    }

    /// Δ′: cycles through at least one edge of Ẽ.
    pub fn delta_prime(&self) -> Result<usize> {
        Ok(self.catalog()?.cycles_hit(&self.tilde_ids).len())
    }

    fn meets(&self, value: Rational64) -> bool {
        let g = Rational64::from(self.gamma);
        match self.direction {
            Direction::Increase => value >= g,
            Direction::Decrease => value <= g,
        }
    }

    /// Curvature after deleting the given edge ids, recomputed from scratch.
    pub fn curvature_without(&self, ids: &[usize]) -> Result<Rational64> {
        self.measure.evaluate(&self.graph.remove_edge_ids(ids))
    }

    fn tilde_pos_to_set(&self, pos: &[usize]) -> EdgeSet {
        self.graph.edge_set_from_ids(pos.iter().map(|&i| self.tilde_ids[i]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "edges", rename_all = "snake_case")]
pub enum EasyCase {
    Infeasible,
    Trivial(EdgeSet),
    NeedsCut,
}

pub fn classify_easy_cases(inst: &EadpInstance) -> Result<EasyCase> {
    let cat = inst.catalog()?;
    let n = inst.graph.n() as i64;
    let m = inst.graph.m() as i64;
    let t = inst.tilde_ids.len() as i64;
    let delta = cat.count() as i64;
    let delta_p = cat.cycles_hit(&inst.tilde_ids).len() as i64;
    let gamma = inst.gamma;
    match inst.direction {
        Direction::Increase => {
            if gamma > n - (m - t) + delta {
                return Ok(EasyCase::Infeasible);
            }
            if delta_p == 0 {
                // Deleting any m₁ edges of Ẽ raises the curvature by exactly m₁.
                let m1 = (gamma - inst.base_int()) as usize;
                let pos: Vec<usize> = (0..m1).collect();
                return Ok(EasyCase::Trivial(inst.tilde_pos_to_set(&pos)));
            }
            Ok(EasyCase::NeedsCut)
        }
        Direction::Decrease => {
            // With Δ′ = 0 no deletion can lower the curvature; this rule covers it.
            if gamma < n - m + 1 + delta - delta_p {
                return Ok(EasyCase::Infeasible);
            }
            Ok(EasyCase::NeedsCut)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeRole {
    Source,
    Sink,
    /// Position in Ẽ.
    EdgeNode(usize),
    /// Cycle id in the catalog.
    CycleNode(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcRole {
    /// Unit arc touching an edge-node and a terminal.
    EdgeArc,
    /// Unit arc touching a cycle-node and a terminal.
    CycleArc,
    /// Infinite arc between an edge-node and a cycle-node.
    Link,
}

/// The cut network with its threshold Γ. Node 0 is the source, node 1 the sink.
#[derive(Debug, Clone, Serialize)]
pub struct CutNetwork {
    pub flow: FlowNetwork,
    pub node_roles: Vec<NodeRole>,
    pub arc_roles: Vec<ArcRole>,
    pub threshold: i64,
    pub direction: Direction,
    /// Network node of each Ẽ position.
    pub edge_nodes: Vec<usize>,
    /// Labels of each Ẽ position.
    pub edge_labels: Vec<(String, String)>,
    /// Catalog ids of the cycle-nodes, in node order.
    pub cycle_ids: Vec<usize>,
}

impl CutNetwork {
    pub fn num_edge_nodes(&self) -> usize {
        self.edge_nodes.len()
    }

    pub fn num_cycle_nodes(&self) -> usize {
        self.cycle_ids.len()
    }

    pub fn edge_set(&self, positions: impl IntoIterator<Item = usize>) -> EdgeSet {
        positions.into_iter().map(|i| (self.edge_labels[i].0.as_str(), self.edge_labels[i].1.as_str())).collect()
    }

    /// Finite stand-in for infinite capacities, above any cut worth considering.
    pub fn surrogate(&self) -> i64 {
        self.threshold.max(0) + self.num_edge_nodes() as i64 + self.num_cycle_nodes() as i64 + 1
    }
}

pub fn build_cut_network(inst: &EadpInstance) -> Result<CutNetwork> {
    let cat = inst.catalog()?;
    let hit = cat.cycles_hit(&inst.tilde_ids);
    let te = inst.tilde_ids.len();
    let (s, t) = (0, 1);
    let mut flow = FlowNetwork::new(2 + te + hit.len(), s, t)?;
    let mut node_roles = vec![NodeRole::Source, NodeRole::Sink];
    node_roles.extend((0..te).map(NodeRole::EdgeNode));
    node_roles.extend(hit.iter().map(|&c| NodeRole::CycleNode(c)));
    let edge_node = |i: usize| 2 + i;
    let cycle_node = |k: usize| 2 + te + k;
    let mut pos_of_edge = std::collections::HashMap::new();
    for (i, &e) in inst.tilde_ids.iter().enumerate() {
        pos_of_edge.insert(e, i);
    }
    let mut arc_roles = Vec::new();
    let unit = Capacity::Finite(1);
    let inc = inst.direction == Direction::Increase;
    for i in 0..te {
        if inc {
            flow.add_arc(s, edge_node(i), unit);
        } else {
            flow.add_arc(edge_node(i), t, unit);
        }
        arc_roles.push(ArcRole::EdgeArc);
    }
    for k in 0..hit.len() {
        if inc {
            flow.add_arc(cycle_node(k), t, unit);
        } else {
            flow.add_arc(s, cycle_node(k), unit);
        }
        arc_roles.push(ArcRole::CycleArc);
    }
    for (k, &c) in hit.iter().enumerate() {
        for e in cat.cycle_edges(c) {
            if let Some(&i) = pos_of_edge.get(e) {
                if inc {
                    flow.add_arc(edge_node(i), cycle_node(k), Capacity::Infinite);
                } else {
                    flow.add_arc(cycle_node(k), edge_node(i), Capacity::Infinite);
                }
                arc_roles.push(ArcRole::Link);
            }
        }
    }
    let c = inst.base_int();
    let threshold = match inst.direction {
        Direction::Increase => c - inst.gamma + te as i64,
        Direction::Decrease => inst.gamma - c + hit.len() as i64,
    };
    let g = &inst.graph;
    let edge_labels = inst
        .tilde_ids
        .iter()
        .map(|&e| {
            let (a, b) = g.edges()[e];
            let (a, b) = (g.label(a).to_string(), g.label(b).to_string());
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    Ok(CutNetwork {
        flow,
        node_roles,
        arc_roles,
        threshold,
        direction: inst.direction,
        edge_nodes: (0..te).map(edge_node).collect(),
        edge_labels,
        cycle_ids: hit,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub easy_case: Option<EasyCase>,
    pub cut_value: Option<i128>,
    pub threshold: Option<i64>,
    pub witness: Option<EdgeSet>,
}

/// Decides feasibility by the easy-case rules, then by comparing the minimum
/// cut Φ with Γ. A feasible verdict carries the witness {e : u_e on the source side}.
pub fn eadp_feasible(inst: &EadpInstance) -> Result<Feasibility> {
    match classify_easy_cases(inst)? {
        EasyCase::Infeasible => {
            return Ok(Feasibility {
                feasible: false,
                easy_case: Some(EasyCase::Infeasible),
                cut_value: None,
                threshold: None,
                witness: None,
            })
        }
        EasyCase::Trivial(set) => {
            verify(inst, &set)?;
            return Ok(Feasibility {
                feasible: true,
                easy_case: Some(EasyCase::Trivial(set.clone())),
                cut_value: None,
                threshold: None,
                witness: Some(set),
            });
        }
        EasyCase::NeedsCut => {}
    }
    let net = build_cut_network(inst)?;
    let cut = max_flow(&net.flow)?;
    if cut.cut_arcs.iter().any(|&a| net.arc_roles[a] == ArcRole::Link) {
        return Err(Error::Internal("minimum cut contains an infinite arc".into()));
    }
    let feasible = cut.flow_value <= net.threshold as i128;
    let witness = if feasible {
        let side = cut.side_mask(net.flow.n());
        let set = net.edge_set((0..net.num_edge_nodes()).filter(|&i| side[net.edge_nodes[i]]));
        verify(inst, &set)?;
        Some(set)
    } else {
        None
    };
    Ok(Feasibility {
        feasible,
        easy_case: Some(EasyCase::NeedsCut),
        cut_value: Some(cut.flow_value),
        threshold: Some(net.threshold),
        witness,
    })
}

fn verify(inst: &EadpInstance, set: &EdgeSet) -> Result<Rational64> {
    let ids = inst.graph.edge_ids_of(set)?;
    let v = inst.curvature_without(&ids)?;
    if !inst.meets(v) {
        return Err(Error::Internal(format!(
            "witness {set} gives curvature {v}, which misses gamma {} ({})",
            inst.gamma, inst.direction
        )));
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Infeasible,
    /// Produced by an easy-case rule.
    Trivial,
    /// Meets the target.
    Solved,
    /// Rounded LP output that misses the target.
    Approximate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    EasyCase,
    Exhaustive {
        subsets_examined: u64,
    },
    Lp {
        kappa: usize,
        #[serde(serialize_with = "crate::measure::ser_ratio")]
        lp_objective: Rational64,
        threshold: i64,
        /// (κ, LP optimum) for every κ evaluated.
        trace: Vec<(usize, String)>,
    },
    /// No κ brings the LP optimum down to the threshold.
    LpExhausted {
        threshold: i64,
        trace: Vec<(usize, String)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EadpOutcome {
    pub kind: OutcomeKind,
    pub edges: EdgeSet,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub achieved_curvature: Option<Rational64>,
    pub certificate: Certificate,
}

fn ser_opt_ratio<S: serde::Serializer>(r: &Option<Rational64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => crate::measure::ser_ratio(r, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxReport {
    pub outcome: EadpOutcome,
    pub precondition_met: bool,
    pub warnings: Vec<String>,
}

/// Whether γ satisfies the approximation precondition for `eps`:
/// increase `γ ≥ 𝔠 + (1/2 + ε)(2|Ẽ| − |E|)`, decrease `γ ≥ 𝔠 − Δ′/(1 + ε)`.
pub fn approx_precondition(inst: &EadpInstance, eps: Rational64) -> Result<bool> {
    let c = inst.base;
    let g = Rational64::from(inst.gamma);
    Ok(match inst.direction {
        Direction::Increase => {
            let span = 2 * inst.tilde_ids.len() as i64 - inst.graph.m() as i64;
            g >= c + (Rational64::new(1, 2) + eps) * span
        }
        Direction::Decrease => {
            let dp = inst.delta_prime()? as i64;
            g >= c - Rational64::from(dp) / (Rational64::from(1) + eps)
        }
    })
}

fn to_r64(r: &Rat) -> Result<Rational64> {
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(p), Some(q)) => Ok(Rational64::new(p, q)),
        _ => Err(Error::Internal(format!("LP value {r} does not fit in 64 bits"))),
    }
}

/// Optimum of the κ-polytope for this network (the solver never reports
/// infeasibility here: every κ in range admits a point).
pub fn lp_value(net: &CutNetwork, kappa: usize) -> Result<(Rat, lp::LpSolution, lp::Polytope)> {
    let poly = match net.direction {
        Direction::Increase => lp::build_increase_polytope(net, kappa)?,
        Direction::Decrease => lp::build_decrease_polytope(net, kappa)?,
    };
    let sol = lp::solve_lp(&poly.problem)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Internal(format!("polytope infeasible at kappa = {kappa}")));
    }
    Ok((sol.objective.clone(), sol, poly))
}

/// LP optimum per κ probed, in probe order.
pub type KappaTrace = Vec<(usize, Rat)>;

/// Least κ in 1..=|Ẽ| whose LP optimum is at most Γ, by binary search.
///
/// The optimum is convex in κ, so "LP(κ) ≤ Γ or LP(κ+1) ≥ LP(κ)" is monotone and
/// its first true κ is the answer whenever one exists.
pub fn kappa_binary_search(net: &CutNetwork) -> Result<(Option<usize>, KappaTrace)> {
    let k_max = net.num_edge_nodes();
    let gamma = lp::int(net.threshold);
    type Memo = std::collections::BTreeMap<usize, Rat>;
    let mut memo = Memo::new();
    let value = |k: usize, memo: &mut Memo| -> Result<Rat> {
        if let Some(v) = memo.get(&k) {
            return Ok(v.clone());
        }
        let v = lp_value(net, k)?.0;
        memo.insert(k, v.clone());
        Ok(v)
    };
    if k_max == 0 {
        return Ok((None, Vec::new()));
    }
    let (mut lo, mut hi) = (1usize, k_max);
    while lo < hi {
        let mid = (lo + hi) / 2;
        let v = value(mid, &mut memo)?;
        let q = v <= gamma || value(mid + 1, &mut memo)? >= v;
        if q {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let v = value(lo, &mut memo)?;
    let found = (v <= gamma).then_some(lo);
    Ok((found, memo.into_iter().collect()))
}

/// Least κ by scanning 1..=|Ẽ| in order.
pub fn kappa_linear_scan(net: &CutNetwork) -> Result<Option<usize>> {
    let gamma = lp::int(net.threshold);
    for k in 1..=net.num_edge_nodes() {
        if lp_value(net, k)?.0 <= gamma {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// LP rounding with the κ search. Returns the rounded edge set with its recounted
/// curvature; guarantees are claimed only when the precondition holds.
pub fn eadp_approx(inst: &EadpInstance, eps: Rational64) -> Result<ApproxReport> {
    if !inst.measure.is_geometric() {
        return Err(Error::Unsupported("approximation is only available for the geometric measure".into()));
    }
    if eps <= Rational64::zero() {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let precondition_met = approx_precondition(inst, eps)?;
    let mut warnings = Vec::new();
    if !precondition_met {
        warnings.push(format!("gamma {} fails the precondition for epsilon {eps}; no guarantee applies", inst.gamma));
    }
    match classify_easy_cases(inst)? {
        EasyCase::Infeasible => {
            return Ok(ApproxReport {
                outcome: EadpOutcome {
                    kind: OutcomeKind::Infeasible,
                    edges: EdgeSet::new(),
                    achieved_curvature: None,
                    certificate: Certificate::EasyCase,
                },
                precondition_met,
                warnings,
            })
        }
        EasyCase::Trivial(set) => {
            let v = verify(inst, &set)?;
            return Ok(ApproxReport {
                outcome: EadpOutcome {
                    kind: OutcomeKind::Trivial,
                    edges: set,
                    achieved_curvature: Some(v),
                    certificate: Certificate::EasyCase,
                },
                precondition_met,
                warnings,
            });
        }
        EasyCase::NeedsCut => {}
    }
    let net = build_cut_network(inst)?;
    let (kappa, trace) = kappa_binary_search(&net)?;
    let Some(kappa) = kappa else {
        if net.direction == Direction::Decrease {
            warnings.push("the decrease cut may miss feasible deletion sets; confirm with --exact".into());
        }
        return Ok(ApproxReport {
            outcome: EadpOutcome {
                kind: OutcomeKind::Infeasible,
                edges: EdgeSet::new(),
                achieved_curvature: None,
                certificate: Certificate::LpExhausted {
                    threshold: net.threshold,
                    trace: trace.iter().map(|(k, v)| (*k, v.to_string())).collect(),
                },
            },
            precondition_met,
            warnings,
        });
    };
    let (obj, sol, poly) = lp_value(&net, kappa)?;
    let link_positive =
        poly.arc_var.iter().enumerate().any(|(a, &v)| net.arc_roles[a] == ArcRole::Link && !sol.values[v].is_zero());
    if link_positive {
        return Err(Error::Internal("LP optimum puts weight on an infinite arc".into()));
    }
    let edges = match net.direction {
        Direction::Increase => lp::round_increase(&sol, &poly, &net),
        Direction::Decrease => lp::round_decrease(&sol, &poly, &net)?,
    };
    if edges.len() > 2 * kappa {
        return Err(Error::Internal(format!("rounded set has {} edges, more than 2 * {kappa}", edges.len())));
    }
    let ids = inst.graph.edge_ids_of(&edges)?;
    let achieved = inst.curvature_without(&ids)?;
    let kind = if inst.meets(achieved) { OutcomeKind::Solved } else { OutcomeKind::Approximate };
    let trace = trace.into_iter().map(|(k, v)| (k, v.to_string())).collect();
    Ok(ApproxReport {
        outcome: EadpOutcome {
            kind,
            edges,
            achieved_curvature: Some(achieved),
            certificate: Certificate::Lp { kappa, lp_objective: to_r64(&obj)?, threshold: net.threshold, trace },
        },
        precondition_met,
        warnings,
    })
}

/// Exhaustive search over subsets of Ẽ in increasing size, lexicographic within
/// a size. Works for every measure.
pub fn eadp_exact(inst: &EadpInstance, size_cap: usize) -> Result<EadpOutcome> {
    let te = inst.tilde_ids.len();
    if te > size_cap {
        return Err(Error::CapExceeded { size: te, cap: size_cap });
    }
    let mut examined = 0u64;
    let fast = inst.catalog.as_ref();
    let mut hit = vec![false; fast.map_or(0, |c| c.count())];
    for k in 1..=te {
        for combo in (0..te).combinations(k) {
            examined += 1;
            let ids: Vec<usize> = combo.iter().map(|&i| inst.tilde_ids[i]).collect();
            let value = match fast {
                Some(cat) => {
                    hit.fill(false);
                    let mut removed = 0i64;
                    for &e in &ids {
                        for &c in cat.cycles_through(e) {
                            if !hit[c] {
                                hit[c] = true;
                                removed += 1;
                            }
                        }
                    }
                    Rational64::from(inst.base_int() + k as i64 - removed)
                }
                None => inst.curvature_without(&ids)?,
            };
            if inst.meets(value) {
                return Ok(EadpOutcome {
                    kind: OutcomeKind::Solved,
                    edges: inst.tilde_pos_to_set(&combo),
                    achieved_curvature: Some(value),
                    certificate: Certificate::Exhaustive { subsets_examined: examined },
                });
            }
        }
    }
    Ok(EadpOutcome {
        kind: OutcomeKind::Infeasible,
        edges: EdgeSet::new(),
        achieved_curvature: None,
        certificate: Certificate::Exhaustive { subsets_examined: examined },
    })
}
