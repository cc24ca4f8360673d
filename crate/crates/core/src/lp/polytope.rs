//! Cut polytopes over a [`CutNetwork`] with a cardinality row, and their roundings.

use num_traits::{One, Zero};

use super::{int, rat, LpProblem, LpSolution, Rat, Relation};
use crate::eadp::{ArcRole, CutNetwork, Direction, NodeRole};
use crate::error::{Error, Result};
use crate::flow::Capacity;
use crate::graph::EdgeSet;

/// An LP together with the variable of each network node and arc.
#[derive(Debug, Clone)]
pub struct Polytope {
    pub problem: LpProblem,
    /// Potential variable per network node; `None` for the terminals.
    pub node_var: Vec<Option<usize>>,
    pub arc_var: Vec<usize>,
    /// Arc ids of each s-t path (decrease polytope only).
    pub paths: Vec<Vec<usize>>,
}

fn check_kappa(net: &CutNetwork, kappa: usize) -> Result<()> {
    if kappa > net.num_edge_nodes() {
        return Err(Error::InvalidParameter(format!("kappa {kappa} outside 0..={}", net.num_edge_nodes())));
    }
    Ok(())
}

fn arc_cost(net: &CutNetwork, cap: Capacity) -> Rat {
    match cap {
        Capacity::Finite(c) => int(c as i64),
        Capacity::Infinite => int(net.surrogate()),
    }
}

fn node_name(net: &CutNetwork, v: usize) -> String {
    match net.node_roles[v] {
        NodeRole::Source => "s".into(),
        NodeRole::Sink => "t".into(),
        NodeRole::EdgeNode(i) => format!("p_e{i}"),
        NodeRole::CycleNode(c) => format!("p_f{c}"),
    }
}

/// Potential formulation: `d_α ≥ p_from − p_to` per arc with `p_s = 1`, `p_t = 0`,
/// and `Σ p_{u_e} = κ`.
pub fn build_increase_polytope(net: &CutNetwork, kappa: usize) -> Result<Polytope> {
    if net.direction != Direction::Increase {
        return Err(Error::InvalidParameter("increase polytope needs an increase network".into()));
    }
    check_kappa(net, kappa)?;
    let flow = &net.flow;
    let mut lp = LpProblem::new();
    let mut node_var = vec![None; flow.n()];
    for (v, slot) in node_var.iter_mut().enumerate() {
        if v != flow.source() && v != flow.sink() {
            *slot = Some(lp.add_var(node_name(net, v)));
        }
    }
    let mut arc_var = Vec::with_capacity(flow.arcs().len());
    for (a, arc) in flow.arcs().iter().enumerate() {
        let d = lp.add_var(format!("d{a}"));
        lp.set_cost(d, arc_cost(net, arc.cap));
        arc_var.push(d);
    }
    for (a, arc) in flow.arcs().iter().enumerate() {
        // d − p_from + p_to ≥ 0, with the terminal potentials folded into the rhs.
        let mut coeffs = vec![(arc_var[a], Rat::one())];
        let mut rhs = Rat::zero();
        match node_var[arc.from] {
            Some(p) => coeffs.push((p, -Rat::one())),
            None if arc.from == flow.source() => rhs += Rat::one(),
            None => {}
        }
        match node_var[arc.to] {
            Some(p) => coeffs.push((p, Rat::one())),
            None if arc.to == flow.source() => rhs -= Rat::one(),
            None => {}
        }
        lp.add_constraint(coeffs, Relation::Ge, rhs)?;
    }
    let card = net.edge_nodes.iter().map(|&v| (node_var[v].unwrap(), Rat::one())).collect();
    lp.add_constraint(card, Relation::Eq, int(kappa as i64))?;
    Ok(Polytope { problem: lp, node_var, arc_var, paths: Vec::new() })
}

/// Path formulation: every s-t path carries total `d` at least 1, and
/// `Σ d_{(u_e, t)} = κ`.
pub fn build_decrease_polytope(net: &CutNetwork, kappa: usize) -> Result<Polytope> {
    if net.direction != Direction::Decrease {
        return Err(Error::InvalidParameter("decrease polytope needs a decrease network".into()));
    }
    check_kappa(net, kappa)?;
    let flow = &net.flow;
    let mut lp = LpProblem::new();
    let mut arc_var = Vec::with_capacity(flow.arcs().len());
    for (a, arc) in flow.arcs().iter().enumerate() {
        let d = lp.add_var(format!("d{a}"));
        lp.set_cost(d, arc_cost(net, arc.cap));
        arc_var.push(d);
    }
    let paths = st_paths(net)?;
    for p in &paths {
        lp.add_constraint(p.iter().map(|&a| (arc_var[a], Rat::one())).collect(), Relation::Ge, Rat::one())?;
    }
    let edge_arcs: Vec<(usize, Rat)> = flow
        .arcs()
        .iter()
        .enumerate()
        .filter(|(a, arc)| net.arc_roles[*a] == ArcRole::EdgeArc && arc.to == flow.sink())
        .map(|(a, _)| (arc_var[a], Rat::one()))
        .collect();
    lp.add_constraint(edge_arcs, Relation::Eq, int(kappa as i64))?;
    Ok(Polytope { problem: lp, node_var: vec![None; flow.n()], arc_var, paths })
}

/// All s-t paths as arc-id lists; each must have exactly three arcs.
fn st_paths(net: &CutNetwork) -> Result<Vec<Vec<usize>>> {
    let flow = &net.flow;
    let mut out_arcs = vec![Vec::new(); flow.n()];
    for (a, arc) in flow.arcs().iter().enumerate() {
        out_arcs[arc.from].push(a);
    }
    let mut paths = Vec::new();
    let mut stack = vec![(flow.source(), Vec::<usize>::new())];
    while let Some((v, path)) = stack.pop() {
        if v == flow.sink() {
            if path.len() != 3 {
                return Err(Error::Internal(format!("s-t path with {} arcs in the decrease network", path.len())));
            }
            paths.push(path);
            continue;
        }
        if path.len() >= flow.n() {
            return Err(Error::Internal("decrease network has a cycle".into()));
        }
        for &a in out_arcs[v].iter().rev() {
            let mut p = path.clone();
            p.push(a);
            stack.push((flow.arcs()[a].to, p));
        }
    }
    Ok(paths)
}

fn half() -> Rat {
    rat(1, 2)
}

/// `E₁ = {e : p*_{u_e} ≥ 1/2}`.
pub fn round_increase(sol: &LpSolution, poly: &Polytope, net: &CutNetwork) -> EdgeSet {
    let h = half();
    net.edge_set((0..net.num_edge_nodes()).filter(|&i| sol.values[poly.node_var[net.edge_nodes[i]].unwrap()] >= h))
}

/// `E′ = {α : d*_α ≥ 1/2}` must meet every s-t path; `E₁` = edges whose edge-arc is in `E′`.
pub fn round_decrease(sol: &LpSolution, poly: &Polytope, net: &CutNetwork) -> Result<EdgeSet> {
    let h = half();
    let chosen: Vec<bool> = poly.arc_var.iter().map(|&v| sol.values[v] >= h).collect();
    if let Some(p) = poly.paths.iter().find(|p| !p.iter().any(|&a| chosen[a])) {
        return Err(Error::Internal(format!("rounded arcs miss the s-t path {p:?}")));
    }
    let flow = &net.flow;
    let mut pos = Vec::new();
    for i in 0..net.num_edge_nodes() {
        let v = net.edge_nodes[i];
        let a = flow
            .arcs()
            .iter()
            .position(|arc| arc.from == v && arc.to == flow.sink())
            .ok_or_else(|| Error::Internal("edge-node without an edge-arc".into()))?;
        if chosen[a] {
            pos.push(i);
        }
    }
    Ok(net.edge_set(pos))
}
