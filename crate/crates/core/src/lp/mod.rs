//! Exact rational linear programming.
//!
//! A bounded-variable primal simplex over `BigRational` with Bland's rule. Every
//! variable lives in `[0, upper]` (upper bound optional). The optimum returned is
//! a basic solution, hence a vertex of the feasible region.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

mod polytope;

pub use polytope::{build_decrease_polytope, build_increase_polytope, round_decrease, round_increase, Polytope};

pub type Rat = BigRational;

pub fn rat(p: i64, q: i64) -> Rat {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rat {
    BigRational::from_integer(BigInt::from(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rat)>,
    pub relation: Relation,
    pub rhs: Rat,
}

/// Minimise `objective · x` subject to the constraints and `0 ≤ x ≤ upper`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LpProblem {
    names: Vec<String>,
    upper: Vec<Option<Rat>>,
    objective: Vec<Rat>,
    constraints: Vec<Constraint>,
}

impl LpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with bounds `[0, 1]`.
    pub fn add_var(&mut self, name: impl Into<String>) -> usize {
        self.add_bounded_var(name, Some(Rat::one()))
    }

    pub fn add_bounded_var(&mut self, name: impl Into<String>, upper: Option<Rat>) -> usize {
        self.names.push(name.into());
        self.upper.push(upper);
        self.objective.push(Rat::zero());
        self.names.len() - 1
    }

    pub fn set_cost(&mut self, var: usize, c: Rat) {
        self.objective[var] = c;
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, Rat)>, relation: Relation, rhs: Rat) -> Result<()> {
        if let Some(&(v, _)) = coeffs.iter().find(|(v, _)| *v >= self.names.len()) {
            return Err(Error::InvalidParameter(format!("constraint references undeclared variable {v}")));
        }
        self.constraints.push(Constraint { coeffs, relation, rhs });
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn upper(&self, v: usize) -> Option<&Rat> {
        self.upper[v].as_ref()
    }

    pub fn objective(&self) -> &[Rat] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// True when `x` satisfies every constraint and bound exactly.
    pub fn is_feasible(&self, x: &[Rat]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let bounds = x.iter().zip(&self.upper).all(|(v, u)| !v.is_negative() && u.as_ref().is_none_or(|u| v <= u));
        bounds
            && self.constraints.iter().all(|c| {
                let lhs: Rat = c.coeffs.iter().map(|(v, a)| a * &x[*v]).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            })
    }

    pub fn evaluate(&self, x: &[Rat]) -> Rat {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Text dump in the CPLEX LP layout, rationals written as `p/q`.
    pub fn to_lp_text(&self) -> String {
        let term = |c: &Rat, name: &str, first: bool| -> String {
            let sign = if c.is_negative() {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let a = c.abs();
            if a.is_one() {
                format!("{sign} {name}")
            } else {
                format!("{sign} {a} {name}")
            }
        };
        let mut out = String::from("Minimize\n obj:");
        let mut first = true;
        for (i, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                out.push_str(&term(c, &self.names[i], first));
                first = false;
            }
        }
        if first {
            out.push_str(" 0");
        }
        out.push_str("\nSubject To\n");
        for (k, c) in self.constraints.iter().enumerate() {
            let _ = write!(out, " c{k}:");
            for (j, (v, a)) in c.coeffs.iter().enumerate() {
                out.push_str(&term(a, &self.names[*v], j == 0));
            }
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Ge => ">=",
                Relation::Eq => "=",
            };
            let _ = writeln!(out, " {rel} {}", c.rhs);
        }
        out.push_str("Bounds\n");
        for (i, u) in self.upper.iter().enumerate() {
            match u {
                Some(u) => {
                    let _ = writeln!(out, " 0 <= {} <= {u}", self.names[i]);
                }
                None => {
                    let _ = writeln!(out, " {} >= 0", self.names[i]);
                }
            }
        }
        out.push_str("End\n");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<Rat>,
    pub objective: Rat,
    pub is_extreme_point: bool,
    pub pivots: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum At {
    Lower,
    Upper,
    Basic,
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    /// Current value of each row's basic variable.
    beta: Vec<Rat>,
    basis: Vec<usize>,
    status: Vec<At>,
    upper: Vec<Option<Rat>>,
    /// Reduced costs of the current phase.
    cost_row: Vec<Rat>,
    pivots: usize,
}

impl Tableau {
    fn value(&self, j: usize) -> Rat {
        match self.status[j] {
            At::Lower => Rat::zero(),
            At::Upper => self.upper[j].clone().expect("at upper bound without one"),
            At::Basic => {
                let r = self.basis.iter().position(|&b| b == j).unwrap();
                self.beta[r].clone()
            }
        }
    }

    fn set_costs(&mut self, c: &[Rat]) {
        let mut d = c.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            if c[b].is_zero() {
                continue;
            }
            for (j, a) in self.rows[r].iter().enumerate() {
                if !a.is_zero() {
                    d[j] -= &c[b] * a;
                }
            }
        }
        self.cost_row = d;
    }

    fn pivot(&mut self, r: usize, j: usize) {
        self.pivots += 1;
        let p = self.rows[r][j].clone();
        if !p.is_one() {
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a /= &p;
                }
            }
        }
        let nz: Vec<usize> = (0..self.rows[r].len()).filter(|&k| !self.rows[r][k].is_zero()).collect();
        let prow = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let f = row[j].clone();
            for &k in &nz {
                row[k] -= &f * &prow[k];
            }
        }
        if !self.cost_row[j].is_zero() {
            let f = self.cost_row[j].clone();
            for &k in &nz {
                self.cost_row[k] -= &f * &prow[k];
            }
        }
        self.rows[r] = prow;
    }

    /// Runs simplex iterations until optimal. Returns Err(Unbounded) if so.
    fn optimise(&mut self) -> Result<()> {
        loop {
            // Bland: smallest index that improves.
            let entering = (0..self.status.len()).find(|&j| match self.status[j] {
                At::Lower => self.cost_row[j].is_negative() && self.upper[j].as_ref().is_none_or(|u| !u.is_zero()),
                At::Upper => self.cost_row[j].is_positive(),
                At::Basic => false,
            });
            let Some(j) = entering else { return Ok(()) };
            // Moving x_j by +θ (from lower) or −θ (from upper).
            let dir_up = self.status[j] == At::Lower;
            let mut best: Option<(Rat, Option<(usize, At)>)> = self.upper[j].clone().map(|u| (u, None));
            for r in 0..self.rows.len() {
                let a = &self.rows[r][j];
                if a.is_zero() {
                    continue;
                }
                // Basic variable changes by −a·θ when x_j rises, +a·θ when it falls.
                let falls = a.is_positive() == dir_up;
                let b = self.basis[r];
                let (limit, lands) = if falls {
                    (&self.beta[r] / a.abs(), At::Lower)
                } else {
                    match &self.upper[b] {
                        Some(u) => ((u - &self.beta[r]) / a.abs(), At::Upper),
                        None => continue,
                    }
                };
                let take = match &best {
                    None => true,
                    Some((t, who)) => {
                        limit < *t || (limit == *t && matches!(who, Some((r0, _)) if b < self.basis[*r0]))
                    }
                };
                if take {
                    best = Some((limit, Some((r, lands))));
                }
            }
            let Some((theta, leave)) = best else { return Err(Error::Unbounded) };
            let signed = if dir_up { theta.clone() } else { -theta.clone() };
            for r in 0..self.rows.len() {
                if !self.rows[r][j].is_zero() {
                    let delta = &self.rows[r][j] * &signed;
                    self.beta[r] -= delta;
                }
            }
            match leave {
                None => {
                    self.status[j] = if dir_up { At::Upper } else { At::Lower };
                }
                Some((r, lands)) => {
                    let old = self.basis[r];
                    let entering_value = if dir_up { signed.clone() } else { self.upper[j].clone().unwrap() + &signed };
                    self.pivot(r, j);
                    self.status[old] = lands;
                    self.status[j] = At::Basic;
                    self.basis[r] = j;
                    self.beta[r] = entering_value;
                }
            }
        }
    }
}

pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    let nv = p.num_vars();
    let m = p.constraints.len();
    // Columns: structural, one slack per inequality, one artificial per row.
    let mut slack_of = vec![None; m];
    let mut ncols = nv;
    for (i, c) in p.constraints.iter().enumerate() {
        if c.relation != Relation::Eq {
            slack_of[i] = Some(ncols);
            ncols += 1;
        }
    }
    let art0 = ncols;
    ncols += m;
    let mut rows = vec![vec![Rat::zero(); ncols]; m];
    let mut beta = Vec::with_capacity(m);
    for (i, c) in p.constraints.iter().enumerate() {
        for (v, a) in &c.coeffs {
            rows[i][*v] += a;
        }
        if let Some(s) = slack_of[i] {
            rows[i][s] = if c.relation == Relation::Le { Rat::one() } else { -Rat::one() };
        }
        let mut rhs = c.rhs.clone();
        if rhs.is_negative() {
            for a in rows[i].iter_mut() {
                *a = -a.clone();
            }
            rhs = -rhs;
        }
        rows[i][art0 + i] = Rat::one();
        beta.push(rhs);
    }
    let mut upper: Vec<Option<Rat>> = p.upper.clone();
    upper.extend(std::iter::repeat_n(None, ncols - nv));
    let mut t = Tableau {
        rows,
        beta,
        basis: (art0..art0 + m).collect(),
        status: (0..ncols).map(|j| if j >= art0 { At::Basic } else { At::Lower }).collect(),
        upper,
        cost_row: Vec::new(),
        pivots: 0,
    };
    // Phase 1: minimise the artificial sum.
    let mut c1 = vec![Rat::zero(); ncols];
    for c in c1.iter_mut().skip(art0) {
        *c = Rat::one();
    }
    t.set_costs(&c1);
    t.optimise()?;
    let infeas: Rat = (art0..ncols).map(|j| t.value(j)).sum();
    if infeas.is_positive() {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            values: Vec::new(),
            objective: Rat::zero(),
            is_extreme_point: false,
            pivots: t.pivots,
        });
    }
    // Artificials are pinned at zero from here on.
    for j in art0..ncols {
        t.upper[j] = Some(Rat::zero());
    }
    let mut c2 = vec![Rat::zero(); ncols];
    c2[..nv].clone_from_slice(&p.objective);
    t.set_costs(&c2);
    t.optimise()?;
    let values: Vec<Rat> = (0..nv).map(|j| t.value(j)).collect();
    if !p.is_feasible(&values) {
        return Err(Error::Internal("simplex returned an infeasible point".into()));
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: p.evaluate(&values),
        values,
        is_extreme_point: true,
        pivots: t.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_variable() {
        let mut p = LpProblem::new();
        let x = p.add_var("x");
        p.set_cost(x, int(1));
        p.add_constraint(vec![(x, int(1))], Relation::Ge, rat(1, 2)).unwrap();
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, rat(1, 2));
    }

    #[test]
    fn infeasible() {
        let mut p = LpProblem::new();
        let x = p.add_var("x");
        p.add_constraint(vec![(x, int(1))], Relation::Ge, int(2)).unwrap();
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded() {
        let mut p = LpProblem::new();
        let x = p.add_bounded_var("x", None);
        p.set_cost(x, int(-1));
        p.add_constraint(vec![(x, int(1))], Relation::Ge, int(0)).unwrap();
        assert!(matches!(solve_lp(&p), Err(Error::Unbounded)));
    }

    #[test]
    fn upper_bounds_bind() {
        // max x + y with x + 2y <= 2, both in [0, 1]  ->  x = 1, y = 1/2.
        let mut p = LpProblem::new();
        let x = p.add_var("x");
        let y = p.add_var("y");
        p.set_cost(x, int(-1));
        p.set_cost(y, int(-1));
        p.add_constraint(vec![(x, int(1)), (y, int(2))], Relation::Le, int(2)).unwrap();
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.values, vec![int(1), rat(1, 2)]);
        assert_eq!(s.objective, rat(-3, 2));
    }

    #[test]
    fn negative_rhs_and_equalities() {
        let mut p = LpProblem::new();
        let x = p.add_var("x");
        let y = p.add_var("y");
        p.set_cost(y, int(1));
        p.add_constraint(vec![(x, int(-1)), (y, int(-1))], Relation::Eq, rat(-3, 2)).unwrap();
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.values, vec![int(1), rat(1, 2)]);
    }

    #[test]
    fn redundant_rows() {
        let mut p = LpProblem::new();
        let x = p.add_var("x");
        let y = p.add_var("y");
        p.set_cost(x, int(1));
        for _ in 0..3 {
            p.add_constraint(vec![(x, int(1)), (y, int(1))], Relation::Eq, int(1)).unwrap();
        }
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.objective, int(0));
        assert_eq!(s.values, vec![int(0), int(1)]);
    }

    #[test]
    fn dump_uses_fractions() {
        let mut p = LpProblem::new();
        let x = p.add_var("x");
        p.set_cost(x, rat(3, 2));
        p.add_constraint(vec![(x, int(-2))], Relation::Le, rat(1, 3)).unwrap();
        let text = p.to_lp_text();
        assert!(text.contains("obj: 3/2 x"));
        assert!(text.contains("c0:- 2 x <= 1/3"));
        assert!(text.contains("0 <= x <= 1"));
    }
}
