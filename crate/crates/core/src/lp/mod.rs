//! Linear programming: a self-contained two-phase simplex solver and the
//! discretized contract design programs built on it.

pub mod maxmax;
pub mod myerson;
pub mod simplex;

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{ContractError, Result};

pub use simplex::{simplex_solve, solve_with_cuts, PivotRule, SimplexOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

/// One constraint row, stored sparsely as `(variable, coefficient)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> Self {
        Self { coeffs, relation, rhs }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row; zero when satisfied.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A linear program with per-variable bounds (default `[0, +inf)`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub bounds: Vec<(f64, f64)>,
}

impl LpProblem {
    pub fn new(sense: Sense, num_vars: usize) -> Self {
        Self {
            sense,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Appends a variable and returns its index.
    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.bounds.push((lower, upper));
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.rows.push(Row::new(coeffs, relation, rhs));
        self.rows.len() - 1
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.violation(x)).fold(0.0, f64::max);
        let bounds = self
            .bounds
            .iter()
            .zip(x)
            .map(|(&(lo, hi), &v)| (lo - v).max(v - hi).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(ContractError::Lp("bounds and objective lengths differ".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(ContractError::Lp("objective has a non-finite coefficient".into()));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(ContractError::Lp(format!("variable {j} has invalid bounds [{lo}, {hi}]")));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(ContractError::Lp(format!("row {i} has a non-finite right-hand side")));
            }
            if let Some(&(j, a)) = row.coeffs.iter().find(|&&(j, a)| j >= n || !a.is_finite()) {
                return Err(ContractError::Lp(format!("row {i} has invalid entry ({j}, {a})")));
            }
        }
        Ok(())
    }

    /// Human-readable dump with a fixed layout:
    ///
    /// ```text
    /// sense max
    /// vars <n> rows <m>
    /// obj <c_0> <c_1> ... <c_{n-1}>
    /// row <i> <j>:<a> <j>:<a> ... <relation> <rhs>
    /// bound <j> <lower> <upper>      (only for non-default bounds)
    /// end
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let sense = match self.sense {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        };
        let _ = writeln!(out, "sense {sense}");
        let _ = writeln!(out, "vars {} rows {}", self.num_vars(), self.num_rows());
        out.push_str("obj");
        for c in &self.objective {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "row {i}");
            for &(j, a) in &row.coeffs {
                let _ = write!(out, " {j}:{a}");
            }
            let _ = writeln!(out, " {} {}", row.relation.symbol(), row.rhs);
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo != 0.0 || hi != f64::INFINITY {
                let _ = writeln!(out, "bound {j} {lo} {hi}");
            }
        }
        out.push_str("end\n");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value at `primal`; meaningful only when optimal.
    pub value: f64,
    pub primal: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn require_optimal(self, what: &str) -> Result<Self> {
        if self.is_optimal() {
            Ok(self)
        } else {
            Err(ContractError::Lp(format!("{what}: solver returned {:?}", self.status)))
        }
    }
}
