//! Two-phase revised simplex with a dense basis inverse and sparse columns.

use log::debug;

use super::{LpProblem, LpSolution, LpStatus, Relation, Row, Sense};
use crate::error::{ContractError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    /// Most positive reduced cost, switching to Bland after a run of
    /// degenerate pivots.
    Dantzig,
    /// Lowest-index entering and leaving variables throughout.
    Bland,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOptions {
    pub max_rows: usize,
    pub max_vars: usize,
    pub max_iterations: usize,
    pub pivot_rule: PivotRule,
    pub refactor_every: usize,
    pub degenerate_limit: usize,
    pub optimality_tol: f64,
    pub pivot_tol: f64,
    pub feasibility_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_rows: 5000,
            max_vars: 100_000,
            max_iterations: 1_000_000,
            pivot_rule: PivotRule::Dantzig,
            refactor_every: 100,
            degenerate_limit: 50,
            optimality_tol: 1e-9,
            pivot_tol: 1e-9,
            feasibility_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = lo + col`
    Shift { col: usize, lo: f64 },
    /// `x = hi - col`
    Mirror { col: usize, hi: f64 },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Artificial,
}

struct StandardForm {
    m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    kinds: Vec<ColKind>,
    /// Phase-two costs (maximization).
    cost: Vec<f64>,
    b: Vec<f64>,
    initial_basis: Vec<usize>,
    maps: Vec<VarMap>,
}

fn standardize(lp: &LpProblem) -> StandardForm {
    let sign = match lp.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let mut maps = Vec::with_capacity(lp.num_vars());
    let mut cost = Vec::new();
    let mut extra_rows: Vec<(usize, f64)> = Vec::new();
    for (j, &(lo, hi)) in lp.bounds.iter().enumerate() {
        let c = sign * lp.objective[j];
        if lo.is_finite() {
            let col = cost.len();
            cost.push(c);
            maps.push(VarMap::Shift { col, lo });
            if hi.is_finite() {
                extra_rows.push((col, hi - lo));
            }
        } else if hi.is_finite() {
            let col = cost.len();
            cost.push(-c);
            maps.push(VarMap::Mirror { col, hi });
        } else {
            let pos = cost.len();
            cost.push(c);
            cost.push(-c);
            maps.push(VarMap::Split { pos, neg: pos + 1 });
        }
    }
    let n_struct = cost.len();

    let mut rows: Vec<(Vec<(usize, f64)>, Relation, f64)> = Vec::with_capacity(lp.num_rows() + extra_rows.len());
    for row in &lp.rows {
        let mut coeffs = Vec::with_capacity(row.coeffs.len());
        let mut rhs = row.rhs;
        for &(j, a) in &row.coeffs {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift { col, lo } => {
                    coeffs.push((col, a));
                    rhs -= a * lo;
                }
                VarMap::Mirror { col, hi } => {
                    coeffs.push((col, -a));
                    rhs -= a * hi;
                }
                VarMap::Split { pos, neg } => {
                    coeffs.push((pos, a));
                    coeffs.push((neg, -a));
                }
            }
        }
        rows.push((coeffs, row.relation, rhs));
    }
    for (col, width) in extra_rows {
        rows.push((vec![(col, 1.0)], Relation::Le, width));
    }
    for row in &mut rows {
        if row.2 < 0.0 {
            for e in &mut row.0 {
                e.1 = -e.1;
            }
            row.2 = -row.2;
            row.1 = match row.1 {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_struct];
    let mut b = Vec::with_capacity(m);
    for (i, (coeffs, _, rhs)) in rows.iter().enumerate() {
        for &(col, a) in coeffs {
            cols[col].push((i, a));
        }
        b.push(*rhs);
    }
    for col in &mut cols {
        merge_duplicates(col);
    }
    let mut kinds = vec![ColKind::Structural; n_struct];
    let mut initial_basis = vec![usize::MAX; m];
    for (i, (_, rel, _)) in rows.iter().enumerate() {
        match rel {
            Relation::Le => {
                initial_basis[i] = cols.len();
                cols.push(vec![(i, 1.0)]);
                kinds.push(ColKind::Slack);
                cost.push(0.0);
            }
            Relation::Ge => {
                cols.push(vec![(i, -1.0)]);
                kinds.push(ColKind::Slack);
                cost.push(0.0);
            }
            Relation::Eq => {}
        }
    }
    for (i, (_, rel, _)) in rows.iter().enumerate() {
        if *rel != Relation::Le {
            initial_basis[i] = cols.len();
            cols.push(vec![(i, 1.0)]);
            kinds.push(ColKind::Artificial);
            cost.push(0.0);
        }
    }
    StandardForm { m, cols, kinds, cost, b, initial_basis, maps }
}

fn merge_duplicates(col: &mut Vec<(usize, f64)>) {
    col.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(col.len());
    for &(i, a) in col.iter() {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += a,
            _ => out.push((i, a)),
        }
    }
    out.retain(|e| e.1 != 0.0);
    *col = out;
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

struct Revised {
    sf: StandardForm,
    opts: SimplexOptions,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    /// Column-major basis inverse: `binv[r * m + i]` is entry `(i, r)`.
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
}

impl Revised {
    fn new(sf: StandardForm, opts: &SimplexOptions) -> Result<Self> {
        let mut s = Self {
            basis: sf.initial_basis.clone(),
            in_basis: vec![false; sf.cols.len()],
            sf,
            opts: opts.clone(),
            binv: Vec::new(),
            xb: Vec::new(),
            iterations: 0,
            since_refactor: 0,
        };
        for &j in &s.basis {
            s.in_basis[j] = true;
        }
        s.refactor()?;
        Ok(s)
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.sf.m;
        // Gauss-Jordan on [B | I], both stored row-major.
        let mut a = vec![0.0; m * m];
        for (p, &j) in self.basis.iter().enumerate() {
            for &(i, v) in &self.sf.cols[j] {
                a[i * m + p] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&x, &y| a[x * m + col].abs().total_cmp(&a[y * m + col].abs()))
                .unwrap_or(col);
            if a[piv * m + col].abs() < 1e-13 {
                return Err(ContractError::Lp("basis matrix became singular".into()));
            }
            if piv != col {
                for k in 0..m {
                    a.swap(piv * m + k, col * m + k);
                    inv.swap(piv * m + k, col * m + k);
                }
            }
            let d = a[col * m + col];
            for k in 0..m {
                a[col * m + k] /= d;
                inv[col * m + k] /= d;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = a[r * m + col];
                if f == 0.0 {
                    continue;
                }
                for k in 0..m {
                    a[r * m + k] -= f * a[col * m + k];
                    inv[r * m + k] -= f * inv[col * m + k];
                }
            }
        }
        // inv is B^{-1} row-major: row p corresponds to basis position p.
        let mut binv = vec![0.0; m * m];
        for p in 0..m {
            for r in 0..m {
                binv[r * m + p] = inv[p * m + r];
            }
        }
        self.binv = binv;
        self.xb = vec![0.0; m];
        for (r, &br) in self.sf.b.iter().enumerate() {
            if br != 0.0 {
                let column = &self.binv[r * m..(r + 1) * m];
                for (x, v) in self.xb.iter_mut().zip(column) {
                    *x += br * v;
                }
            }
        }
        self.since_refactor = 0;
        Ok(())
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.sf.m;
        let mut u = vec![0.0; m];
        for &(r, v) in &self.sf.cols[j] {
            let column = &self.binv[r * m..(r + 1) * m];
            for (x, b) in u.iter_mut().zip(column) {
                *x += v * b;
            }
        }
        u
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.sf.m;
        let cb: Vec<f64> = self.basis.iter().map(|&j| cost[j]).collect();
        let nz: Vec<usize> = (0..m).filter(|&p| cb[p] != 0.0).collect();
        (0..m)
            .map(|r| {
                let column = &self.binv[r * m..(r + 1) * m];
                nz.iter().map(|&p| cb[p] * column[p]).sum()
            })
            .collect()
    }

    fn reduced_cost(&self, cost: &[f64], y: &[f64], j: usize) -> f64 {
        cost[j] - self.sf.cols[j].iter().map(|&(r, v)| y[r] * v).sum::<f64>()
    }

    fn pivot(&mut self, p: usize, q: usize, u: &[f64]) {
        let m = self.sf.m;
        let up = u[p];
        for r in 0..m {
            let column = &mut self.binv[r * m..(r + 1) * m];
            let piv = column[p] / up;
            if piv != 0.0 {
                for (i, x) in column.iter_mut().enumerate() {
                    *x -= u[i] * piv;
                }
            }
            column[p] = piv;
        }
        let theta = self.xb[p] / up;
        for (i, x) in self.xb.iter_mut().enumerate() {
            *x -= theta * u[i];
        }
        self.xb[p] = theta;
        self.in_basis[self.basis[p]] = false;
        self.in_basis[q] = true;
        self.basis[p] = q;
        self.iterations += 1;
        self.since_refactor += 1;
    }

    fn run(&mut self, cost: &[f64], allow_artificial: bool) -> Result<PhaseOutcome> {
        let mut degenerate_run = 0usize;
        let mut bland = self.opts.pivot_rule == PivotRule::Bland;
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Err(ContractError::LimitExceeded(format!(
                    "simplex iteration limit {} reached",
                    self.opts.max_iterations
                )));
            }
            if self.since_refactor >= self.opts.refactor_every {
                self.refactor()?;
            }
            let y = self.duals(cost);
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.sf.cols.len() {
                if self.in_basis[j] || (!allow_artificial && self.sf.kinds[j] == ColKind::Artificial) {
                    continue;
                }
                let d = self.reduced_cost(cost, &y, j);
                if d > self.opts.optimality_tol {
                    if bland {
                        entering = Some((j, d));
                        break;
                    }
                    if entering.is_none_or(|(_, best)| d > best) {
                        entering = Some((j, d));
                    }
                }
            }
            let Some((q, _)) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };
            let u = self.ftran(q);
            // Harris two-pass ratio test: bound the step with a small
            // feasibility relaxation, then take the largest pivot within it.
            let candidate = |i: usize, ui: f64| -> Option<(f64, f64)> {
                let artificial = self.sf.kinds[self.basis[i]] == ColKind::Artificial;
                if ui > self.opts.pivot_tol {
                    Some((self.xb[i].max(0.0), ui))
                } else if !allow_artificial && artificial && ui < -self.opts.pivot_tol {
                    Some((0.0, -ui))
                } else {
                    None
                }
            };
            let relax = 1e-9;
            let bound = u
                .iter()
                .enumerate()
                .filter_map(|(i, &ui)| candidate(i, ui).map(|(x, d)| (x + relax) / d))
                .fold(f64::INFINITY, f64::min);
            let largest = u
                .iter()
                .enumerate()
                .filter_map(|(i, &ui)| candidate(i, ui).filter(|(x, d)| x / d <= bound).map(|(_, d)| d))
                .fold(0.0f64, f64::max);
            let mut leaving: Option<(usize, f64)> = None;
            for (i, &ui) in u.iter().enumerate() {
                let Some((x, d)) = candidate(i, ui) else { continue };
                let ratio = x / d;
                if ratio > bound || (bland && d < 1e-2 * largest) {
                    continue;
                }
                let better = match leaving {
                    None => true,
                    Some((l, _)) if bland => self.basis[i] < self.basis[l],
                    Some((l, _)) => d > u[l].abs(),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((p, theta)) = leaving else {
                return Ok(PhaseOutcome::Unbounded);
            };
            if theta <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run > self.opts.degenerate_limit {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = self.opts.pivot_rule == PivotRule::Bland;
            }
            self.xb[p] = if u[p] < 0.0 { 0.0 } else { self.xb[p].max(0.0) };
            self.pivot(p, q, &u);
        }
    }

    fn drive_out_artificials(&mut self) -> Result<()> {
        let m = self.sf.m;
        for p in 0..m {
            if self.sf.kinds[self.basis[p]] != ColKind::Artificial {
                continue;
            }
            let w: Vec<f64> = (0..m).map(|r| self.binv[r * m + p]).collect();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.sf.cols.len() {
                if self.in_basis[j] || self.sf.kinds[j] == ColKind::Artificial {
                    continue;
                }
                let a: f64 = self.sf.cols[j].iter().map(|&(r, v)| w[r] * v).sum();
                if a.abs() > 1e-7 && best.is_none_or(|(_, b)| a.abs() > b.abs()) {
                    best = Some((j, a));
                }
            }
            if let Some((q, _)) = best {
                let u = self.ftran(q);
                self.xb[p] = 0.0;
                self.pivot(p, q, &u);
            }
        }
        self.refactor()
    }

    fn column_values(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.sf.cols.len()];
        for (p, &j) in self.basis.iter().enumerate() {
            x[j] = self.xb[p].max(0.0);
        }
        x
    }

    fn rhs_scale(&self) -> f64 {
        self.sf.b.iter().fold(1.0f64, |a, b| a.max(b.abs()))
    }

    /// Appends inequality rows with their slacks basic. The basis inverse is
    /// extended in place; the new slacks may start negative.
    fn append_rows(&mut self, rows: &[Row]) -> Result<()> {
        let m = self.sf.m;
        let k = rows.len();
        let m2 = m + k;
        let mut binv = vec![0.0; m2 * m2];
        for r in 0..m {
            binv[r * m2..r * m2 + m].copy_from_slice(&self.binv[r * m..(r + 1) * m]);
        }
        let mut position = vec![usize::MAX; self.sf.cols.len()];
        for (p, &j) in self.basis.iter().enumerate() {
            position[j] = p;
        }
        for (t, row) in rows.iter().enumerate() {
            let i = m + t;
            let sign = match row.relation {
                Relation::Le => 1.0,
                Relation::Ge => -1.0,
                Relation::Eq => return Err(ContractError::Lp("equality rows cannot be added to a live basis".into())),
            };
            let mut rhs = row.rhs;
            let mut coeffs: Vec<(usize, f64)> = Vec::with_capacity(row.coeffs.len() + 1);
            for &(j, a) in &row.coeffs {
                if a == 0.0 {
                    continue;
                }
                match self.sf.maps[j] {
                    VarMap::Shift { col, lo } => {
                        coeffs.push((col, a));
                        rhs -= a * lo;
                    }
                    VarMap::Mirror { col, hi } => {
                        coeffs.push((col, -a));
                        rhs -= a * hi;
                    }
                    VarMap::Split { pos, neg } => {
                        coeffs.push((pos, a));
                        coeffs.push((neg, -a));
                    }
                }
            }
            merge_duplicates(&mut coeffs);
            // Row i of the new inverse: -(r_B B^{-1}) / sign, then 1 / sign.
            let mut activity = 0.0;
            for &(col, a) in &coeffs {
                self.sf.cols[col].push((i, a));
                let p = position[col];
                if p != usize::MAX {
                    activity += a * self.xb[p];
                    for r in 0..m {
                        binv[r * m2 + i] -= a * self.binv[r * m + p] / sign;
                    }
                }
            }
            binv[i * m2 + i] = 1.0 / sign;
            let slack = self.sf.cols.len();
            self.sf.cols.push(vec![(i, sign)]);
            self.sf.kinds.push(ColKind::Slack);
            self.sf.cost.push(0.0);
            self.sf.b.push(rhs);
            self.in_basis.push(true);
            self.basis.push(slack);
            self.xb.push((rhs - activity) / sign);
        }
        self.sf.m = m2;
        self.binv = binv;
        Ok(())
    }

    /// Dual simplex from a dual feasible basis. Returns `false` when the
    /// rows are infeasible.
    fn dual_run(&mut self) -> Result<bool> {
        let tol = self.opts.feasibility_tol * 1e-2;
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Err(ContractError::LimitExceeded(format!(
                    "simplex iteration limit {} reached",
                    self.opts.max_iterations
                )));
            }
            if self.since_refactor >= self.opts.refactor_every {
                self.refactor()?;
            }
            let m = self.sf.m;
            let leaving = (0..m)
                .filter(|&p| self.xb[p] < -tol)
                .min_by(|&a, &b| self.xb[a].total_cmp(&self.xb[b]));
            let Some(p) = leaving else {
                return Ok(true);
            };
            let rho: Vec<f64> = (0..m).map(|r| self.binv[r * m + p]).collect();
            let cost = self.sf.cost.clone();
            let y = self.duals(&cost);
            let mut entering: Option<(usize, f64, f64)> = None;
            for j in 0..self.sf.cols.len() {
                if self.in_basis[j] || self.sf.kinds[j] == ColKind::Artificial {
                    continue;
                }
                let alpha: f64 = self.sf.cols[j].iter().map(|&(r, v)| rho[r] * v).sum();
                if alpha >= -self.opts.pivot_tol {
                    continue;
                }
                let d = self.reduced_cost(&cost, &y, j).min(0.0);
                let ratio = d / alpha;
                let better = match entering {
                    None => true,
                    Some((_, best, best_alpha)) => {
                        ratio < best - 1e-12 || (ratio <= best + 1e-12 && alpha.abs() > best_alpha.abs())
                    }
                };
                if better {
                    entering = Some((j, ratio, alpha));
                }
            }
            let Some((q, _, _)) = entering else {
                return Ok(false);
            };
            let u = self.ftran(q);
            self.pivot(p, q, &u);
        }
    }

    fn extract(&self, lp: &LpProblem) -> Result<LpSolution> {
        let cols = self.column_values();
        let primal: Vec<f64> = self
            .sf
            .maps
            .iter()
            .map(|map| match *map {
                VarMap::Shift { col, lo } => lo + cols[col],
                VarMap::Mirror { col, hi } => hi - cols[col],
                VarMap::Split { pos, neg } => cols[pos] - cols[neg],
            })
            .collect();
        let violation = lp.max_violation(&primal);
        debug!(
            "simplex: {} rows, {} vars, {} iterations, violation {violation:e}",
            lp.num_rows(),
            lp.num_vars(),
            self.iterations
        );
        if violation > 10.0 * self.opts.feasibility_tol * self.rhs_scale() {
            return Err(ContractError::Lp(format!("solution violates constraints by {violation:e}")));
        }
        Ok(LpSolution {
            status: LpStatus::Optimal,
            value: lp.objective_value(&primal),
            primal,
            iterations: self.iterations,
        })
    }
}

fn terminal(lp: &LpProblem, status: LpStatus, iterations: usize) -> LpSolution {
    let value = match (status, lp.sense) {
        (LpStatus::Unbounded, Sense::Maximize) => f64::INFINITY,
        (LpStatus::Unbounded, Sense::Minimize) => f64::NEG_INFINITY,
        _ => f64::NAN,
    };
    LpSolution { status, value, primal: vec![f64::NAN; lp.num_vars()], iterations }
}

fn check_limits(lp: &LpProblem, opts: &SimplexOptions) -> Result<()> {
    if lp.num_rows() > opts.max_rows || lp.num_vars() > opts.max_vars {
        return Err(ContractError::LimitExceeded(format!(
            "LP has {} rows and {} variables; limits are {} and {}",
            lp.num_rows(),
            lp.num_vars(),
            opts.max_rows,
            opts.max_vars
        )));
    }
    Ok(())
}

/// Runs both phases. On success the solver sits at an optimal basis.
fn solve_from_scratch(lp: &LpProblem, opts: &SimplexOptions) -> Result<Result<Revised, LpSolution>> {
    lp.validate()?;
    check_limits(lp, opts)?;
    let mut solver = Revised::new(standardize(lp), opts)?;
    let has_artificial = solver.sf.kinds.contains(&ColKind::Artificial);
    if has_artificial {
        let phase_one: Vec<f64> =
            solver.sf.kinds.iter().map(|k| if *k == ColKind::Artificial { -1.0 } else { 0.0 }).collect();
        solver.run(&phase_one, true)?;
        solver.refactor()?;
        let infeasibility: f64 = solver
            .basis
            .iter()
            .zip(&solver.xb)
            .filter(|(j, _)| solver.sf.kinds[**j] == ColKind::Artificial)
            .map(|(_, x)| x.max(0.0))
            .sum();
        if infeasibility > opts.feasibility_tol * solver.rhs_scale() {
            debug!("phase one ended with infeasibility {infeasibility:e}");
            return Ok(Err(terminal(lp, LpStatus::Infeasible, solver.iterations)));
        }
        solver.drive_out_artificials()?;
    }
    let cost = solver.sf.cost.clone();
    if let PhaseOutcome::Unbounded = solver.run(&cost, false)? {
        return Ok(Err(terminal(lp, LpStatus::Unbounded, solver.iterations)));
    }
    solver.refactor()?;
    Ok(Ok(solver))
}

/// Solves `lp` with the two-phase revised simplex method.
pub fn simplex_solve(lp: &LpProblem, opts: &SimplexOptions) -> Result<LpSolution> {
    match solve_from_scratch(lp, opts)? {
        Ok(solver) => solver.extract(lp),
        Err(done) => Ok(done),
    }
}

/// Solves `base` with lazily generated inequality rows.
///
/// After each solve, `separate` returns the rows violated at the current
/// primal point; the loop stops when it returns none. Added rows are
/// appended to the optimal basis and re-optimized with the dual simplex
/// method.
pub fn solve_with_cuts(
    base: &LpProblem,
    mut separate: impl FnMut(&[f64]) -> Vec<Row>,
    opts: &SimplexOptions,
) -> Result<LpSolution> {
    const MAX_ROUNDS: usize = 1000;
    let mut lp = base.clone();
    let mut solver = match solve_from_scratch(&lp, opts)? {
        Ok(solver) => solver,
        Err(done) => return Ok(done),
    };
    for round in 0..MAX_ROUNDS {
        let sol = solver.extract(&lp)?;
        let cuts = separate(&sol.primal);
        if cuts.is_empty() {
            debug!("row generation converged after {} rounds with {} rows", round + 1, lp.num_rows());
            return Ok(sol);
        }
        lp.rows.extend(cuts.iter().cloned());
        check_limits(&lp, opts)?;
        solver.append_rows(&cuts)?;
        if !solver.dual_run()? {
            return Ok(terminal(&lp, LpStatus::Infeasible, solver.iterations));
        }
        let cost = solver.sf.cost.clone();
        if let PhaseOutcome::Unbounded = solver.run(&cost, false)? {
            return Ok(terminal(&lp, LpStatus::Unbounded, solver.iterations));
        }
    }
    Err(ContractError::LimitExceeded(format!("row generation did not converge in {MAX_ROUNDS} rounds")))
}
