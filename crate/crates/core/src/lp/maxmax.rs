//! The discretized robust design programs over a finite contract space.
//!
//! Contracts are payment vectors on a finite outcome grid with payments drawn
//! from a finite payment grid. The outer program chooses a distribution over
//! contracts; the inner program picks, for every contract, the agent's
//! response from an adversarial technology that must stay consistent with
//! the known actions.

use log::debug;

use super::{simplex_solve, solve_with_cuts, LpProblem, Relation, Row, Sense, SimplexOptions};
use crate::error::{ContractError, Result};
use crate::model::Technology;

/// Default cap on the number of enumerated contracts.
pub const CONTRACT_LIMIT: usize = 4096;

/// Every payment vector on `outcomes` with entries from `payments`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractSpace {
    outcomes: Vec<f64>,
    contracts: Vec<Vec<f64>>,
}

impl ContractSpace {
    pub fn enumerate(outcomes: &[f64], payments: &[f64], limit: usize) -> Result<Self> {
        if outcomes.is_empty() || payments.is_empty() {
            return Err(ContractError::OutOfRange("outcome and payment grids must be nonempty".into()));
        }
        if outcomes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ContractError::OutOfRange("outcome grid must be strictly increasing".into()));
        }
        if payments.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(ContractError::OutOfRange("payments must be finite and nonnegative".into()));
        }
        let count = (payments.len() as f64).powi(outcomes.len() as i32);
        if count > limit as f64 {
            return Err(ContractError::LimitExceeded(format!(
                "{} payment levels on {} outcomes give {count} contracts (limit {limit}); use a smaller grid",
                payments.len(),
                outcomes.len()
            )));
        }
        let mut contracts = vec![Vec::new()];
        for _ in outcomes {
            contracts = contracts
                .into_iter()
                .flat_map(|w: Vec<f64>| {
                    payments.iter().map(move |&s| {
                        let mut next = w.clone();
                        next.push(s);
                        next
                    })
                })
                .collect();
        }
        Ok(Self { outcomes: outcomes.to_vec(), contracts })
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn contracts(&self) -> &[Vec<f64>] {
        &self.contracts
    }

    pub fn len(&self) -> usize {
        self.contracts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contracts.is_empty()
    }

    /// Index of the contract equal to `w`, if present.
    pub fn position(&self, w: &[f64]) -> Option<usize> {
        self.contracts.iter().position(|c| c.iter().zip(w).all(|(a, b)| (a - b).abs() < 1e-12))
    }

    /// Probability vectors of the known actions on this outcome grid.
    fn known_profiles(&self, tech: &Technology) -> Result<Vec<(Vec<f64>, f64)>> {
        tech.actions()
            .iter()
            .map(|a| {
                let mut q = vec![0.0; self.outcomes.len()];
                for &(y, p) in a.dist.support() {
                    let k = self
                        .outcomes
                        .iter()
                        .position(|&o| (o - y).abs() < 1e-12)
                        .ok_or(ContractError::DomainMismatch(y))?;
                    q[k] += p;
                }
                Ok((q, a.cost))
            })
            .collect()
    }

    /// Best agent utility under each contract among the known actions.
    pub fn boundary_utilities(&self, tech: &Technology) -> Result<Vec<f64>> {
        let known = self.known_profiles(tech)?;
        Ok(self
            .contracts
            .iter()
            .map(|w| {
                known
                    .iter()
                    .map(|(q, c)| dot(w, q) - c)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `levels` evenly spaced payments on `[0, top]`, plus any of `extra` not
/// already on the grid. A single level is just `{0}`.
pub fn payment_grid(top: f64, levels: usize, extra: &[f64]) -> Vec<f64> {
    let mut grid: Vec<f64> = match levels {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|k| top * k as f64 / (n - 1) as f64).collect(),
    };
    if levels > 1 {
        for &e in extra {
            if e >= 0.0 && !grid.iter().any(|g| (g - e).abs() < 1e-12) {
                grid.push(e);
            }
        }
    }
    grid.sort_by(f64::total_cmp);
    grid
}

/// Variable layout of the outer program.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxMaxProgram {
    pub problem: LpProblem,
    pub space: ContractSpace,
    pub boundary: Vec<f64>,
}

impl MaxMaxProgram {
    pub fn prob_var(&self, w: usize) -> usize {
        w
    }

    pub fn mu_var(&self, w: usize) -> usize {
        self.space.len() + w
    }

    pub fn theta_var(&self, w: usize) -> usize {
        2 * self.space.len() + w
    }

    /// Index of `lambda(a, b)` for `a != b`.
    pub fn lambda_var(&self, a: usize, b: usize) -> usize {
        let n = self.space.len();
        let offset = if b < a { b } else { b - 1 };
        3 * n + a * (n - 1) + offset
    }
}

/// Builds the outer program: maximize `sum mu(w) u(w) + sum theta(w)` over a
/// contract distribution `p` and multipliers `lambda`, `mu >= 0`, free `theta`.
pub fn build_maxmax(tech: &Technology, space: ContractSpace) -> Result<MaxMaxProgram> {
    let boundary = space.boundary_utilities(tech)?;
    let n = space.len();
    let ny = space.outcomes().len();
    let mut problem = LpProblem::new(Sense::Maximize, 3 * n + n * (n - 1));
    let mut program = MaxMaxProgram { problem: LpProblem::new(Sense::Maximize, 0), space, boundary };
    for w in 0..n {
        problem.objective[program.mu_var(w)] = program.boundary[w];
        problem.objective[program.theta_var(w)] = 1.0;
        problem.bounds[program.theta_var(w)] = (f64::NEG_INFINITY, f64::INFINITY);
    }
    let contracts = program.space.contracts();
    let outcomes = program.space.outcomes();
    for w in 0..n {
        for k in 0..ny {
            let mut coeffs = Vec::with_capacity(2 * n + 2);
            for v in 0..n {
                if v == w {
                    continue;
                }
                coeffs.push((program.lambda_var(w, v), contracts[w][k]));
                coeffs.push((program.lambda_var(v, w), -contracts[v][k]));
            }
            coeffs.push((program.mu_var(w), contracts[w][k]));
            coeffs.push((program.theta_var(w), 1.0));
            coeffs.push((program.prob_var(w), -(outcomes[k] - contracts[w][k])));
            problem.add_row(coeffs, Relation::Le, 0.0);
        }
    }
    for w in 0..n {
        let mut coeffs = Vec::with_capacity(2 * n);
        for v in 0..n {
            if v == w {
                continue;
            }
            coeffs.push((program.lambda_var(v, w), 1.0));
            coeffs.push((program.lambda_var(w, v), -1.0));
        }
        coeffs.push((program.mu_var(w), -1.0));
        problem.add_row(coeffs, Relation::Le, 0.0);
    }
    problem.add_row((0..n).map(|w| (program.prob_var(w), 1.0)).collect(), Relation::Eq, 1.0);
    program.problem = problem;
    Ok(program)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxMaxSolution {
    pub value: f64,
    /// Optimal distribution over `space.contracts()`.
    pub distribution: Vec<f64>,
}

pub fn solve_maxmax(program: &MaxMaxProgram, opts: &SimplexOptions) -> Result<MaxMaxSolution> {
    let sol = simplex_solve(&program.problem, opts)?.require_optimal("max-max program")?;
    let n = program.space.len();
    let distribution = (0..n).map(|w| sol.primal[program.prob_var(w)].max(0.0)).collect();
    debug!("max-max: {n} contracts, value {}, {} pivots", sol.value, sol.iterations);
    Ok(MaxMaxSolution { value: sol.value, distribution })
}

/// Adversarial responses to every contract for a fixed contract distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution {
    /// The principal's worst-case expected payoff.
    pub value: f64,
    /// Outcome distribution and cost answering each contract.
    pub responses: Vec<(Vec<f64>, f64)>,
    /// Largest shortfall of any incentive or boundary row at `responses`.
    pub violation: f64,
}

fn validate_distribution(space: &ContractSpace, p: &[f64]) -> Result<()> {
    let n = space.len();
    if p.len() != n {
        return Err(ContractError::OutOfRange(format!("distribution has {} entries for {n} contracts", p.len())));
    }
    let total: f64 = p.iter().sum();
    if p.iter().any(|x| !(*x >= -1e-9)) || (total - 1.0).abs() > 1e-6 {
        return Err(ContractError::OutOfRange("p must be a probability distribution".into()));
    }
    Ok(())
}

/// The inner minimization restricted to the contracts in `members`, with
/// incentive rows between members generated lazily.
fn inner_program(
    space: &ContractSpace,
    boundary: &[f64],
    p: &[f64],
    members: &[usize],
    opts: &SimplexOptions,
) -> Result<(f64, Vec<(Vec<f64>, f64)>)> {
    let n = members.len();
    let ny = space.outcomes().len();
    let contracts = space.contracts();
    let q_var = |w: usize, k: usize| w * ny + k;
    let c_var = |w: usize| n * ny + w;
    let mut lp = LpProblem::new(Sense::Minimize, n * ny + n);
    for (w, &id) in members.iter().enumerate() {
        for k in 0..ny {
            lp.objective[q_var(w, k)] = p[id] * (space.outcomes()[k] - contracts[id][k]);
        }
        lp.add_row((0..ny).map(|k| (q_var(w, k), 1.0)).collect(), Relation::Eq, 1.0);
        let mut coeffs: Vec<(usize, f64)> = (0..ny).map(|k| (q_var(w, k), contracts[id][k])).collect();
        coeffs.push((c_var(w), -1.0));
        lp.add_row(coeffs, Relation::Ge, boundary[id]);
    }
    let separate = |x: &[f64]| -> Vec<Row> {
        let mut cuts = Vec::new();
        for (w, &id) in members.iter().enumerate() {
            let utility = |a: usize| (0..ny).map(|k| contracts[id][k] * x[q_var(a, k)]).sum::<f64>() - x[c_var(a)];
            let own = utility(w);
            let (best, gain) = (0..n)
                .map(|a| (a, utility(a)))
                .fold((w, own), |acc, cand| if cand.1 > acc.1 { cand } else { acc });
            if best != w && gain > own + 1e-10 {
                let mut coeffs: Vec<(usize, f64)> = Vec::with_capacity(2 * ny + 2);
                for k in 0..ny {
                    coeffs.push((q_var(w, k), contracts[id][k]));
                    coeffs.push((q_var(best, k), -contracts[id][k]));
                }
                coeffs.push((c_var(w), -1.0));
                coeffs.push((c_var(best), 1.0));
                cuts.push(Row::new(coeffs, Relation::Ge, 0.0));
            }
        }
        cuts
    };
    let sol = solve_with_cuts(&lp, separate, opts)?.require_optimal("max-min inner program")?;
    let responses = (0..n)
        .map(|w| ((0..ny).map(|k| sol.primal[q_var(w, k)].max(0.0)).collect(), sol.primal[c_var(w)].max(0.0)))
        .collect();
    Ok((sol.value, responses))
}

/// Worst-case expected payoff of the contract distribution `p`.
///
/// Minimizes over one outcome distribution `q(w)` and cost `c(w) >= 0` per
/// contract, subject to incentive compatibility between every pair of
/// contracts and to each response being at least as good for the agent as
/// the best known action.
///
/// Contracts outside the support of `p` do not enter the objective, so the
/// program is solved on the support; every other contract is then answered
/// by its best choice among the known actions and the support's responses.
/// The returned responses are checked against all ordered pairs.
pub fn sign_check_maxmin(tech: &Technology, space: &ContractSpace, p: &[f64], opts: &SimplexOptions) -> Result<InnerSolution> {
    validate_distribution(space, p)?;
    let boundary = space.boundary_utilities(tech)?;
    let support: Vec<usize> = (0..space.len()).filter(|&w| p[w] > 1e-12).collect();
    let (_, solved) = inner_program(space, &boundary, p, &support, opts)?;
    let contracts = space.contracts();
    let mut menu = space.known_profiles(tech)?;
    menu.extend(solved.iter().cloned());
    let mut responses: Vec<Option<(Vec<f64>, f64)>> = vec![None; space.len()];
    for (&id, r) in support.iter().zip(solved) {
        responses[id] = Some(r);
    }
    let responses: Vec<(Vec<f64>, f64)> = responses
        .into_iter()
        .enumerate()
        .map(|(w, r)| {
            r.unwrap_or_else(|| {
                menu.iter()
                    .max_by(|a, b| (dot(&contracts[w], &a.0) - a.1).total_cmp(&(dot(&contracts[w], &b.0) - b.1)))
                    .cloned()
                    .unwrap_or_default()
            })
        })
        .collect();
    let mut violation = 0.0f64;
    for (w, contract) in contracts.iter().enumerate() {
        let own = dot(contract, &responses[w].0) - responses[w].1;
        violation = violation.max(boundary[w] - own);
        for other in &responses {
            violation = violation.max(dot(contract, &other.0) - other.1 - own);
        }
    }
    if violation > 1e-7 {
        return Err(ContractError::Inconsistent(format!("inner responses violate incentive rows by {violation:e}")));
    }
    let value = contracts
        .iter()
        .zip(&responses)
        .zip(p)
        .map(|((w, (q, _)), pw)| pw * q.iter().zip(w).zip(space.outcomes()).map(|((qy, wy), y)| qy * (y - wy)).sum::<f64>())
        .sum();
    debug!("max-min inner program: support {} of {}, value {value}", support.len(), space.len());
    Ok(InnerSolution { value, responses, violation })
}

/// The inner minimization over every contract at once, without the support
/// restriction. Intended for small spaces.
pub fn sign_check_maxmin_full(tech: &Technology, space: &ContractSpace, p: &[f64], opts: &SimplexOptions) -> Result<f64> {
    validate_distribution(space, p)?;
    let boundary = space.boundary_utilities(tech)?;
    let all: Vec<usize> = (0..space.len()).collect();
    Ok(inner_program(space, &boundary, p, &all, opts)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Action;
    use crate::single::critical_slope;

    const CANONICAL_VALUE: f64 = 0.186_682_308_850_837;

    fn canonical() -> Technology {
        Technology::new(vec![Action::deterministic(1.0, 0.5).unwrap()]).unwrap()
    }

    fn run(levels: usize) -> (f64, MaxMaxProgram, MaxMaxSolution) {
        let tech = canonical();
        let alpha = critical_slope(&tech).alpha_star;
        let payments = payment_grid(alpha, levels, &[]);
        let space = ContractSpace::enumerate(&[0.0, 1.0], &payments, CONTRACT_LIMIT).unwrap();
        let program = build_maxmax(&tech, space).unwrap();
        let sol = solve_maxmax(&program, &SimplexOptions::default()).unwrap();
        (sol.value, program, sol)
    }

    #[test]
    fn enumeration_and_limits() {
        let space = ContractSpace::enumerate(&[0.0, 1.0], &[0.0, 0.5, 1.0], 100).unwrap();
        assert_eq!(space.len(), 9);
        assert_eq!(space.contracts()[5], vec![0.5, 1.0]);
        assert!(ContractSpace::enumerate(&[0.0, 1.0], &[0.0, 0.5, 1.0], 8).is_err());
    }

    #[test]
    fn lambda_layout_is_a_bijection() {
        let (_, program, _) = run(3);
        let n = program.space.len();
        let mut seen = std::collections::HashSet::new();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    let j = program.lambda_var(a, b);
                    assert!(j >= 3 * n && j < program.problem.num_vars());
                    assert!(seen.insert(j));
                }
            }
        }
    }

    #[test]
    fn zero_grid_has_zero_value() {
        let (value, _, _) = run(1);
        assert!(value.abs() < 1e-9);
    }

    #[test]
    fn refinement_approaches_closed_form() {
        let mut previous = f64::NEG_INFINITY;
        for levels in [4, 8] {
            let (value, _, _) = run(levels);
            assert!(value <= CANONICAL_VALUE + 1e-6, "{levels}: {value}");
            assert!(value >= previous - 1e-9, "{levels}: {value} < {previous}");
            previous = value;
        }
        assert!(CANONICAL_VALUE - previous <= 5e-2, "{previous}");
    }

    #[test]
    fn strong_duality_at_optimum() {
        let tech = canonical();
        let (value, program, sol) = run(6);
        let opts = SimplexOptions::default();
        let inner = sign_check_maxmin(&tech, &program.space, &sol.distribution, &opts).unwrap();
        assert!((inner.value - value).abs() < 1e-6, "{} vs {value}", inner.value);
        assert!(inner.violation <= 1e-7);
        let full = sign_check_maxmin_full(&tech, &program.space, &sol.distribution, &opts).unwrap();
        assert!((full - inner.value).abs() < 1e-9, "{full} vs {}", inner.value);
    }

    #[test]
    fn point_masses_in_the_inner_program() {
        let tech = canonical();
        let alpha = critical_slope(&tech).alpha_star;
        let space = ContractSpace::enumerate(&[0.0, 1.0], &payment_grid(alpha, 4, &[]), CONTRACT_LIMIT).unwrap();
        let mut p = vec![0.0; space.len()];
        p[space.position(&[0.0, 0.0]).unwrap()] = 1.0;
        let zero = sign_check_maxmin(&tech, &space, &p, &SimplexOptions::default()).unwrap().value;
        assert!(zero.abs() < 1e-9);
        let mut p = vec![0.0; space.len()];
        p[space.position(&[0.0, alpha]).unwrap()] = 1.0;
        let linear = sign_check_maxmin(&tech, &space, &p, &SimplexOptions::default()).unwrap().value;
        let full = sign_check_maxmin_full(&tech, &space, &p, &SimplexOptions::default()).unwrap();
        assert!((full - linear).abs() < 1e-9);
        assert!(linear < CANONICAL_VALUE, "{linear}");
    }
}
