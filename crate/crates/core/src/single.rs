//! Closed-form optimal contracts for a single agent.
//!
//! The robust value of a randomized linear contract is governed by the
//! utility lower bound `u(a) = max_{(F,c)} a E_F[y] - c` over the known
//! technology. The optimal contract draws its slope from
//! `G*(a) = ln(1 - a) / ln(1 - a*)` where `a*` maximizes `u(a) / -ln(1 - a)`.

use serde::Serialize;

use crate::error::{ContractError, Result};
use crate::model::Technology;
use crate::randomized::RandomizedLinearContract;
use crate::scalar::bisect_increasing;

/// Slopes are clamped below this when evaluating `-ln(1 - a)`.
pub const MAX_SLOPE: f64 = 1.0 - 1e-15;

/// Candidates whose values differ by less than this are considered tied.
pub const CANDIDATE_TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleAgentSolution {
    pub alpha_star: f64,
    /// The optimal robust payoff.
    pub value: f64,
    pub cdf: RandomizedLinearContract,
    /// Index into the technology of the action attaining the optimum.
    pub witness_action: usize,
}

impl SingleAgentSolution {
    pub fn is_degenerate(&self) -> bool {
        self.alpha_star == 0.0
    }
}

/// The optimal deterministic (linear) contract.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeterministicOptimum {
    pub slope: f64,
    pub payoff: f64,
    pub witness_action: usize,
}

/// `max_{(F,c)} a E_F[y] - c`; never negative because of the null action.
pub fn u_lower(tech: &Technology, alpha: f64) -> f64 {
    tech.actions()
        .iter()
        .map(|a| alpha * a.expected_outcome() - a.cost)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `-ln(1 - a)` with the slope clamped below one.
pub(crate) fn neg_log_complement(alpha: f64) -> f64 {
    -(-alpha.min(MAX_SLOPE)).ln_1p()
}

/// `a + (1 - a) ln(1 - a) - k`. Its root is the stationary point of
/// `(a - k) / -ln(1 - a)`.
pub fn stationarity_residual(alpha: f64, k: f64) -> f64 {
    alpha + (1.0 - alpha) * (-alpha).ln_1p() - k
}

/// The unique root in `[0, 1)` of `a + (1 - a) ln(1 - a) = k` for `k` in `[0, 1)`.
///
/// The left side is strictly increasing with derivative `-ln(1 - a)`.
pub fn stationary_slope(k: f64) -> f64 {
    if k <= 0.0 {
        return 0.0;
    }
    bisect_increasing(|a| stationarity_residual(a, k), 0.0, MAX_SLOPE, 0.0)
}

/// `u(a) / -ln(1 - a)` for `a` in `(0, 1)`; zero at `a >= 1`.
pub fn ratio_objective(tech: &Technology, alpha: f64) -> f64 {
    if alpha >= 1.0 {
        return 0.0;
    }
    u_lower(tech, alpha) / neg_log_complement(alpha)
}

/// A candidate maximizer of the critical ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Candidate {
    pub alpha: f64,
    pub value: f64,
    pub index: usize,
}

/// Per-action maximizer of `(a E - c) / -ln(1 - a)` for an action with
/// `E > c`. Zero-cost actions attain their supremum `E` in the limit `a -> 0`.
pub(crate) fn action_candidate(expected: f64, cost: f64) -> Option<(f64, f64)> {
    if !(expected > cost) {
        return None;
    }
    if cost == 0.0 {
        return Some((0.0, expected));
    }
    let alpha = stationary_slope(cost / expected);
    Some((alpha, (alpha * expected - cost) / neg_log_complement(alpha)))
}

/// Picks the global candidate. A zero-slope candidate wins whenever it is
/// within [`CANDIDATE_TIE_TOL`] of the best positive-slope value.
pub(crate) fn select_candidate(candidates: &[Candidate]) -> Option<Candidate> {
    let best_positive = candidates
        .iter()
        .filter(|c| c.alpha > 0.0)
        .map(|c| c.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let degenerate = candidates
        .iter()
        .filter(|c| c.alpha == 0.0)
        .fold(None::<Candidate>, |acc, &c| match acc {
            Some(a) if a.value >= c.value - CANDIDATE_TIE_TOL => Some(a),
            _ => Some(c),
        });
    if let Some(d) = degenerate {
        if d.value >= best_positive - CANDIDATE_TIE_TOL {
            return Some(d);
        }
    }
    candidates
        .iter()
        .filter(|c| c.alpha > 0.0 && c.value >= best_positive - CANDIDATE_TIE_TOL)
        .min_by_key(|c| c.index)
        .copied()
}

/// Kinks of the piecewise-linear `u_lower` inside `(0, 1)`.
fn breakpoints(tech: &Technology) -> Vec<f64> {
    let lines: Vec<(f64, f64)> = tech.actions().iter().map(|a| (a.expected_outcome(), a.cost)).collect();
    let mut out = Vec::new();
    for (i, &(e1, c1)) in lines.iter().enumerate() {
        for &(e2, c2) in &lines[i + 1..] {
            if e1 != e2 {
                let alpha = (c1 - c2) / (e1 - e2);
                if alpha > 0.0 && alpha < 1.0 {
                    out.push(alpha);
                }
            }
        }
    }
    out
}

/// Index of the action attaining `u_lower(alpha)`, lowest index on ties.
fn active_action(tech: &Technology, alpha: f64) -> usize {
    let top = u_lower(tech, alpha);
    tech.actions()
        .iter()
        .position(|a| alpha * a.expected_outcome() - a.cost >= top - 1e-12)
        .unwrap_or(0)
}

/// The critical slope `a*` and the optimal robust value.
///
/// Every action's stationary point and every kink of `u_lower` is evaluated
/// against the full objective; the global maximum is among them because the
/// objective is a pointwise maximum of single-action ratios.
pub fn critical_slope(tech: &Technology) -> SingleAgentSolution {
    let mut candidates = Vec::new();
    for (index, a) in tech.actions().iter().enumerate() {
        if let Some((alpha, value)) = action_candidate(a.expected_outcome(), a.cost) {
            let value = if alpha > 0.0 { ratio_objective(tech, alpha).max(value) } else { value };
            candidates.push(Candidate { alpha, value, index });
        }
    }
    for alpha in breakpoints(tech) {
        let index = active_action(tech, alpha);
        candidates.push(Candidate { alpha, value: ratio_objective(tech, alpha), index });
    }

    // Technology guarantees a non-trivial action, so a candidate exists.
    let best = select_candidate(&candidates).expect("technology has a non-trivial action");
    if best.alpha == 0.0 {
        return SingleAgentSolution {
            alpha_star: 0.0,
            value: best.value,
            cdf: RandomizedLinearContract::single(0.0).expect("zero slope is valid"),
            witness_action: best.index,
        };
    }
    SingleAgentSolution {
        alpha_star: best.alpha,
        value: ratio_objective(tech, best.alpha),
        cdf: RandomizedLinearContract::single(best.alpha).expect("critical slope below one"),
        witness_action: active_action(tech, best.alpha),
    }
}

/// `G*` for the technology.
pub fn optimal_cdf(tech: &Technology) -> RandomizedLinearContract {
    critical_slope(tech).cdf
}

/// The best deterministic contract: slope `sqrt(c*/E*)` with payoff
/// `max (sqrt(E) - sqrt(c))^2`, clamped at zero for actions with `E < c`.
pub fn deterministic_optimum(tech: &Technology) -> DeterministicOptimum {
    let mut best = DeterministicOptimum { slope: 0.0, payoff: 0.0, witness_action: 0 };
    let mut found = false;
    for (i, a) in tech.actions().iter().enumerate() {
        let e = a.expected_outcome();
        let gap = (e.sqrt() - a.cost.sqrt()).max(0.0);
        let payoff = gap * gap;
        if !found || payoff > best.payoff {
            let slope = if e > 0.0 { (a.cost / e).sqrt().min(1.0) } else { 0.0 };
            best = DeterministicOptimum { slope, payoff, witness_action: i };
            found = true;
        }
    }
    best
}

/// Randomized over deterministic payoff for one action with `E[y] = 1` and
/// cost `c0`: `(1 - a*) / (1 - sqrt(c0))^2`.
pub fn advantage_ratio(c0: f64) -> Result<f64> {
    if !(c0 > 0.0 && c0 < 1.0) {
        return Err(ContractError::OutOfRange(format!("cost {c0} must lie in (0, 1)")));
    }
    let alpha = stationary_slope(c0);
    let det = (1.0 - c0.sqrt()).powi(2);
    Ok((1.0 - alpha) / det)
}

/// One row of the advantage-ratio curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioRow {
    pub c0: f64,
    pub alpha_star: f64,
    pub randomized: f64,
    pub deterministic: f64,
    pub ratio: f64,
}

/// The ratio curve for costs `from, from + step, ..., to` (inclusive, up to
/// rounding of the step count).
pub fn ratio_curve(from: f64, to: f64, step: f64) -> Result<Vec<RatioRow>> {
    if !(from > 0.0 && to < 1.0 && from <= to) {
        return Err(ContractError::OutOfRange(format!(
            "cost range [{from}, {to}] must lie inside (0, 1)"
        )));
    }
    if !(step > 0.0) {
        return Err(ContractError::OutOfRange(format!("step {step} must be positive")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|k| {
            let c0 = from + k as f64 * step;
            let alpha_star = stationary_slope(c0);
            let randomized = 1.0 - alpha_star;
            let deterministic = (1.0 - c0.sqrt()).powi(2);
            Ok(RatioRow { c0, alpha_star, randomized, deterministic, ratio: advantage_ratio(c0)? })
        })
        .collect()
}
