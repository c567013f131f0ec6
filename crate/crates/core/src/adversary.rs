//! Worst-case technologies and numerical certificates for both sides of the
//! single-agent optimum.
//!
//! The upper side builds the adversarial technology in which every action set
//! `A(a)` offers mean `e*(a) = V / (1 - a)` at cost
//! `c*(a) = a e*(a) - V (-ln(1 - a))`, so that any contract earns at most `V`.
//! The lower side draws random supersets of the known technology and
//! integrates the payoff of `G*` exactly under worst-case tie-breaking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{ContractError, Result};
use crate::model::{
    select_response, Action, Contract, LinearContract, OutcomeDist, TabularContract, Technology, TieBreak,
};
use crate::single::{critical_slope, neg_log_complement, SingleAgentSolution};

/// Tolerance of the upper-bound certificate.
pub const UPPER_BOUND_TOL: f64 = 1e-3;
/// Tolerance of the lower-bound certificate.
pub const LOWER_BOUND_TOL: f64 = 1e-9;
/// Tolerance of the containment check `A ⊇ A0`.
pub const CONTAINMENT_TOL: f64 = 1e-9;
/// Best- and worst-tie maxima further apart than this are flagged.
pub const TIE_SENSITIVITY_TOL: f64 = 1e-6;

/// `e*(a) = V / (1 - a)`.
pub fn e_star(alpha: f64, sol: &SingleAgentSolution) -> Result<f64> {
    check_slope(alpha, sol)?;
    Ok(sol.value / (1.0 - alpha))
}

/// `c*(a) = a e*(a) - \int_0^a e*(t) dt = a e*(a) - V (-ln(1 - a))`.
pub fn c_star(alpha: f64, sol: &SingleAgentSolution) -> Result<f64> {
    let e = e_star(alpha, sol)?;
    Ok(alpha * e - sol.value * neg_log_complement(alpha))
}

fn check_slope(alpha: f64, sol: &SingleAgentSolution) -> Result<()> {
    if sol.alpha_star <= 0.0 {
        return Err(ContractError::Degenerate(
            "the adversary is only defined for a positive critical slope".into(),
        ));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(ContractError::Singularity(alpha));
    }
    Ok(())
}

/// One action of the discretized adversary: the mixture
/// `t * F_base + (1 - t) * delta_0` at the given cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdversaryAction {
    /// Index of the known distribution being mixed.
    pub base: usize,
    pub weight: f64,
    pub cost: f64,
    /// The level `a` of the action set `A(a)` this action belongs to, or
    /// `None` for the known actions themselves.
    pub level: Option<f64>,
}

/// The parametric worst-case technology.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryTechnology {
    pub solution: SingleAgentSolution,
    pub alpha_bar: f64,
    known: Technology,
}

impl AdversaryTechnology {
    pub fn alpha_star(&self) -> f64 {
        self.solution.alpha_star
    }

    pub fn value(&self) -> f64 {
        self.solution.value
    }

    pub fn known(&self) -> &Technology {
        &self.known
    }

    pub fn e_star(&self, alpha: f64) -> Result<f64> {
        e_star(alpha, &self.solution)
    }

    pub fn c_star(&self, alpha: f64) -> Result<f64> {
        c_star(alpha, &self.solution)
    }

    /// The slope level whose action set has mean `e`; zero for `e <= V`.
    pub fn level_of_mean(&self, e: f64) -> f64 {
        (1.0 - self.value() / e).max(0.0)
    }

    /// Outcomes on which contracts must be defined.
    pub fn outcome_grid(&self) -> Vec<f64> {
        self.known.outcome_grid()
    }

    /// Finite version of the adversary: levels on a uniform grid of
    /// `slope_points` over `[0, alpha_bar]`, each realized by mixing every
    /// known distribution with `delta_0`, plus the known actions.
    pub fn discretize(&self, slope_points: usize) -> Vec<AdversaryAction> {
        let means: Vec<f64> = self.known.actions().iter().map(Action::expected_outcome).collect();
        let mut out = Vec::new();
        for (base, a) in self.known.actions().iter().enumerate() {
            out.push(AdversaryAction { base, weight: 1.0, cost: a.cost, level: None });
        }
        let v = self.value();
        // A(0): any mean up to V at zero cost; utility is linear in the weight
        // so the extreme mixtures suffice.
        for (base, &m) in means.iter().enumerate() {
            if m > 0.0 {
                out.push(AdversaryAction { base, weight: (v / m).min(1.0), cost: 0.0, level: Some(0.0) });
            }
        }
        let steps = slope_points.max(2) - 1;
        for j in 1..=steps {
            let level = self.alpha_bar * j as f64 / steps as f64;
            let e = v / (1.0 - level);
            let cost = level * e - v * neg_log_complement(level);
            for (base, &m) in means.iter().enumerate() {
                if m >= e * (1.0 - 1e-12) {
                    out.push(AdversaryAction { base, weight: (e / m).min(1.0), cost, level: Some(level) });
                }
            }
        }
        out
    }
}

/// Builds the worst-case technology and checks that it contains `A0`.
pub fn build_adversary(tech: &Technology, sol: &SingleAgentSolution) -> Result<AdversaryTechnology> {
    if sol.alpha_star <= 0.0 {
        return Err(ContractError::Degenerate(
            "critical slope is zero; the zero-slope contract is optimal and no adversary is needed".into(),
        ));
    }
    let v = sol.value;
    let max_mean = tech.max_expected_outcome();
    let alpha_bar = 1.0 - v / max_mean;
    for (i, a) in tech.actions().iter().enumerate() {
        let e = a.expected_outcome();
        if e > v {
            let level = 1.0 - v / e;
            let required = c_star(level, sol)?;
            if a.cost < required - CONTAINMENT_TOL {
                return Err(ContractError::Inconsistent(format!(
                    "known action {i} (mean {e}, cost {}) lies outside the adversary: needs cost >= {required}",
                    a.cost
                )));
            }
        }
    }
    Ok(AdversaryTechnology { solution: sol.clone(), alpha_bar, known: tech.clone() })
}

/// The agent's choice against the discretized adversary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdversaryResponse {
    pub payoff: f64,
    pub action: AdversaryAction,
}

/// Principal payoff of `w` when the agent best-responds within `actions`.
pub fn adversary_best_payoff(
    adv: &AdversaryTechnology,
    actions: &[AdversaryAction],
    w: &impl Contract,
    tie: TieBreak,
) -> Result<AdversaryResponse> {
    let known = adv.known.actions();
    let w0 = w.payment(0.0)?;
    let mut wage_of = Vec::with_capacity(known.len());
    for a in known {
        let mut wage = 0.0;
        for &(y, p) in a.dist.support() {
            wage += p * w.payment(y)?;
        }
        wage_of.push(wage);
    }
    let scored: Vec<(f64, f64)> = actions
        .iter()
        .map(|act| {
            let t = act.weight;
            let wage = t * wage_of[act.base] + (1.0 - t) * w0;
            let mean = t * known[act.base].expected_outcome();
            (wage - act.cost, mean - wage)
        })
        .collect();
    let i = select_response(&scored, tie);
    Ok(AdversaryResponse { payoff: scored[i].1, action: actions[i] })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBoundOptions {
    pub slope_points: usize,
    pub tolerance: f64,
    /// Added to the certified value before comparison. Only for negative
    /// controls; zero in normal use.
    pub bound_shift: f64,
}

impl Default for UpperBoundOptions {
    fn default() -> Self {
        Self { slope_points: 2000, tolerance: UPPER_BOUND_TOL, bound_shift: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperBoundReport {
    /// Largest best-tie payoff over the grid; `-inf` for an empty grid.
    pub max_payoff: f64,
    /// Largest worst-tie payoff over the grid.
    pub max_payoff_worst_tie: f64,
    pub bound: f64,
    pub pass: bool,
    /// Index of the contract attaining `max_payoff`.
    pub worst_contract: Option<usize>,
    pub contracts: usize,
    /// Best and worst tie-breaking disagree by more than 1e-6.
    pub tie_sensitive: bool,
}

/// Evaluates every contract against the adversary built for `tech`.
pub fn verify_upper_bound(
    tech: &Technology,
    contracts: &[TabularContract],
    opts: &UpperBoundOptions,
) -> Result<UpperBoundReport> {
    let sol = critical_slope(tech);
    let adv = build_adversary(tech, &sol)?;
    let actions = adv.discretize(opts.slope_points);
    let bound = sol.value + opts.bound_shift;
    let mut max_payoff = f64::NEG_INFINITY;
    let mut max_worst = f64::NEG_INFINITY;
    let mut worst_contract = None;
    for (i, w) in contracts.iter().enumerate() {
        let best = adversary_best_payoff(&adv, &actions, w, TieBreak::BestForPrincipal)?;
        let worst = adversary_best_payoff(&adv, &actions, w, TieBreak::WorstForPrincipal)?;
        if best.payoff > max_payoff {
            max_payoff = best.payoff;
            worst_contract = Some(i);
        }
        max_worst = max_worst.max(worst.payoff);
    }
    let tie_sensitive = !contracts.is_empty() && (max_payoff - max_worst).abs() > TIE_SENSITIVITY_TOL;
    Ok(UpperBoundReport {
        max_payoff,
        max_payoff_worst_tie: max_worst,
        bound,
        pass: max_payoff <= bound + opts.tolerance,
        worst_contract,
        contracts: contracts.len(),
        tie_sensitive,
    })
}

/// A deterministic grid of tabular contracts on `outcomes`: the slope-`a*`
/// linear contract, `linear_points` other linear contracts, and
/// `random_count` contracts with independent uniform payments in
/// `[0, max_payment]`.
pub fn contract_grid(
    outcomes: &[f64],
    alpha_star: f64,
    linear_points: usize,
    random_count: usize,
    max_payment: f64,
    seed: u64,
) -> Result<Vec<TabularContract>> {
    let mut grid = vec![TabularContract::from_linear(alpha_star, outcomes)?];
    for k in 0..linear_points {
        let slope = k as f64 / linear_points.max(2).saturating_sub(1) as f64;
        grid.push(TabularContract::from_linear(slope.min(1.0), outcomes)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_count {
        let entries = outcomes.iter().map(|&y| (y, rng.gen::<f64>() * max_payment)).collect();
        grid.push(TabularContract::new(entries)?);
    }
    Ok(grid)
}

/// Exact expected payoff of the randomized contract `G*` of `sol` when the
/// agent best-responds within `tech` and breaks ties against the principal.
///
/// The best response only switches where two utility lines cross, so the
/// payoff is integrated piece by piece using `(1 - a) dG*(a) = da / -ln(1 - a*)`.
pub fn randomized_payoff_worst_tie(tech: &Technology, sol: &SingleAgentSolution) -> f64 {
    let a_star = sol.alpha_star;
    let lines: Vec<(f64, f64)> = tech.actions().iter().map(|a| (a.expected_outcome(), a.cost)).collect();
    if a_star == 0.0 {
        let scored: Vec<(f64, f64)> = lines.iter().map(|&(e, c)| (-c, e)).collect();
        return lines[select_response(&scored, TieBreak::WorstForPrincipal)].0;
    }
    let mut cuts = vec![0.0, a_star];
    for (i, &(e1, c1)) in lines.iter().enumerate() {
        for &(e2, c2) in &lines[i + 1..] {
            if e1 != e2 {
                let x = (c1 - c2) / (e1 - e2);
                if x > 0.0 && x < a_star {
                    cuts.push(x);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut integral = 0.0;
    for piece in cuts.windows(2) {
        let (lo, hi) = (piece[0], piece[1]);
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let scored: Vec<(f64, f64)> = lines.iter().map(|&(e, c)| (mid * e - c, (1.0 - mid) * e)).collect();
        let chosen = select_response(&scored, TieBreak::WorstForPrincipal);
        integral += lines[chosen].0 * (hi - lo);
    }
    integral / neg_log_complement(a_star)
}

/// Draws a random finite superset of `tech`.
///
/// Half of the added actions sit close to the adversary's cost frontier
/// `c*`, where the payoff of `G*` is tightest; the rest are arbitrary.
pub fn random_superset(tech: &Technology, sol: &SingleAgentSolution, rng: &mut impl Rng) -> Technology {
    let max_mean = tech.max_expected_outcome();
    let v = sol.value;
    let count = rng.gen_range(1..=6);
    let mut extra = Vec::with_capacity(count);
    while extra.len() < count {
        let support_len = rng.gen_range(1..=3);
        let mut outcomes: Vec<f64> = (0..support_len).map(|_| rng.gen::<f64>() * 3.0 * max_mean).collect();
        outcomes.sort_by(f64::total_cmp);
        outcomes.dedup();
        let raw: Vec<f64> = outcomes.iter().map(|_| rng.gen::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let mut probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
        let head: f64 = probs[..probs.len() - 1].iter().sum();
        *probs.last_mut().expect("nonempty support") = 1.0 - head;
        let Ok(dist) = OutcomeDist::new(outcomes.into_iter().zip(probs).collect()) else {
            continue;
        };
        let mean = dist.expected_outcome();
        let cost = if rng.gen_bool(0.5) && mean > v && sol.alpha_star > 0.0 {
            let level = 1.0 - v / mean;
            let frontier = level * mean - v * neg_log_complement(level);
            (frontier + (rng.gen::<f64>() - 0.5) * 0.02 * mean).max(0.0)
        } else if rng.gen_bool(0.1) {
            0.0
        } else {
            rng.gen::<f64>() * 1.5 * mean
        };
        if let Ok(a) = Action::new(dist, cost) {
            extra.push(a);
        }
    }
    tech.extended(extra)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundOptions {
    pub tolerance: f64,
    /// Added to the certified value before comparison; negative controls only.
    pub bound_shift: f64,
}

impl Default for LowerBoundOptions {
    fn default() -> Self {
        Self { tolerance: LOWER_BOUND_TOL, bound_shift: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundReport {
    /// Smallest payoff over the trials; `+inf` when no trial ran.
    pub min_payoff: f64,
    pub bound: f64,
    pub pass: bool,
    pub worst_trial: Option<usize>,
    pub trials: usize,
}

/// Certifies that `G*` earns at least `V` on `n_trials` random supersets.
pub fn verify_lower_bound(
    tech: &Technology,
    n_trials: usize,
    seed: u64,
    opts: &LowerBoundOptions,
) -> Result<LowerBoundReport> {
    let sol = critical_slope(tech);
    if sol.alpha_star <= 0.0 {
        return Err(ContractError::Degenerate(
            "critical slope is zero; check the degenerate equality instead".into(),
        ));
    }
    let bound = sol.value + opts.bound_shift;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_payoff = f64::INFINITY;
    let mut worst_trial = None;
    for trial in 0..n_trials {
        let superset = random_superset(tech, &sol, &mut rng);
        let payoff = randomized_payoff_worst_tie(&superset, &sol);
        if payoff < min_payoff {
            min_payoff = payoff;
            worst_trial = Some(trial);
        }
    }
    Ok(LowerBoundReport {
        min_payoff,
        bound,
        pass: n_trials == 0 || min_payoff >= bound - opts.tolerance,
        worst_trial,
        trials: n_trials,
    })
}

/// Payoff of the deterministic linear contract `slope` against the
/// discretized adversary.
pub fn linear_payoff_against(adv: &AdversaryTechnology, actions: &[AdversaryAction], slope: f64) -> Result<f64> {
    let w = LinearContract::new(slope)?;
    Ok(adversary_best_payoff(adv, actions, &w, TieBreak::BestForPrincipal)?.payoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical() -> Technology {
        Technology::new(vec![Action::deterministic(1.0, 0.5).unwrap()]).unwrap()
    }

    #[test]
    fn e_star_examples() {
        let sol = critical_slope(&canonical());
        assert_eq!(e_star(0.0, &sol).unwrap(), sol.value);
        assert!((e_star(0.5, &sol).unwrap() - 2.0 * sol.value).abs() < 1e-15);
        assert!(e_star(1.0 - 1e-9, &sol).unwrap() > 1e8 * sol.value);
        assert_eq!(e_star(1.0, &sol), Err(ContractError::Singularity(1.0)));
    }

    #[test]
    fn c_star_examples() {
        let sol = critical_slope(&canonical());
        assert_eq!(c_star(0.0, &sol).unwrap(), 0.0);
        let a = sol.alpha_star;
        let expected = a * e_star(a, &sol).unwrap() - (a * 1.0 - 0.5);
        assert!((c_star(a, &sol).unwrap() - expected).abs() < 1e-12);

        // Quadrature of e* on [0, a] with composite Simpson.
        let n = 20_000;
        let h = a / n as f64;
        let mut simpson = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            simpson += w * e_star(i as f64 * h, &sol).unwrap();
        }
        simpson *= h / 3.0;
        assert!((a * e_star(a, &sol).unwrap() - simpson - c_star(a, &sol).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn utility_identity_on_grid() {
        let sol = critical_slope(&canonical());
        for i in 0..1000 {
            let a = i as f64 / 1000.0;
            let lhs = a * e_star(a, &sol).unwrap() - c_star(a, &sol).unwrap();
            assert!((lhs - sol.value * neg_log_complement(a)).abs() < 1e-12);
            assert!(((1.0 - a) * e_star(a, &sol).unwrap() - sol.value).abs() < 1e-12);
        }
    }

    #[test]
    fn adversary_shapes() {
        let t = canonical();
        let sol = critical_slope(&t);
        let adv = build_adversary(&t, &sol).unwrap();
        assert!((adv.alpha_bar - sol.alpha_star).abs() < 1e-12);
        assert!((adv.e_star(adv.alpha_bar).unwrap() - 1.0).abs() < 1e-9);
        let mut prev = (0.0, -1.0);
        for i in 0..=100 {
            let a = adv.alpha_bar * i as f64 / 100.0;
            let cur = (adv.e_star(a).unwrap(), adv.c_star(a).unwrap());
            assert!(cur.0 >= prev.0 && cur.1 >= prev.1);
            prev = cur;
        }

        let t2 = Technology::new(vec![Action::deterministic(2.0, 0.5).unwrap()]).unwrap();
        let sol2 = critical_slope(&t2);
        let adv2 = build_adversary(&t2, &sol2).unwrap();
        assert!((adv2.alpha_bar - (1.0 - sol2.value / 2.0)).abs() < 1e-15);
        assert!((adv2.alpha_bar - 0.617_596_430_397_84).abs() < 1e-9);
    }

    #[test]
    fn degenerate_adversary_is_rejected() {
        let t = Technology::new(vec![Action::deterministic(1.0, 0.0).unwrap()]).unwrap();
        let sol = critical_slope(&t);
        assert!(matches!(build_adversary(&t, &sol), Err(ContractError::Degenerate(_))));
    }

    #[test]
    fn null_action_lies_in_level_zero() {
        let t = canonical();
        let adv = build_adversary(&t, &critical_slope(&t)).unwrap();
        assert_eq!(adv.level_of_mean(0.0), 0.0);
    }

    #[test]
    fn adversary_payoffs() {
        let t = canonical();
        let sol = critical_slope(&t);
        let adv = build_adversary(&t, &sol).unwrap();
        let actions = adv.discretize(2000);
        let grid = adv.outcome_grid();

        let zero = TabularContract::from_linear(0.0, &grid).unwrap();
        let r = adversary_best_payoff(&adv, &actions, &zero, TieBreak::BestForPrincipal).unwrap();
        assert!(r.payoff <= sol.value + 1e-3);

        let tight = TabularContract::from_linear(sol.alpha_star, &grid).unwrap();
        let r = adversary_best_payoff(&adv, &actions, &tight, TieBreak::BestForPrincipal).unwrap();
        assert!((r.payoff - sol.value).abs() < 1e-3);

        let k = 0.05;
        let constant = TabularContract::new(grid.iter().map(|&y| (y, k)).collect()).unwrap();
        let r = adversary_best_payoff(&adv, &actions, &constant, TieBreak::BestForPrincipal).unwrap();
        assert_eq!(r.action.cost, 0.0);
        assert!((r.payoff - (sol.value - k)).abs() < 1e-12);
    }

    #[test]
    fn upper_bound_reports() {
        let t = canonical();
        let empty = verify_upper_bound(&t, &[], &UpperBoundOptions::default()).unwrap();
        assert!(empty.pass);
        assert_eq!(empty.max_payoff, f64::NEG_INFINITY);
        assert_eq!(empty.worst_contract, None);

        let sol = critical_slope(&t);
        let grid = contract_grid(&t.outcome_grid(), sol.alpha_star, 11, 500, 1.0, 7).unwrap();
        let report = verify_upper_bound(&t, &grid, &UpperBoundOptions::default()).unwrap();
        assert!(report.pass);
        assert!(report.max_payoff >= sol.value - 1e-3);

        let shifted = UpperBoundOptions { bound_shift: -0.01, ..Default::default() };
        let report = verify_upper_bound(&t, &grid, &shifted).unwrap();
        assert!(!report.pass);
        assert!(report.worst_contract.is_some());
    }

    #[test]
    fn exact_payoff_on_known_technology() {
        let t = canonical();
        let sol = critical_slope(&t);
        let payoff = randomized_payoff_worst_tie(&t, &sol);
        assert!((payoff - sol.value).abs() < 1e-12);

        let dominated = t.extended([Action::deterministic(0.1, 1.0).unwrap()]);
        assert!((randomized_payoff_worst_tie(&dominated, &sol) - payoff).abs() < 1e-15);
    }

    #[test]
    fn exact_payoff_matches_monte_carlo() {
        let t = canonical();
        let sol = critical_slope(&t);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let superset = random_superset(&t, &sol, &mut rng);
        let exact = randomized_payoff_worst_tie(&superset, &sol);
        let n = 200_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let a = sol.cdf.sample(&mut rng);
            let scored: Vec<(f64, f64)> = superset
                .actions()
                .iter()
                .map(|x| (a * x.expected_outcome() - x.cost, (1.0 - a) * x.expected_outcome()))
                .collect();
            sum += scored[select_response(&scored, TieBreak::WorstForPrincipal)].1;
        }
        assert!((sum / n as f64 - exact).abs() < 5e-3);
    }

    #[test]
    fn lower_bound_holds() {
        let t = canonical();
        let report = verify_lower_bound(&t, 200, 42, &LowerBoundOptions::default()).unwrap();
        assert!(report.pass, "{report:?}");
        let none = verify_lower_bound(&t, 0, 42, &LowerBoundOptions::default()).unwrap();
        assert!(none.pass && none.worst_trial.is_none());
    }
}
