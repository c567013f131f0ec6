//! Randomized linear contracts for teams.
//!
//! Each agent `i` is paid `a_i y` and bears a cost depending only on its own
//! action. The team utility bound is `u(a) = max_profiles E[y] - sum c_i / a_i`
//! and the optimal contract scales a fixed slope vector by a random `beta`.

use serde::Serialize;

use crate::error::{ContractError, Result};
use crate::model::{OutcomeDist, Technology, UTILITY_TIE_TOL};
use crate::randomized::RandomizedLinearContract;
use crate::scalar::bisect_increasing;
use crate::single::{action_candidate, neg_log_complement, select_candidate, Candidate};

/// Cap on enumerated joint profiles.
pub const PROFILE_LIMIT: usize = 1_000_000;

/// Tolerance of the unilateral deviation check.
pub const NASH_TOL: f64 = 1e-9;

/// Tolerance of the pointwise checks on the dominating utility function.
pub const P3_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeamAgent {
    pub labels: Vec<String>,
    pub costs: Vec<f64>,
}

/// A joint action (one index per agent) and its outcome distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeamProfile {
    pub actions: Vec<usize>,
    pub dist: OutcomeDist,
}

/// The known team technology: agents with separable costs and a table of
/// joint profiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeamTechnology {
    agents: Vec<TeamAgent>,
    profiles: Vec<TeamProfile>,
}

impl TeamTechnology {
    pub fn new(agents: Vec<TeamAgent>, profiles: Vec<TeamProfile>) -> Result<Self> {
        if agents.is_empty() {
            return Err(ContractError::InvalidTeam("at least one agent is required".into()));
        }
        let mut joint = 1usize;
        for (i, agent) in agents.iter().enumerate() {
            if agent.costs.is_empty() || agent.costs.len() != agent.labels.len() {
                return Err(ContractError::InvalidTeam(format!(
                    "agent {i} needs one cost per action label ({} labels, {} costs)",
                    agent.labels.len(),
                    agent.costs.len()
                )));
            }
            if let Some(c) = agent.costs.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
                return Err(ContractError::InvalidTeam(format!("agent {i} has invalid cost {c}")));
            }
            for (k, label) in agent.labels.iter().enumerate() {
                if agent.labels[..k].contains(label) {
                    return Err(ContractError::InvalidTeam(format!("agent {i} repeats action label {label:?}")));
                }
            }
            joint = joint.saturating_mul(agent.costs.len());
        }
        if joint > PROFILE_LIMIT || profiles.len() > PROFILE_LIMIT {
            return Err(ContractError::LimitExceeded(format!(
                "{joint} joint profiles exceed the limit of {PROFILE_LIMIT}"
            )));
        }
        if profiles.is_empty() {
            return Err(ContractError::InvalidTeam("the profile table is empty".into()));
        }
        for (k, profile) in profiles.iter().enumerate() {
            if profile.actions.len() != agents.len() {
                return Err(ContractError::InvalidTeam(format!(
                    "profile {k} lists {} actions for {} agents",
                    profile.actions.len(),
                    agents.len()
                )));
            }
            if let Some(i) = (0..agents.len()).find(|&i| profile.actions[i] >= agents[i].costs.len()) {
                return Err(ContractError::InvalidTeam(format!("profile {k} uses an unknown action of agent {i}")));
            }
            if profiles[..k].iter().any(|p| p.actions == profile.actions) {
                return Err(ContractError::InvalidTeam(format!("profile {k} is listed twice")));
            }
        }
        let tech = Self { agents, profiles };
        if !(0..tech.profiles.len()).any(|k| tech.profile_cost_root(k) == 0.0) {
            return Err(ContractError::InvalidTeam("the profile table must include a zero-cost profile".into()));
        }
        let productive = (0..tech.profiles.len()).any(|k| {
            let root = tech.profile_cost_root(k);
            tech.profiles[k].dist.expected_outcome() - root * root > 0.0
        });
        if !productive {
            return Err(ContractError::NotProductive);
        }
        Ok(tech)
    }

    /// The single-agent technology viewed as a one-agent team.
    pub fn from_single(tech: &Technology) -> Result<Self> {
        let actions = tech.actions();
        let agent = TeamAgent {
            labels: (0..actions.len()).map(|k| format!("a{k}")).collect(),
            costs: actions.iter().map(|a| a.cost).collect(),
        };
        let profiles = actions
            .iter()
            .enumerate()
            .map(|(k, a)| TeamProfile { actions: vec![k], dist: a.dist.clone() })
            .collect();
        Self::new(vec![agent], profiles)
    }

    pub fn agents(&self) -> &[TeamAgent] {
        &self.agents
    }

    pub fn profiles(&self) -> &[TeamProfile] {
        &self.profiles
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    /// `c_i(a_i)` for agent `i` in profile `k`.
    pub fn cost(&self, k: usize, i: usize) -> f64 {
        self.agents[i].costs[self.profiles[k].actions[i]]
    }

    pub fn expected_outcome(&self, k: usize) -> f64 {
        self.profiles[k].dist.expected_outcome()
    }

    /// `sum_i sqrt(c_i(a_i))` for profile `k`.
    pub fn profile_cost_root(&self, k: usize) -> f64 {
        (0..self.num_agents()).map(|i| self.cost(k, i).sqrt()).sum()
    }

    /// Whether the table lists every joint profile.
    pub fn is_complete(&self) -> bool {
        let joint: usize = self.agents.iter().map(|a| a.costs.len()).product();
        joint == self.profiles.len()
    }

    fn find_profile(&self, actions: &[usize]) -> Option<usize> {
        self.profiles.iter().position(|p| p.actions == actions)
    }

    /// `E[y] - sum_i c_i / a_i` for profile `k`, with `c / 0 = +inf` for
    /// positive `c` and `0` otherwise.
    pub fn profile_utility(&self, k: usize, alpha: &[f64]) -> f64 {
        let mut value = self.expected_outcome(k);
        for (i, &a) in alpha.iter().enumerate() {
            let c = self.cost(k, i);
            if c > 0.0 {
                if a <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                value -= c / a;
            }
        }
        value
    }
}

fn check_slopes(tech: &TeamTechnology, alpha: &[f64]) -> Result<()> {
    if alpha.len() != tech.num_agents() {
        return Err(ContractError::OutOfRange(format!(
            "{} slopes for {} agents",
            alpha.len(),
            tech.num_agents()
        )));
    }
    if alpha.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
        return Err(ContractError::OutOfRange("slopes must be finite and nonnegative".into()));
    }
    Ok(())
}

/// `max_profiles E[y] - sum_i c_i / a_i`; may be `-inf` or negative.
pub fn team_u_lower(tech: &TeamTechnology, alpha: &[f64]) -> Result<f64> {
    check_slopes(tech, alpha)?;
    Ok((0..tech.profiles.len()).map(|k| tech.profile_utility(k, alpha)).fold(f64::NEG_INFINITY, f64::max))
}

/// `u(a) s / -ln(1 - s)` with `s = sum a`, extended continuously to `s = 0`.
pub fn team_ratio_objective(tech: &TeamTechnology, alpha: &[f64]) -> Result<f64> {
    let u = team_u_lower(tech, alpha)?;
    let s: f64 = alpha.iter().sum();
    if s >= 1.0 {
        return Ok(if u.is_finite() { 0.0 } else { u });
    }
    if s == 0.0 {
        return Ok(u);
    }
    Ok(u * s / neg_log_complement(s))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeamSolution {
    pub alpha_star: Vec<f64>,
    /// Total slope `sum alpha_star`.
    pub s_star: f64,
    pub value: f64,
    pub cdf: RandomizedLinearContract,
    /// Profile attaining the optimum.
    pub witness_profile: usize,
}

impl TeamSolution {
    pub fn is_degenerate(&self) -> bool {
        self.s_star == 0.0
    }
}

/// Splits total slope `s` across agents in proportion to `sqrt(c_i)`.
fn slice_allocation(tech: &TeamTechnology, k: usize, s: f64) -> Vec<f64> {
    let root = tech.profile_cost_root(k);
    (0..tech.num_agents())
        .map(|i| if root > 0.0 { s * tech.cost(k, i).sqrt() / root } else { 0.0 })
        .collect()
}

/// The critical slope vector and the optimal team value.
///
/// On each profile the best split of a total slope `s` is proportional to
/// `sqrt(c_i)`, which turns the profile into a single action with cost
/// `K^2`, `K = sum sqrt(c_i)`. The global optimum is the best profile optimum.
pub fn team_critical_slope(tech: &TeamTechnology) -> TeamSolution {
    let mut candidates = Vec::new();
    for k in 0..tech.profiles.len() {
        let root = tech.profile_cost_root(k);
        if let Some((s, value)) = action_candidate(tech.expected_outcome(k), root * root) {
            candidates.push(Candidate { alpha: s, value, index: k });
        }
    }
    // Construction guarantees a productive profile.
    let best = select_candidate(&candidates).expect("team technology is productive");
    let n = tech.num_agents();
    if best.alpha == 0.0 {
        return TeamSolution {
            alpha_star: vec![0.0; n],
            s_star: 0.0,
            value: best.value,
            cdf: RandomizedLinearContract::team(vec![0.0; n]).expect("zero slopes are valid"),
            witness_profile: best.index,
        };
    }
    let alpha_star = slice_allocation(tech, best.index, best.alpha);
    let s_star: f64 = alpha_star.iter().sum();
    let value = team_ratio_objective(tech, &alpha_star).expect("slopes match the agents");
    TeamSolution {
        cdf: RandomizedLinearContract::team(alpha_star.clone()).expect("total slope below one"),
        alpha_star,
        s_star,
        value,
        witness_profile: best.index,
    }
}

/// Best profile at `alpha`: highest team utility, ties within
/// [`UTILITY_TIE_TOL`] go to the lowest principal payoff, then the lowest index.
pub fn team_response(tech: &TeamTechnology, alpha: &[f64]) -> Result<usize> {
    check_slopes(tech, alpha)?;
    let s: f64 = alpha.iter().sum();
    let utilities: Vec<f64> = (0..tech.profiles.len()).map(|k| tech.profile_utility(k, alpha)).collect();
    let top = utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let best = (0..tech.profiles.len())
        .filter(|&k| utilities[k] >= top - UTILITY_TIE_TOL)
        .min_by(|&a, &b| {
            let pa = (1.0 - s) * tech.expected_outcome(a);
            let pb = (1.0 - s) * tech.expected_outcome(b);
            pa.total_cmp(&pb).then(a.cmp(&b))
        })
        .unwrap_or(0);
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeamPayoff {
    /// `u(a*) s* / -ln(1 - s*)`.
    pub closed_form: f64,
    /// Integral of `(1 - s)(u + sum a_i du/da_i)` along `beta a*` against the CDF.
    pub integrated: f64,
}

/// Expected payoff of the optimal team contract, in closed form and by
/// integrating the lower-bound integrand along the support segment.
///
/// On each region where the best profile is constant, `du/da_i = c_i / a_i^2`.
/// Region boundaries are located by bisection and each region is integrated
/// with Simpson's rule against the CDF density.
pub fn team_expected_payoff(tech: &TeamTechnology, sol: &TeamSolution) -> Result<TeamPayoff> {
    check_slopes(tech, &sol.alpha_star)?;
    if sol.is_degenerate() {
        return Ok(TeamPayoff { closed_form: sol.value, integrated: sol.value });
    }
    let s = sol.s_star;
    let log_norm = neg_log_complement(s);
    let at = |beta: f64| -> Vec<f64> { sol.alpha_star.iter().map(|a| a * beta).collect() };
    let region = |beta: f64| team_response(tech, &at(beta)).expect("slopes match the agents");
    let integrand = |beta: f64, k: usize| -> f64 {
        let alpha = at(beta);
        let u = tech.profile_utility(k, &alpha);
        let slope_terms: f64 = alpha
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let c = tech.cost(k, i);
                if c > 0.0 {
                    a * c / (a * a)
                } else {
                    0.0
                }
            })
            .sum();
        let density = s / ((1.0 - beta * s) * log_norm);
        (1.0 - beta * s) * (u + slope_terms) * density
    };

    const CELLS: usize = 2000;
    let mut edges = vec![0.0];
    let mut previous = region(1.0 / (2.0 * CELLS as f64));
    for cell in 1..CELLS {
        let mid = (cell as f64 + 0.5) / CELLS as f64;
        let current = region(mid);
        if current != previous {
            let lo_mid = (cell as f64 - 0.5) / CELLS as f64;
            let edge = bisect_increasing(|b| if region(b) == previous { -1.0 } else { 1.0 }, lo_mid, mid, 0.0);
            edges.push(edge);
            previous = current;
        }
    }
    edges.push(1.0);
    let mut integrated = 0.0;
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let k = region(mid);
        let f_lo = integrand(lo.max(1e-12), k);
        let f_hi = integrand(hi, k);
        let f_mid = integrand(mid, k);
        if f_lo.is_finite() && f_hi.is_finite() && f_mid.is_finite() {
            integrated += (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
        }
    }
    Ok(TeamPayoff { closed_form: sol.value, integrated })
}

/// `max_profiles (sqrt(E) - sum sqrt(c_i))^2`, clamped at zero.
pub fn team_deterministic_baseline(tech: &TeamTechnology) -> f64 {
    (0..tech.profiles.len())
        .map(|k| {
            let gap = (tech.expected_outcome(k).sqrt() - tech.profile_cost_root(k)).max(0.0);
            gap * gap
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashReport {
    /// Profile selected at the slopes.
    pub profile: usize,
    pub is_nash: bool,
    /// Largest unilateral gain over the selected profile (nonpositive when `is_nash`).
    pub max_gain: f64,
    /// All pure equilibria of the induced game.
    pub equilibria: Vec<usize>,
    /// Spread of the principal's payoff across the pure equilibria.
    pub payoff_spread: f64,
}

/// Largest gain of a unilateral deviation from profile `k` when agent `i`
/// is paid `alpha_i y`. Needs a complete table.
fn deviation_gain(tech: &TeamTechnology, alpha: &[f64], k: usize) -> f64 {
    let profile = &tech.profiles[k];
    let e = tech.expected_outcome(k);
    let mut gain = f64::NEG_INFINITY;
    for (i, agent) in tech.agents.iter().enumerate() {
        let own = alpha[i] * e - tech.cost(k, i);
        for alt in 0..agent.costs.len() {
            if alt == profile.actions[i] {
                continue;
            }
            let mut actions = profile.actions.clone();
            actions[i] = alt;
            let j = tech.find_profile(&actions).expect("complete table");
            let other = alpha[i] * tech.expected_outcome(j) - agent.costs[alt];
            gain = gain.max(other - own);
        }
    }
    gain
}

/// Checks that the team-utility maximizer at `alpha` is a pure Nash
/// equilibrium of the game where agent `i` is paid `alpha_i y`.
pub fn nash_check(tech: &TeamTechnology, alpha: &[f64]) -> Result<NashReport> {
    check_slopes(tech, alpha)?;
    if !tech.is_complete() {
        return Err(ContractError::InvalidTeam(
            "the equilibrium check needs every joint profile in the table".into(),
        ));
    }
    let profile = team_response(tech, alpha)?;
    let max_gain = deviation_gain(tech, alpha, profile);
    let equilibria: Vec<usize> =
        (0..tech.profiles.len()).filter(|&k| deviation_gain(tech, alpha, k) <= NASH_TOL).collect();
    let s: f64 = alpha.iter().sum();
    let payoffs: Vec<f64> = equilibria.iter().map(|&k| (1.0 - s) * tech.expected_outcome(k)).collect();
    let payoff_spread = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - payoffs.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(NashReport {
        profile,
        is_nash: max_gain <= NASH_TOL,
        max_gain: max_gain.max(f64::MIN),
        equilibria,
        payoff_spread: if payoff_spread.is_finite() { payoff_spread } else { 0.0 },
    })
}

/// Points `a >= 0` with `sum a <= 1` whose coordinates are multiples of
/// `1 / steps`, visited in lexicographic order.
pub fn simplex_grid(n: usize, steps: usize, mut visit: impl FnMut(&[f64])) {
    fn rec(prefix: &mut Vec<usize>, n: usize, left: usize, steps: usize, visit: &mut dyn FnMut(&[f64])) {
        if prefix.len() == n {
            let point: Vec<f64> = prefix.iter().map(|&k| k as f64 / steps as f64).collect();
            visit(&point);
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(prefix, n, left - k, steps, visit);
            prefix.pop();
        }
    }
    rec(&mut Vec::with_capacity(n), n, steps, steps, &mut visit);
}

fn grid_size(n: usize, steps: usize) -> f64 {
    // C(steps + n, n)
    (1..=n).fold(1.0, |acc, k| acc * (steps + k) as f64 / k as f64)
}

fn steps_for(resolution: f64) -> Result<usize> {
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(ContractError::OutOfRange(format!("grid resolution {resolution} must lie in (0, 1]")));
    }
    Ok((1.0 / resolution).round().max(1.0) as usize)
}

const GRID_POINT_LIMIT: f64 = 5e6;

/// Best ratio objective over the simplex grid: `(slopes, value)`.
pub fn team_grid_search(tech: &TeamTechnology, resolution: f64) -> Result<(Vec<f64>, f64)> {
    let steps = steps_for(resolution)?;
    let n = tech.num_agents();
    if grid_size(n, steps) > GRID_POINT_LIMIT {
        return Err(ContractError::LimitExceeded(format!(
            "simplex grid with {n} agents at resolution {resolution} is too large"
        )));
    }
    let mut best = (vec![0.0; n], f64::NEG_INFINITY);
    simplex_grid(n, steps, |alpha| {
        let v = team_ratio_objective(tech, alpha).expect("grid points are valid slopes");
        if v > best.1 {
            best = (alpha.to_vec(), v);
        }
    });
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct P3Report {
    /// Smallest `u*(a) - u(a)` over the grid (nonnegative when dominated).
    pub min_dominance_gap: f64,
    /// Largest deviation of the integrand from the value over all checked points.
    pub max_integrand_error: f64,
    /// `|u*(a*) - u(a*)|`.
    pub binding_gap: f64,
    pub points: usize,
    pub pass: bool,
}

/// `V (-ln(1 - s)) / s` with `s = sum a`; equals `V` at `s = 0`.
pub fn dominating_utility(value: f64, alpha: &[f64]) -> f64 {
    let s: f64 = alpha.iter().sum();
    if s == 0.0 {
        return value;
    }
    if s >= 1.0 {
        return f64::INFINITY;
    }
    value * neg_log_complement(s) / s
}

/// `(1 - s)(u* + sum a_i du*/da_i)` with the partials taken analytically.
fn dominating_integrand(value: f64, alpha: &[f64]) -> f64 {
    let s: f64 = alpha.iter().sum();
    let u = dominating_utility(value, alpha);
    // du*/da_i is the same for every i: V (s/(1-s) + ln(1-s)) / s^2
    let partial = value * (s / (1.0 - s) + (-s).ln_1p()) / (s * s);
    let slope_terms: f64 = alpha.iter().map(|a| a * partial).sum();
    (1.0 - s) * (u + slope_terms)
}

/// Checks on a simplex grid and at random points that `u*` dominates the
/// team utility bound and makes the lower-bound integrand constant.
pub fn p3_upper_check(
    tech: &TeamTechnology,
    sol: &TeamSolution,
    resolution: f64,
    random_points: usize,
    seed: u64,
) -> Result<P3Report> {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    if sol.is_degenerate() {
        return Err(ContractError::Degenerate("the dominating utility needs a positive total slope".into()));
    }
    let steps = steps_for(resolution)?;
    let n = tech.num_agents();
    if grid_size(n, steps) > GRID_POINT_LIMIT {
        return Err(ContractError::LimitExceeded(format!(
            "simplex grid with {n} agents at resolution {resolution} is too large"
        )));
    }
    let v = sol.value;
    let mut min_gap = f64::INFINITY;
    let mut max_err = 0.0f64;
    let mut points = 0usize;
    let mut check = |alpha: &[f64]| {
        let s: f64 = alpha.iter().sum();
        let u = team_u_lower(tech, alpha).expect("valid slopes");
        let star = dominating_utility(v, alpha);
        if star.is_finite() && u.is_finite() {
            min_gap = min_gap.min(star - u);
        }
        if (1e-3..1.0).contains(&s) {
            max_err = max_err.max((dominating_integrand(v, alpha) - v).abs());
        }
        points += 1;
    };
    simplex_grid(n, steps, &mut check);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_points {
        // uniform on the simplex via sorted uniforms, then a random total below one
        let mut cuts: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        cuts.sort_by(f64::total_cmp);
        let mut alpha = Vec::with_capacity(n);
        let mut prev = 0.0;
        for &c in &cuts {
            alpha.push(c - prev);
            prev = c;
        }
        let scale = rng.gen_range(1e-3..0.999);
        let total: f64 = alpha.iter().sum();
        if total > 0.0 {
            alpha.iter_mut().for_each(|a| *a *= scale / total);
        }
        check(&alpha);
    }
    let binding_gap = (dominating_utility(v, &sol.alpha_star) - team_u_lower(tech, &sol.alpha_star)?).abs();
    let min_dominance_gap = if min_gap.is_finite() { min_gap } else { 0.0 };
    Ok(P3Report {
        min_dominance_gap,
        max_integrand_error: max_err,
        binding_gap,
        points,
        pass: min_dominance_gap >= -P3_TOL && max_err <= P3_TOL && binding_gap <= 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Action;
    use crate::single::{critical_slope, deterministic_optimum};
    use proptest::prelude::*;

    const S_STAR: f64 = 0.536_380_091_965_04;
    const ALPHA_1: f64 = 0.357_586_727_976_693;
    const ALPHA_2: f64 = 0.178_793_363_988_347;
    const VALUE: f64 = 0.463_619_908_034_96;

    fn point(y: f64) -> OutcomeDist {
        OutcomeDist::point_mass(y).unwrap()
    }

    /// Two agents with a shirk/work choice; only joint work produces.
    fn canonical() -> TeamTechnology {
        let agents = vec![
            TeamAgent { labels: vec!["shirk".into(), "work".into()], costs: vec![0.0, 0.08] },
            TeamAgent { labels: vec!["shirk".into(), "work".into()], costs: vec![0.0, 0.02] },
        ];
        let profiles = vec![
            TeamProfile { actions: vec![0, 0], dist: point(0.0) },
            TeamProfile { actions: vec![1, 0], dist: point(0.0) },
            TeamProfile { actions: vec![0, 1], dist: point(0.0) },
            TeamProfile { actions: vec![1, 1], dist: point(1.0) },
        ];
        TeamTechnology::new(agents, profiles).unwrap()
    }

    #[test]
    fn u_lower_examples() {
        let t = canonical();
        assert_eq!(team_u_lower(&t, &[0.0, 0.0]).unwrap(), 0.0);
        assert!((team_u_lower(&t, &[0.4, 0.2]).unwrap() - 0.7).abs() < 1e-15);
        let full = team_u_lower(&t, &[0.4, 0.2]).unwrap();
        let half = t.profile_utility(3, &[0.2, 0.1]);
        assert!(((1.0 - half) - 2.0 * (1.0 - full)).abs() < 1e-14);
    }

    #[test]
    fn canonical_critical_slope() {
        let sol = team_critical_slope(&canonical());
        assert!((sol.s_star - S_STAR).abs() < 1e-12);
        assert!((sol.alpha_star[0] - ALPHA_1).abs() < 1e-12);
        assert!((sol.alpha_star[1] - ALPHA_2).abs() < 1e-12);
        assert!((sol.value - VALUE).abs() < 1e-12);
        assert_eq!(sol.witness_profile, 3);
    }

    #[test]
    fn canonical_cdf_and_baseline() {
        let t = canonical();
        let sol = team_critical_slope(&t);
        assert!((sol.cdf.cdf(0.5) - 0.406_190_183_975_213).abs() < 1e-12);
        let det = team_deterministic_baseline(&t);
        assert!((det - 0.331_471_862_576_142_9).abs() < 1e-12);
        assert!(sol.value > det);
    }

    #[test]
    fn payoff_integration_matches_closed_form() {
        let t = canonical();
        let sol = team_critical_slope(&t);
        let pay = team_expected_payoff(&t, &sol).unwrap();
        assert!((pay.integrated - pay.closed_form).abs() < 1e-4, "{pay:?}");
    }

    #[test]
    fn nash_at_the_critical_slope() {
        let t = canonical();
        let sol = team_critical_slope(&t);
        let report = nash_check(&t, &sol.alpha_star).unwrap();
        assert!(report.is_nash);
        assert_eq!(report.profile, 3);
    }

    #[test]
    fn nash_needs_complete_table() {
        let agents = vec![
            TeamAgent { labels: vec!["s".into(), "w".into()], costs: vec![0.0, 0.1] },
            TeamAgent { labels: vec!["s".into(), "w".into()], costs: vec![0.0, 0.1] },
        ];
        let profiles = vec![
            TeamProfile { actions: vec![0, 0], dist: point(0.0) },
            TeamProfile { actions: vec![1, 1], dist: point(2.0) },
        ];
        let t = TeamTechnology::new(agents, profiles).unwrap();
        assert!(nash_check(&t, &[0.3, 0.3]).is_err());
    }

    #[test]
    fn p3_check_passes() {
        let t = canonical();
        let sol = team_critical_slope(&t);
        let report = p3_upper_check(&t, &sol, 1e-2, 1000, 42).unwrap();
        assert!(report.pass, "{report:?}");
        let half: Vec<f64> = sol.alpha_star.iter().map(|a| a / 2.0).collect();
        assert!(dominating_utility(sol.value, &half) > team_u_lower(&t, &half).unwrap());
    }

    #[test]
    fn grid_search_does_not_beat_reduction() {
        let t = canonical();
        let sol = team_critical_slope(&t);
        let (_, grid) = team_grid_search(&t, 1e-2).unwrap();
        assert!(grid <= sol.value + 1e-12);
        assert!(sol.value - grid < 1e-3);
    }

    #[test]
    fn degenerate_team() {
        let agents = vec![TeamAgent { labels: vec!["rest".into(), "try".into()], costs: vec![0.0, 0.5] }];
        let profiles = vec![
            TeamProfile { actions: vec![0], dist: point(1.0) },
            TeamProfile { actions: vec![1], dist: point(1.2) },
        ];
        let t = TeamTechnology::new(agents, profiles).unwrap();
        let sol = team_critical_slope(&t);
        assert!(sol.is_degenerate());
        assert_eq!(sol.value, 1.0);
        assert!(sol.cdf.is_point_mass());
        assert!((sol.value - team_deterministic_baseline(&t)).abs() < 1e-9);
    }

    #[test]
    fn validation() {
        let agent = || TeamAgent { labels: vec!["w".into()], costs: vec![0.1] };
        // no zero-cost profile
        let r = TeamTechnology::new(vec![agent()], vec![TeamProfile { actions: vec![0], dist: point(1.0) }]);
        assert!(matches!(r, Err(ContractError::InvalidTeam(_))));
        // not productive: E - K^2 <= 0 everywhere
        let agents = vec![TeamAgent { labels: vec!["s".into(), "w".into()], costs: vec![0.0, 1.0] }];
        let profiles = vec![
            TeamProfile { actions: vec![0], dist: point(0.0) },
            TeamProfile { actions: vec![1], dist: point(1.0) },
        ];
        assert_eq!(TeamTechnology::new(agents, profiles), Err(ContractError::NotProductive));
    }

    #[test]
    fn single_agent_reduction() {
        let tech = Technology::new(vec![
            Action::deterministic(1.0, 0.5).unwrap(),
            Action::deterministic(2.0, 1.3).unwrap(),
        ])
        .unwrap();
        let single = critical_slope(&tech);
        let team = team_critical_slope(&TeamTechnology::from_single(&tech).unwrap());
        assert!((single.alpha_star - team.s_star).abs() < 1e-12);
        assert!((single.value - team.value).abs() < 1e-12);
        let det = deterministic_optimum(&tech).payoff;
        assert!((det - team_deterministic_baseline(&TeamTechnology::from_single(&tech).unwrap())).abs() < 1e-12);
    }

    #[test]
    fn simplex_grid_counts() {
        let mut count = 0;
        simplex_grid(2, 4, |a| {
            assert!(a.iter().sum::<f64>() <= 1.0 + 1e-12);
            count += 1;
        });
        assert_eq!(count, 15);
        assert_eq!(grid_size(2, 4), 15.0);
    }

    proptest! {
        #[test]
        fn single_profile_reduces_to_effective_cost(c1 in 0.001f64..0.2, c2 in 0.001f64..0.2, e in 0.5f64..3.0) {
            let agents = vec![
                TeamAgent { labels: vec!["s".into(), "w".into()], costs: vec![0.0, c1] },
                TeamAgent { labels: vec!["s".into(), "w".into()], costs: vec![0.0, c2] },
            ];
            let profiles = vec![
                TeamProfile { actions: vec![0, 0], dist: point(0.0) },
                TeamProfile { actions: vec![1, 1], dist: point(e) },
            ];
            let k2 = (c1.sqrt() + c2.sqrt()).powi(2);
            prop_assume!(k2 < e);
            let t = TeamTechnology::new(agents, profiles).unwrap();
            let single = critical_slope(&Technology::new(vec![Action::deterministic(e, k2).unwrap()]).unwrap());
            let team = team_critical_slope(&t);
            prop_assert!((single.alpha_star - team.s_star).abs() < 1e-12);
            prop_assert!((single.value - team.value).abs() < 1e-12);
            prop_assert!(team.value >= team_deterministic_baseline(&t) - 1e-12);
        }

        #[test]
        fn team_quantile_formula(u in 0.0f64..1.0) {
            let sol = team_critical_slope(&canonical());
            let beta = sol.cdf.quantile(u);
            let expected = (1.0 - (1.0 - sol.s_star).powf(u)) / sol.s_star;
            prop_assert!((beta - expected).abs() < 1e-9);
        }
    }
}
