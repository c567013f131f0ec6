//! Outcome distributions, actions, technologies and deterministic contracts.
//!
//! Everything here is immutable once constructed. Constructors validate the
//! invariants the solvers rely on, so downstream code never re-checks them.

use serde::Serialize;

use crate::error::{ContractError, Result};

/// Probabilities must sum to one within this absolute tolerance.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Two agent utilities closer than this are treated as a tie.
pub const UTILITY_TIE_TOL: f64 = 1e-9;

/// A finite distribution over nonnegative outcomes, sorted by outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDist {
    support: Vec<(f64, f64)>,
}

impl OutcomeDist {
    /// Builds a distribution from `(outcome, probability)` pairs.
    pub fn new(mut support: Vec<(f64, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(ContractError::InvalidDistribution("empty support".into()));
        }
        for &(y, p) in &support {
            if !y.is_finite() || y < 0.0 {
                return Err(ContractError::InvalidDistribution(format!(
                    "outcome {y} must be finite and nonnegative"
                )));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(ContractError::InvalidDistribution(format!(
                    "probability {p} must be finite and nonnegative"
                )));
            }
        }
        support.sort_by(|a, b| a.0.total_cmp(&b.0));
        if support.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(ContractError::InvalidDistribution("outcomes must be distinct".into()));
        }
        let total: f64 = support.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(ContractError::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { support })
    }

    /// The point mass at `y`.
    pub fn point_mass(y: f64) -> Result<Self> {
        Self::new(vec![(y, 1.0)])
    }

    /// The point mass at zero.
    pub fn zero() -> Self {
        Self { support: vec![(0.0, 1.0)] }
    }

    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    pub fn outcomes(&self) -> impl Iterator<Item = f64> + '_ {
        self.support.iter().map(|&(y, _)| y)
    }

    /// `E[y]`.
    pub fn expected_outcome(&self) -> f64 {
        self.support.iter().map(|&(y, p)| y * p).sum()
    }

    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.support.iter().map(|&(y, p)| f(y) * p).sum()
    }

    /// True when all mass sits on outcome zero.
    pub fn is_zero(&self) -> bool {
        self.support.iter().all(|&(y, p)| y == 0.0 || p == 0.0)
    }

    /// The mixture `t * self + (1 - t) * delta_0`.
    pub fn mix_with_zero(&self, t: f64) -> Self {
        let t = t.clamp(0.0, 1.0);
        let mut support: Vec<(f64, f64)> = self.support.iter().map(|&(y, p)| (y, t * p)).collect();
        match support.iter_mut().find(|(y, _)| *y == 0.0) {
            Some(entry) => entry.1 += 1.0 - t,
            None => support.insert(0, (0.0, 1.0 - t)),
        }
        Self { support }
    }
}

/// An action: an outcome distribution together with the agent's cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Action {
    pub dist: OutcomeDist,
    pub cost: f64,
}

impl Action {
    pub fn new(dist: OutcomeDist, cost: f64) -> Result<Self> {
        if !cost.is_finite() || cost < 0.0 {
            return Err(ContractError::InvalidAction(format!(
                "cost {cost} must be finite and nonnegative"
            )));
        }
        Ok(Self { dist, cost })
    }

    /// The zero-effort action: outcome zero with certainty, no cost.
    pub fn null() -> Self {
        Self { dist: OutcomeDist::zero(), cost: 0.0 }
    }

    /// Convenience constructor for a deterministic outcome.
    pub fn deterministic(outcome: f64, cost: f64) -> Result<Self> {
        Self::new(OutcomeDist::point_mass(outcome)?, cost)
    }

    pub fn expected_outcome(&self) -> f64 {
        self.dist.expected_outcome()
    }

    pub fn is_null(&self) -> bool {
        self.cost == 0.0 && self.dist.is_zero()
    }

    /// `E[y] - c > 0`.
    pub fn is_non_trivial(&self) -> bool {
        self.expected_outcome() - self.cost > 0.0
    }
}

/// A finite action set that always contains the null action and at least one
/// non-trivial action.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Technology {
    actions: Vec<Action>,
}

impl Technology {
    /// Validates `actions` and appends the null action when it is missing.
    pub fn new(actions: Vec<Action>) -> Result<Self> {
        let tech = Self::with_null(actions);
        if !tech.actions.iter().any(Action::is_non_trivial) {
            return Err(ContractError::NoNonTrivialAction);
        }
        Ok(tech)
    }

    /// Builds a technology without the non-triviality check. Used for
    /// supersets of an already valid technology.
    pub(crate) fn with_null(mut actions: Vec<Action>) -> Self {
        if !actions.iter().any(Action::is_null) {
            actions.push(Action::null());
        }
        Self { actions }
    }

    /// A superset of `self` with `extra` actions appended.
    pub fn extended(&self, extra: impl IntoIterator<Item = Action>) -> Self {
        let mut actions = self.actions.clone();
        actions.extend(extra);
        Self { actions }
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Largest expected outcome over the actions.
    pub fn max_expected_outcome(&self) -> f64 {
        self.actions.iter().map(Action::expected_outcome).fold(0.0, f64::max)
    }

    /// Sorted union of all support points, always including zero.
    pub fn outcome_grid(&self) -> Vec<f64> {
        let mut grid: Vec<f64> = std::iter::once(0.0)
            .chain(self.actions.iter().flat_map(|a| a.dist.outcomes()))
            .collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid
    }

    /// Multiplies every outcome and cost by `k > 0`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(ContractError::OutOfRange(format!("scale factor {k} must be positive")));
        }
        let actions = self
            .actions
            .iter()
            .map(|a| {
                let support = a.dist.support().iter().map(|&(y, p)| (y * k, p)).collect();
                Action::new(OutcomeDist::new(support)?, a.cost * k)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(actions)
    }
}

/// Anything that maps an outcome to a payment.
pub trait Contract {
    fn payment(&self, y: f64) -> Result<f64>;
}

/// `w(y) = slope * y` with slope in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearContract {
    slope: f64,
}

impl LinearContract {
    pub fn new(slope: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&slope) {
            return Err(ContractError::InvalidContract(format!("slope {slope} outside [0, 1]")));
        }
        Ok(Self { slope })
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }
}

impl Contract for LinearContract {
    fn payment(&self, y: f64) -> Result<f64> {
        Ok(self.slope * y)
    }
}

/// An explicit outcome-to-payment table with nonnegative payments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TabularContract {
    outcomes: Vec<f64>,
    payments: Vec<f64>,
}

impl TabularContract {
    pub fn new(mut entries: Vec<(f64, f64)>) -> Result<Self> {
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(ContractError::InvalidContract("duplicate outcome in payment table".into()));
        }
        if let Some(&(y, w)) = entries.iter().find(|&&(_, w)| !(w.is_finite() && w >= 0.0)) {
            return Err(ContractError::InvalidContract(format!(
                "payment {w} at outcome {y} violates limited liability"
            )));
        }
        let (outcomes, payments) = entries.into_iter().unzip();
        Ok(Self { outcomes, payments })
    }

    /// Tabulates a linear contract on `grid`.
    pub fn from_linear(slope: f64, grid: &[f64]) -> Result<Self> {
        let w = LinearContract::new(slope)?;
        Self::new(grid.iter().map(|&y| (y, w.slope() * y)).collect())
    }

    pub fn entries(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.outcomes.iter().copied().zip(self.payments.iter().copied())
    }
}

impl Contract for TabularContract {
    fn payment(&self, y: f64) -> Result<f64> {
        self.outcomes
            .binary_search_by(|o| o.total_cmp(&y))
            .map(|i| self.payments[i])
            .map_err(|_| ContractError::DomainMismatch(y))
    }
}

/// `E_F[w(y)] - c`.
pub fn agent_utility(w: &impl Contract, a: &Action) -> Result<f64> {
    let mut wage = 0.0;
    for &(y, p) in a.dist.support() {
        wage += p * w.payment(y)?;
    }
    Ok(wage - a.cost)
}

/// `E_F[y - w(y)]`.
pub fn principal_payoff(w: &impl Contract, a: &Action) -> Result<f64> {
    let mut total = 0.0;
    for &(y, p) in a.dist.support() {
        total += p * (y - w.payment(y)?);
    }
    Ok(total)
}

/// Which utility-maximizing action an indifferent agent picks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TieBreak {
    BestForPrincipal,
    WorstForPrincipal,
}

/// Index of the agent's utility-maximizing action in `tech`.
///
/// Utilities within [`UTILITY_TIE_TOL`] of the maximum tie; among ties the
/// principal's payoff decides according to `tie`, then the lowest index.
pub fn best_response(w: &impl Contract, tech: &Technology, tie: TieBreak) -> Result<usize> {
    let scored = tech
        .actions()
        .iter()
        .map(|a| Ok((agent_utility(w, a)?, principal_payoff(w, a)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(select_response(&scored, tie))
}

/// Picks from `(agent utility, principal payoff)` pairs following the
/// tie-breaking convention of [`best_response`].
pub(crate) fn select_response(scored: &[(f64, f64)], tie: TieBreak) -> usize {
    let top = scored.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let mut chosen: Option<usize> = None;
    for (i, &(u, payoff)) in scored.iter().enumerate() {
        if u < top - UTILITY_TIE_TOL {
            continue;
        }
        chosen = match chosen {
            None => Some(i),
            Some(j) => {
                let better = match tie {
                    TieBreak::BestForPrincipal => payoff > scored[j].1,
                    TieBreak::WorstForPrincipal => payoff < scored[j].1,
                };
                Some(if better { i } else { j })
            }
        };
    }
    chosen.unwrap_or(0)
}
