//! Lagrangian construction of optimal deterministic linear contracts, for a
//! scalar outcome and for vector outcomes whose costs are bounded below by a
//! convex function of the expected outcome vector.

use serde::Serialize;

use crate::error::{ContractError, Result};
use crate::model::{Technology, PROB_SUM_TOL};
use crate::scalar::golden_section_max;

/// Multipliers above this are treated as unbounded.
pub const LAMBDA_MAX: f64 = 1e3;

/// Resolution of golden-section refinement in the multiplier.
pub const LAMBDA_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleOutcomeLagrangian {
    pub lambda_star: f64,
    /// `1 / (lambda* + 1)`.
    pub slope: f64,
    /// `lambda* (E* / (lambda* + 1) - c*)`.
    pub payoff: f64,
    pub witness_action: usize,
}

/// Multiplier, slope and payoff of the optimal deterministic contract.
///
/// For one action the multiplier objective `l/(l+1) E - l c` peaks at
/// `l = sqrt(E/c) - 1`. The witness is the action with the largest peak;
/// a zero-cost witness has no finite multiplier and is reported as a corner.
pub fn single_outcome_lagrangian(tech: &Technology) -> Result<SingleOutcomeLagrangian> {
    let mut best: Option<(usize, f64)> = None;
    for (i, a) in tech.actions().iter().enumerate() {
        let e = a.expected_outcome();
        if e > a.cost {
            let peak = (e.sqrt() - a.cost.sqrt()).powi(2);
            if best.is_none_or(|(_, v)| peak > v) {
                best = Some((i, peak));
            }
        }
    }
    let (witness, _) = best.ok_or(ContractError::NoNonTrivialAction)?;
    let action = &tech.actions()[witness];
    let (e, c) = (action.expected_outcome(), action.cost);
    if c == 0.0 {
        return Err(ContractError::Corner(
            "the best action is costless, so the multiplier is infinite; use the zero contract with principal-favorable tie-breaking".into(),
        ));
    }
    let lambda_star = (e / c).sqrt() - 1.0;
    Ok(SingleOutcomeLagrangian {
        lambda_star,
        slope: 1.0 / (lambda_star + 1.0),
        payoff: lambda_star * (e / (lambda_star + 1.0) - c),
        witness_action: witness,
    })
}

/// An affine function `p . x + beta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffinePiece {
    pub p: Vec<f64>,
    pub beta: f64,
}

impl AffinePiece {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.p.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.beta
    }
}

/// A convex lower bound on costs, the pointwise maximum of affine pieces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexBound {
    pieces: Vec<AffinePiece>,
}

impl ConvexBound {
    pub fn new(pieces: Vec<AffinePiece>) -> Result<Self> {
        let Some(first) = pieces.first() else {
            return Err(ContractError::OutOfRange("a convex bound needs at least one piece".into()));
        };
        let k = first.p.len();
        if k == 0 {
            return Err(ContractError::OutOfRange("pieces must have at least one coordinate".into()));
        }
        for (i, piece) in pieces.iter().enumerate() {
            if piece.p.len() != k {
                return Err(ContractError::OutOfRange(format!("piece {i} has {} coordinates, expected {k}", piece.p.len())));
            }
            if !piece.beta.is_finite() || piece.p.iter().any(|v| !v.is_finite()) {
                return Err(ContractError::OutOfRange(format!("piece {i} has a non-finite coefficient")));
            }
        }
        Ok(Self { pieces })
    }

    /// `b = 0` on `k` coordinates.
    pub fn zero(k: usize) -> Self {
        Self { pieces: vec![AffinePiece { p: vec![0.0; k], beta: 0.0 }] }
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].p.len()
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.pieces.iter().map(|p| p.eval(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Lowest-index piece attaining the maximum at `x`.
    pub fn active_piece(&self, x: &[f64]) -> usize {
        let top = self.eval(x);
        self.pieces.iter().position(|p| p.eval(x) == top).unwrap_or(0)
    }
}

/// An action whose outcome is a vector; the first coordinate is the
/// principal's reward.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiOutcomeAction {
    support: Vec<(Vec<f64>, f64)>,
    cost: f64,
}

impl MultiOutcomeAction {
    pub fn new(support: Vec<(Vec<f64>, f64)>, cost: f64) -> Result<Self> {
        let Some((first, _)) = support.first() else {
            return Err(ContractError::InvalidDistribution("empty support".into()));
        };
        let k = first.len();
        if k == 0 {
            return Err(ContractError::InvalidDistribution("outcome vectors need at least one coordinate".into()));
        }
        let mut total = 0.0;
        for (y, p) in &support {
            if y.len() != k {
                return Err(ContractError::InvalidDistribution(format!(
                    "outcome vector of length {} where {k} was expected",
                    y.len()
                )));
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(ContractError::InvalidDistribution("outcome vectors must be finite".into()));
            }
            if !(p.is_finite() && *p >= 0.0) {
                return Err(ContractError::InvalidDistribution(format!("probability {p} is invalid")));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(ContractError::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        if !(cost.is_finite() && cost >= 0.0) {
            return Err(ContractError::InvalidAction(format!("cost {cost} must be finite and nonnegative")));
        }
        Ok(Self { support, cost })
    }

    pub fn dim(&self) -> usize {
        self.support[0].0.len()
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn expected_outcome(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.dim()];
        for (y, p) in &self.support {
            for (m, v) in mean.iter_mut().zip(y) {
                *m += p * v;
            }
        }
        mean
    }
}

/// Known vector-outcome technology consistent with a convex cost bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiOutcomeTechnology {
    actions: Vec<MultiOutcomeAction>,
    bound: ConvexBound,
}

impl MultiOutcomeTechnology {
    pub fn new(actions: Vec<MultiOutcomeAction>, bound: ConvexBound) -> Result<Self> {
        if actions.is_empty() {
            return Err(ContractError::InvalidAction("at least one action is required".into()));
        }
        for (i, a) in actions.iter().enumerate() {
            if a.dim() != bound.dim() {
                return Err(ContractError::InvalidAction(format!(
                    "action {i} has {} coordinates but the bound has {}",
                    a.dim(),
                    bound.dim()
                )));
            }
            let floor = bound.eval(&a.expected_outcome());
            if a.cost < floor - 1e-12 {
                return Err(ContractError::InvalidAction(format!(
                    "action {i} costs {} but the bound requires at least {floor}",
                    a.cost
                )));
            }
        }
        Ok(Self { actions, bound })
    }

    /// A scalar technology with `b = 0`.
    pub fn from_single(tech: &Technology) -> Result<Self> {
        let actions = tech
            .actions()
            .iter()
            .map(|a| MultiOutcomeAction::new(a.dist.support().iter().map(|&(y, p)| (vec![y], p)).collect(), a.cost))
            .collect::<Result<Vec<_>>>()?;
        Self::new(actions, ConvexBound::zero(1))
    }

    pub fn actions(&self) -> &[MultiOutcomeAction] {
        &self.actions
    }

    pub fn bound(&self) -> &ConvexBound {
        &self.bound
    }

    /// `l/(l+1) E[y_1] - l c + l b(l/(l+1) E[y])` for action `i`.
    pub fn objective(&self, i: usize, lambda: f64) -> f64 {
        let a = &self.actions[i];
        let mean = a.expected_outcome();
        let t = lambda / (lambda + 1.0);
        let scaled: Vec<f64> = mean.iter().map(|m| t * m).collect();
        t * mean[0] - lambda * a.cost + lambda * self.bound.eval(&scaled)
    }
}

impl MultiOutcomeTechnology {
    /// Stationary point of the objective of action `i` on the piece active at
    /// `lambda`. With `A = E[y_1]`, `B = p . E[y]` and `D = c - beta` the
    /// objective there is `(l A + l^2 B)/(l + 1) - l D`, whose derivative
    /// vanishes at `(l + 1)^2 = (A - B)/(D - B)`. Returns `None` when that
    /// point does not exist or leaves the piece.
    fn polish(&self, i: usize, lambda: f64) -> Option<(f64, f64)> {
        let mean = self.actions[i].expected_outcome();
        let at = |l: f64| -> Vec<f64> { mean.iter().map(|m| l / (l + 1.0) * m).collect() };
        let k = self.bound.active_piece(&at(lambda));
        let piece = &self.bound.pieces[k];
        let a = mean[0];
        let b: f64 = piece.p.iter().zip(&mean).map(|(p, m)| p * m).sum();
        let d = self.actions[i].cost - piece.beta;
        let ratio = (a - b) / (d - b);
        if !(ratio.is_finite() && ratio >= 1.0) {
            return None;
        }
        let l = ratio.sqrt() - 1.0;
        if self.bound.active_piece(&at(l)) != k {
            return None;
        }
        Some((l, self.objective(i, l)))
    }
}

/// `{0} ∪ {1e-3, ..., 1e3}` with `per_decade` points per decade.
pub fn lambda_grid(per_decade: usize) -> Vec<f64> {
    let per_decade = per_decade.max(1);
    let steps = 6 * per_decade;
    let mut grid = vec![0.0];
    grid.extend((0..=steps).map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / steps as f64)));
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaSearch {
    pub lambda_star: f64,
    pub witness_action: usize,
    /// Objective value at `(lambda_star, witness_action)`.
    pub value: f64,
}

/// Maximizes the multiplier objective over actions and `lambda`.
///
/// Each action's objective is bracketed on `grid`, refined by
/// golden-section search and then snapped to the stationary point of the
/// active piece unless that lowers the value by more than rounding. A
/// maximum at the top of the grid is taken as a
/// sign that the supremum is only reached as `lambda -> inf` (a heuristic)
/// and reported as a corner.
pub fn multi_outcome_lambda(tech: &MultiOutcomeTechnology, grid: &[f64]) -> Result<LambdaSearch> {
    if grid.len() < 3 || grid.windows(2).any(|w| !(w[0] < w[1])) || grid[0] < 0.0 {
        return Err(ContractError::OutOfRange("lambda grid needs at least 3 increasing nonnegative points".into()));
    }
    let last = grid.len() - 1;
    let mut best: Option<LambdaSearch> = None;
    for i in 0..tech.actions.len() {
        let values: Vec<f64> = grid.iter().map(|&l| tech.objective(i, l)).collect();
        let j = (0..grid.len()).fold(0, |b, k| if values[k] > values[b] { k } else { b });
        if j == last {
            return Err(ContractError::Corner(format!(
                "action {i}: the multiplier objective still increases at lambda = {} (grid heuristic); \
                 the optimum is the zero contract with principal-favorable tie-breaking",
                grid[last]
            )));
        }
        let lo = grid[j.saturating_sub(1)];
        let hi = grid[j + 1];
        let (mut lambda, mut value) = golden_section_max(|l| tech.objective(i, l), lo, hi, LAMBDA_TOL);
        if values[j] > value {
            lambda = grid[j];
            value = values[j];
        }
        if let Some((l, v)) = tech.polish(i, lambda) {
            if v >= value - 1e-12 * value.abs().max(1.0) {
                lambda = l;
                value = v;
            }
        }
        if best.is_none_or(|b| value > b.value) {
            best = Some(LambdaSearch { lambda_star: lambda, witness_action: i, value });
        }
    }
    best.ok_or_else(|| ContractError::InvalidAction("no actions".into()))
}

/// `w(y) = base * y_1 + sum_i tangent_i * y_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiOutcomeContract {
    pub lambda_star: f64,
    /// `1 / (lambda* + 1)`, the weight on the reward coordinate.
    pub base: f64,
    /// `lambda* p_i / (lambda* + 1)` for the active piece.
    pub tangent: Vec<f64>,
    pub active_piece: usize,
    /// `l/(l+1) E*[y_1] - l c* + l b(x*)` at the multiplier.
    pub certified_bound: f64,
    /// Set when some coordinate carries a negative coefficient.
    pub limited_liability_violation: bool,
}

impl MultiOutcomeContract {
    /// Net coefficient on each coordinate.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut c = self.tangent.clone();
        c[0] += self.base;
        c
    }

    pub fn payment(&self, y: &[f64]) -> f64 {
        self.coefficients().iter().zip(y).map(|(a, b)| a * b).sum()
    }
}

/// The linear contract built from the tangent plane of the bound at
/// `x* = l/(l+1) E*[y]`.
pub fn multi_outcome_contract(tech: &MultiOutcomeTechnology, search: &LambdaSearch) -> Result<MultiOutcomeContract> {
    let lambda = search.lambda_star;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(ContractError::OutOfRange(format!("multiplier {lambda} must be finite and nonnegative")));
    }
    let action = tech
        .actions
        .get(search.witness_action)
        .ok_or_else(|| ContractError::OutOfRange(format!("no action {}", search.witness_action)))?;
    let mean = action.expected_outcome();
    let t = lambda / (lambda + 1.0);
    let x: Vec<f64> = mean.iter().map(|m| t * m).collect();
    let active_piece = tech.bound.active_piece(&x);
    let piece = &tech.bound.pieces[active_piece];
    let base = 1.0 / (lambda + 1.0);
    let tangent: Vec<f64> = piece.p.iter().map(|p| lambda * p / (lambda + 1.0)).collect();
    let certified_bound = t * mean[0] - lambda * action.cost + lambda * piece.eval(&x);
    let mut contract = MultiOutcomeContract {
        lambda_star: lambda,
        base,
        tangent,
        active_piece,
        certified_bound,
        limited_liability_violation: false,
    };
    contract.limited_liability_violation = contract.coefficients().iter().any(|c| *c < 0.0);
    Ok(contract)
}

/// Infimum of the Lagrangian of `contract` at multiplier `lambda` over
/// the mixtures `t F_0 + (1 - t) delta_0` of known actions, `t` on a grid of
/// `t_points` values. Being a minimum over a subfamily, it over-estimates
/// the true infimum.
pub fn verify_lagrangian_bound(
    tech: &MultiOutcomeTechnology,
    contract: &MultiOutcomeContract,
    lambda: f64,
    t_points: usize,
) -> Result<f64> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(ContractError::OutOfRange(format!("multiplier {lambda} must be finite and nonnegative")));
    }
    let t_points = t_points.max(2);
    let means: Vec<Vec<f64>> = tech.actions.iter().map(|a| a.expected_outcome()).collect();
    let best_known = tech
        .actions
        .iter()
        .zip(&means)
        .map(|(a, m)| contract.payment(m) - a.cost)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut inf = f64::INFINITY;
    for mean in &means {
        for s in 0..t_points {
            let t = s as f64 / (t_points - 1) as f64;
            let x: Vec<f64> = mean.iter().map(|m| t * m).collect();
            let value = lambda * best_known + (x[0] - (lambda + 1.0) * contract.payment(&x)) + lambda * tech.bound.eval(&x);
            inf = inf.min(value);
        }
    }
    Ok(inf)
}
