//! Lower-bound programs over a grid of contract slopes.
//!
//! For a slope distribution on a finite grid, the adversary picks an expected
//! outcome `e` and cost `c` for every slope. The pair program constrains
//! these by incentive compatibility and by individual rationality against
//! the known technology's utility envelope; the monotone program replaces
//! the pairs by a nondecreasing `e` whose cumulative sums bound the envelope.

use super::{simplex_solve, solve_with_cuts, LpProblem, Relation, Row, Sense, SimplexOptions};
use crate::error::{ContractError, Result};
use crate::model::Technology;
use crate::randomized::RandomizedLinearContract;
use crate::single::u_lower;

/// A slope grid with probability weights and envelope values.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeProgram {
    slopes: Vec<f64>,
    weights: Vec<f64>,
    envelope: Vec<f64>,
}

impl SlopeProgram {
    pub fn new(slopes: Vec<f64>, weights: Vec<f64>, envelope: Vec<f64>) -> Result<Self> {
        if slopes.is_empty() || slopes.len() != weights.len() || slopes.len() != envelope.len() {
            return Err(ContractError::OutOfRange("grid, weights and envelope must have equal nonzero length".into()));
        }
        if slopes.iter().any(|a| !(0.0..1.0).contains(a)) || slopes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ContractError::OutOfRange("slopes must be strictly increasing in [0, 1)".into()));
        }
        if weights.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(ContractError::OutOfRange("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(ContractError::OutOfRange(format!("weights sum to {total}, not 1")));
        }
        if envelope.iter().any(|u| !(u.is_finite() && *u >= 0.0)) {
            return Err(ContractError::OutOfRange("envelope values must be finite and nonnegative".into()));
        }
        if slopes[0] == 0.0 && envelope[0] > 0.0 {
            return Err(ContractError::OutOfRange("envelope must vanish at slope 0".into()));
        }
        Ok(Self { slopes, weights, envelope })
    }

    /// Discretizes `cdf` onto `slopes`: each point carries the CDF mass since
    /// the previous point, and the envelope comes from `tech`.
    pub fn from_cdf(tech: &Technology, slopes: Vec<f64>, cdf: &RandomizedLinearContract) -> Result<Self> {
        let mut previous = 0.0;
        let mut weights = Vec::with_capacity(slopes.len());
        for &a in &slopes {
            let g = cdf.cdf(a);
            weights.push((g - previous).max(0.0));
            previous = g;
        }
        if let Some(last) = weights.last_mut() {
            *last += 1.0 - previous;
        }
        let envelope = slopes.iter().map(|&a| u_lower(tech, a)).collect();
        Self::new(slopes, weights, envelope)
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn envelope(&self) -> &[f64] {
        &self.envelope
    }

    fn len(&self) -> usize {
        self.slopes.len()
    }
}

/// `n` evenly spaced slopes on `[0, top]`.
pub fn uniform_slopes(top: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| top * k as f64 / (n - 1) as f64).collect(),
    }
}

/// The pair program: variables `e(a), c(a) >= 0`, incentive rows for every
/// ordered pair, and `a e(a) - c(a) >= u(a)`.
///
/// When `lazy` is set, only the rows between neighboring slopes are built
/// up front and the others are generated on demand; the optimum is the same.
pub fn pair_program(inst: &SlopeProgram, lazy: bool, opts: &SimplexOptions) -> Result<f64> {
    let n = inst.len();
    let e = |i: usize| i;
    let c = |i: usize| n + i;
    let mut lp = LpProblem::new(Sense::Minimize, 2 * n);
    for i in 0..n {
        lp.objective[e(i)] = inst.weights[i] * (1.0 - inst.slopes[i]);
        lp.add_row(vec![(e(i), inst.slopes[i]), (c(i), -1.0)], Relation::Ge, inst.envelope[i]);
    }
    let incentive = |i: usize, j: usize| {
        let a = inst.slopes[i];
        Row::new(vec![(e(i), a), (c(i), -1.0), (e(j), -a), (c(j), 1.0)], Relation::Ge, 0.0)
    };
    let sol = if lazy {
        // adjacent rows in both directions make `e` monotone, after which
        // the remaining pairs are rarely violated
        for i in 1..n {
            lp.rows.push(incentive(i, i - 1));
            lp.rows.push(incentive(i - 1, i));
        }
        let separate = |x: &[f64]| -> Vec<Row> {
            let mut cuts = Vec::new();
            for i in 0..n {
                let a = inst.slopes[i];
                let own = a * x[e(i)] - x[c(i)];
                let (best, gain) = (0..n)
                    .map(|j| (j, a * x[e(j)] - x[c(j)]))
                    .fold((i, own), |acc, cand| if cand.1 > acc.1 { cand } else { acc });
                if best != i && gain > own + 1e-11 {
                    cuts.push(incentive(i, best));
                }
            }
            cuts
        };
        solve_with_cuts(&lp, separate, opts)?
    } else {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    lp.rows.push(incentive(i, j));
                }
            }
        }
        simplex_solve(&lp, opts)?
    };
    Ok(sol.require_optimal("pair program")?.value)
}

/// The monotone program: nondecreasing `e >= 0` with
/// `sum_{k <= i} (a_k - a_{k-1}) e(k) >= u(a_i)` and `a_{-1} = 0`.
pub fn monotone_program(inst: &SlopeProgram, opts: &SimplexOptions) -> Result<f64> {
    let n = inst.len();
    let mut lp = LpProblem::new(Sense::Minimize, n);
    for i in 0..n {
        lp.objective[i] = inst.weights[i] * (1.0 - inst.slopes[i]);
    }
    for i in 1..n {
        lp.add_row(vec![(i, 1.0), (i - 1, -1.0)], Relation::Ge, 0.0);
    }
    let mut previous = 0.0;
    let mut prefix: Vec<(usize, f64)> = Vec::with_capacity(n);
    for i in 0..n {
        let width = inst.slopes[i] - previous;
        previous = inst.slopes[i];
        if width > 0.0 {
            prefix.push((i, width));
        }
        if inst.envelope[i] > 0.0 || !prefix.is_empty() {
            lp.add_row(prefix.clone(), Relation::Ge, inst.envelope[i]);
        }
    }
    Ok(simplex_solve(&lp, opts)?.require_optimal("monotone program")?.value)
}

/// Optima of the pair program and the monotone program.
pub fn solve_p1_p2(inst: &SlopeProgram, opts: &SimplexOptions) -> Result<(f64, f64)> {
    Ok((pair_program(inst, true, opts)?, monotone_program(inst, opts)?))
}

/// The monotone program's optimum for a point mass at `slope > 0`.
pub fn point_mass_value(tech: &Technology, slope: f64) -> f64 {
    (1.0 - slope) * u_lower(tech, slope) / slope
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Action;
    use crate::single::critical_slope;

    fn canonical() -> Technology {
        Technology::new(vec![Action::deterministic(1.0, 0.5).unwrap()]).unwrap()
    }

    #[test]
    fn discretized_optimal_cdf_nearly_attains_the_value() {
        let tech = canonical();
        let sol = critical_slope(&tech);
        let inst = SlopeProgram::from_cdf(&tech, uniform_slopes(sol.alpha_star, 200), &sol.cdf).unwrap();
        let opts = SimplexOptions::default();
        let v2 = monotone_program(&inst, &opts).unwrap();
        assert!(v2 >= sol.value - 1e-2, "{v2}");
        assert!(v2 <= sol.value + 1e-9, "{v2}");
    }

    #[test]
    fn point_mass_matches_direct_formula() {
        let tech = canonical();
        let opts = SimplexOptions::default();
        let slopes = uniform_slopes(0.9, 10);
        for j in 1..slopes.len() {
            let mut weights = vec![0.0; slopes.len()];
            weights[j] = 1.0;
            let envelope = slopes.iter().map(|&a| u_lower(&tech, a)).collect();
            let inst = SlopeProgram::new(slopes.clone(), weights, envelope).unwrap();
            let (v1, v2) = solve_p1_p2(&inst, &opts).unwrap();
            let direct = point_mass_value(&tech, slopes[j]);
            assert!((v2 - direct).abs() < 1e-9, "{j}: {v2} vs {direct}");
            assert!((v1 - v2).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_envelope_gives_zero() {
        let slopes = uniform_slopes(0.8, 6);
        let inst = SlopeProgram::new(slopes, vec![1.0 / 6.0; 6], vec![0.0; 6]).unwrap();
        let (v1, v2) = solve_p1_p2(&inst, &SimplexOptions::default()).unwrap();
        assert_eq!((v1.abs() < 1e-12, v2.abs() < 1e-12), (true, true));
    }

    #[test]
    fn lazy_and_full_pair_programs_agree() {
        let tech = Technology::new(vec![
            Action::deterministic(1.0, 0.3).unwrap(),
            Action::deterministic(2.0, 1.1).unwrap(),
        ])
        .unwrap();
        let slopes = vec![0.05, 0.2, 0.35, 0.5, 0.62, 0.7, 0.81, 0.9];
        let weights = vec![0.1, 0.05, 0.2, 0.1, 0.15, 0.1, 0.2, 0.1];
        let envelope = slopes.iter().map(|&a| u_lower(&tech, a)).collect();
        let inst = SlopeProgram::new(slopes, weights, envelope).unwrap();
        let opts = SimplexOptions::default();
        let full = pair_program(&inst, false, &opts).unwrap();
        let lazy = pair_program(&inst, true, &opts).unwrap();
        let mono = monotone_program(&inst, &opts).unwrap();
        assert!((full - lazy).abs() < 1e-9);
        assert!((full - mono).abs() < 1e-9, "{full} vs {mono}");
    }

    #[test]
    fn rejects_bad_instances() {
        assert!(SlopeProgram::new(vec![0.2, 0.1], vec![0.5, 0.5], vec![0.0, 0.0]).is_err());
        assert!(SlopeProgram::new(vec![0.1, 0.2], vec![0.5, 0.6], vec![0.0, 0.0]).is_err());
        assert!(SlopeProgram::new(vec![0.0, 0.2], vec![0.5, 0.5], vec![0.1, 0.0]).is_err());
    }
}
