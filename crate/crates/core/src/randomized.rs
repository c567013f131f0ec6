//! The closed-form log-CDF family of randomized linear contracts.

use rand::Rng;
use serde::Serialize;

use crate::error::{ContractError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CdfKind {
    /// The slope itself is drawn on `[0, alpha_star]`.
    Single,
    /// A scale `beta` in `[0, 1]` is drawn and the slope vector is
    /// `beta * direction`.
    Team { direction: Vec<f64> },
}

/// A randomized linear contract with CDF `ln(1 - s x) / ln(1 - s)` in the
/// team parameterization or `ln(1 - a) / ln(1 - a*)` for a single agent.
///
/// When the critical slope is zero the contract is a point mass at zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomizedLinearContract {
    critical: f64,
    #[serde(flatten)]
    kind: CdfKind,
}

impl RandomizedLinearContract {
    pub fn single(alpha_star: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha_star) {
            return Err(ContractError::OutOfRange(format!("critical slope {alpha_star} outside [0, 1)")));
        }
        Ok(Self { critical: alpha_star, kind: CdfKind::Single })
    }

    pub fn team(direction: Vec<f64>) -> Result<Self> {
        if direction.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(ContractError::OutOfRange("team slopes must be nonnegative".into()));
        }
        let total: f64 = direction.iter().sum();
        if total >= 1.0 {
            return Err(ContractError::OutOfRange(format!("total slope {total} must be below 1")));
        }
        Ok(Self { critical: total, kind: CdfKind::Team { direction } })
    }

    /// `alpha*` for a single agent, the total slope `s*` for a team.
    pub fn critical_slope(&self) -> f64 {
        self.critical
    }

    pub fn kind(&self) -> &CdfKind {
        &self.kind
    }

    pub fn is_point_mass(&self) -> bool {
        self.critical == 0.0
    }

    /// Upper end of the support of the drawn variable.
    pub fn support_end(&self) -> f64 {
        match (&self.kind, self.is_point_mass()) {
            (_, true) => 0.0,
            (CdfKind::Single, false) => self.critical,
            (CdfKind::Team { .. }, false) => 1.0,
        }
    }

    /// The CDF of the drawn variable (slope or scale).
    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if self.is_point_mass() || x >= self.support_end() {
            return 1.0;
        }
        let s = self.critical;
        match self.kind {
            CdfKind::Single => (-x).ln_1p() / (-s).ln_1p(),
            CdfKind::Team { .. } => (-x * s).ln_1p() / (-s).ln_1p(),
        }
    }

    /// Inverse CDF: `1 - (1 - a*)^u` (divided by `s*` for teams).
    pub fn quantile(&self, u: f64) -> f64 {
        if self.is_point_mass() {
            return 0.0;
        }
        let u = u.clamp(0.0, 1.0);
        let s = self.critical;
        let slope = -(u * (-s).ln_1p()).exp_m1();
        match self.kind {
            CdfKind::Single => slope.min(s),
            CdfKind::Team { .. } => (slope / s).min(1.0),
        }
    }

    /// The slope vector realized when the drawn variable equals `x`.
    pub fn slopes_at(&self, x: f64) -> Vec<f64> {
        match &self.kind {
            CdfKind::Single => vec![x],
            CdfKind::Team { direction } => direction.iter().map(|a| a * x).collect(),
        }
    }

    /// Draws the variable by inverse transform sampling.
    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        self.quantile(rng.gen::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_cdf_examples() {
        let g = RandomizedLinearContract::single(0.5).unwrap();
        assert_eq!(g.cdf(0.0), 0.0);
        assert_eq!(g.cdf(0.5), 1.0);
        assert!((g.cdf(0.25) - 0.415_037_499_278_843_8).abs() < 1e-12);
    }

    #[test]
    fn point_mass_at_zero() {
        let g = RandomizedLinearContract::single(0.0).unwrap();
        assert!(g.is_point_mass());
        assert_eq!(g.cdf(-1e-9), 0.0);
        assert_eq!(g.cdf(0.0), 1.0);
        assert_eq!(g.quantile(0.7), 0.0);
    }

    #[test]
    fn quantile_examples() {
        let g = RandomizedLinearContract::single(0.75).unwrap();
        assert_eq!(g.quantile(0.0), 0.0);
        assert!((g.quantile(1.0) - 0.75).abs() < 1e-15);
        assert!((g.quantile(0.5) - 0.5).abs() < 1e-15);
        assert!((g.cdf(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn team_cdf_examples() {
        let s = 0.536_380_091_965_04;
        let g = RandomizedLinearContract::team(vec![s * 2.0 / 3.0, s / 3.0]).unwrap();
        assert_eq!(g.cdf(0.0), 0.0);
        assert_eq!(g.cdf(1.0), 1.0);
        // ln(1 - 0.5 s) / ln(1 - s), evaluated independently
        assert!((g.cdf(0.5) - 0.406_190_183_975_213).abs() < 1e-12);
        let slopes = g.slopes_at(0.5);
        assert!((slopes[0] - s / 3.0).abs() < 1e-15);
    }

    #[test]
    fn team_with_one_agent_matches_single() {
        let a = 0.6;
        let team = RandomizedLinearContract::team(vec![a]).unwrap();
        let single = RandomizedLinearContract::single(a).unwrap();
        for k in 0..=20 {
            let beta = k as f64 / 20.0;
            assert!((team.cdf(beta) - single.cdf(beta * a)).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_slopes() {
        assert!(RandomizedLinearContract::single(1.0).is_err());
        assert!(RandomizedLinearContract::team(vec![0.6, 0.4]).is_err());
        assert!(RandomizedLinearContract::team(vec![-0.1, 0.4]).is_err());
    }

    proptest! {
        #[test]
        fn cdf_and_quantile_are_inverse(a in 1e-6f64..0.999, u in 0.0f64..1.0) {
            let g = RandomizedLinearContract::single(a).unwrap();
            prop_assert!((g.cdf(g.quantile(u)) - u).abs() < 1e-12);
        }

        #[test]
        fn team_quantile_inverse(s in 1e-4f64..0.99, u in 0.0f64..1.0) {
            let g = RandomizedLinearContract::team(vec![s * 0.3, s * 0.7]).unwrap();
            let beta = g.quantile(u);
            prop_assert!((beta - (1.0 - (1.0 - s).powf(u)) / s).abs() < 1e-9);
            prop_assert!((g.cdf(beta) - u).abs() < 1e-10);
        }

        #[test]
        fn cdf_is_monotone(a in 1e-3f64..0.999, x in 0.0f64..1.0, y in 0.0f64..1.0) {
            let g = RandomizedLinearContract::single(a).unwrap();
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            prop_assert!(g.cdf(lo) <= g.cdf(hi));
        }
    }
}
