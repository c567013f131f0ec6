mod common;

use proptest::prelude::*;

use robust_contracts::adversary::{build_adversary, e_star, c_star};
use robust_contracts::lagrangian::{lambda_grid, multi_outcome_contract, multi_outcome_lambda};
use robust_contracts::single::{ratio_objective, MAX_SLOPE};
use robust_contracts::team::{
    team_critical_slope, team_deterministic_baseline, TeamAgent, TeamProfile, TeamTechnology,
};
use robust_contracts::{
    agent_utility, best_response, critical_slope, deterministic_optimum, Action, LinearContract, OutcomeDist,
    TabularContract, TieBreak,
};

use common::*;

fn neg_log_complement(a: f64) -> f64 {
    -(-a).ln_1p()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn technologies_contain_the_null_action(seed in any::<u64>()) {
        let tech = random_technology(&mut rng(seed), 5);
        prop_assert!(tech.actions().iter().any(Action::is_null));
    }

    #[test]
    fn best_response_maximizes_utility(seed in any::<u64>(), slope in 0.0..1.0f64) {
        let tech = random_technology(&mut rng(seed), 5);
        let w = TabularContract::from_linear(slope, &tech.outcome_grid()).unwrap();
        for tie in [TieBreak::BestForPrincipal, TieBreak::WorstForPrincipal] {
            let i = best_response(&w, &tech, tie).unwrap();
            let chosen = agent_utility(&w, &tech.actions()[i]).unwrap();
            for a in tech.actions() {
                prop_assert!(chosen >= agent_utility(&w, a).unwrap() - 1e-9);
            }
        }
    }

    #[test]
    fn linear_utility_is_affine_in_the_slope(seed in any::<u64>(), a in 0.0..1.0f64, b in 0.0..1.0f64, t in 0.0..1.0f64) {
        let tech = random_technology(&mut rng(seed), 3);
        let act = &tech.actions()[0];
        let u = |s: f64| agent_utility(&LinearContract::new(s).unwrap(), act).unwrap();
        let mid = t * a + (1.0 - t) * b;
        prop_assert!((u(mid) - (t * u(a) + (1.0 - t) * u(b))).abs() < 1e-12);
        prop_assert!((u(mid) - (mid * act.expected_outcome() - act.cost)).abs() < 1e-12);
    }

    #[test]
    fn critical_slope_maximizes_the_ratio(seed in any::<u64>()) {
        let tech = random_technology(&mut rng(seed), 4);
        let sol = critical_slope(&tech);
        for k in 1..2000 {
            let a = k as f64 / 2000.0;
            prop_assert!(ratio_objective(&tech, a) <= sol.value + 1e-12, "slope {a}");
        }
    }

    #[test]
    fn randomization_never_hurts(seed in any::<u64>()) {
        let tech = random_technology(&mut rng(seed), 5);
        prop_assert!(critical_slope(&tech).value >= deterministic_optimum(&tech).payoff - 1e-12);
    }

    #[test]
    fn degenerate_value_is_the_deterministic_optimum(seed in any::<u64>()) {
        let tech = degenerate_technology(&mut rng(seed));
        let sol = critical_slope(&tech);
        prop_assert!(sol.is_degenerate());
        prop_assert!((sol.value - deterministic_optimum(&tech).payoff).abs() < 1e-9);
    }

    #[test]
    fn scale_covariance(seed in any::<u64>(), k in 0.1..10.0f64) {
        let tech = random_technology(&mut rng(seed), 4);
        let sol = critical_slope(&tech);
        let scaled = critical_slope(&tech.scaled(k).unwrap());
        prop_assert!((sol.alpha_star - scaled.alpha_star).abs() < 1e-9);
        prop_assert!((k * sol.value - scaled.value).abs() < 1e-9 * k.max(1.0));
    }

    #[test]
    fn quantile_inverts_the_cdf(seed in any::<u64>(), u in 0.001..0.999f64) {
        let sol = critical_slope(&random_technology(&mut rng(seed), 4));
        prop_assume!(sol.alpha_star > 0.0);
        prop_assert!((sol.cdf.cdf(sol.cdf.quantile(u)) - u).abs() < 1e-12);
    }

    #[test]
    fn adversary_identities(seed in any::<u64>()) {
        let tech = random_technology(&mut rng(seed), 4);
        let sol = critical_slope(&tech);
        prop_assume!(sol.alpha_star > 0.0);
        // construction checks that the adversary contains the known actions
        build_adversary(&tech, &sol).unwrap();
        for k in 1..100 {
            let a = (k as f64 / 100.0).min(MAX_SLOPE);
            let e = e_star(a, &sol).unwrap();
            let c = c_star(a, &sol).unwrap();
            prop_assert!((a * e - c - sol.value * neg_log_complement(a)).abs() < 1e-12 * e.max(1.0));
            prop_assert!(((1.0 - a) * e - sol.value).abs() < 1e-12);
        }
    }

    #[test]
    fn team_beats_its_deterministic_baseline(seed in any::<u64>(), n in 2usize..4) {
        let tech = random_team(&mut rng(seed), n);
        prop_assert!(team_critical_slope(&tech).value >= team_deterministic_baseline(&tech) - 1e-12);
    }

    #[test]
    fn single_profile_team_is_a_single_agent(seed in any::<u64>(), n in 1usize..4) {
        use rand::Rng;
        let mut r = rng(seed);
        let costs: Vec<f64> = (0..n).map(|_| r.gen_range(0.01..0.1)).collect();
        let e = r.gen_range(1.0..2.0);
        let agents = costs
            .iter()
            .enumerate()
            .map(|(i, &c)| TeamAgent { labels: vec![format!("idle{i}"), format!("work{i}")], costs: vec![0.0, c] })
            .collect();
        let profiles = vec![
            TeamProfile { actions: vec![0; n], dist: OutcomeDist::zero() },
            TeamProfile { actions: vec![1; n], dist: OutcomeDist::point_mass(e).unwrap() },
        ];
        let team = team_critical_slope(&TeamTechnology::new(agents, profiles).unwrap());
        let k: f64 = costs.iter().map(|c| c.sqrt()).sum();
        let single = critical_slope(&robust_contracts::Technology::new(vec![Action::deterministic(e, k * k).unwrap()]).unwrap());
        prop_assert!((team.value - single.value).abs() < 1e-12);
        prop_assert!((team.s_star - single.alpha_star).abs() < 1e-12);
        for (a, c) in team.alpha_star.iter().zip(&costs) {
            prop_assert!((a - team.s_star * c.sqrt() / k).abs() < 1e-12);
        }
    }

    #[test]
    fn certified_bound_is_the_supremum_on_the_grid(seed in any::<u64>()) {
        let tech = random_bound_technology(&mut rng(seed));
        let grid = lambda_grid(2000);
        let search = multi_outcome_lambda(&tech, &grid).unwrap();
        let contract = multi_outcome_contract(&tech, &search).unwrap();
        let grid_sup = (0..tech.actions().len())
            .flat_map(|i| grid.iter().map(move |&l| (i, l)))
            .map(|(i, l)| tech.objective(i, l))
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(contract.certified_bound <= grid_sup + 1e-6);
        prop_assert!(contract.certified_bound >= grid_sup - 1e-12);
        let mean = tech.actions()[search.witness_action].expected_outcome();
        let t = search.lambda_star / (search.lambda_star + 1.0);
        let x: Vec<f64> = mean.iter().map(|m| t * m).collect();
        prop_assert_eq!(tech.bound().pieces()[contract.active_piece].eval(&x), tech.bound().eval(&x));
    }
}
