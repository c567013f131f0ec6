//! WebAssembly bindings for the browser demo. Every operation takes and
//! returns JSON text.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use robust_contracts::io::{parse_instance, Instance};
use robust_contracts::single::{ratio_curve, RatioRow};
use robust_contracts::team::{team_critical_slope, team_deterministic_baseline, TeamTechnology};
use robust_contracts::{critical_slope, deterministic_optimum};

/// Points of the CDF returned for plotting.
const CDF_POINTS: usize = 101;

#[derive(Serialize)]
struct Solution {
    kind: &'static str,
    /// Slope vector; one entry for a single agent.
    alpha_star: Vec<f64>,
    total_slope: f64,
    value: f64,
    deterministic_payoff: f64,
    advantage_ratio: f64,
    /// `(x, G(x))` pairs, with `x` the slope (single) or the scale (team).
    cdf: Vec<(f64, f64)>,
}

fn cdf_points(cdf: &robust_contracts::RandomizedLinearContract) -> Vec<(f64, f64)> {
    let end = cdf.support_end();
    if end == 0.0 {
        return vec![(0.0, 1.0)];
    }
    (0..CDF_POINTS)
        .map(|k| {
            let x = end * k as f64 / (CDF_POINTS - 1) as f64;
            (x, cdf.cdf(x))
        })
        .collect()
}

/// Solves a `single` or `team` document.
pub fn solve_json(input: &str) -> Result<String, String> {
    let solution = match parse_instance(input).map_err(|e| e.to_string())? {
        Instance::Single(tech) => {
            let sol = critical_slope(&tech);
            let det = deterministic_optimum(&tech).payoff;
            Solution {
                kind: "single",
                alpha_star: vec![sol.alpha_star],
                total_slope: sol.alpha_star,
                value: sol.value,
                deterministic_payoff: det,
                advantage_ratio: sol.value / det,
                cdf: cdf_points(&sol.cdf),
            }
        }
        Instance::Team(tech) => team_solution(&tech),
        Instance::Bound(_) => return Err("the demo solves single and team documents".into()),
    };
    serde_json::to_string(&solution).map_err(|e| e.to_string())
}

fn team_solution(tech: &TeamTechnology) -> Solution {
    let sol = team_critical_slope(tech);
    let det = team_deterministic_baseline(tech);
    Solution {
        kind: "team",
        total_slope: sol.s_star,
        value: sol.value,
        deterministic_payoff: det,
        advantage_ratio: sol.value / det,
        cdf: cdf_points(&sol.cdf),
        alpha_star: sol.alpha_star,
    }
}

/// The advantage-ratio curve as a JSON array of rows.
pub fn ratio_curve_json(from: f64, to: f64, step: f64) -> Result<String, String> {
    let rows: Vec<RatioRow> = ratio_curve(from, to, step).map_err(|e| e.to_string())?;
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn solve(input: &str) -> Result<String, JsError> {
    solve_json(input).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = ratioCurve)]
pub fn ratio_curve_js(from: f64, to: f64, step: f64) -> Result<String, JsError> {
    ratio_curve_json(from, to, step).map_err(|e| JsError::new(&e))
}
