//! Input documents and number formatting for reports.
//!
//! Inputs are JSON objects with a top-level `kind`:
//!
//! ```json
//! {"kind": "single", "actions": [{"outcomes": [[1.0, 1.0]], "cost": 0.5}]}
//!
//! {"kind": "team",
//!  "agents": [{"labels": ["shirk", "work"], "costs": [0.0, 0.1]}, ...],
//!  "profiles": [{"actions": [0, 1], "outcomes": [[1.0, 0.5], [0.0, 0.5]]}, ...]}
//!
//! {"kind": "bound",
//!  "pieces": [{"p": [0.0, 1.0], "beta": -0.8}],
//!  "actions": [{"outcomes": [[[1.0, 1.0], 1.0]], "cost": 0.3}]}
//! ```
//!
//! Outcomes are `[y, probability]` pairs; for `bound` documents `y` is a
//! vector whose first coordinate is the reward. Agent labels are optional.
//! The null action is added to single-agent technologies when missing.

use serde::Deserialize;

use crate::error::{ContractError, Result};
use crate::lagrangian::{AffinePiece, ConvexBound, MultiOutcomeAction, MultiOutcomeTechnology};
use crate::model::{Action, OutcomeDist, Technology};
use crate::team::{TeamAgent, TeamProfile, TeamTechnology};

/// A parsed input document.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Single(Technology),
    Team(TeamTechnology),
    Bound(MultiOutcomeTechnology),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Single(_) => "single",
            Instance::Team(_) => "team",
            Instance::Bound(_) => "bound",
        }
    }
}

#[derive(Deserialize)]
struct Header {
    kind: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SingleDoc {
    #[allow(dead_code)]
    kind: String,
    actions: Vec<ActionDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TeamDoc {
    #[allow(dead_code)]
    kind: String,
    agents: Vec<AgentDoc>,
    profiles: Vec<ProfileDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundDoc {
    #[allow(dead_code)]
    kind: String,
    pieces: Vec<PieceDoc>,
    actions: Vec<VectorActionDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionDoc {
    outcomes: Vec<(f64, f64)>,
    cost: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentDoc {
    #[serde(default)]
    labels: Option<Vec<String>>,
    costs: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    actions: Vec<usize>,
    outcomes: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceDoc {
    p: Vec<f64>,
    beta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorActionDoc {
    outcomes: Vec<(Vec<f64>, f64)>,
    cost: f64,
}

fn at(path: String) -> impl FnOnce(ContractError) -> ContractError {
    move |e| match e {
        ContractError::NotProductive => e,
        other => ContractError::Parse(format!("{path}: {other}")),
    }
}

/// Parses and validates an input document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    fn read<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
        serde_json::from_str(text).map_err(|e| ContractError::Parse(e.to_string()))
    }
    let header: Header = read(text)?;
    match header.kind.as_str() {
        "single" => {
            let SingleDoc { actions, .. } = read(text)?;
            let actions = actions
                .into_iter()
                .enumerate()
                .map(|(i, a)| {
                    OutcomeDist::new(a.outcomes)
                        .and_then(|d| Action::new(d, a.cost))
                        .map_err(at(format!("actions[{i}]")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Instance::Single(Technology::new(actions).map_err(at("actions".into()))?))
        }
        "team" => {
            let TeamDoc { agents, profiles, .. } = read(text)?;
            let agents = agents
                .into_iter()
                .enumerate()
                .map(|(i, a)| {
                    let labels = a.labels.unwrap_or_else(|| (0..a.costs.len()).map(|k| format!("a{i}.{k}")).collect());
                    TeamAgent { labels, costs: a.costs }
                })
                .collect();
            let profiles = profiles
                .into_iter()
                .enumerate()
                .map(|(k, p)| {
                    OutcomeDist::new(p.outcomes)
                        .map(|dist| TeamProfile { actions: p.actions, dist })
                        .map_err(at(format!("profiles[{k}]")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Instance::Team(TeamTechnology::new(agents, profiles).map_err(at("team".into()))?))
        }
        "bound" => {
            let BoundDoc { pieces, actions, .. } = read(text)?;
            let bound = ConvexBound::new(pieces.into_iter().map(|p| AffinePiece { p: p.p, beta: p.beta }).collect())
                .map_err(at("pieces".into()))?;
            let actions = actions
                .into_iter()
                .enumerate()
                .map(|(i, a)| MultiOutcomeAction::new(a.outcomes, a.cost).map_err(at(format!("actions[{i}]"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(Instance::Bound(MultiOutcomeTechnology::new(actions, bound).map_err(at("actions".into()))?))
        }
        other => Err(ContractError::Parse(format!("kind: unknown value `{other}`, expected single, team or bound"))),
    }
}

/// Formats `x` with 12 significant digits, in positional notation when the
/// magnitude allows and scientific notation otherwise.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if !(-5..DIGITS + 3).contains(&exp) {
        return sci;
    }
    let decimals = (DIGITS - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}
