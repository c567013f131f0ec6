//! Robust contract design under technology uncertainty.
//!
//! The principal knows only part of the agent's technology and evaluates a
//! contract by its worst case over all supersets. This crate computes the
//! optimal randomized linear contract in closed form, the optimal
//! deterministic baseline, the team generalization, and a set of independent
//! verifiers: a worst-case adversary, random superset sampling, and linear
//! programs over discretized contract spaces.

pub mod adversary;
pub mod error;
pub mod io;
pub mod lagrangian;
pub mod lp;
pub mod model;
pub mod randomized;
pub mod scalar;
pub mod single;
pub mod team;

pub use error::{ContractError, Result};
pub use model::{
    agent_utility, best_response, principal_payoff, Action, Contract, LinearContract, OutcomeDist,
    TabularContract, Technology, TieBreak,
};
pub use randomized::{CdfKind, RandomizedLinearContract};
pub use single::{critical_slope, deterministic_optimum, SingleAgentSolution};
