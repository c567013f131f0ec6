#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use robust_contracts::lagrangian::{AffinePiece, ConvexBound, MultiOutcomeAction, MultiOutcomeTechnology};
use robust_contracts::team::{TeamAgent, TeamProfile, TeamTechnology};
use robust_contracts::{Action, OutcomeDist, Technology};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn canonical() -> Technology {
    Technology::new(vec![Action::deterministic(1.0, 0.5).unwrap()]).unwrap()
}

/// Probability vector of length `n` summing to one up to rounding in the last entry.
pub fn simplex_point(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let head: f64 = p[..n - 1].iter().sum();
    p[n - 1] = 1.0 - head;
    p
}

/// A distribution on up to `max_support` distinct outcomes in `[0, top]`.
pub fn random_dist(rng: &mut impl Rng, max_support: usize, top: f64) -> OutcomeDist {
    let k = rng.gen_range(1..=max_support);
    let mut ys: Vec<f64> = Vec::with_capacity(k);
    while ys.len() < k {
        let y = (rng.gen_range(0.0..top) * 1000.0).round() / 1000.0;
        if !ys.contains(&y) {
            ys.push(y);
        }
    }
    let p = simplex_point(rng, k);
    OutcomeDist::new(ys.into_iter().zip(p).collect()).unwrap()
}

/// A random technology with `1..=max_actions` actions and strictly positive
/// costs below the mean, so at least one action is non-trivial.
pub fn random_technology(rng: &mut impl Rng, max_actions: usize) -> Technology {
    loop {
        let n = rng.gen_range(1..=max_actions);
        let actions: Vec<Action> = (0..n)
            .map(|_| {
                let dist = random_dist(rng, 3, 2.0);
                let e = dist.expected_outcome();
                let cost = rng.gen_range(0.01..1.0) * e.max(0.02);
                Action::new(dist, cost).unwrap()
            })
            .collect();
        if let Ok(t) = Technology::new(actions) {
            return t;
        }
    }
}

/// A technology whose costless action `E0` dominates: every other action has
/// `E - c <= E0`, so `u(a) <= a E0` and the ratio objective peaks at zero.
pub fn degenerate_technology(rng: &mut impl Rng) -> Technology {
    let free = random_dist(rng, 2, 1.0);
    let e0 = free.expected_outcome().max(1e-3);
    let free = if free.is_zero() { OutcomeDist::point_mass(e0).unwrap() } else { free };
    let e0 = free.expected_outcome();
    let mut actions = vec![Action::new(free, 0.0).unwrap()];
    for _ in 0..rng.gen_range(1..=4) {
        let dist = random_dist(rng, 3, 3.0);
        let e = dist.expected_outcome();
        let floor = (e - e0).max(0.0);
        actions.push(Action::new(dist, floor + rng.gen_range(0.0..0.5)).unwrap());
    }
    Technology::new(actions).unwrap()
}

/// A complete team table with `n` agents, 2 actions each (action 0 is
/// costless), and a near-zero outcome for the all-idle profile.
pub fn random_team(rng: &mut impl Rng, n: usize) -> TeamTechnology {
    loop {
        let agents: Vec<TeamAgent> = (0..n)
            .map(|i| TeamAgent {
                labels: vec![format!("idle{i}"), format!("work{i}")],
                costs: vec![0.0, rng.gen_range(0.02..0.2)],
            })
            .collect();
        let mut profiles = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            let actions: Vec<usize> = (0..n).map(|i| (mask >> i) & 1).collect();
            let dist = if mask == 0 {
                OutcomeDist::point_mass(rng.gen_range(0.0..0.05)).unwrap()
            } else {
                let workers = mask.count_ones() as f64;
                let mean = rng.gen_range(0.5..2.0) * workers / n as f64;
                let spread = rng.gen_range(0.0..0.5) * mean;
                OutcomeDist::new(vec![(mean - spread, 0.5), (mean + spread, 0.5)])
                    .unwrap_or_else(|_| OutcomeDist::point_mass(mean).unwrap())
            };
            profiles.push(TeamProfile { actions, dist });
        }
        if let Ok(t) = TeamTechnology::new(agents, profiles) {
            if robust_contracts::team::team_critical_slope(&t).s_star > 0.0 {
                return t;
            }
        }
    }
}

/// Two-coordinate outcomes with a convex bound of `1..=3` pieces; every cost
/// sits at least 0.05 above the bound so the multiplier stays finite.
pub fn random_bound_technology(rng: &mut impl Rng) -> MultiOutcomeTechnology {
    let mut pieces = vec![AffinePiece { p: vec![0.0, 0.0], beta: 0.0 }];
    for _ in 0..rng.gen_range(0..=2) {
        pieces.push(AffinePiece {
            p: vec![rng.gen_range(-0.2..0.3), rng.gen_range(0.0..0.6)],
            beta: rng.gen_range(-1.0..-0.1),
        });
    }
    let bound = ConvexBound::new(pieces).unwrap();
    let actions = (0..rng.gen_range(1..=3))
        .map(|_| {
            let k = rng.gen_range(1..=3);
            let p = simplex_point(rng, k);
            let support: Vec<(Vec<f64>, f64)> =
                p.into_iter().map(|q| (vec![rng.gen_range(0.0..2.0), rng.gen_range(0.0..3.0)], q)).collect();
            let probe = MultiOutcomeAction::new(support.clone(), 0.0).unwrap();
            let floor = bound.eval(&probe.expected_outcome()).max(0.0);
            MultiOutcomeAction::new(support, floor + rng.gen_range(0.05..0.6)).unwrap()
        })
        .collect();
    MultiOutcomeTechnology::new(actions, bound).unwrap()
}
