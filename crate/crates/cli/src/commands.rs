use std::io::Write;
use std::path::Path;
use std::time::Instant;

use robust_contracts::adversary::{
    contract_grid, verify_lower_bound, verify_upper_bound, LowerBoundOptions, UpperBoundOptions,
};
use robust_contracts::io::{parse_instance, Instance};
use robust_contracts::lp::maxmax::{build_maxmax, payment_grid, sign_check_maxmin, solve_maxmax, ContractSpace, CONTRACT_LIMIT};
use robust_contracts::lp::myerson::{solve_p1_p2, uniform_slopes, SlopeProgram};
use robust_contracts::lp::SimplexOptions;
use robust_contracts::single;
use robust_contracts::team::{
    nash_check, p3_upper_check, team_critical_slope, team_deterministic_baseline, team_expected_payoff, TeamTechnology,
};
use robust_contracts::{critical_slope, deterministic_optimum, ContractError, Technology};

use crate::output::{header, num, nums, write_csv};
use crate::{CliError, LpArgs, RatioArgs, SolveArgs, Verdict, VerifyArgs};

/// Resolution of the simplex grid in the team optimality check.
const P3_RESOLUTION: f64 = 0.05;

/// Outcome levels listed in the solve-single report.
const CDF_SAMPLES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn load(path: &Path) -> Result<Instance, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
    let inst = parse_instance(&text).map_err(|source| CliError::Input { path: path.into(), source })?;
    log::info!("{}: parsed a {} technology", path.display(), inst.kind());
    Ok(inst)
}

fn load_single(path: &Path, command: &str) -> Result<Technology, CliError> {
    match load(path)? {
        Instance::Single(t) => Ok(t),
        other => Err(CliError::Usage(format!(
            "{}: {command} needs a single-agent file but this is a {} file",
            path.display(),
            other.kind()
        ))),
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn solve_single(args: &SolveArgs, out: &mut dyn Write) -> Result<Verdict, CliError> {
    let tech = load_single(&args.input, "solve-single")?;
    let sol = critical_slope(&tech);
    let det = deterministic_optimum(&tech);
    writeln!(out, "kind: single")?;
    writeln!(out, "actions: {}", tech.len())?;
    writeln!(out, "alpha_star: {}", num(sol.alpha_star))?;
    writeln!(out, "value: {}", num(sol.value))?;
    writeln!(out, "witness_action: {}", sol.witness_action)?;
    writeln!(out, "deterministic_slope: {}", num(det.slope))?;
    writeln!(out, "deterministic_payoff: {}", num(det.payoff))?;
    writeln!(out, "advantage_ratio: {}", num(sol.value / det.payoff))?;
    if sol.is_degenerate() {
        writeln!(out, "contract: point mass at slope 0 (a costless action dominates)")?;
    } else {
        writeln!(out, "contract: G(a) = ln(1 - a) / ln(1 - alpha_star) on [0, alpha_star]")?;
        for u in CDF_SAMPLES {
            writeln!(out, "quantile {u}: {}", num(sol.cdf.quantile(u)))?;
        }
    }
    if let Some(path) = &args.output {
        let rows: Vec<Vec<String>> = if sol.is_degenerate() {
            vec![vec![num(0.0), num(1.0)]]
        } else {
            let n = args.grid.max(2);
            (0..n)
                .map(|k| {
                    let a = sol.alpha_star * k as f64 / (n - 1) as f64;
                    vec![num(a), num(sol.cdf.cdf(a))]
                })
                .collect()
        };
        write_csv(Some(path), out, &header(&["alpha", "G"]), &rows)?;
    }
    Ok(Verdict::Pass)
}

pub fn solve_team(args: &SolveArgs, out: &mut dyn Write) -> Result<Verdict, CliError> {
    let tech = match load(&args.input)? {
        Instance::Team(t) => t,
        Instance::Single(t) => TeamTechnology::from_single(&t)?,
        Instance::Bound(_) => {
            return Err(CliError::Usage(format!("{}: solve-team cannot read a bound file", args.input.display())))
        }
    };
    let sol = team_critical_slope(&tech);
    let baseline = team_deterministic_baseline(&tech);
    writeln!(out, "kind: team")?;
    writeln!(out, "agents: {}", tech.num_agents())?;
    writeln!(out, "profiles: {}", tech.profiles().len())?;
    writeln!(out, "alpha_star: {}", nums(&sol.alpha_star))?;
    writeln!(out, "s_star: {}", num(sol.s_star))?;
    writeln!(out, "value: {}", num(sol.value))?;
    writeln!(out, "witness_profile: {}", sol.witness_profile)?;
    writeln!(out, "deterministic_payoff: {}", num(baseline))?;
    writeln!(out, "advantage_ratio: {}", num(sol.value / baseline))?;
    let payoff = team_expected_payoff(&tech, &sol)?;
    writeln!(out, "integrated_payoff: {}", num(payoff.integrated))?;

    let mut ok = true;
    if tech.is_complete() {
        let nash = nash_check(&tech, &sol.alpha_star)?;
        ok &= nash.is_nash;
        writeln!(out, "nash: {} (max unilateral gain {})", pass(nash.is_nash), num(nash.max_gain))?;
        if nash.equilibria.len() > 1 {
            writeln!(
                out,
                "nash_equilibria: {} (principal payoff spread {})",
                nash.equilibria.len(),
                num(nash.payoff_spread)
            )?;
        }
    } else {
        writeln!(out, "nash: skipped (the profile table is incomplete)")?;
    }
    if sol.is_degenerate() {
        writeln!(out, "p3: skipped (point mass at zero slopes)")?;
    } else {
        match p3_upper_check(&tech, &sol, P3_RESOLUTION, args.trials, args.seed) {
            Ok(p3) => {
                ok &= p3.pass;
                writeln!(
                    out,
                    "p3: {} ({} points, min dominance gap {}, max integrand error {})",
                    pass(p3.pass),
                    p3.points,
                    num(p3.min_dominance_gap),
                    num(p3.max_integrand_error)
                )?;
            }
            Err(ContractError::LimitExceeded(msg)) => writeln!(out, "p3: skipped ({msg})")?,
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(path) = &args.output {
        let n = args.grid.max(2);
        let mut names = vec!["beta".to_string(), "G".to_string()];
        names.extend((1..=tech.num_agents()).map(|i| format!("alpha_{i}")));
        let rows: Vec<Vec<String>> = (0..n)
            .map(|k| {
                let beta = k as f64 / (n - 1) as f64;
                let mut row = vec![num(beta), num(sol.cdf.cdf(beta))];
                row.extend(sol.cdf.slopes_at(beta).into_iter().map(num));
                row
            })
            .collect();
        write_csv(Some(path), out, &names, &rows)?;
    }
    Ok(if ok { Verdict::Pass } else { Verdict::Fail })
}

pub fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<Verdict, CliError> {
    let tech = load_single(&args.input, "verify")?;
    let sol = critical_slope(&tech);
    writeln!(out, "alpha_star: {}", num(sol.alpha_star))?;
    writeln!(out, "value: {}", num(sol.value))?;
    if args.shift_value != 0.0 {
        writeln!(out, "note: certified value shifted by {} (negative control)", num(args.shift_value))?;
    }
    let mut summary = Vec::new();
    let ok = if sol.is_degenerate() {
        let det = deterministic_optimum(&tech).payoff;
        let bound = sol.value + args.shift_value;
        let ok = (bound - det).abs() <= 1e-9;
        writeln!(out, "degenerate: the critical slope is 0, so the zero-slope contract is optimal")?;
        writeln!(out, "degenerate_equality: {} (value {} vs deterministic {})", pass(ok), num(bound), num(det))?;
        summary.push(vec!["degenerate_equality".into(), num(det), num(bound), pass(ok).into()]);
        ok
    } else {
        let mut ok = true;
        if args.trials == 0 {
            writeln!(out, "lower_bound: skipped (0 trials)")?;
        } else {
            let start = Instant::now();
            let opts = LowerBoundOptions { bound_shift: args.shift_value, ..Default::default() };
            let report = verify_lower_bound(&tech, args.trials, args.seed, &opts)?;
            log::info!("lower bound: {} trials in {:?}", report.trials, start.elapsed());
            ok &= report.pass;
            writeln!(
                out,
                "lower_bound: {} ({} supersets, min payoff {} vs {})",
                pass(report.pass),
                report.trials,
                num(report.min_payoff),
                num(report.bound)
            )?;
            if !report.pass {
                writeln!(out, "lower_bound_worst_trial: {}", report.worst_trial.unwrap_or(0))?;
            }
            summary.push(vec!["lower_bound".into(), num(report.min_payoff), num(report.bound), pass(report.pass).into()]);
        }
        let start = Instant::now();
        let outcomes = tech.outcome_grid();
        let top = outcomes.last().copied().unwrap_or(1.0).max(1e-12);
        let grid = contract_grid(&outcomes, sol.alpha_star, 101, args.grid, top, args.seed)?;
        let opts = UpperBoundOptions { tolerance: args.tolerance, bound_shift: args.shift_value, ..Default::default() };
        let report = verify_upper_bound(&tech, &grid, &opts)?;
        log::info!("upper bound: {} contracts in {:?}", report.contracts, start.elapsed());
        ok &= report.pass;
        writeln!(
            out,
            "upper_bound: {} ({} contracts, max payoff {} vs {} + {})",
            pass(report.pass),
            report.contracts,
            num(report.max_payoff),
            num(report.bound),
            num(args.tolerance)
        )?;
        if report.tie_sensitive {
            writeln!(out, "upper_bound_tie_sensitive: best and worst tie-breaking differ (worst-tie max {})", num(report.max_payoff_worst_tie))?;
        }
        if !report.pass {
            if let Some(i) = report.worst_contract {
                let entries: Vec<String> = grid[i].entries().map(|(y, w)| format!("{}->{}", num(y), num(w))).collect();
                writeln!(out, "violating_contract: {}", entries.join(" "))?;
            }
        }
        summary.push(vec!["upper_bound".into(), num(report.max_payoff), num(report.bound), pass(report.pass).into()]);
        ok
    };
    writeln!(out, "verdict: {}", pass(ok))?;
    if let Some(path) = &args.output {
        write_csv(Some(path), out, &header(&["check", "value", "bound", "result"]), &summary)?;
    }
    Ok(if ok { Verdict::Pass } else { Verdict::Fail })
}

pub fn ratio_curve(args: &RatioArgs, out: &mut dyn Write) -> Result<Verdict, CliError> {
    let rows = single::ratio_curve(args.from, args.to, args.step)?;
    let monotone = rows.windows(2).all(|w| w[1].ratio >= w[0].ratio);
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![num(r.c0), num(r.alpha_star), num(r.randomized), num(r.deterministic), num(r.ratio)])
        .collect();
    write_csv(
        args.output.as_deref(),
        out,
        &header(&["c0", "alpha_star", "randomized", "deterministic", "ratio"]),
        &table,
    )?;
    if !monotone {
        log::error!("the ratio column is not nondecreasing");
        return Ok(Verdict::Fail);
    }
    Ok(Verdict::Pass)
}

pub fn lp_check(args: &LpArgs, out: &mut dyn Write) -> Result<Verdict, CliError> {
    let tech = load_single(&args.input, "lp-check")?;
    let sol = critical_slope(&tech);
    let outcomes = tech.outcome_grid();
    let y_max = outcomes.last().copied().unwrap_or(1.0);
    let top = if sol.is_degenerate() { y_max } else { sol.alpha_star * y_max };
    let payments = payment_grid(top, args.grid, &[]);
    let space = ContractSpace::enumerate(&outcomes, &payments, CONTRACT_LIMIT).map_err(|e| match e {
        ContractError::LimitExceeded(msg) => {
            let mut fit = 1usize;
            while (fit + 1).checked_pow(outcomes.len() as u32).is_some_and(|c| c <= CONTRACT_LIMIT) {
                fit += 1;
            }
            CliError::Usage(format!("{msg}; with {} outcomes use --grid {fit} or less", outcomes.len()))
        }
        other => other.into(),
    })?;
    let opts = SimplexOptions::default();
    let start = Instant::now();
    let program = build_maxmax(&tech, space)?;
    log::info!(
        "max-max program: {} variables, {} rows",
        program.problem.num_vars(),
        program.problem.num_rows()
    );
    let outer = solve_maxmax(&program, &opts)?;
    let inner = sign_check_maxmin(&tech, &program.space, &outer.distribution, &opts)?;
    log::info!("max-max and inner programs solved in {:?}", start.elapsed());
    let duality = (outer.value - inner.value).abs();
    let below = outer.value <= sol.value + args.tolerance;
    writeln!(out, "outcomes: {}", outcomes.len())?;
    writeln!(out, "payment_levels: {}", payments.len())?;
    writeln!(out, "contracts: {}", program.space.len())?;
    writeln!(out, "lp_value: {}", num(outer.value))?;
    writeln!(out, "closed_form_value: {}", num(sol.value))?;
    writeln!(out, "gap: {}", num(sol.value - outer.value))?;
    writeln!(out, "lp_below_value: {}", pass(below))?;
    writeln!(out, "duality: {} (inner value {}, difference {})", pass(duality <= args.tolerance), num(inner.value), num(duality))?;
    let mut summary = vec![
        vec!["lp_value".into(), num(outer.value), num(sol.value), pass(below).into()],
        vec!["duality".into(), num(inner.value), num(outer.value), pass(duality <= args.tolerance).into()],
    ];
    let mut ok = below && duality <= args.tolerance;
    if sol.is_degenerate() {
        writeln!(out, "reduction: skipped (point mass at slope 0)")?;
    } else {
        let inst = SlopeProgram::from_cdf(&tech, uniform_slopes(sol.alpha_star, args.trials), &sol.cdf)?;
        let (p1, p2) = solve_p1_p2(&inst, &opts)?;
        let agree = (p1 - p2).abs() <= args.tolerance;
        ok &= agree;
        writeln!(out, "p1_value: {}", num(p1))?;
        writeln!(out, "p2_value: {}", num(p2))?;
        writeln!(out, "reduction: {} (difference {})", pass(agree), num((p1 - p2).abs()))?;
        summary.push(vec!["reduction".into(), num(p1), num(p2), pass(agree).into()]);
    }
    writeln!(out, "verdict: {}", pass(ok))?;
    if let Some(path) = &args.output {
        write_csv(Some(path), out, &header(&["check", "value", "reference", "result"]), &summary)?;
    }
    Ok(if ok { Verdict::Pass } else { Verdict::Fail })
}
