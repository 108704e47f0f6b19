//! Subcommand implementations. Human-readable text goes to the provided
//! writer; machine-readable output goes to `--out` when given.

use std::io::{Read, Write};

use walkwait_core::{
    plan_route, solve_wait_threshold_with_diagnostics, threshold_expected_time, walk_decision_deterministic,
    ArrivalDistribution, Decision, RouteSpec, Simulation, Strategy, TravelerProfile, WaitPolicy, WaitSolution,
};

use crate::cli::{Cli, Command, SweepParam};
use crate::config::ScenarioConfig;
use crate::output::{self, Format, SweepRow};
use crate::{parallel, CliError};

pub fn run(cli: &Cli, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = ScenarioConfig::load(cli.config.as_deref(), stdin)?;
    if cli.dump_config {
        let text = config.to_json() + "\n";
        return emit(cli, stdout, &text);
    }
    let Some(command) = &cli.command else {
        return Err(CliError::Usage(
            "a subcommand is required (decide, solve, simulate, sweep)".into(),
        ));
    };
    match command {
        Command::Decide => decide(&config, stdout),
        Command::Solve => solve(&config, stdout),
        Command::Simulate { strategies, no_plan } => {
            let mut list = parse_strategies(strategies)?;
            if !no_plan {
                let recommended = recommended_strategy(&config)?;
                if !list.contains(&recommended) {
                    list.push(recommended);
                }
            }
            simulate(cli, &config, &list, stdout)
        }
        Command::Sweep { param, from, to, steps } => {
            let rows = sweep(&config, *param, *from, *to, *steps)?;
            let text = match cli.format {
                Format::Csv => output::sweep_csv(&rows)?,
                Format::Json => output::to_json(&rows)?,
            };
            emit(cli, stdout, &text)
        }
    }
}

fn emit(cli: &Cli, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display()))),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn decide(config: &ScenarioConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let d = config.distance();
    let traveler = &config.traveler;
    let dist = &config.distribution;
    let policy = plan_route(&config.route, dist, traveler, config.deadline)?;

    if let ArrivalDistribution::Deterministic { t_b } = dist {
        let walk = traveler.walk_time(d);
        let bus = t_b + traveler.ride_time(d);
        match walk_decision_deterministic(d, traveler, *t_b)? {
            Decision::Walk => writeln!(out, "walk (walk {walk:.4} h < bus total {bus:.4} h)")?,
            Decision::Wait => {
                let cmp = if bus < walk { "<" } else { "=" };
                writeln!(
                    out,
                    "wait (bus arrives {t_b:.4} h; bus total {bus:.4} h {cmp} walk {walk:.4} h)"
                )?
            }
        }
    } else {
        match policy {
            WaitPolicy::WalkEntireRoute => {
                writeln!(out, "walk the entire route; expected {:.4} h", traveler.walk_time(d))?
            }
            WaitPolicy::WaitAtStop {
                board_stop, solution, ..
            } => {
                let threshold = solution.threshold(dist.support_upper());
                let expected = threshold_expected_time(dist, d, traveler, threshold)?;
                match solution {
                    WaitSolution::WaitUntil { t_w, .. } => writeln!(
                        out,
                        "wait at stop {board_stop} until t={t_w:.4} h; expected {expected:.4} h"
                    )?,
                    _ => writeln!(out, "wait at stop {board_stop} for the bus; expected {expected:.4} h")?,
                }
            }
        }
    }

    if let Some(t_d) = config.deadline {
        let (t_w, clamped) = match policy {
            WaitPolicy::WalkEntireRoute => (0.0, None),
            WaitPolicy::WaitAtStop { solution, deadline, .. } => (solution.threshold(dist.support_upper()), deadline),
        };
        let t_w_prime = t_d - traveler.walk_time(d);
        let t_w_star = clamped.map_or(0.0, |c| c.t_w_star);
        let expected = threshold_expected_time(dist, d, traveler, t_w_star)?;
        writeln!(
            out,
            "deadline t_d={t_d:.4} h: t_w={t_w:.4} h, t_w'={t_w_prime:.4} h, t_w*={t_w_star:.4} h; expected {expected:.4} h"
        )?;
    }
    Ok(())
}

fn solve(config: &ScenarioConfig, out: &mut dyn Write) -> Result<(), CliError> {
    if config.distribution.is_deterministic() {
        return Err(CliError::Usage(
            "solve needs a stochastic distribution; use `decide` for a known arrival time".into(),
        ));
    }
    let (solution, diag) =
        solve_wait_threshold_with_diagnostics(&config.distribution, config.distance(), &config.traveler)?;
    match solution {
        WaitSolution::WaitUntil { t_w, residual } => writeln!(out, "WaitUntil {t_w:.9} residual {residual:.1e}")?,
        other => writeln!(out, "{}", other.name())?,
    }
    let bracket = diag
        .bracket
        .map_or_else(|| "none".to_string(), |(lo, hi)| format!("[{lo:.12}, {hi:.12}]"));
    writeln!(
        out,
        "horizon {} h; expansions {}; grid points {}; sign changes {}; bracket {}; bisection steps {}",
        diag.horizon, diag.expansions, diag.grid_points, diag.sign_changes, bracket, diag.bisection_steps
    )?;
    Ok(())
}

/// Parses `walk`, `waitbus[:STOP]` and `wait:TAU[:STOP]` tokens.
pub fn parse_strategies(spec: &str) -> Result<Vec<Strategy>, CliError> {
    let bad = |token: &str| {
        CliError::Usage(format!(
            "bad strategy `{token}`; expected walk, waitbus[:STOP] or wait:TAU[:STOP]"
        ))
    };
    let mut list = Vec::new();
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = token.split(':').collect();
        let stop_at =
            |i: usize| -> Result<usize, CliError> { parts.get(i).map_or(Ok(1), |s| s.parse().map_err(|_| bad(token))) };
        let strategy = match parts[0] {
            "walk" if parts.len() == 1 => Strategy::WalkAll,
            "waitbus" if parts.len() <= 2 => Strategy::WaitForBusAt { stop: stop_at(1)? },
            "wait" if (2..=3).contains(&parts.len()) => Strategy::WaitThenWalk {
                stop: stop_at(2)?,
                tau: parts[1].parse().map_err(|_| bad(token))?,
            },
            _ => return Err(bad(token)),
        };
        list.push(strategy);
    }
    if list.is_empty() {
        return Err(CliError::Usage("no strategies given".into()));
    }
    Ok(list)
}

/// The planner's policy expressed as a simulatable strategy.
pub fn recommended_strategy(config: &ScenarioConfig) -> Result<Strategy, CliError> {
    let policy = plan_route(&config.route, &config.distribution, &config.traveler, config.deadline)?;
    Ok(match policy {
        WaitPolicy::WalkEntireRoute => Strategy::WalkAll,
        WaitPolicy::WaitAtStop {
            board_stop,
            deadline: Some(c),
            ..
        } => Strategy::WaitThenWalk {
            stop: board_stop,
            tau: c.t_w_star,
        },
        WaitPolicy::WaitAtStop {
            board_stop,
            solution: WaitSolution::WaitUntil { t_w, .. },
            ..
        } => Strategy::WaitThenWalk {
            stop: board_stop,
            tau: t_w,
        },
        WaitPolicy::WaitAtStop { board_stop, .. } => Strategy::WaitForBusAt { stop: board_stop },
    })
}

fn simulate(cli: &Cli, config: &ScenarioConfig, strategies: &[Strategy], out: &mut dyn Write) -> Result<(), CliError> {
    let sim = Simulation::new(&config.distribution, &config.route, &config.traveler, cli.seed)?;
    let reports = parallel::compare(&sim, strategies, cli.trials)?;

    writeln!(
        out,
        "{:<16} {:>5} {:>12} {:>10} {:>12} {:>12}",
        "strategy", "stop", "tau", "trials", "mean (h)", "stderr (h)"
    )?;
    for r in &reports {
        let stop = r.strategy.stop().map_or("-".into(), |s| s.to_string());
        let tau = r.strategy.tau().map_or("-".into(), |t| format!("{t:.6}"));
        writeln!(
            out,
            "{:<16} {:>5} {:>12} {:>10} {:>12.6} {:>12.6}",
            r.strategy.name(),
            stop,
            tau,
            r.n_trials,
            r.mean_time,
            r.stderr
        )?;
    }

    if let Some(path) = &cli.out {
        let text = match cli.format {
            Format::Csv => output::simulation_csv(&reports)?,
            Format::Json => output::to_json(&reports)?,
        };
        std::fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// `steps` evenly spaced values from `from` to `to`, endpoints included.
fn sweep_points(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(CliError::Usage(
            "sweep needs finite bounds and at least one step".into(),
        ));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|i| from + (to - from) * i as f64 / last).collect())
}

fn with_param(base: &ScenarioConfig, param: SweepParam, value: f64) -> Result<ScenarioConfig, CliError> {
    let mut c = base.clone();
    match (param, &c.distribution) {
        (SweepParam::TB, ArrivalDistribution::Uniform { .. }) => c.distribution = ArrivalDistribution::uniform(value)?,
        (SweepParam::TB, ArrivalDistribution::Deterministic { .. }) => {
            c.distribution = ArrivalDistribution::deterministic(value)?
        }
        (SweepParam::Rate, ArrivalDistribution::Exponential { .. }) => {
            c.distribution = ArrivalDistribution::exponential(value)?
        }
        (SweepParam::TB | SweepParam::Rate, _) => {
            return Err(CliError::Usage(format!(
                "parameter {} does not exist for this distribution",
                param.name()
            )))
        }
        (SweepParam::D, _) => {
            if !(value.is_finite() && value > 0.0) {
                return Err(CliError::Usage(format!("distance must be positive, got {value}")));
            }
            let scale = value / base.distance();
            c.route = RouteSpec::new(base.route.stops.iter().map(|s| s * scale).collect())?;
        }
        (SweepParam::VW, _) => c.traveler = TravelerProfile::new(value, c.traveler.v_b)?,
        (SweepParam::VB, _) => c.traveler = TravelerProfile::new(c.traveler.v_w, value)?,
    }
    Ok(c)
}

/// One row per parameter value: the planned policy at the first stop, its
/// (deadline-clamped) threshold and expected travel time.
pub fn sweep(
    base: &ScenarioConfig,
    param: SweepParam,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<Vec<SweepRow>, CliError> {
    let mut rows = Vec::with_capacity(steps);
    for value in sweep_points(from, to, steps)? {
        let c = with_param(base, param, value)?;
        let d = c.distance();
        let policy = plan_route(&c.route, &c.distribution, &c.traveler, c.deadline)?;
        let (variant, t_w, t_w_star) = match policy {
            WaitPolicy::WalkEntireRoute => ("WalkNow", 0.0, 0.0),
            WaitPolicy::WaitAtStop { solution, deadline, .. } => {
                let t_w = solution.threshold(c.distribution.support_upper());
                (solution.name(), t_w, deadline.map_or(t_w, |x| x.t_w_star))
            }
        };
        let expected_time = threshold_expected_time(&c.distribution, d, &c.traveler, t_w_star)?;
        rows.push(SweepRow {
            param: param.name(),
            value,
            variant,
            t_w,
            t_w_star,
            expected_time,
        });
    }
    Ok(rows)
}
