//! Monte Carlo simulation of explicit travel strategies, plus a dense
//! quadrature oracle for their expected travel time.
//!
//! Randomness: trial `k` of a run seeded with `seed` draws from ChaCha8
//! stream `k` of `ChaCha8Rng::seed_from_u64(seed)`. Each trial needs one
//! arrival draw (the bus clock restarts when the traveler reaches the
//! waiting stop), so trial results do not depend on evaluation order and
//! every strategy sees the same arrival in trial `k`.

use alloc::vec::Vec;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;

use crate::arrival::{unit_interval, ArrivalDistribution, SupportHorizon};
use crate::decision::TravelerProfile;
use crate::error::{Error, Result};
use crate::route::{validate_route, RouteSpec};

/// Quadrature nodes the oracle spreads over the integration range.
pub const ORACLE_NODES: usize = 100_000;
/// Survival probability at which an unbounded support is truncated.
pub const ORACLE_TAIL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum Strategy {
    WalkAll,
    /// Walk to `stop`, wait up to `tau` hours, then walk the rest.
    WaitThenWalk {
        stop: usize,
        tau: f64,
    },
    /// Walk to `stop` and wait however long the bus takes.
    WaitForBusAt {
        stop: usize,
    },
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::WalkAll => "walk_all",
            Strategy::WaitThenWalk { .. } => "wait_then_walk",
            Strategy::WaitForBusAt { .. } => "wait_for_bus",
        }
    }

    pub fn stop(&self) -> Option<usize> {
        match self {
            Strategy::WalkAll => None,
            Strategy::WaitThenWalk { stop, .. } | Strategy::WaitForBusAt { stop } => Some(*stop),
        }
    }

    pub fn tau(&self) -> Option<f64> {
        match self {
            Strategy::WaitThenWalk { tau, .. } => Some(*tau),
            _ => None,
        }
    }

    pub fn validate(&self, route: &RouteSpec) -> Result<()> {
        if let Some(stop) = self.stop() {
            if stop < 1 || stop >= route.n_stops() {
                return Err(Error::InvalidStrategy("waiting stop must satisfy 1 <= stop < n"));
            }
        }
        if let Some(tau) = self.tau() {
            if tau.is_nan() || tau < 0.0 {
                return Err(Error::InvalidStrategy("threshold must be >= 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SimulationReport {
    pub strategy: Strategy,
    pub n_trials: u64,
    pub mean_time: f64,
    /// Sample standard deviation over `sqrt(n_trials)`; zero for one trial.
    pub stderr: f64,
    pub seed: u64,
}

/// Per-trial arrival draws for one seed.
#[derive(Debug, Clone)]
pub struct TrialStreams {
    base: ChaCha8Rng,
}

impl TrialStreams {
    pub fn new(seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform draw in `[0, 1)` for trial `k`.
    pub fn uniform(&self, k: u64) -> f64 {
        let mut rng = self.base.clone();
        rng.set_stream(k);
        unit_interval(rng.next_u64())
    }
}

/// A validated scenario ready to run trials.
#[derive(Debug, Clone)]
pub struct Simulation<'a> {
    dist: &'a ArrivalDistribution,
    route: &'a RouteSpec,
    traveler: &'a TravelerProfile,
    streams: TrialStreams,
    seed: u64,
}

impl<'a> Simulation<'a> {
    pub fn new(
        dist: &'a ArrivalDistribution,
        route: &'a RouteSpec,
        traveler: &'a TravelerProfile,
        seed: u64,
    ) -> Result<Self> {
        dist.validate()?;
        validate_route(route)?;
        traveler.validate()?;
        Ok(Self {
            dist,
            route,
            traveler,
            streams: TrialStreams::new(seed),
            seed,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Travel time of trial `k` under `strategy`. The strategy must already
    /// be validated against the route.
    pub fn trial_time(&self, strategy: &Strategy, k: u64) -> f64 {
        let d = self.route.total_distance();
        let (stop, tau) = match *strategy {
            Strategy::WalkAll => return self.traveler.walk_time(d),
            Strategy::WaitThenWalk { stop, tau } => (stop, tau),
            Strategy::WaitForBusAt { stop } => (stop, f64::INFINITY),
        };
        let ahead = self.traveler.walk_time(self.route.position(stop));
        let rest = self.route.remaining(stop);
        let arrival = self.dist.quantile(self.streams.uniform(k));
        if arrival <= tau {
            ahead + arrival + self.traveler.ride_time(rest)
        } else {
            ahead + tau + self.traveler.walk_time(rest)
        }
    }

    pub fn report(&self, strategy: Strategy, times: &[f64]) -> SimulationReport {
        let (mean_time, stderr) = summarize(times);
        SimulationReport {
            strategy,
            n_trials: times.len() as u64,
            mean_time,
            stderr,
            seed: self.seed,
        }
    }

    /// Validates a strategy and trial count against this scenario.
    pub fn check(&self, strategy: &Strategy, n_trials: u64) -> Result<()> {
        strategy.validate(self.route)?;
        check_trials(n_trials)
    }

    pub fn run(&self, strategy: Strategy, n_trials: u64) -> Result<SimulationReport> {
        self.check(&strategy, n_trials)?;
        let times: Vec<f64> = (0..n_trials).map(|k| self.trial_time(&strategy, k)).collect();
        Ok(self.report(strategy, &times))
    }
}

pub fn check_trials(n_trials: u64) -> Result<()> {
    if n_trials == 0 {
        Err(Error::InvalidStrategy("need at least one trial"))
    } else {
        Ok(())
    }
}

/// Mean and standard error, accumulated in index order (Welford).
pub fn summarize(times: &[f64]) -> (f64, f64) {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in times.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    let n = times.len();
    if n < 2 {
        return (mean, 0.0);
    }
    let variance = m2 / (n - 1) as f64;
    (mean, libm::sqrt(variance / n as f64))
}

pub fn simulate_strategy(
    strategy: Strategy,
    dist: &ArrivalDistribution,
    route: &RouteSpec,
    traveler: &TravelerProfile,
    n_trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    Simulation::new(dist, route, traveler, seed)?.run(strategy, n_trials)
}

/// Runs every strategy on the same per-trial arrivals and sorts the reports
/// by mean travel time, fastest first.
pub fn compare_strategies(
    strategies: &[Strategy],
    dist: &ArrivalDistribution,
    route: &RouteSpec,
    traveler: &TravelerProfile,
    n_trials: u64,
    seed: u64,
) -> Result<Vec<SimulationReport>> {
    if strategies.is_empty() {
        return Err(Error::InvalidStrategy("no strategies to compare"));
    }
    let sim = Simulation::new(dist, route, traveler, seed)?;
    let mut reports = strategies
        .iter()
        .map(|s| sim.run(*s, n_trials))
        .collect::<Result<Vec<_>>>()?;
    reports.sort_by(|a, b| a.mean_time.total_cmp(&b.mean_time));
    Ok(reports)
}

/// Mean and standard error of the paired per-trial difference `a - b` under
/// common random numbers.
pub fn paired_difference(
    a: Strategy,
    b: Strategy,
    dist: &ArrivalDistribution,
    route: &RouteSpec,
    traveler: &TravelerProfile,
    n_trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    let sim = Simulation::new(dist, route, traveler, seed)?;
    a.validate(route)?;
    b.validate(route)?;
    check_trials(n_trials)?;
    let diffs: Vec<f64> = (0..n_trials)
        .map(|k| sim.trial_time(&a, k) - sim.trial_time(&b, k))
        .collect();
    Ok(summarize(&diffs))
}

// Five-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Composite Gauss-Legendre over `[lo, hi]` with `panels` equal panels.
/// Nodes are strictly inside each panel, so one-sided density limits at
/// the ends are respected.
fn gauss_legendre(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let width = (hi - lo) / panels as f64;
    let half = 0.5 * width;
    let mut total = 0.0;
    for j in 0..panels {
        let mid = lo + (j as f64 + 0.5) * width;
        let mut panel = 0.0;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            panel += w * f(mid + half * x);
        }
        total += panel * half;
    }
    total
}

/// Expected travel time of `strategy` by dense quadrature of the arrival
/// density, independent of the closed-form CDF and partial expectation.
///
/// The range `[0, min(tau, H)]` is split at the density's breakpoints and
/// covered by [`ORACLE_NODES`] Gauss-Legendre nodes. Unbounded supports are
/// cut where the survival probability reaches [`ORACLE_TAIL`]. A
/// deterministic arrival is evaluated exactly.
pub fn oracle_expected_time(
    strategy: Strategy,
    dist: &ArrivalDistribution,
    route: &RouteSpec,
    traveler: &TravelerProfile,
) -> Result<f64> {
    dist.validate()?;
    validate_route(route)?;
    traveler.validate()?;
    strategy.validate(route)?;
    let d = route.total_distance();
    let (stop, tau) = match strategy {
        Strategy::WalkAll => return Ok(traveler.walk_time(d)),
        Strategy::WaitThenWalk { stop, tau } => (stop, tau),
        Strategy::WaitForBusAt { stop } => (stop, f64::INFINITY),
    };
    let ahead = traveler.walk_time(route.position(stop));
    let ride = traveler.ride_time(route.remaining(stop));
    let walk_rest = traveler.walk_time(route.remaining(stop));

    if let ArrivalDistribution::Deterministic { t_b } = dist {
        return Ok(if *t_b <= tau {
            ahead + t_b + ride
        } else {
            ahead + tau + walk_rest
        });
    }

    let support_end = match dist.support_upper() {
        SupportHorizon::Finite(h) => h,
        SupportHorizon::Unbounded => dist.quantile(1.0 - ORACLE_TAIL),
    };
    let upper = tau.min(support_end);

    let mut cuts: Vec<f64> = dist
        .density_breakpoints()
        .into_iter()
        .filter(|&b| b > 0.0 && b < upper)
        .collect();
    cuts.insert(0, 0.0);
    cuts.push(upper);

    let pdf = |t: f64| dist.pdf(t).unwrap_or(0.0);
    let mut mass = 0.0;
    let mut boarded = 0.0;
    if upper > 0.0 {
        let panels_total = ORACLE_NODES / GL_NODES.len();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi <= lo {
                continue;
            }
            let panels = ((panels_total as f64 * (hi - lo) / upper) as usize).max(8);
            mass += gauss_legendre(&pdf, lo, hi, panels);
            boarded += gauss_legendre(&|t| pdf(t) * (t + ride), lo, hi, panels);
        }
    }

    let mut total = ahead + boarded;
    if tau.is_finite() && tau <= support_end {
        total += (1.0 - mass) * (tau + walk_rest);
    }
    // tau past a truncated tail: the dropped mass is below ORACLE_TAIL.
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn traveler() -> TravelerProfile {
        TravelerProfile::new(4.0, 20.0).unwrap()
    }

    #[test]
    fn walk_all_is_exact() {
        let route = RouteSpec::direct(2.0).unwrap();
        for dist in [
            ArrivalDistribution::uniform(0.5).unwrap(),
            ArrivalDistribution::exponential(2.0).unwrap(),
        ] {
            let r = simulate_strategy(Strategy::WalkAll, &dist, &route, &traveler(), 1000, 3).unwrap();
            assert_eq!(r.mean_time, 0.5);
            assert_eq!(r.stderr, 0.0);
            assert_eq!(
                oracle_expected_time(Strategy::WalkAll, &dist, &route, &traveler()).unwrap(),
                0.5
            );
        }
    }

    #[test]
    fn single_trial_has_zero_stderr() {
        let route = RouteSpec::direct(2.0).unwrap();
        let dist = ArrivalDistribution::uniform(0.5).unwrap();
        let r = simulate_strategy(Strategy::WaitForBusAt { stop: 1 }, &dist, &route, &traveler(), 1, 9).unwrap();
        assert_eq!(r.n_trials, 1);
        assert_eq!(r.stderr, 0.0);
    }

    #[test]
    fn invalid_strategies_rejected() {
        let route = RouteSpec::new(vec![0.0, 1.0, 2.0]).unwrap();
        let dist = ArrivalDistribution::uniform(0.5).unwrap();
        let t = traveler();
        for s in [
            Strategy::WaitForBusAt { stop: 3 },
            Strategy::WaitForBusAt { stop: 0 },
            Strategy::WaitThenWalk { stop: 1, tau: -0.1 },
        ] {
            assert!(matches!(
                simulate_strategy(s, &dist, &route, &t, 10, 1),
                Err(Error::InvalidStrategy(_))
            ));
        }
        assert!(simulate_strategy(Strategy::WalkAll, &dist, &route, &t, 0, 1).is_err());
        assert!(compare_strategies(&[], &dist, &route, &t, 10, 1).is_err());
    }

    #[test]
    fn oracle_examples() {
        let route = RouteSpec::direct(2.0).unwrap();
        let t = traveler();
        let u = ArrivalDistribution::uniform(0.5).unwrap();
        let v = oracle_expected_time(Strategy::WaitThenWalk { stop: 1, tau: 0.1 }, &u, &route, &t).unwrap();
        assert!((v - 0.51).abs() < 1e-8);
        let e = ArrivalDistribution::exponential(2.0).unwrap();
        let v = oracle_expected_time(Strategy::WaitForBusAt { stop: 1 }, &e, &route, &t).unwrap();
        assert!((v - 0.6).abs() < 1e-8);
    }

    #[test]
    fn oracle_handles_density_jumps() {
        // Mass 0.7 on [0, 0.1) and 0.3 on [0.1, 0.5): density jumps from 7 to 0.75.
        let route = RouteSpec::direct(2.0).unwrap();
        let emp = ArrivalDistribution::empirical(vec![0.0, 0.1, 0.5], vec![0.7, 0.3]).unwrap();
        let v = oracle_expected_time(Strategy::WaitForBusAt { stop: 1 }, &emp, &route, &traveler()).unwrap();
        let mean = 0.7 * 0.05 + 0.3 * 0.3;
        assert!((v - (mean + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn oracle_deterministic_case_split() {
        let route = RouteSpec::direct(2.0).unwrap();
        let det = ArrivalDistribution::deterministic(0.3).unwrap();
        let t = traveler();
        let v = oracle_expected_time(Strategy::WaitThenWalk { stop: 1, tau: 0.2 }, &det, &route, &t).unwrap();
        assert!((v - 0.7).abs() < 1e-15);
        let v = oracle_expected_time(Strategy::WaitForBusAt { stop: 1 }, &det, &route, &t).unwrap();
        assert!((v - 0.4).abs() < 1e-15);
    }

    #[test]
    fn trial_draws_are_shared_across_strategies() {
        let route = RouteSpec::new(vec![0.0, 1.0, 2.0]).unwrap();
        let dist = ArrivalDistribution::uniform(0.5).unwrap();
        let t = traveler();
        let sim = Simulation::new(&dist, &route, &t, 11).unwrap();
        for k in 0..100 {
            // Same arrival: the times differ only by the walk to stop 2 and the shorter ride.
            let at1 = sim.trial_time(&Strategy::WaitForBusAt { stop: 1 }, k);
            let at2 = sim.trial_time(&Strategy::WaitForBusAt { stop: 2 }, k);
            assert!((at2 - at1 - (0.25 - 0.05)).abs() < 1e-14);
        }
    }

    #[test]
    fn summarize_known_values() {
        let (m, se) = summarize(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-15);
        // Sample variance 5/3.
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }
}
