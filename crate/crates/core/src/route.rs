//! Multi-stop routes. Walking ahead to wait at a later stop never beats
//! waiting at the first one, so a full-route plan reduces to the decision at
//! stop 1.

use alloc::vec::Vec;

use crate::arrival::ArrivalDistribution;
use crate::decision::{
    clamp_deadline, expected_travel_time, solve_wait_threshold, walk_decision_deterministic, DeadlinedSolution,
    Decision, TravelerProfile, WaitSolution,
};
use crate::error::{Error, Result};

/// Tolerance on the walk-ahead substitution identity, in hours.
pub const SUBSTITUTION_TOLERANCE: f64 = 1e-8;

/// Stop positions in miles from the start. The first stop is the start
/// (`0`) and the last is the destination.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "RouteRepr", into = "RouteRepr")
)]
pub struct RouteSpec {
    pub stops: Vec<f64>,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RouteRepr {
    stops: Vec<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<RouteRepr> for RouteSpec {
    type Error = Error;

    fn try_from(r: RouteRepr) -> Result<Self> {
        RouteSpec::new(r.stops)
    }
}

#[cfg(feature = "serde")]
impl From<RouteSpec> for RouteRepr {
    fn from(r: RouteSpec) -> Self {
        RouteRepr { stops: r.stops }
    }
}

impl RouteSpec {
    pub fn new(stops: Vec<f64>) -> Result<Self> {
        let route = Self { stops };
        validate_route(&route)?;
        Ok(route)
    }

    /// Two-stop route covering `d` miles.
    pub fn direct(d: f64) -> Result<Self> {
        Self::new(alloc::vec![0.0, d])
    }

    pub fn n_stops(&self) -> usize {
        self.stops.len()
    }

    pub fn total_distance(&self) -> f64 {
        self.stops[self.stops.len() - 1]
    }

    /// Position of the 1-based stop `i`.
    pub fn position(&self, i: usize) -> f64 {
        self.stops[i - 1]
    }

    pub fn remaining(&self, i: usize) -> f64 {
        self.total_distance() - self.position(i)
    }

    /// Checks that `i` is a stop where a decision is made (`1 <= i < n`).
    pub fn check_decision_stop(&self, i: usize) -> Result<()> {
        if i >= 1 && i < self.n_stops() {
            Ok(())
        } else {
            Err(Error::NoDecisionAtStop {
                stop: i,
                n_stops: self.n_stops(),
            })
        }
    }
}

/// Checks the route invariants; errors name the offending 1-based stop.
pub fn validate_route(route: &RouteSpec) -> Result<()> {
    let stops = &route.stops;
    if stops.len() < 2 {
        return Err(Error::InvalidRoute {
            stop: stops.len() + 1,
            reason: "a route needs at least two stops",
        });
    }
    if let Some(i) = stops.iter().position(|s| !s.is_finite()) {
        return Err(Error::InvalidRoute {
            stop: i + 1,
            reason: "stop distance must be finite",
        });
    }
    if stops[0] != 0.0 {
        return Err(Error::InvalidRoute {
            stop: 1,
            reason: "the first stop must be at distance 0",
        });
    }
    if let Some(i) = stops.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidRoute {
            stop: i + 2,
            reason: "stop distances must be strictly increasing",
        });
    }
    Ok(())
}

/// Threshold solve at stop `i` over the remaining distance `d - d_i`.
pub fn stop_decision(
    route: &RouteSpec,
    i: usize,
    dist: &ArrivalDistribution,
    traveler: &TravelerProfile,
) -> Result<WaitSolution> {
    validate_route(route)?;
    route.check_decision_stop(i)?;
    solve_wait_threshold(dist, route.remaining(i), traveler)
}

/// `d_i/v_w + E_i(tau) - d/v_w`, where `E_i` is the expected travel time from
/// stop `i` with threshold `tau`. Zero when walking ahead to stop `i` and
/// waiting there is exactly as fast as walking the whole way.
pub fn substitution_residual(
    route: &RouteSpec,
    i: usize,
    dist: &ArrivalDistribution,
    traveler: &TravelerProfile,
    tau: f64,
) -> Result<f64> {
    validate_route(route)?;
    route.check_decision_stop(i)?;
    let ahead = traveler.walk_time(route.position(i));
    let from_stop = expected_travel_time(dist, route.remaining(i), traveler, tau)?;
    Ok(ahead + from_stop - traveler.walk_time(route.total_distance()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LazinessEntry {
    pub stop: usize,
    pub t_w: f64,
    pub residual: f64,
    pub passed: bool,
}

/// For every interior stop whose threshold solve lands on an interior root,
/// checks that walking there and waiting costs exactly the full walking time.
///
/// Identity failures are reported per stop; only invalid input or a solver
/// failure is an error. A deterministic arrival has no thresholds to check.
pub fn laziness_check(
    route: &RouteSpec,
    dist: &ArrivalDistribution,
    traveler: &TravelerProfile,
) -> Result<Vec<LazinessEntry>> {
    validate_route(route)?;
    traveler.validate()?;
    let mut report = Vec::new();
    if dist.is_deterministic() {
        return Ok(report);
    }
    for stop in 2..route.n_stops() {
        if let WaitSolution::WaitUntil { t_w, .. } = stop_decision(route, stop, dist, traveler)? {
            let residual = substitution_residual(route, stop, dist, traveler, t_w)?;
            report.push(LazinessEntry {
                stop,
                t_w,
                residual,
                passed: residual.abs() < SUBSTITUTION_TOLERANCE,
            });
        }
    }
    Ok(report)
}

/// Full-route plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaitPolicy {
    WalkEntireRoute,
    WaitAtStop {
        board_stop: usize,
        solution: WaitSolution,
        deadline: Option<DeadlinedSolution>,
    },
}

impl WaitPolicy {
    pub fn board_stop(&self) -> Option<usize> {
        match self {
            WaitPolicy::WalkEntireRoute => None,
            WaitPolicy::WaitAtStop { board_stop, .. } => Some(*board_stop),
        }
    }
}

/// Plans the whole route from the decision at stop 1.
///
/// A deterministic arrival uses the direct comparison: waiting means the bus
/// is certain to come, which is reported as [`WaitSolution::WaitForBus`].
pub fn plan_route(
    route: &RouteSpec,
    dist: &ArrivalDistribution,
    traveler: &TravelerProfile,
    deadline: Option<f64>,
) -> Result<WaitPolicy> {
    validate_route(route)?;
    traveler.validate()?;
    let d = route.total_distance();
    let solution = match dist {
        ArrivalDistribution::Deterministic { t_b } => match walk_decision_deterministic(d, traveler, *t_b)? {
            Decision::Walk => WaitSolution::WalkNow,
            Decision::Wait => WaitSolution::WaitForBus,
        },
        _ => stop_decision(route, 1, dist, traveler)?,
    };
    let clamped = deadline
        .map(|t_d| clamp_deadline(solution, dist.support_upper(), t_d, d, traveler))
        .transpose()?;
    Ok(match solution {
        WaitSolution::WalkNow => WaitPolicy::WalkEntireRoute,
        _ => WaitPolicy::WaitAtStop {
            board_stop: 1,
            solution,
            deadline: clamped,
        },
    })
}
