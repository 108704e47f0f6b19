//! Two-stop walk/wait analysis: the deterministic comparator, the expected
//! travel time of a wait-then-walk threshold, the indifference solve for that
//! threshold, and the deadline clamp.

use alloc::vec::Vec;

use crate::arrival::{ArrivalDistribution, SupportHorizon};
use crate::error::{Error, Result};

/// Width of the final bisection bracket, in hours.
pub const BISECTION_TOLERANCE: f64 = 1e-12;
/// Largest indifference residual accepted at a reported threshold, in hours.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
/// Cap on the doubling search for an unbounded support horizon.
pub const MAX_UNBOUNDED_HORIZON: f64 = (1u64 << 20) as f64;

const UNIFORM_GRID: usize = 2048;
const POINTS_PER_PIECE: usize = 16;
const MAX_BISECTIONS: u32 = 200;

/// Walking and bus speeds in miles per hour.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "TravelerRepr", into = "TravelerRepr")
)]
pub struct TravelerProfile {
    pub v_w: f64,
    pub v_b: f64,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct TravelerRepr {
    v_w: f64,
    v_b: f64,
}

#[cfg(feature = "serde")]
impl TryFrom<TravelerRepr> for TravelerProfile {
    type Error = Error;

    fn try_from(r: TravelerRepr) -> Result<Self> {
        TravelerProfile::new(r.v_w, r.v_b)
    }
}

#[cfg(feature = "serde")]
impl From<TravelerProfile> for TravelerRepr {
    fn from(t: TravelerProfile) -> Self {
        TravelerRepr { v_w: t.v_w, v_b: t.v_b }
    }
}

impl TravelerProfile {
    pub fn new(v_w: f64, v_b: f64) -> Result<Self> {
        let t = Self { v_w, v_b };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.v_w.is_finite() && self.v_b.is_finite() && self.v_w > 0.0 && self.v_b > self.v_w;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidTraveler {
                v_w: self.v_w,
                v_b: self.v_b,
            })
        }
    }

    pub fn walk_time(&self, distance: f64) -> f64 {
        distance / self.v_w
    }

    pub fn ride_time(&self, distance: f64) -> f64 {
        distance / self.v_b
    }
}

/// Outcome of the deterministic-arrival comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Walk,
    Wait,
}

/// Outcome of solving the indifference equation for the wait threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaitSolution {
    /// Waiting never pays off; walk immediately.
    WalkNow,
    /// Wait up to `t_w` hours, then walk. `residual` is the indifference
    /// residual at `t_w`.
    WaitUntil { t_w: f64, residual: f64 },
    /// Waiting beats walking at every threshold and the bus surely comes.
    WaitForBus,
}

impl WaitSolution {
    /// Indifference residual; zero by convention for the non-threshold variants.
    pub fn residual(&self) -> f64 {
        match self {
            WaitSolution::WaitUntil { residual, .. } => *residual,
            _ => 0.0,
        }
    }

    /// Threshold in hours: 0 for walking, the support horizon (possibly
    /// infinite) for waiting on the bus.
    pub fn threshold(&self, horizon: SupportHorizon) -> f64 {
        match self {
            WaitSolution::WalkNow => 0.0,
            WaitSolution::WaitUntil { t_w, .. } => *t_w,
            WaitSolution::WaitForBus => horizon.as_finite().unwrap_or(f64::INFINITY),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WaitSolution::WalkNow => "WalkNow",
            WaitSolution::WaitUntil { .. } => "WaitUntil",
            WaitSolution::WaitForBus => "WaitForBus",
        }
    }
}

/// A wait solution with a fixed arrival deadline applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeadlinedSolution {
    pub unclamped: WaitSolution,
    /// Latest departure that still reaches the destination on foot in time.
    pub t_w_prime: f64,
    /// Threshold actually used: `min(t_w, t_w_prime)`.
    pub t_w_star: f64,
}

/// Bookkeeping from a threshold solve, for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverDiagnostics {
    pub horizon: f64,
    pub expansions: u32,
    pub grid_points: usize,
    pub sign_changes: usize,
    /// Final bracket around the reported root, if one was found.
    pub bracket: Option<(f64, f64)>,
    pub bisection_steps: u32,
}

fn check_distance(d: f64) -> Result<()> {
    if d.is_finite() && d > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "distance",
            value: d,
        })
    }
}

/// Known arrival time `t_b`: walk iff `d / v_w < t_b + d / v_b`. Ties go to
/// the bus.
pub fn walk_decision_deterministic(d: f64, traveler: &TravelerProfile, t_b: f64) -> Result<Decision> {
    check_distance(d)?;
    traveler.validate()?;
    if !(t_b.is_finite() && t_b >= 0.0) {
        return Err(Error::Domain {
            what: "bus arrival time",
            value: t_b,
        });
    }
    if traveler.walk_time(d) < t_b + traveler.ride_time(d) {
        Ok(Decision::Walk)
    } else {
        Ok(Decision::Wait)
    }
}

fn check_stochastic(dist: &ArrivalDistribution, d: f64, traveler: &TravelerProfile, tau: f64) -> Result<f64> {
    check_distance(d)?;
    traveler.validate()?;
    if dist.is_deterministic() {
        return Err(Error::UnsupportedVariant {
            operation: "expected travel time",
        });
    }
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::Domain {
            what: "wait threshold",
            value: tau,
        });
    }
    Ok(match dist.support_upper() {
        SupportHorizon::Finite(h) => tau.min(h),
        SupportHorizon::Unbounded => tau,
    })
}

/// Expected door-to-door time when the traveler waits up to `tau` hours at
/// the stop and walks if no bus has come:
///
/// `∫_0^tau p(t) (d/v_b + t) dt + (1 - F(tau)) (d/v_w + tau)`.
///
/// `tau` past a finite support is clamped to the support horizon. An infinite
/// `tau` means waiting for the bus however long it takes.
pub fn expected_travel_time(dist: &ArrivalDistribution, d: f64, traveler: &TravelerProfile, tau: f64) -> Result<f64> {
    let tau = check_stochastic(dist, d, traveler, tau)?;
    let caught = dist.cdf(tau);
    let mut total = caught * traveler.ride_time(d) + dist.partial_expectation(tau)?;
    let missed = 1.0 - caught;
    if missed > 0.0 {
        total += missed * (traveler.walk_time(d) + tau);
    }
    Ok(total)
}

/// Expected travel time at threshold `tau` minus the pure walking time.
///
/// Evaluated in the algebraically equivalent form
/// `F(tau) (d/v_b - d/v_w) + ∫_0^tau t p(t) dt + (1 - F(tau)) tau`, which
/// avoids cancelling two nearly equal travel times at small `tau`.
pub fn indifference_residual(dist: &ArrivalDistribution, d: f64, traveler: &TravelerProfile, tau: f64) -> Result<f64> {
    let tau = check_stochastic(dist, d, traveler, tau)?;
    Ok(residual_unchecked(dist, d, traveler, tau))
}

fn residual_unchecked(dist: &ArrivalDistribution, d: f64, traveler: &TravelerProfile, tau: f64) -> f64 {
    let caught = dist.cdf(tau);
    // partial_expectation only fails on negative tau, excluded by the callers.
    let pe = dist.partial_expectation(tau).unwrap_or(f64::NAN);
    let mut r = caught * (traveler.ride_time(d) - traveler.walk_time(d)) + pe;
    let missed = 1.0 - caught;
    if missed > 0.0 {
        r += missed * tau;
    }
    r
}

/// Nonzero root of the indifference equation for a uniform arrival on
/// `[0, t_b]`: `2 (t_b + d/v_b - d/v_w)`.
///
/// The value may be negative or exceed `t_b`; [`solve_wait_threshold`]
/// decides what it means for the traveler.
pub fn uniform_closed_form_t_w(d: f64, traveler: &TravelerProfile, t_b: f64) -> Result<f64> {
    check_distance(d)?;
    traveler.validate()?;
    if !(t_b.is_finite() && t_b > 0.0) {
        return Err(Error::Domain {
            what: "t_b",
            value: t_b,
        });
    }
    Ok(2.0 * (t_b + traveler.ride_time(d) - traveler.walk_time(d)))
}

/// Solves the indifference equation for the wait threshold.
pub fn solve_wait_threshold(dist: &ArrivalDistribution, d: f64, traveler: &TravelerProfile) -> Result<WaitSolution> {
    solve_wait_threshold_with_diagnostics(dist, d, traveler).map(|(s, _)| s)
}

/// Solves the indifference equation and reports how the root was bracketed.
///
/// `tau = 0` is always a root, so the search runs on `h(tau) = R(tau) / tau`
/// over `(0, H]`, where `R` is [`indifference_residual`] and `H` the support
/// horizon (doubled from one hour up to [`MAX_UNBOUNDED_HORIZON`] until the
/// CDF saturates, for unbounded supports).
///
/// * `h` changes sign: the largest root, to [`BISECTION_TOLERANCE`].
/// * `h > 0` everywhere: every threshold is slower than walking, `WalkNow`.
/// * `h <= 0` everywhere: every threshold is at least as fast as walking, so
///   wait for the bus (`WaitUntil(H)` if the bus might still not come by `H`).
pub fn solve_wait_threshold_with_diagnostics(
    dist: &ArrivalDistribution,
    d: f64,
    traveler: &TravelerProfile,
) -> Result<(WaitSolution, SolverDiagnostics)> {
    check_stochastic(dist, d, traveler, 0.0)?;
    dist.validate()?;

    let (horizon, expansions) = match dist.support_upper() {
        SupportHorizon::Finite(h) => (h, 0),
        SupportHorizon::Unbounded => {
            let mut h = 1.0;
            let mut expansions = 0;
            while dist.cdf(h) < 1.0 && h < MAX_UNBOUNDED_HORIZON {
                h *= 2.0;
                expansions += 1;
            }
            (h, expansions)
        }
    };

    let grid = scan_grid(dist, horizon);
    let h_of = |tau: f64| residual_unchecked(dist, d, traveler, tau) / tau;
    let values: Vec<f64> = grid.iter().map(|&tau| h_of(tau)).collect();

    let sign_changes = values
        .windows(2)
        .filter(|w| w[0] != 0.0 && w[1] != 0.0 && (w[0] > 0.0) != (w[1] > 0.0))
        .count();

    let mut diagnostics = SolverDiagnostics {
        horizon,
        expansions,
        grid_points: grid.len(),
        sign_changes,
        bracket: None,
        bisection_steps: 0,
    };

    // Largest root first: walk down from the horizon.
    for k in (0..grid.len()).rev() {
        if values[k] == 0.0 {
            let t_w = grid[k];
            diagnostics.bracket = Some((t_w, t_w));
            let residual = residual_unchecked(dist, d, traveler, t_w);
            return Ok((WaitSolution::WaitUntil { t_w, residual }, diagnostics));
        }
        if k > 0 && values[k - 1] != 0.0 && (values[k - 1] > 0.0) != (values[k] > 0.0) {
            let (t_w, lo, hi, steps) = bisect(&h_of, grid[k - 1], grid[k], values[k - 1] > 0.0);
            diagnostics.bracket = Some((lo, hi));
            diagnostics.bisection_steps = steps;
            let residual = residual_unchecked(dist, d, traveler, t_w);
            return Ok((WaitSolution::WaitUntil { t_w, residual }, diagnostics));
        }
    }

    let saturated = dist.cdf(horizon) >= 1.0;
    if !saturated {
        return Err(Error::SolverFailure {
            horizon,
            cdf_at_horizon: dist.cdf(horizon),
            expansions,
        });
    }
    if values.iter().all(|&v| v > 0.0) {
        Ok((WaitSolution::WalkNow, diagnostics))
    } else {
        Ok((WaitSolution::WaitForBus, diagnostics))
    }
}

/// Evaluation points in `(0, horizon]`: a geometric ladder toward zero so a
/// root close to the origin is not missed, a uniform grid, and extra points
/// inside every smooth piece of the density.
fn scan_grid(dist: &ArrivalDistribution, horizon: f64) -> Vec<f64> {
    let mut grid = Vec::with_capacity(UNIFORM_GRID + 64);
    let step = horizon / UNIFORM_GRID as f64;
    let mut tiny = step;
    for _ in 0..40 {
        tiny *= 0.5;
        grid.push(tiny);
    }
    grid.extend((1..=UNIFORM_GRID).map(|k| horizon * k as f64 / UNIFORM_GRID as f64));
    let breaks = dist.density_breakpoints();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1].min(horizon));
        if lo >= hi {
            continue;
        }
        grid.extend((0..=POINTS_PER_PIECE).map(|j| lo + (hi - lo) * j as f64 / POINTS_PER_PIECE as f64));
    }
    grid.retain(|&t| t > 0.0 && t <= horizon);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Bisection on a bracket where `f(lo)` has sign `lo_positive` and `f(hi)`
/// the opposite sign. Returns the midpoint of the final bracket.
fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, lo_positive: bool) -> (f64, f64, f64, u32) {
    let mut steps = 0;
    while hi - lo >= BISECTION_TOLERANCE && steps < MAX_BISECTIONS {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        steps += 1;
        if v == 0.0 {
            return (mid, mid, mid, steps);
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + 0.5 * (hi - lo), lo, hi, steps)
}

/// Applies an arrival deadline `t_d`: the traveler may wait at most
/// `t_d - d/v_w` hours before walking.
///
/// `horizon` is the arrival support horizon, which stands in for the
/// threshold of a [`WaitSolution::WaitForBus`] solution.
pub fn clamp_deadline(
    solution: WaitSolution,
    horizon: SupportHorizon,
    t_d: f64,
    d: f64,
    traveler: &TravelerProfile,
) -> Result<DeadlinedSolution> {
    check_distance(d)?;
    traveler.validate()?;
    let walk = traveler.walk_time(d);
    if t_d.is_nan() || t_d < walk {
        return Err(Error::InfeasibleDeadline {
            deadline: t_d,
            walk_time: walk,
        });
    }
    let t_w_prime = t_d - walk;
    let t_w_star = match solution {
        WaitSolution::WalkNow => 0.0,
        WaitSolution::WaitUntil { t_w, .. } => t_w.min(t_w_prime),
        WaitSolution::WaitForBus => match horizon {
            SupportHorizon::Finite(h) => h.min(t_w_prime),
            SupportHorizon::Unbounded => t_w_prime,
        },
    };
    Ok(DeadlinedSolution {
        unclamped: solution,
        t_w_prime,
        t_w_star,
    })
}

/// Expected travel time of waiting up to `threshold` hours (infinite means
/// until the bus comes). Unlike [`expected_travel_time`] this also covers a
/// deterministic arrival, by direct case split.
pub fn threshold_expected_time(
    dist: &ArrivalDistribution,
    d: f64,
    traveler: &TravelerProfile,
    threshold: f64,
) -> Result<f64> {
    match dist {
        ArrivalDistribution::Deterministic { t_b } => {
            check_distance(d)?;
            traveler.validate()?;
            if threshold.is_nan() || threshold < 0.0 {
                return Err(Error::Domain {
                    what: "wait threshold",
                    value: threshold,
                });
            }
            if *t_b <= threshold {
                Ok(t_b + traveler.ride_time(d))
            } else {
                Ok(threshold + traveler.walk_time(d))
            }
        }
        _ => expected_travel_time(dist, d, traveler, threshold),
    }
}
