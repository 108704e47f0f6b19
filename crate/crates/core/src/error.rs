use core::fmt;

/// Errors reported by the decision engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A numeric argument fell outside the domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// Distribution parameters violate an invariant.
    InvalidDistribution(&'static str),
    /// Walking or bus speed violates `0 < v_w < v_b`.
    InvalidTraveler { v_w: f64, v_b: f64 },
    /// The operation needs a finite density, which a point mass does not have.
    UnsupportedVariant { operation: &'static str },
    /// Bracket expansion reached its cap without a sign change while the
    /// distribution still had mass beyond the horizon.
    SolverFailure {
        horizon: f64,
        cdf_at_horizon: f64,
        expansions: u32,
    },
    /// The deadline is earlier than walking the whole route would take.
    InfeasibleDeadline { deadline: f64, walk_time: f64 },
    /// Route invariant violated at the given 1-based stop index.
    InvalidRoute { stop: usize, reason: &'static str },
    /// No walk/wait decision exists at (or past) the destination stop.
    NoDecisionAtStop { stop: usize, n_stops: usize },
    /// Strategy does not fit the route or has a bad threshold.
    InvalidStrategy(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::InvalidDistribution(reason) => write!(f, "invalid arrival distribution: {reason}"),
            Error::InvalidTraveler { v_w, v_b } => {
                write!(f, "invalid traveler: need 0 < v_w < v_b, got v_w={v_w}, v_b={v_b}")
            }
            Error::UnsupportedVariant { operation } => {
                write!(f, "{operation} is not defined for a deterministic (point mass) arrival")
            }
            Error::SolverFailure {
                horizon,
                cdf_at_horizon,
                expansions,
            } => write!(
                f,
                "no sign change found up to horizon {horizon} h after {expansions} expansions \
                 (cdf at horizon {cdf_at_horizon})"
            ),
            Error::InfeasibleDeadline { deadline, walk_time } => write!(
                f,
                "deadline {deadline} h is earlier than the walking time {walk_time} h"
            ),
            Error::InvalidRoute { stop, reason } => write!(f, "invalid route at stop {stop}: {reason}"),
            Error::NoDecisionAtStop { stop, n_stops } => write!(
                f,
                "no decision at stop {stop}: decisions exist for stops 1..{} of {n_stops}",
                n_stops.saturating_sub(1)
            ),
            Error::InvalidStrategy(reason) => write!(f, "invalid strategy: {reason}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
