//! Arrival-time distributions for the next bus at a stop.
//!
//! Times are in hours. Every variant has support on `t >= 0` and carries no
//! atom at `t = 0`, so `cdf(0) == 0` for all of them.

use alloc::vec::Vec;
use rand_core::RngCore;

use crate::error::{Error, Result};

/// Tolerance on the total mass of an empirical histogram.
pub const EMPIRICAL_MASS_TOLERANCE: f64 = 1e-12;

/// Density `p(t)` of the next bus's arrival time, measured from the moment
/// the traveler starts waiting at a stop.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "repr::DistributionRepr", into = "repr::DistributionRepr")
)]
pub enum ArrivalDistribution {
    /// The bus arrives at exactly `t_b`.
    Deterministic { t_b: f64 },
    /// Density `1 / t_b` on `[0, t_b]`.
    Uniform { t_b: f64 },
    /// Density `rate * exp(-rate * t)` on `[0, inf)`.
    Exponential { rate: f64 },
    /// Piecewise-constant density: bin `i` spans `[bin_edges[i], bin_edges[i + 1])`
    /// and carries probability `bin_masses[i]`.
    Empirical { bin_edges: Vec<f64>, bin_masses: Vec<f64> },
}

/// Upper end of the arrival support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportHorizon {
    Finite(f64),
    Unbounded,
}

impl SupportHorizon {
    pub fn as_finite(self) -> Option<f64> {
        match self {
            SupportHorizon::Finite(h) => Some(h),
            SupportHorizon::Unbounded => None,
        }
    }
}

fn positive_finite(value: f64, what: &'static str) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { what, value })
    }
}

impl ArrivalDistribution {
    pub fn deterministic(t_b: f64) -> Result<Self> {
        positive_finite(t_b, "t_b")?;
        Ok(Self::Deterministic { t_b })
    }

    pub fn uniform(t_b: f64) -> Result<Self> {
        positive_finite(t_b, "t_b")?;
        Ok(Self::Uniform { t_b })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        positive_finite(rate, "rate")?;
        Ok(Self::Exponential { rate })
    }

    pub fn empirical(bin_edges: Vec<f64>, bin_masses: Vec<f64>) -> Result<Self> {
        let dist = Self::Empirical { bin_edges, bin_masses };
        dist.validate()?;
        Ok(dist)
    }

    /// Checks the invariants of the variant's parameters.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Deterministic { t_b } | Self::Uniform { t_b } => positive_finite(*t_b, "t_b"),
            Self::Exponential { rate } => positive_finite(*rate, "rate"),
            Self::Empirical { bin_edges, bin_masses } => {
                if bin_masses.is_empty() {
                    return Err(Error::InvalidDistribution("empirical histogram has no bins"));
                }
                if bin_edges.len() != bin_masses.len() + 1 {
                    return Err(Error::InvalidDistribution(
                        "empirical histogram needs exactly one more edge than masses",
                    ));
                }
                if bin_edges.iter().any(|e| !e.is_finite()) {
                    return Err(Error::InvalidDistribution("bin edges must be finite"));
                }
                if bin_edges[0] < 0.0 {
                    return Err(Error::InvalidDistribution("first bin edge must be >= 0"));
                }
                if bin_edges.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidDistribution("bin edges must be strictly increasing"));
                }
                if bin_masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
                    return Err(Error::InvalidDistribution("bin masses must be finite and nonnegative"));
                }
                let total: f64 = bin_masses.iter().sum();
                if (total - 1.0).abs() > EMPIRICAL_MASS_TOLERANCE {
                    return Err(Error::InvalidDistribution("bin masses must sum to 1"));
                }
                Ok(())
            }
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, Self::Deterministic { .. })
    }

    /// Density at `t` (per hour). Zero outside the support.
    ///
    /// A point mass has no finite density, so the deterministic variant
    /// reports [`Error::UnsupportedVariant`].
    pub fn pdf(&self, t: f64) -> Result<f64> {
        let density = match self {
            Self::Deterministic { .. } => return Err(Error::UnsupportedVariant { operation: "pdf" }),
            Self::Uniform { t_b } => {
                if (0.0..=*t_b).contains(&t) {
                    1.0 / t_b
                } else {
                    0.0
                }
            }
            Self::Exponential { rate } => {
                if t < 0.0 {
                    0.0
                } else {
                    rate * libm::exp(-rate * t)
                }
            }
            Self::Empirical { bin_edges, bin_masses } => {
                let last = bin_edges[bin_edges.len() - 1];
                if t < bin_edges[0] || t > last {
                    0.0
                } else {
                    // Bin i is [e_i, e_{i+1}); the final edge belongs to the last bin.
                    let i = bin_edges
                        .partition_point(|&e| e <= t)
                        .saturating_sub(1)
                        .min(bin_masses.len() - 1);
                    bin_masses[i] / (bin_edges[i + 1] - bin_edges[i])
                }
            }
        };
        Ok(density)
    }

    /// `P(arrival <= t)`, clamped to `[0, 1]`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            // Deterministic t_b > 0 and no other variant has an atom at zero.
            return 0.0;
        }
        let p = match self {
            Self::Deterministic { t_b } => {
                if t < *t_b {
                    0.0
                } else {
                    1.0
                }
            }
            Self::Uniform { t_b } => {
                if t >= *t_b {
                    1.0
                } else {
                    t / t_b
                }
            }
            Self::Exponential { rate } => -libm::expm1(-rate * t),
            Self::Empirical { bin_edges, bin_masses } => {
                if t >= bin_edges[bin_edges.len() - 1] {
                    return 1.0;
                }
                let mut acc = 0.0;
                for (i, &mass) in bin_masses.iter().enumerate() {
                    let (lo, hi) = (bin_edges[i], bin_edges[i + 1]);
                    if t >= hi {
                        acc += mass;
                    } else {
                        if t > lo {
                            acc += mass * (t - lo) / (hi - lo);
                        }
                        break;
                    }
                }
                acc
            }
        };
        p.clamp(0.0, 1.0)
    }

    /// Partial expectation `∫_0^upper t p(t) dt`, in hours.
    ///
    /// Exact for every variant: the empirical density is piecewise constant,
    /// so each bin contributes `density * (b^2 - a^2) / 2`.
    pub fn partial_expectation(&self, upper: f64) -> Result<f64> {
        if upper.is_nan() || upper < 0.0 {
            return Err(Error::Domain {
                what: "partial expectation upper limit",
                value: upper,
            });
        }
        if upper == 0.0 {
            return Ok(0.0);
        }
        let value = match self {
            Self::Deterministic { t_b } => {
                if upper >= *t_b {
                    *t_b
                } else {
                    0.0
                }
            }
            Self::Uniform { t_b } => {
                let hi = upper.min(*t_b);
                hi * hi / (2.0 * t_b)
            }
            Self::Exponential { rate } => {
                let x = rate * upper;
                if x.is_infinite() {
                    1.0 / rate
                } else {
                    // 1 - e^{-x}(1 + x), arranged to stay accurate for small x.
                    (-libm::expm1(-x) - x * libm::exp(-x)) / rate
                }
            }
            Self::Empirical { bin_edges, bin_masses } => {
                let mut acc = 0.0;
                for (i, &mass) in bin_masses.iter().enumerate() {
                    let (lo, hi) = (bin_edges[i], bin_edges[i + 1]);
                    if upper <= lo {
                        break;
                    }
                    let top = upper.min(hi);
                    acc += mass / (hi - lo) * (top * top - lo * lo) / 2.0;
                }
                acc
            }
        };
        Ok(value)
    }

    /// Inverse CDF at `u`, for `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Self::Deterministic { t_b } => *t_b,
            Self::Uniform { t_b } => u * t_b,
            Self::Exponential { rate } => -libm::log1p(-u) / rate,
            Self::Empirical { bin_edges, bin_masses } => {
                let mut cum = 0.0;
                for (i, &mass) in bin_masses.iter().enumerate() {
                    if mass > 0.0 && u < cum + mass {
                        let frac = ((u - cum) / mass).clamp(0.0, 1.0);
                        return bin_edges[i] + frac * (bin_edges[i + 1] - bin_edges[i]);
                    }
                    cum += mass;
                }
                // Only reachable when the masses sum to slightly less than one.
                bin_edges[bin_edges.len() - 1]
            }
        }
    }

    /// Draws one arrival time by inverse-CDF sampling.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(unit_interval(rng.next_u64()))
    }

    pub fn support_upper(&self) -> SupportHorizon {
        match self {
            Self::Deterministic { t_b } | Self::Uniform { t_b } => SupportHorizon::Finite(*t_b),
            Self::Exponential { .. } => SupportHorizon::Unbounded,
            Self::Empirical { bin_edges, .. } => SupportHorizon::Finite(bin_edges[bin_edges.len() - 1]),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Deterministic { t_b } => *t_b,
            Self::Uniform { t_b } => t_b / 2.0,
            Self::Exponential { rate } => 1.0 / rate,
            Self::Empirical { bin_edges, bin_masses } => bin_masses
                .iter()
                .enumerate()
                .map(|(i, m)| m * (bin_edges[i] + bin_edges[i + 1]) / 2.0)
                .sum(),
        }
    }

    /// Points where the density is discontinuous or its support starts.
    /// The density is smooth between consecutive breakpoints.
    pub fn density_breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Deterministic { t_b } | Self::Uniform { t_b } => alloc::vec![0.0, *t_b],
            Self::Exponential { .. } => alloc::vec![0.0],
            Self::Empirical { bin_edges, .. } => bin_edges.clone(),
        }
    }
}

/// Maps 64 random bits to a uniform double in `[0, 1)` using the top 53 bits.
pub fn unit_interval(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(feature = "serde")]
mod repr {
    use super::ArrivalDistribution;
    use crate::error::Error;
    use alloc::vec::Vec;

    #[derive(serde::Serialize, serde::Deserialize)]
    #[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
    pub enum DistributionRepr {
        Deterministic { t_b: f64 },
        Uniform { t_b: f64 },
        Exponential { rate: f64 },
        Empirical { bin_edges: Vec<f64>, bin_masses: Vec<f64> },
    }

    impl TryFrom<DistributionRepr> for ArrivalDistribution {
        type Error = Error;

        fn try_from(repr: DistributionRepr) -> Result<Self, Error> {
            let dist = match repr {
                DistributionRepr::Deterministic { t_b } => Self::Deterministic { t_b },
                DistributionRepr::Uniform { t_b } => Self::Uniform { t_b },
                DistributionRepr::Exponential { rate } => Self::Exponential { rate },
                DistributionRepr::Empirical { bin_edges, bin_masses } => Self::Empirical { bin_edges, bin_masses },
            };
            dist.validate()?;
            Ok(dist)
        }
    }

    impl From<ArrivalDistribution> for DistributionRepr {
        fn from(dist: ArrivalDistribution) -> Self {
            match dist {
                ArrivalDistribution::Deterministic { t_b } => Self::Deterministic { t_b },
                ArrivalDistribution::Uniform { t_b } => Self::Uniform { t_b },
                ArrivalDistribution::Exponential { rate } => Self::Exponential { rate },
                ArrivalDistribution::Empirical { bin_edges, bin_masses } => Self::Empirical { bin_edges, bin_masses },
            }
        }
    }
}
