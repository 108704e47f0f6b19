//! Scenario configuration: one JSON document describing the route, the
//! traveler, the arrival distribution and an optional deadline.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use walkwait_core::{ArrivalDistribution, RouteSpec, TravelerProfile};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub route: RouteSpec,
    pub traveler: TravelerProfile,
    pub distribution: ArrivalDistribution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deadline: Option<f64>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: ScenarioConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(t_d) = config.deadline {
            if !(t_d.is_finite() && t_d >= 0.0) {
                return Err(CliError::Config(format!(
                    "deadline must be a nonnegative number, got {t_d}"
                )));
            }
        }
        Ok(config)
    }

    /// Reads from `path`, or from `stdin` when the path is absent or `-`.
    pub fn load(path: Option<&Path>, stdin: &mut dyn Read) -> Result<Self, CliError> {
        let text = match path {
            Some(p) if p != Path::new("-") => {
                std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            _ => {
                let mut buf = String::new();
                stdin
                    .read_to_string(&mut buf)
                    .map_err(|e| CliError::Config(format!("stdin: {e}")))?;
                buf
            }
        };
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        // Every field is plain data; serialization cannot fail.
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn distance(&self) -> f64 {
        self.route.total_distance()
    }
}
