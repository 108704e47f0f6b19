//! Machine-readable outputs. CSV columns are fixed; numbers use Rust's
//! shortest round-trip formatting and absent values are empty fields.

use serde::Serialize;
use walkwait_core::SimulationReport;

use crate::CliError;

pub const SIMULATION_HEADER: [&str; 7] = ["strategy", "stop", "tau", "n_trials", "seed", "mean_time", "stderr"];
pub const SWEEP_HEADER: [&str; 6] = ["param", "value", "variant", "t_w", "t_w_star", "expected_time"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: &'static str,
    pub value: f64,
    pub variant: &'static str,
    pub t_w: f64,
    pub t_w_star: f64,
    pub expected_time: f64,
}

fn opt<T: ToString>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn finish_csv(writer: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = writer.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

pub fn simulation_csv(reports: &[SimulationReport]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SIMULATION_HEADER)?;
    for r in reports {
        w.write_record([
            r.strategy.name().to_string(),
            opt(r.strategy.stop()),
            opt(r.strategy.tau()),
            r.n_trials.to_string(),
            r.seed.to_string(),
            r.mean_time.to_string(),
            r.stderr.to_string(),
        ])?;
    }
    finish_csv(w)
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.param.to_string(),
            r.value.to_string(),
            r.variant.to_string(),
            r.t_w.to_string(),
            r.t_w_star.to_string(),
            r.expected_time.to_string(),
        ])?;
    }
    finish_csv(w)
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    text.push('\n');
    Ok(text)
}
