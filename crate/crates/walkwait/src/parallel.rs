//! Multi-threaded trial evaluation. Trials are computed in parallel into an
//! indexed buffer and aggregated in index order, so reports are bit-identical
//! to the sequential runner in `walkwait_core::sim`.

use rayon::prelude::*;
use walkwait_core::{Result, Simulation, SimulationReport, Strategy};

pub fn run(sim: &Simulation<'_>, strategy: Strategy, n_trials: u64) -> Result<SimulationReport> {
    sim.check(&strategy, n_trials)?;
    let times: Vec<f64> = (0..n_trials)
        .into_par_iter()
        .map(|k| sim.trial_time(&strategy, k))
        .collect();
    Ok(sim.report(strategy, &times))
}

/// Parallel counterpart of `walkwait_core::compare_strategies`.
pub fn compare(sim: &Simulation<'_>, strategies: &[Strategy], n_trials: u64) -> Result<Vec<SimulationReport>> {
    if strategies.is_empty() {
        return Err(walkwait_core::Error::InvalidStrategy("no strategies to compare"));
    }
    let mut reports = strategies
        .iter()
        .map(|s| run(sim, *s, n_trials))
        .collect::<Result<Vec<_>>>()?;
    reports.sort_by(|a, b| a.mean_time.total_cmp(&b.mean_time));
    Ok(reports)
}
