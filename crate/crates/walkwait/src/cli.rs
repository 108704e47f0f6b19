use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "walkwait", version, about = "Walk or wait for the bus?")]
pub struct Cli {
    /// Scenario JSON file; stdin when omitted or `-`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write machine-readable output here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Print the parsed scenario as JSON and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recommend a policy for the scenario.
    Decide,
    /// Solve for the wait threshold at the first stop.
    Solve,
    /// Simulate strategies with common random numbers.
    Simulate {
        /// Comma-separated: walk, waitbus[:STOP], wait:TAU[:STOP].
        #[arg(long, default_value = "walk,waitbus")]
        strategies: String,
        /// Do not add the planner's recommended strategy.
        #[arg(long)]
        no_plan: bool,
    },
    /// Re-solve while varying one scenario parameter.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        /// Number of points, endpoints included.
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    #[value(name = "t_b")]
    TB,
    #[value(name = "d")]
    D,
    #[value(name = "v_b")]
    VB,
    #[value(name = "v_w")]
    VW,
    #[value(name = "rate")]
    Rate,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::TB => "t_b",
            SweepParam::D => "d",
            SweepParam::VB => "v_b",
            SweepParam::VW => "v_w",
            SweepParam::Rate => "rate",
        }
    }
}
