use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "asian", version, about = "Arithmetic-average Asian option pricer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price one contract with the selected engines.
    Price(RunArgs),
    /// Delta, hedge position and numeric vega/gamma/theta for a market quote.
    Greeks(RunArgs),
    /// Price with several engines and check them against each other.
    Compare(RunArgs),
    /// Sweep the Cartesian product of --nu, --h and --q lists.
    Grid(RunArgs),
    /// Run the identity suites and report the recorded verdicts.
    Selftest(RunArgs),
}

impl Command {
    pub fn name(&self) -> CommandName {
        match self {
            Command::Price(_) => CommandName::Price,
            Command::Greeks(_) => CommandName::Greeks,
            Command::Compare(_) => CommandName::Compare,
            Command::Grid(_) => CommandName::Grid,
            Command::Selftest(_) => CommandName::Selftest,
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Price(a) | Command::Greeks(a) | Command::Compare(a) | Command::Grid(a) | Command::Selftest(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Price,
    Greeks,
    Compare,
    Grid,
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineChoice {
    /// Closed form, falling back to laplace and then mc when it refuses.
    Auto,
    Closed,
    Yor,
    Laplace,
    Mc,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub spot: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub strike: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rate: Option<f64>,
    /// Risk-neutral drift of the underlying; defaults to --rate.
    #[arg(long, allow_negative_numbers = true)]
    pub drift: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub vol: Option<f64>,
    /// Start of the averaging window (default 0).
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    /// Valuation time (default t0).
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub maturity: Option<f64>,
    /// Integral of the spot over [t0, t] accrued so far (default 0).
    #[arg(long, allow_negative_numbers = true)]
    pub running_integral: Option<f64>,

    /// Normalized drift ν; comma-separated list for grid and compare.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub nu: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub h: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub q: Vec<f64>,

    #[arg(long, value_delimiter = ',')]
    pub engine: Vec<EngineChoice>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    #[arg(long)]
    pub paths: Option<u64>,
    #[arg(long)]
    pub steps: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,

    /// JSON run configuration; flags given alongside it take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl RunArgs {
    pub fn has_market(&self) -> bool {
        [
            self.spot,
            self.strike,
            self.rate,
            self.drift,
            self.vol,
            self.t0,
            self.t,
            self.maturity,
            self.running_integral,
        ]
        .iter()
        .any(Option::is_some)
    }

    pub fn has_normalized(&self) -> bool {
        !(self.nu.is_empty() && self.h.is_empty() && self.q.is_empty())
    }
}
