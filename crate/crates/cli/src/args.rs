use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wigner_core::experiment::presets::WignerBasis;
use wigner_core::CollapseModel;

#[derive(Debug, Parser)]
#[command(
    name = "wigner",
    version,
    about = "Extended Wigner's-friend simulator and story-plot checker"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print conditional, marginal or joint outcome tables.
    Tables(TablesArgs),
    /// Run a contradiction scenario; exits 1 when plots clash.
    Check(CheckArgs),
    /// Draw seeded samples from the exact joint distribution.
    Sample(SampleArgs),
    /// Print a built-in experiment as JSON.
    ExportPreset {
        /// One of: fr, wf-product, wf-superposition, deutsch.
        name: String,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Built-in experiment: fr, wf-product, wf-superposition, deutsch.
    #[arg(long)]
    pub preset: Option<String>,
    /// Experiment JSON file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[command(flatten)]
    pub source: Source,
    /// Collapse model: ism, objective or clps:AGENT.
    #[arg(long, default_value = "ism")]
    pub model: String,
    /// Agent whose outcome is tabulated; omit for the joint distribution.
    #[arg(long)]
    pub target: Option<String>,
    /// Conditioning agent; omit for the marginal of the target.
    #[arg(long, requires = "target")]
    pub given: Option<String>,
    /// Condition on a single outcome of the given agent via the
    /// renormalized post-measurement state.
    #[arg(long, requires = "given")]
    pub given_outcome: Option<String>,
    /// Condition on the experiment's halting outcome over the full run.
    #[arg(long, conflicts_with = "given_outcome")]
    pub post_select: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Decimal places, 1 to 17.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub digits: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    Fr,
    Deutsch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    /// The reasoning agent collapses on its own measurement.
    Clps,
    /// No agent collapses.
    Ism,
    /// Every measurement collapses.
    Objective,
}

impl ModelChoice {
    pub fn model(self, agent: &str) -> CollapseModel {
        match self {
            ModelChoice::Clps => CollapseModel::subjective(agent),
            ModelChoice::Ism => CollapseModel::NoCollapse,
            ModelChoice::Objective => CollapseModel::ObjectiveCollapse,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisChoice {
    Superposition,
    Product,
}

impl From<BasisChoice> for WignerBasis {
    fn from(b: BasisChoice) -> Self {
        match b {
            BasisChoice::Superposition => WignerBasis::Superposition,
            BasisChoice::Product => WignerBasis::Product,
        }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub scenario: Scenario,
    /// Model F1 uses to predict W (fr).
    #[arg(long, value_enum, default_value_t = ModelChoice::Clps)]
    pub f1_model: ModelChoice,
    /// Reason about every round rather than only the halting one (fr).
    #[arg(long)]
    pub no_post_select: bool,
    /// Model the friend uses to predict Wigner (deutsch).
    #[arg(long, value_enum, default_value_t = ModelChoice::Clps)]
    pub friend_model: ModelChoice,
    /// Basis of Wigner's measurement (deutsch).
    #[arg(long, value_enum, default_value_t = BasisChoice::Superposition)]
    pub wigner_basis: BasisChoice,
    /// Output format; csv falls back to text.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value = "ism")]
    pub model: String,
    /// Number of rounds to draw.
    #[arg(long)]
    pub shots: u64,
    /// Generator seed.
    #[arg(long)]
    pub seed: u64,
}
