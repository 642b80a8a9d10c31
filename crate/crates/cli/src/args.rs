use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "credal-ot",
    version,
    about = "Optimal transport between lower probabilities of epsilon-contaminated credal sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Choquet integral of a function against a contamination envelope
    Choquet(CommonArgs),
    /// Classical discrete Kantorovich problem
    Kantorovich(CommonArgs),
    /// Classical discrete Monge problem
    Monge(CommonArgs),
    /// Quantile map between one-dimensional distributions
    Monge1d(CommonArgs),
    /// Linear transport map between centred Gaussians
    GaussMap(CommonArgs),
    /// Relaxed lower Kantorovich problem
    LowerKantorovich(CommonArgs),
    /// Lower Monge problem
    LowerMonge(CommonArgs),
    /// Geometric and generalized Bayes conditioning of a lower plan
    Condition(CommonArgs),
    /// Wasserstein distance, lower when a contamination level is given
    Wasserstein(CommonArgs),
    /// Run the randomized invariant suites
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Choquet(_) => "choquet",
            Command::Kantorovich(_) => "kantorovich",
            Command::Monge(_) => "monge",
            Command::Monge1d(_) => "monge1d",
            Command::GaussMap(_) => "gauss-map",
            Command::LowerKantorovich(_) => "lower-kantorovich",
            Command::LowerMonge(_) => "lower-monge",
            Command::Condition(_) => "condition",
            Command::Wasserstein(_) => "wasserstein",
            Command::Verify(_) => "verify",
        }
    }

    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Choquet(c)
            | Command::Kantorovich(c)
            | Command::Monge(c)
            | Command::Monge1d(c)
            | Command::GaussMap(c)
            | Command::LowerKantorovich(c)
            | Command::LowerMonge(c)
            | Command::Condition(c)
            | Command::Wasserstein(c) => c,
            Command::Verify(v) => &v.common,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Input JSON document; standard input when omitted
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Result file; standard output when omitted
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Contamination level, overriding any level in the input
    #[arg(long, value_name = "REAL")]
    pub epsilon: Option<f64>,
    /// Wasserstein or transport-cost exponent
    #[arg(long = "p-exponent", value_name = "REAL")]
    pub p_exponent: Option<f64>,
    #[arg(long, value_name = "UINT")]
    pub seed: Option<u64>,
    /// Pushforward tolerance for Monge problems; identity-check tolerance for verify
    #[arg(long, value_name = "REAL")]
    pub tolerance: Option<f64>,
    /// Write plan triples or map samples as CSV
    #[arg(long = "emit-plot-data", value_name = "PATH")]
    pub emit_plot_data: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// monge-equiv, kantorovich-equiv, coincide, conditioning, gaussian,
    /// choquet-oracles, core or all
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = crate::verify::DEFAULT_TRIALS)]
    pub trials: usize,
}
