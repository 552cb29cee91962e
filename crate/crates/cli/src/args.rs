use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "lissajous", version, about = "Lissajous coherent states of the commensurate 2D oscillator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the coefficients of a state and its classification.
    State(StateCmd),
    /// Export psi, rho, J and the phase on a grid as CSV.
    Field(FieldCmd),
    /// Export a classical Lissajous orbit as CSV.
    Classical(ClassicalCmd),
    /// Export the centroid path of an evolving Glauber product.
    Evolve(EvolveCmd),
    /// Run the verification suite.
    Verify(VerifyCmd),
}

/// State selection: `N, p, q` and either `zeta` or the pair `alpha, beta`.
/// Angles are in radians.
#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub zeta_mod: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub zeta_arg: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_mod: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_arg: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_mod: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_arg: Option<f64>,
}

impl StateArgs {
    pub fn any_given(&self) -> bool {
        self.n.is_some()
            || self.p.is_some()
            || self.q.is_some()
            || self.zeta_mod.is_some()
            || self.zeta_arg.is_some()
            || self.alpha_mod.is_some()
            || self.alpha_arg.is_some()
            || self.beta_mod.is_some()
            || self.beta_arg.is_some()
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub xmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub xmax: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub ymin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub ymax: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StateCmd {
    #[command(flatten)]
    pub state: StateArgs,
    /// Write the listing here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FieldCmd {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassicalCmd {
    #[command(flatten)]
    pub state: StateArgs,
    /// Explicit x amplitude; with `--amp-y` and `--delta` bypasses state matching.
    #[arg(long, allow_negative_numbers = true)]
    pub amp_x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub amp_y: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Intervals per period.
    #[arg(long, default_value_t = 1024)]
    pub samples: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvolveCmd {
    #[command(flatten)]
    pub state: StateArgs,
    /// Intervals over one period.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyCmd {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub radial_nodes: Option<usize>,
    #[arg(long)]
    pub angular_nodes: Option<usize>,
    #[arg(long)]
    pub tolerance_completeness: Option<f64>,
    #[arg(long)]
    pub tolerance_algebraic: Option<f64>,
    #[arg(long)]
    pub tolerance_continuity: Option<f64>,
    /// Report path; a JSON sidecar is written next to it.
    #[arg(long)]
    pub report: Option<PathBuf>,
}
