use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qspec_core::spectral::{Kernel, WeightKind};
use qspec_core::twisted_trace::ShiftWeights;
use qspec_core::verify::Profile;

#[derive(Debug, Parser)]
#[command(
    name = "qspec",
    version,
    about = "Quantum dimensions, weight multiplicities and spectral zeta functions for U_q(su(l+1))"
)]
pub struct Cli {
    /// JSON model configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantum dimension of an irreducible, exact and optionally evaluated.
    Qdim(QdimArgs),
    /// Weight multiplicities of an irreducible.
    Weights(WeightsArgs),
    /// Weighted zeta function at one or more points.
    Zeta(ZetaArgs),
    /// Abscissa of convergence from settled term ratios.
    Specdim(SpecdimArgs),
    /// lim (s - p) zeta(s) as s decreases to p.
    Residue(ResidueArgs),
    /// Twisted-trace defect on a truncated modular model.
    Twisted(TwistedArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub ell: Option<usize>,
    /// Highest weight in the fundamental basis, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub weight: Vec<i64>,
}

#[derive(Debug, Args)]
pub struct QdimArgs {
    #[command(flatten)]
    pub rank: RankArgs,
    /// Also evaluate at this q.
    #[arg(long)]
    pub q: Option<f64>,
    /// Print only the classical dimension.
    #[arg(long)]
    pub classical: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Gt,
    Freudenthal,
    /// Run both and report any disagreement.
    Compare,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    #[command(flatten)]
    pub rank: RankArgs,
    #[arg(long, value_enum, default_value_t = Method::Gt)]
    pub method: Method,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Line-bundle twist N.
    #[arg(long, visible_alias = "N", allow_hyphen_values = true)]
    pub twist: Option<i64>,
    #[arg(long, value_enum, default_value_t = WeightArg::Qdim)]
    pub weight: WeightArg,
    #[arg(long, value_enum, default_value_t = KernelArg::Shifted)]
    pub kernel: KernelArg,
    /// Single tower with λ_m = q^{-m} and weight q^{-2ℓm}; ignores --weight.
    #[arg(long)]
    pub toy: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightArg {
    Qdim,
    QdimInverse,
    Classical,
    Count,
}

impl From<WeightArg> for WeightKind {
    fn from(w: WeightArg) -> Self {
        match w {
            WeightArg::Qdim => WeightKind::Qdim,
            WeightArg::QdimInverse => WeightKind::QdimInverse,
            WeightArg::Classical => WeightKind::Classical,
            WeightArg::Count => WeightKind::Count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Shifted,
    Pure,
}

impl From<KernelArg> for Kernel {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Shifted => Kernel::Shifted,
            KernelArg::Pure => Kernel::Pure,
        }
    }
}

#[derive(Debug, Args)]
pub struct ZetaArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Evaluation points, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub s: Vec<f64>,
    #[arg(long, default_value_t = qspec_core::spectral::DEFAULT_TOL)]
    pub tol: f64,
    /// Per-tower term budget.
    #[arg(long, default_value_t = qspec_core::spectral::DEFAULT_MAX_TERMS)]
    pub max_terms: u64,
}

#[derive(Debug, Args)]
pub struct SpecdimArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Probe at this exponent only, instead of the two-stage default.
    #[arg(long)]
    pub probe: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ResidueArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Abscissa; defaults to 2ℓ.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = qspec_core::spectral::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Operators {
    /// Weighted shift pair, b raising and a = bᵀ.
    Shift,
    Identity,
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShiftArg {
    Geometric,
    Unit,
}

impl From<ShiftArg> for ShiftWeights {
    fn from(s: ShiftArg) -> Self {
        match s {
            ShiftArg::Geometric => ShiftWeights::Geometric,
            ShiftArg::Unit => ShiftWeights::Unit,
        }
    }
}

#[derive(Debug, Args)]
pub struct TwistedArgs {
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    pub p: f64,
    /// Truncation dimension M.
    #[arg(long, default_value_t = 120)]
    pub size: usize,
    /// Exponents; defaults to p + 0.5·2^{-i}, i = 0..3.
    #[arg(long, value_delimiter = ',')]
    pub s: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Operators::Shift)]
    pub operators: Operators,
    #[arg(long, value_enum, default_value_t = ShiftArg::Geometric)]
    pub shift_weights: ShiftArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_profile, default_value = "quick")]
    pub profile: Profile,
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse().map_err(|e: qspec_core::Error| e.to_string())
}
