//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "perronlab",
    version,
    about = "Perron factors, Perron-capacity certificates, lacunary order and Kakeya blows"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Working precision in bits (at least 64); overrides PERRONLAB_PRECISION.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Largest integer searched for lattice witnesses.
    #[arg(long, global = true)]
    pub max_search: Option<u64>,
    /// Directory for output files given by bare names.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Seed for randomized steps; recorded in every output.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Perron factor of a finite set.
    Perron(PerronArgs),
    /// Capacity bound from Ω_e witnesses or exhaustive search over a finite set.
    Capacity(CapacityArgs),
    /// Certificate that {n / cos n} has Perron capacity at most 6.
    Theorem1(CertificateArgs),
    /// The same certificate for {n / sin n}.
    OmegaS(CertificateArgs),
    /// Integers within 2^-level of the lattice 2πℤ.
    FindE(FindEArgs),
    /// Lacunary order of a finite set.
    Lacunary(LacunaryArgs),
    /// Blow ratios of constructed rectangle families.
    Kakeya(KakeyaArgs),
    /// Level-set probe of the directional maximal function.
    MaximalProbe(ProbeArgs),
}

#[derive(Debug, Args)]
pub struct SetInput {
    /// Comma-separated values (decimals, fractions like 22/7, or exponents).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Vec<String>,
    /// File holding the values: JSON {"values": [...]} or separated text.
    #[arg(long, conflicts_with = "values")]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PerronArgs {
    #[command(flatten)]
    pub input: SetInput,
    /// all_kl or l_le_k.
    #[arg(long, default_value = "all_kl")]
    pub convention: String,
    /// Include every ratio.
    #[arg(long)]
    pub table: bool,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub input: SetInput,
    /// Subset exponents: one N for exhaustive search, a list with --omega-e.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    pub n: Vec<u32>,
    /// Use the Ω_e witnesses instead of a given set.
    #[arg(long)]
    pub omega_e: bool,
    #[arg(long, default_value = "all_kl")]
    pub convention: String,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct CertificateArgs {
    /// Increasing list of N.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    pub n: Vec<u32>,
    /// Certificate file (defaults to a name in the output directory).
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct FindEArgs {
    #[arg(long)]
    pub level: u32,
    /// Defaults to --max-search.
    #[arg(long)]
    pub max_n: Option<u64>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct LacunaryArgs {
    #[command(flatten)]
    pub input: SetInput,
    /// Contraction ratio in (0, 1).
    #[arg(long, default_value = "1/2")]
    pub ratio: String,
    #[arg(long, default_value_t = 16)]
    pub max_order: u32,
    /// Work budget of the search.
    #[arg(long, default_value_t = 20_000_000_000)]
    pub budget: u64,
    /// Also search a cover by at most --max-cover parts of order at most --max-order.
    #[arg(long)]
    pub cover: bool,
    #[arg(long, default_value_t = 4)]
    pub max_cover: usize,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct SlopeChoice {
    /// Explicit slopes (their count must be a power of two).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub slopes: Vec<String>,
    /// Progression slopes k/2^N, k < 2^N, for N in a range like 2..5 or a single N.
    #[arg(long, conflicts_with = "slopes")]
    pub ap: Option<String>,
}

#[derive(Debug, Args)]
pub struct KakeyaArgs {
    #[command(flatten)]
    pub slopes: SlopeChoice,
    /// bush or perron_tree.
    #[arg(long, default_value = "perron_tree")]
    pub scheme: String,
    #[arg(long, default_value_t = 4.0)]
    pub factor: f64,
    /// Relative width of the area brackets.
    #[arg(long, default_value_t = 0.01)]
    pub target: f64,
    /// Picture of the last family.
    #[arg(long)]
    pub svg: Option<String>,
    #[arg(long)]
    pub csv: Option<String>,
    /// Monte-Carlo cross-check with this many samples per family.
    #[arg(long)]
    pub montecarlo: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub slopes: SlopeChoice,
    #[arg(long, default_value = "perron_tree")]
    pub scheme: String,
    #[arg(long, default_value_t = 0.9)]
    pub alpha: f64,
    /// Grid cells along the longer side.
    #[arg(long, default_value_t = 64)]
    pub cells: usize,
    #[arg(long)]
    pub out: Option<String>,
}
