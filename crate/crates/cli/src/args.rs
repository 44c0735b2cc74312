use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "rdv", version, about = "Exact and simulated rendezvous on n discrete locations")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the output here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads (results do not depend on this).
    #[arg(long, global = true, env = "RDV_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact expected waiting time of a tactic pair.
    Eval(PairArgs),
    /// Exact survival curve P(W > k), k = 0..n.
    Survival(PairArgs),
    /// Moments of the number of constraint cells hit by the binding.
    Moments(PairArgs),
    /// Exact expected waiting time of two table strategies.
    Phi(PhiArgs),
    /// Run one verifier (or all of them) on a pair, a strategy or a scan.
    Verify(VerifyArgs),
    /// Engine cross-checks and Anderson–Weber θ scans.
    #[command(subcommand)]
    Scan(ScanCommand),
    /// Monte Carlo estimate of the expected waiting time.
    Simulate(SimulateArgs),
    /// Search for good symmetric strategies.
    #[command(subcommand)]
    Optimize(OptimizeCommand),
    /// Write built-in strategies in the strategy file format.
    #[command(subcommand)]
    Strategy(StrategyCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Enumeration,
    InclusionExclusion,
}

#[derive(Args, Debug)]
pub struct PairArgs {
    #[arg(long)]
    pub n: usize,
    /// Itinerary of player A, e.g. "1 1 2 3".
    #[arg(long)]
    pub tactic_a: String,
    #[arg(long)]
    pub tactic_b: String,
    #[arg(long, value_enum, default_value_t = EngineArg::InclusionExclusion)]
    pub engine: EngineArg,
}

#[derive(Args, Debug)]
pub struct PhiArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// baby | mommy | uniform | aw:<theta> | path to a strategy file.
    #[arg(long)]
    pub strategy_a: String,
    #[arg(long)]
    pub strategy_b: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Lemma {
    PbWaiting,
    MomentClaims,
    VarPb,
    DpVar,
    MarkovCorner,
    SameKindVariance,
    SameKindGap,
    Theorem1Assembly,
    Split,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub lemma: Lemma,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Check a single pair instead of scanning.
    #[arg(long, requires = "tactic_b")]
    pub tactic_a: Option<String>,
    #[arg(long, requires = "tactic_a")]
    pub tactic_b: Option<String>,
    /// Variance threshold for var-pb.
    #[arg(long, default_value = "1/32")]
    pub alpha: String,
    /// Strategy for theorem1-assembly.
    #[arg(long, default_value = "uniform")]
    pub strategy: String,
    /// Random graphs for split.
    #[arg(long, default_value_t = 1000)]
    pub graphs: usize,
}

#[derive(Subcommand, Debug)]
pub enum ScanCommand {
    /// Compare both exact engines and check the asymmetric floor on many pairs.
    Engines(EngineScanArgs),
    /// Multi-block Anderson–Weber estimates over a grid of stay probabilities.
    Aw(AwScanArgs),
}

#[derive(Args, Debug)]
pub struct EngineScanArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct AwScanArgs {
    #[arg(long)]
    pub n: usize,
    /// Comma-separated values; defaults to 0, step, 2·step, …, 1.
    #[arg(long, value_delimiter = ',')]
    pub thetas: Vec<String>,
    #[arg(long, default_value = "1/20")]
    pub step: String,
    /// Defaults to 20n.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub strategy_a: String,
    #[arg(long)]
    pub strategy_b: String,
    /// Defaults to n.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write a one-row CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum OptimizeCommand {
    /// Best Anderson–Weber stay probability.
    Theta(ThetaArgs),
    /// Multistart Frank–Wolfe on the symmetric objective (n ≤ 4).
    Symmetric(SymmetricArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ThetaModeArg {
    Exact,
    Mc,
}

#[derive(Args, Debug)]
pub struct ThetaArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ThetaModeArg::Exact)]
    pub mode: ThetaModeArg,
    #[arg(long, default_value_t = 21)]
    pub resolution: usize,
    /// MC only; defaults to 20n.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long, default_value_t = 20_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SymmetricArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum StrategyCommand {
    /// Print a built-in strategy as a strategy file.
    Export(ExportArgs),
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    /// baby | mommy | uniform | aw:<theta> | path to a strategy file.
    pub spec: String,
    #[arg(long)]
    pub n: Option<usize>,
}
