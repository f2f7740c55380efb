use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::render::Format;

pub const CACHE_ENV: &str = "ZEROSUM_CACHE";

#[derive(Debug, Parser)]
#[command(name = "zerosum", version, about = "Zero-sum invariants of finite abelian groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute D, eta, s or D_m of a group exactly.
    Exact(ExactArgs),
    /// List every closed-form bound that applies to a group.
    Bounds(BoundsArgs),
    /// Derive the integer coefficients from a bound on s(C_p^3)/p.
    #[command(name = "derive-a3")]
    DeriveA3(DeriveArgs),
    /// Evaluate the rank-3 Davenport bound for n1 | n2 | n3.
    #[command(name = "main-bound")]
    MainBound(MainBoundArgs),
    /// Find smooth integers whose product is a perfect n-th power.
    Smooth(SmoothArgs),
    /// Tabulate bounds (and exact values where feasible) over many groups.
    Sweep(SweepArgs),
    /// Recompute the published constants end to end and compare.
    #[command(name = "verify-paper")]
    VerifyPaper(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InvariantArg {
    #[value(name = "D")]
    D,
    #[value(name = "eta")]
    Eta,
    #[value(name = "s")]
    S,
    #[value(name = "Dm")]
    Dm,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Search node limit per invariant.
    #[arg(long, default_value_t = 100_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_nodes: u64,
    /// Wall-clock limit per invariant, in seconds.
    #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_seconds: u64,
}

#[derive(Debug, Args)]
pub struct CacheArgs {
    /// Result cache file (line-delimited JSON).
    #[arg(long, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,
    /// Ignore the cache entirely.
    #[arg(long)]
    pub no_cache: bool,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    /// Group as invariant factors or any moduli list, e.g. `2,4`.
    #[arg(long)]
    pub group: String,
    #[arg(long, value_enum)]
    pub invariant: InvariantArg,
    /// Number of disjoint zero-sums, for `Dm`.
    #[arg(long)]
    pub m: Option<u32>,
    /// Close every search by exhaustion rather than by known upper bounds.
    #[arg(long)]
    pub exhaustive: bool,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[command(flatten)]
    pub cache: CacheArgs,
}

#[derive(Debug, Args)]
pub struct A3Args {
    /// Coefficient a3 in eta(C_n^3) <= a3(n-1) + 1.
    #[arg(long, default_value_t = 20369)]
    pub a3: u64,
    /// Use a3 = 8, the value expected under a conjectured formula for eta(C_n^3).
    #[arg(long, conflicts_with = "a3")]
    pub conjectural: bool,
}

impl A3Args {
    pub fn value(&self) -> u64 {
        if self.conjectural {
            zerosum_core::bounds::CONJECTURAL_A3
        } else {
            self.a3
        }
    }

    pub fn is_conjectural(&self) -> bool {
        self.conjectural || self.a3 < zerosum_core::bounds::PROVEN_A3
    }
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub group: String,
    #[command(flatten)]
    pub a3: A3Args,
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    /// Upper bound c3 on s(C_p^3)/p for large primes p, as a decimal.
    #[arg(long, default_value = "20233.005")]
    pub c3: String,
    /// Evaluate only the split at this prime.
    #[arg(long)]
    pub force_split: Option<u64>,
}

#[derive(Debug, Args)]
pub struct MainBoundArgs {
    #[arg(long)]
    pub n1: u128,
    #[arg(long)]
    pub n2: u128,
    #[arg(long)]
    pub n3: u128,
    #[command(flatten)]
    pub a3: A3Args,
}

#[derive(Debug, Args)]
pub struct SmoothArgs {
    /// Factor base, e.g. `2,3,5`.
    #[arg(long)]
    pub base: String,
    /// Exponent of the power sought.
    #[arg(long, default_value_t = 2)]
    pub n: u64,
    /// Return a witness with as few integers as possible.
    #[arg(long)]
    pub minimal: bool,
    /// Input file with one integer (or `{"value": ...}` record) per line;
    /// standard input when absent or `-`.
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Every group of order at most N.
    #[arg(long, group = "range")]
    pub max_order: Option<u128>,
    /// Every rank-3 chain 1 < n1 | n2 | n3 with n3 at most N.
    #[arg(long, group = "range")]
    pub max_n3: Option<u128>,
    /// A family of groups in one variable, e.g. `n,n,n` or `n,2n`.
    #[arg(long, group = "range", requires = "n")]
    pub group_family: Option<String>,
    /// Range for the family variable, e.g. `2..4` (inclusive).
    #[arg(long)]
    pub n: Option<String>,
    /// Skip exact computation.
    #[arg(long)]
    pub no_exact: bool,
    /// Exact values are only attempted up to this order.
    #[arg(long, default_value_t = 128)]
    pub exact_max_order: u128,
    #[command(flatten)]
    pub a3: A3Args,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[command(flatten)]
    pub cache: CacheArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Replace c(2) in the recursion (default 4).
    #[arg(long)]
    pub c2: Option<String>,
    #[command(flatten)]
    pub a3: A3Args,
}
