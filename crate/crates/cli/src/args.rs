use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use qrap_core::DEFAULT_PRIME_CAP;

#[derive(Parser, Debug)]
#[command(name = "qrap", version, about = "Quadratic residue patterns in families of arithmetic progressions")]
pub struct Cli {
    /// Worker threads for per-prime sweeps. Output does not depend on it.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,

    /// Largest prime any sweep may reach.
    #[arg(long, global = true, env = "QRAP_PRIME_CAP", default_value_t = DEFAULT_PRIME_CAP)]
    pub prime_cap: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Structure report (K_max, T(K), Lambda, alpha, e, branch) as JSON.
    Analyze {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact counts per prime.
    #[command(after_help = "CSV columns: p,mode,eps_or_eta,count")]
    Count {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        range: RangeArgs,
        #[command(flatten)]
        mode: ModeArgs,
        /// Per-row signs for normalized or ap families, e.g. `+-`.
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["eps", "pattern", "support"])]
        eta: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare exact counts with the predicted leading term and error bound.
    #[command(after_help = "CSV columns: p,count,predicted,error,bound,pass,pi_class\n\
        Floats use 6 significant digits. pi_class is pi_plus, pi_minus, not_allowable or na.\n\
        Default sampling: about 200 log-uniform primes per decade.")]
    Verify {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        range: RangeArgs,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the JSON summary here.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Exit 1 on any bound violation or nonzero count where zero is predicted.
        #[arg(long)]
        assert: bool,
        /// Smallest prime whose bound is asserted.
        #[arg(long, default_value_t = 1000)]
        assert_floor: u64,
    },
    /// Character sums of products of linear factors.
    #[command(after_help = "CSV columns: p,d,N,value,bound,within_bound\n\
        N is `complete` for sums over the full range [0, p-1].")]
    Weil {
        #[command(flatten)]
        range: RangeArgs,
        /// Shifts r_i of f(x) = prod (x + r_i), comma separated.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', conflicts_with = "random_degree")]
        shifts: Vec<i64>,
        /// Draw random distinct roots of this degree instead of --shifts.
        #[arg(long)]
        random_degree: Option<usize>,
        /// Random root sets per prime.
        #[arg(long, default_value_t = 50)]
        sets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sum over [0, N] instead of the complete range.
        #[arg(long, conflicts_with = "random_range")]
        range_end: Option<u64>,
        /// Sum over [0, N] with N drawn uniformly from [0, p-1].
        #[arg(long)]
        random_range: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        assert: bool,
        #[arg(long, default_value_t = 100)]
        assert_floor: u64,
    },
    /// Build an admissible ap family with prescribed quotient gaps.
    Generate {
        /// Gaps d_1..d_{k-1}, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<u64>,
        #[arg(long)]
        a1: u64,
        #[arg(long)]
        b1: u64,
        /// Multipliers t_1..t_{k-1}, each at least 2.
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        s: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A named fixture with its expected alpha, e, branch and coefficient.
    Fixture {
        /// k2, k3_i, k3_ii, k3_iii, minimal, maximal, squares_variant or primes_variant.
        #[arg(long, required_unless_present = "shipped")]
        name: Option<String>,
        #[arg(long)]
        s: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        /// primes or squares.
        #[arg(long, default_value = "primes")]
        multipliers: String,
        /// Print only the family spec.
        #[arg(long)]
        spec_only: bool,
        /// Print every shipped fixture as a JSON array.
        #[arg(long, conflicts_with = "name")]
        shipped: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run-length statistics of AP(a, b) per prime, or the least prime with a
    /// given longest run.
    #[command(after_help = "CSV columns: p,n0,s0_plus,s0_minus,s1_plus,s1_minus\n\
        With --q0: side,s,q0 (q0 is `none` when no prime up to --pmax qualifies).")]
    Stats {
        #[arg(long, default_value_t = 0)]
        a: u64,
        #[arg(long, default_value_t = 1)]
        b: u64,
        #[arg(long, default_value_t = 3)]
        pmin: u64,
        #[arg(long)]
        pmax: u64,
        #[arg(long)]
        stride: Option<usize>,
        /// Sign pattern for n0.
        #[arg(long, allow_hyphen_values = true, default_value = "+")]
        pattern: String,
        /// Search for the least prime whose longest plus/minus run equals --len.
        #[arg(long, requires = "len")]
        q0: Option<String>,
        #[arg(long)]
        len: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct RangeArgs {
    #[arg(long)]
    pub pmin: u64,
    #[arg(long)]
    pub pmax: u64,
    /// Use every prime in the range.
    #[arg(long, conflicts_with = "stride")]
    pub all: bool,
    /// Use every n-th prime.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub stride: Option<u64>,
}

#[derive(Args, Debug)]
pub struct ModeArgs {
    /// Constant sign: +1 or -1.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["pattern", "support"])]
    pub eps: Option<String>,
    /// Sign vector, e.g. `+-+` or `+1,-1,+1`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "support")]
    pub pattern: Option<String>,
    /// residue or nonresidue.
    #[arg(long)]
    pub support: Option<String>,
}
