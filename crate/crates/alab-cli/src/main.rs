//! `alab`: exact place arithmetic, root data, cone geometry, model sets,
//! Vietoris-Rips probes, and the rank-1 Bruhat-Tits tree from one CLI.
//!
//! Every subcommand emits a single JSON report on stdout (or to the
//! `--out` path): `{schema_version, command, timing_ms, payload,
//! verdict?}`. Payloads are deterministic for fixed arguments and seed;
//! only `timing_ms` varies between runs. Exit codes: 0 success or pass,
//! 1 failed verdict or computation error, 2 usage error.

mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "alab", version, about = "approximate-lattice toolkit")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct GlobalOpts {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,

    /// Seed for sampled verifications.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalized absolute values, the product formula, window tests.
    #[command(subcommand)]
    Places(PlacesCmd),
    /// Root-system data dumps.
    #[command(subcommand)]
    Rootsys(RootsysCmd),
    /// Linearity classification and rescaling of cone families.
    #[command(subcommand)]
    Cones(ConesCmd),
    /// Model-set enumeration, certificates, and descent sets.
    #[command(subcommand)]
    Cutproject(CutprojectCmd),
    /// Vietoris-Rips complexes and filtration probes.
    #[command(subcommand)]
    Coarse(CoarseCmd),
    /// Busemann functions on the rank-1 Bruhat-Tits tree.
    #[command(subcommand)]
    Bttree(BttreeCmd),
    /// Run named verification checks from a config file.
    Suite {
        /// Config JSON ("alab-config/1"); omit to run every check.
        #[arg(long)]
        config: Option<std::path::PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum PlacesCmd {
    /// Product of |q|_s over the support of q; always 1.
    ProductFormula { q: String },
    /// Normalized absolute value at one place.
    Abs {
        q: String,
        /// A prime, or "inf" for the infinite place.
        #[arg(long)]
        at: String,
    },
    /// S-integer window membership.
    Window {
        q: String,
        /// Comma-separated primes of S.
        #[arg(long, value_delimiter = ',')]
        s: Vec<u64>,
        /// Radius at the infinite place (rational).
        #[arg(long)]
        c: String,
    },
}

#[derive(Debug, Subcommand)]
enum RootsysCmd {
    /// Emit simple roots, weights, Cartan and coefficient matrices.
    Dump {
        #[arg(long = "type")]
        label: String,
    },
}

#[derive(Debug, Subcommand)]
enum ConesCmd {
    /// Classify types: does the unit-pairing vector of the normalized
    /// weights pair nonnegatively with every simple root?
    Classify {
        #[arg(long = "type", conflicts_with = "all")]
        label: Option<String>,
        /// Emit the whole table as CSV on stdout.
        #[arg(long)]
        all: bool,
    },
    /// Rescaling constants and the nested-normal-set verification.
    Rescale {
        #[arg(long = "type")]
        label: String,
    },
}

#[derive(Debug, Subcommand)]
enum CutprojectCmd {
    /// Enumerate the model-set truncation of a configured scheme.
    Enumerate {
        #[arg(long)]
        config: std::path::PathBuf,
        /// Override the config height.
        #[arg(long)]
        height: Option<u32>,
    },
    /// Compute an approximate-group certificate for the truncation.
    Certify {
        #[arg(long)]
        config: std::path::PathBuf,
        #[arg(long)]
        height: Option<u32>,
    },
    /// Build and verify descent sets E, F.
    Descent {
        #[arg(long)]
        config: std::path::PathBuf,
        #[arg(long)]
        height: Option<u32>,
    },
}

#[derive(Debug, Subcommand)]
enum CoarseCmd {
    /// Vietoris-Rips complex of a point file at one scale.
    Vr {
        #[arg(long)]
        input: std::path::PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
    },
    /// Component counts and map verdicts along a scale schedule.
    Probe {
        #[arg(long)]
        input: std::path::PathBuf,
        /// Comma-separated ascending scales.
        #[arg(long, value_delimiter = ',')]
        schedule: Vec<f64>,
    },
}

#[derive(Debug, Subcommand)]
enum BttreeCmd {
    /// Busemann shifts of an upper-triangular element over sampled
    /// vertices, with the transformation-law verdict.
    Busemann {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        /// Matrix "a,b;c,d"; entries are rationals, and `p` or `p^k`
        /// denote powers of the chosen prime.
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = std::time::Instant::now();
    let result = match &cli.command {
        Command::Places(cmd) => commands::places(cmd),
        Command::Rootsys(cmd) => commands::rootsys(cmd),
        Command::Cones(cmd) => commands::cones(cmd),
        Command::Cutproject(cmd) => commands::cutproject(cmd, cli.global.seed),
        Command::Coarse(cmd) => commands::coarse(cmd),
        Command::Bttree(cmd) => commands::bttree(cmd),
        Command::Suite { config } => commands::suite(config.as_deref(), cli.global.seed),
    };
    report::finish(result, &cli.global.out, started)
}
