//! Config-driven experiment runner.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use config::Experiment;

/// Exit status when every check passed.
pub const EXIT_OK: i32 = 0;
/// Exit status for bad flags, configs or I/O.
pub const EXIT_USAGE: i32 = 1;
/// Exit status when a verification ran but did not pass.
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "excluwall",
    version,
    about = "TASEP with a moving wall: simulation and verification of coupling identities",
    long_about = "Every subcommand takes an optional JSON --config whose top-level \
\"experiment\" key names the subcommand; unknown keys are rejected. Without a config \
a small built-in default is used. Outputs are named <subcommand>-s<seed>-<digest>.<ext>, \
where digest is the first 12 hex digits of the SHA-256 of the canonical config. \
Exit status: 0 success, 1 usage error, 2 verification failure."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON experiment file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Base seed; every replica derives its own stream from it.
    #[arg(long, env = "EXCLUWALL_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Overrides the sample or replica count of the config.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Directory for output files (created if missing).
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Worker threads for replicas; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    pub replicas_in_flight: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one trajectory or an ensemble of final configurations.
    #[command(after_help = "Config keys: ic {kind: step|explicit|half_periodic|half_bernoulli|stationary, ...}, \
n, horizon, wall ([[t, value, jump], ...], optional), replicas (default 1).\n\
Output: CSV label,jump_index,time,new_position for one replica; replica,label,position otherwise.")]
    Simulate(Common),
    /// Two-sided Monte Carlo check of the wall/step finite-time identity.
    #[command(after_help = "Config keys: cases [{ic, wall, n, horizon, s: [..]}], samples.\n\
Output: JSON list of {params, s, p_lhs, ci_lhs, p_rhs, ci_rhs, k_lhs, k_rhs, n_samples, verdict}.")]
    VerifyIdentity(Common),
    /// Shifted-step envelope (pathwise), shifted minimum and wall-free one-point identities.
    #[command(after_help = "Config keys: pathwise {cases, max_n, max_horizon}, \
shifted_minimum [{shifts: [[label, shift], ..], horizon, s}], one_point [{ic, n, horizon, s: [..]}], samples.\n\
Output: JSON report.")]
    VerifyCoupling(Common),
    /// Colour-position symmetry, exchange and the involution construction.
    #[command(after_help = "Config keys: sequences, max_len, window [lo, hi], exchange_max_width, pi_cases, pi_max_n.\n\
Output: JSON tallies.")]
    ColourPosition(Common),
    /// Empirical density against the hydrodynamic profile, optional shock probe.
    #[command(after_help = "Config keys: d, horizon, replicas, bin_width, wall (optional), margin (in T^(2/3) sites, default 3), \
shock_probe {label, window} (optional).\n\
Output: CSV lo,hi,centre,empirical,predicted and a JSON summary.")]
    Density(Common),
    /// Rescaled tagged-particle samples, tail probes and product-form discrepancy.
    #[command(after_help = "Config keys: ic, wall (optional), alpha, xi, horizon, samples, decoupling (bool), tail_levels [..].\n\
Output: CSV of S = (xi T - x) / T^(1/3) per replica and a JSON summary.")]
    Fluctuations(Common),
    /// Regime table, boundary positions and shock densities for the kinked example wall.
    #[command(after_help = "Config keys: d, alpha [..].\nOutput: JSON list of regimes.")]
    Classify(Common),
    /// Fast end-to-end run of the deterministic and degenerate checks.
    Selfcheck(Common),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::VerifyIdentity(_) => "verify-identity",
            Command::VerifyCoupling(_) => "verify-coupling",
            Command::ColourPosition(_) => "colour-position",
            Command::Density(_) => "density",
            Command::Fluctuations(_) => "fluctuations",
            Command::Classify(_) => "classify",
            Command::Selfcheck(_) => "selfcheck",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Simulate(c)
            | Command::VerifyIdentity(c)
            | Command::VerifyCoupling(c)
            | Command::ColourPosition(c)
            | Command::Density(c)
            | Command::Fluctuations(c)
            | Command::Classify(c)
            | Command::Selfcheck(c) => c,
        }
    }
}

/// First 12 hex digits of the SHA-256 of `bytes`.
pub fn digest12(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .take(6)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Failure that maps to an exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("json: {e}"))
    }
}

fn load_experiment(cmd: &Command) -> Result<Option<Experiment>, CliError> {
    let Some(path) = &cmd.common().config else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let exp: Experiment = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
    if exp.name() != cmd.name() {
        return Err(CliError::Usage(format!(
            "config is for '{}' but subcommand is '{}'",
            exp.name(),
            cmd.name()
        )));
    }
    Ok(Some(exp))
}

/// Parses `args` and runs the subcommand; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = load_experiment(&cli.command).and_then(|exp| commands::dispatch(&cli.command, exp));
    match outcome {
        Ok(report) => {
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            for line in &report.lines {
                println!("{line}");
            }
            if report.passed {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}
