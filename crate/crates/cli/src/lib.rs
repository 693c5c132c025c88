//! Command-line front end for `rabi-aa`: each subcommand computes one table
//! and writes it as CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::Settings;
pub use error::{CliError, Result};
pub use table::{Cell, Format, Table};

#[derive(Debug, Parser)]
#[command(name = "rabi-aa", version, about = "Two coupled qubits in an ultra-strongly coupled oscillator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-photon-number block spectrum, B(N) and Poisson weights
    Spectrum(Args),
    /// Block probabilities P1, P0 and transitions for one photon number
    Dynamics(Args),
    /// Coherent-field transition T(alpha, tau) and Bell probabilities
    Coherent(Args),
    /// Quadratic fit and Poisson-summation reconstruction of T(alpha, tau)
    Revival(Args),
    /// Ranked search for parameters that preserve |I_0>
    Search(Args),
    /// Exact truncated-space engine against the approximation
    Oracle(Args),
}

/// Shared flags. Values given here override the config file. Lists are
/// written `x1,x2,...` or `start:stop:step`.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Args {
    /// Flat `key = value` config file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Level parameter of the middle qubit state
    #[arg(long = "a", allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Qubit to oscillator frequency ratio
    #[arg(long, allow_hyphen_values = true)]
    pub ratio: Option<String>,
    /// Mean photon number |alpha|^2 (search also accepts `zeros`)
    #[arg(long)]
    pub alpha2: Option<String>,
    #[arg(long)]
    pub tau_max: Option<String>,
    #[arg(long)]
    pub tau_samples: Option<String>,
    /// Fock cutoff of the exact engine
    #[arg(long)]
    pub ncut: Option<String>,
    /// Revival terms kept on each side of the Poisson sum
    #[arg(long)]
    pub kmax: Option<String>,
    /// Photon number of the block
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub n_min: Option<String>,
    #[arg(long)]
    pub n_max: Option<String>,
    /// worst_case or plateau
    #[arg(long)]
    pub objective: Option<String>,
    /// Number of ranked results written
    #[arg(long)]
    pub top: Option<String>,
    /// Re-score this many top results with the exact engine
    #[arg(long)]
    pub rescore_top: Option<String>,
    #[arg(long)]
    pub rescore_alpha2: Option<String>,
}

impl Args {
    pub fn settings(&self) -> Result<Settings> {
        let mut s = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        let flags = [
            ("out", &self.out),
            ("format", &self.format),
            ("beta", &self.beta),
            ("a", &self.a),
            ("ratio", &self.ratio),
            ("alpha2", &self.alpha2),
            ("tau_max", &self.tau_max),
            ("tau_samples", &self.tau_samples),
            ("ncut", &self.ncut),
            ("kmax", &self.kmax),
            ("n", &self.n),
            ("n_min", &self.n_min),
            ("n_max", &self.n_max),
            ("objective", &self.objective),
            ("top", &self.top),
            ("rescore_top", &self.rescore_top),
            ("rescore_alpha2", &self.rescore_alpha2),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                s.set(key, v)?;
            }
        }
        Ok(s)
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Dynamics(_) => "dynamics",
            Command::Coherent(_) => "coherent",
            Command::Revival(_) => "revival",
            Command::Search(_) => "search",
            Command::Oracle(_) => "oracle",
        }
    }

    pub fn args(&self) -> &Args {
        match self {
            Command::Spectrum(a)
            | Command::Dynamics(a)
            | Command::Coherent(a)
            | Command::Revival(a)
            | Command::Search(a)
            | Command::Oracle(a) => a,
        }
    }
}

/// Computes the table of `command` from resolved settings.
pub fn compute(command: &str, s: &Settings) -> Result<Table> {
    match command {
        "spectrum" => commands::spectrum(s),
        "dynamics" => commands::dynamics(s),
        "coherent" => commands::coherent(s),
        "revival" => commands::revival(s),
        "search" => commands::search_cmd(s),
        "oracle" => commands::oracle(s),
        other => Err(CliError::Validation(format!("unknown command {other:?}"))),
    }
}

/// Runs a parsed command line, writing the table to `--out` or stdout.
/// Returns advisories for stderr.
pub fn run(cli: &Cli) -> Result<Vec<String>> {
    let s = cli.command.args().settings()?;
    let format: Format = s.get("format").unwrap_or("csv").parse()?;
    let table = compute(cli.command.name(), &s)?;
    match s.get("out") {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            table.write(format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(table.warnings)
}
