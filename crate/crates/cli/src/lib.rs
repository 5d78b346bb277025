//! Batch front end for `weylwalk-core`: reads a JSON run configuration,
//! applies command-line overrides, dispatches one command and writes its
//! outputs next to a `manifest.json`.
//!
//! Exit status: 0 on success, 2 for configuration errors, 3 when a
//! verification or statistical check fails, 4 when a resource budget is
//! exceeded.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::Parser;

pub use commands::Command;
pub use config::{Format, RunConfig};
pub use error::CliError;
pub use output::Outputs;

use config::{parse_int_list, parse_rational_list};

#[derive(Debug, Parser)]
#[command(name = "weylwalk", version, about = "Path crystals and random walks in Weyl chambers")]
pub struct Cli {
    pub command: Command,

    /// JSON run configuration; flags override its fields.
    #[arg(long, short)]
    pub config: Option<PathBuf>,

    #[arg(long, short)]
    pub out: Option<PathBuf>,

    /// Type label such as C2, or a JSON Cartan matrix.
    #[arg(long)]
    pub cartan: Option<String>,

    /// Irreducible module with this highest weight, e.g. "1,0".
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,

    /// Comma-separated rationals, e.g. "1/2,1/3".
    #[arg(long)]
    pub tau: Option<String>,

    #[arg(long)]
    pub tau_roots: Option<String>,

    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,

    #[arg(long)]
    pub ell: Option<usize>,

    #[arg(long, allow_hyphen_values = true)]
    pub max_level: Option<i64>,

    #[arg(long)]
    pub horizons: Option<String>,

    #[arg(long)]
    pub ells: Option<String>,

    #[arg(long, short = 'n')]
    pub samples: Option<u64>,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long)]
    pub sigmas: Option<f64>,

    #[arg(long)]
    pub budget: Option<usize>,

    /// Output formats to write; repeatable.
    #[arg(long = "format", value_enum)]
    pub formats: Vec<Format>,
}

impl clap::ValueEnum for Format {
    fn value_variants<'a>() -> &'a [Self] {
        &[Format::Json, Format::Csv, Format::Dot]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Dot => "dot",
        }))
    }
}

impl Cli {
    /// The config file, if any, with every given flag applied on top.
    pub fn config(&self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            None => RunConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                RunConfig::from_json(&text)?
            }
        };
        if let Some(s) = &self.cartan {
            c.cartan = serde_json::from_str(s).unwrap_or_else(|_| serde_json::Value::String(s.clone()));
        }
        if let Some(s) = &self.kappa {
            c.module = vec![config::SummandConfig {
                kappa: parse_int_list(s)?,
                multiplicity: 1,
                path: None,
            }];
        }
        if let Some(s) = &self.tau {
            c.tau = Some(parse_rational_list(s)?);
        }
        if let Some(s) = &self.tau_roots {
            c.tau_roots = Some(parse_rational_list(s)?);
            if self.tau.is_none() {
                c.tau = None;
            }
        }
        if let Some(s) = &self.mu {
            c.mu = Some(parse_int_list(s)?);
        }
        if let Some(s) = &self.horizons {
            c.horizons = parse_int_list(s)?;
        }
        if let Some(s) = &self.ells {
            c.ells = parse_int_list(s)?;
        }
        if let Some(p) = &self.out {
            c.out_dir = p.clone();
        }
        c.ell = self.ell.unwrap_or(c.ell);
        c.max_level = self.max_level.unwrap_or(c.max_level);
        c.samples = self.samples.unwrap_or(c.samples);
        c.seed = self.seed.unwrap_or(c.seed);
        c.sigmas = self.sigmas.unwrap_or(c.sigmas);
        c.budget = self.budget.unwrap_or(c.budget);
        if !self.formats.is_empty() {
            c.formats = self.formats.clone();
        }
        Ok(c)
    }
}

/// Result of [`run`]: the outputs produced and the outcome.
pub struct RunResult {
    pub outputs: Outputs,
    pub outcome: Result<(), CliError>,
    pub manifest: Option<PathBuf>,
}

impl RunResult {
    pub fn exit_code(&self) -> i32 {
        self.outcome.as_ref().map_or_else(|e| e.exit_code(), |_| 0)
    }
}

/// Runs `cmd` under `cfg`, writes outputs and the manifest into
/// `cfg.out_dir`.
pub fn run(cmd: Command, cfg: &RunConfig) -> RunResult {
    let mut outputs = Outputs::default();
    let mut outcome = cfg
        .resolve()
        .and_then(|r| commands::dispatch(cmd, cfg, &r, &mut outputs));
    if let Err(e) = outputs.write(&cfg.out_dir) {
        outcome = outcome.and(Err(e));
    }
    let manifest = match output::write_manifest(&cfg.out_dir, cmd.name(), &cfg.to_value(), &outputs.names(), &outcome) {
        Ok(p) => Some(p),
        Err(e) => {
            outcome = outcome.and(Err(e));
            None
        }
    };
    RunResult {
        outputs,
        outcome,
        manifest,
    }
}

/// Entry point of the binary; returns the exit status.
pub fn main_with(cli: Cli) -> i32 {
    let cfg = match cli.config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("weylwalk: {e}");
            let dir = cli.out.clone().unwrap_or_else(|| RunConfig::default().out_dir);
            let raw = serde_json::json!({ "config_file": cli.config });
            let _ = output::write_manifest(&dir, cli.command.name(), &raw, &[], &Err(CliError::Config(String::new())));
            return e.exit_code();
        }
    };
    let res = run(cli.command, &cfg);
    for line in &res.outputs.summary {
        println!("{line}");
    }
    if let Err(e) = &res.outcome {
        eprintln!("weylwalk {}: {e}", cli.command.name());
    }
    res.exit_code()
}
