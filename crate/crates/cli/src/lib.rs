//! Command-line front end for the driven three-level lambda system.
//!
//! Every drive strength is an angular frequency in rad/ns (shown as GHz);
//! times are in ns.

pub mod commands;
pub mod config;
pub mod output;
pub mod repro;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, Format, InitSpec, RawConfig, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(
    name = "lambda3",
    version,
    about = "Driven three-level lambda system: steady state, spectrum and dynamics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady-state populations and coherence
    Steady(ScenarioArgs),
    /// Eigenvalues of the generator and decay times
    Spectrum(ScenarioArgs),
    /// Integrate the reduced equations with RK4 (CSV trajectory)
    Evolve(ScenarioArgs),
    /// Evaluate the eigen-expansion propagator on the same grid as evolve
    Exact(ScenarioArgs),
    /// Steady state and spectrum over a list or range of drive strengths (CSV)
    Sweep(SweepArgs),
    /// Drive strength where rho22(inf) overtakes rho00(inf)
    Crossover(ScenarioArgs),
    /// Two-point fit of the approach to steady state
    DecayFit(DecayFitArgs),
    /// Compare the full 3x3 density matrix against the reduced equations
    VerifyFull(ScenarioArgs),
    /// Regenerate every figure and table data set plus a pass/fail summary
    Repro(ReproArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// Config file of `key = value` lines; flags override it
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Level-1 lifetime T1 (ns)
    #[arg(long, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    /// Dephasing time T2 (ns)
    #[arg(long, allow_negative_numbers = true)]
    pub t2: Option<f64>,
    /// Relaxation rate 1 -> 2 (1/ns)
    #[arg(long, allow_negative_numbers = true)]
    pub k21: Option<f64>,
    /// Relaxation rate 2 -> 0 (1/ns)
    #[arg(long, allow_negative_numbers = true)]
    pub k02: Option<f64>,
    /// Rabi frequency in GHz; comma-separated list allowed
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub omega: Option<Vec<f64>>,
    /// End time (ns)
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    /// Integration step (ns)
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Store every STRIDE-th step
    #[arg(long)]
    pub stride: Option<usize>,
    /// Initial state: excited (all in level 1, the default), ground, or rho00,rhoB,rho11,rho22
    #[arg(long, value_parser = parse_init)]
    pub init: Option<InitSpec>,
    /// Write to FILE instead of stdout
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Output format for steady and spectrum
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

fn parse_init(s: &str) -> Result<InitSpec, String> {
    s.parse()
}

impl ScenarioArgs {
    fn flags(&self) -> RawConfig {
        RawConfig {
            t1: self.t1,
            t2: self.t2,
            k21: self.k21,
            k02: self.k02,
            omega: self.omega.clone(),
            t_end: self.t_end,
            dt: self.dt,
            stride: self.stride,
            init: self.init,
            output: self.output.clone(),
            format: self.format,
        }
    }

    /// Config file (if any) overlaid by flags, then validated.
    pub fn resolve(&self) -> Result<ScenarioConfig, ConfigError> {
        let base = match &self.config {
            Some(path) => config::read_raw(path)?,
            None => RawConfig::default(),
        };
        base.overlay(self.flags()).finish()
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Uniform grid START:STOP:COUNT (GHz); used when --omega is absent
    #[arg(long, value_name = "START:STOP:COUNT")]
    pub range: Option<String>,
}

#[derive(Debug, Args)]
pub struct DecayFitArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Earlier fit time (ns)
    #[arg(long, default_value_t = lambda3_core::analysis::FIT_T1)]
    pub fit_t1: f64,
    /// Later fit time (ns)
    #[arg(long, default_value_t = lambda3_core::analysis::FIT_T2)]
    pub fit_t2: f64,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    /// Directory for the data files
    #[arg(long, default_value = "repro-out")]
    pub out_dir: PathBuf,
    /// Exit with status 1 if any check fails
    #[arg(long)]
    pub strict: bool,
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Computation finished but a check did not pass.
    ChecksFailed,
}

pub fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Steady(a) => commands::steady(&a.resolve()?),
        Command::Spectrum(a) => commands::spectrum(&a.resolve()?),
        Command::Evolve(a) => commands::evolve(&a.resolve()?),
        Command::Exact(a) => commands::exact(&a.resolve()?),
        Command::Sweep(a) => {
            let range = a.range.as_deref().map(commands::parse_range).transpose()?;
            commands::sweep(&a.scenario.resolve()?, range)
        }
        Command::Crossover(a) => commands::crossover(&a.resolve()?),
        Command::DecayFit(a) => commands::decay_fit(&a.scenario.resolve()?, a.fit_t1, a.fit_t2),
        Command::VerifyFull(a) => commands::verify_full(&a.resolve()?),
        Command::Repro(a) => repro::run(&a.out_dir, a.strict),
    }
}
