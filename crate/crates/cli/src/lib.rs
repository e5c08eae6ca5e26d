//! `grp-sis`: experiment driver for the general-recovery SIS toolkit.
//!
//! Subcommands cover single simulations, mean-field solves, steady-state
//! queries, beta sweeps, age-density tabulation, the exponential model
//! check, and `reproduce`, which re-runs the reference experiment suites
//! end to end and emits CSV data plus SVG charts. All randomness hangs off
//! one 64-bit `--seed`; reruns are byte-identical.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod svg;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};

use crate::commands::Ctx;

#[derive(Parser, Debug)]
#[command(name = "grp-sis", version, about = "SIS epidemics with general recovery processes")]
pub struct Cli {
    /// Seed controlling all randomness (graph, initial infecteds, clocks)
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory for CSV/SVG artifacts
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Desk-scale mode: smaller network, fewer runs, tolerances doubled
    #[arg(long, global = true)]
    pub fast: bool,

    /// Worker threads for ensembles and sweeps (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Flat key=value config file; explicit flags override its entries
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the event-driven simulator (single run or ensemble)
    Simulate(commands::simulate::SimulateArgs),
    /// Solve the age-structured mean-field equations
    Meanfield(commands::meanfield_cmd::MeanfieldArgs),
    /// Print the closed-form steady-state summary as JSON
    Steady(commands::analysis::SteadyArgs),
    /// Sweep beta and compare late-time densities against theory
    SweepBeta(commands::sweep::SweepArgs),
    /// Tabulate the stationary infection-age density as CSV
    AgePdf(commands::analysis::AgePdfArgs),
    /// Print the stationary expected infection age as JSON
    ExpectedAge(commands::analysis::ExpectedAgeArgs),
    /// Fit an exponential to a waits file and report the KL mismatch
    CheckExponential(commands::analysis::CheckExponentialArgs),
    /// Re-run a reference experiment suite end to end
    Reproduce(commands::reproduce::ReproduceArgs),
}

pub fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx::from_cli(&cli)?;
    match &cli.command {
        Command::Simulate(args) => commands::simulate::run(&ctx, args),
        Command::Meanfield(args) => commands::meanfield_cmd::run(&ctx, args),
        Command::Steady(args) => commands::analysis::steady(&ctx, args),
        Command::SweepBeta(args) => commands::sweep::run(&ctx, args),
        Command::AgePdf(args) => commands::analysis::age_pdf(&ctx, args),
        Command::ExpectedAge(args) => commands::analysis::expected_age(&ctx, args),
        Command::CheckExponential(args) => commands::analysis::check_exponential(&ctx, args),
        Command::Reproduce(args) => commands::reproduce::run(&ctx, args),
    }
}
