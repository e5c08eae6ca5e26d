//! Closed-form queries (`steady`, `age-pdf`, `expected-age`) and the
//! exponential model check (`check-exponential`).

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use grpsis::dist::survival_quantile;
use grpsis::stats::{binned_density, kl_divergence, mle_exponential};
use grpsis::steady::{steady_age_pdf, steady_densities};

use super::Ctx;
use crate::csvio::{read_floats, CsvWriter};

#[derive(Args, Debug)]
pub struct SteadyArgs {
    #[arg(long)]
    pub dist: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub mean_k: Option<f64>,
}

pub fn steady(ctx: &Ctx, args: &SteadyArgs) -> Result<()> {
    let spec = ctx
        .cfg
        .resolve(&args.dist, "dist", "exponential mu=0.5".to_string())?;
    let dist = ctx.build_dist(&spec)?;
    let beta = ctx.cfg.resolve(&args.beta, "beta", 0.26)?;
    let mean_k = ctx.cfg.resolve(&args.mean_k, "mean_k", 10.0)?;
    let s = steady_densities(dist.as_ref(), beta, mean_k)?;
    let json = serde_json::json!({
        "dist": dist.label(),
        "beta": beta,
        "mean_k": mean_k,
        "effective_rate": s.effective_rate,
        "threshold": s.threshold,
        "gap": s.gap,
        "rho_i_inf": s.rho_i_inf,
        "rho_s_inf": s.rho_s_inf,
        "expected_age": s.expected_age,
    });
    println!("{}", serde_json::to_string_pretty(&json)?);
    Ok(())
}

#[derive(Args, Debug)]
pub struct AgePdfArgs {
    #[arg(long)]
    pub dist: Option<String>,
    /// Upper end of the age grid (default: the 1e-4 survival quantile)
    #[arg(long)]
    pub tau_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

pub fn age_pdf(ctx: &Ctx, args: &AgePdfArgs) -> Result<()> {
    let spec = ctx
        .cfg
        .resolve(&args.dist, "dist", "exponential mu=0.5".to_string())?;
    let dist = ctx.build_dist(&spec)?;
    let tau_max = match ctx.cfg.resolve_opt(&args.tau_max, "tau_max")? {
        Some(x) => x,
        None => survival_quantile(dist.as_ref(), 1e-4),
    };
    let points = ctx.cfg.resolve(&args.points, "points", 400)?;
    anyhow::ensure!(points >= 2, "need at least two grid points");
    let mut w = CsvWriter::create(
        &ctx.path("age_pdf.csv"),
        &format!("dist={spec} tau_max={tau_max} points={points}"),
        &["tau", "f"],
    )?;
    for i in 0..points {
        let tau = tau_max * i as f64 / (points - 1) as f64;
        w.row_f64(&[tau, steady_age_pdf(dist.as_ref(), tau)])?;
    }
    w.finish()?;
    println!("wrote {}", ctx.path("age_pdf.csv").display());
    Ok(())
}

#[derive(Args, Debug)]
pub struct ExpectedAgeArgs {
    #[arg(long)]
    pub dist: Option<String>,
}

pub fn expected_age(ctx: &Ctx, args: &ExpectedAgeArgs) -> Result<()> {
    let spec = ctx
        .cfg
        .resolve(&args.dist, "dist", "exponential mu=0.5".to_string())?;
    let dist = ctx.build_dist(&spec)?;
    let second = dist.second_moment().ok();
    let expected = grpsis::steady::steady_age_mean(dist.as_ref()).ok();
    let json = serde_json::json!({
        "dist": dist.label(),
        "mean_wait": dist.mean(),
        "second_moment": second,
        "expected_age": expected,
        "note": if expected.is_none() { "second moment diverges" } else { "" },
    });
    println!("{}", serde_json::to_string_pretty(&json)?);
    Ok(())
}

#[derive(Args, Debug)]
pub struct CheckExponentialArgs {
    /// File of recovery waits, one per line
    #[arg(long)]
    pub waits: PathBuf,
    /// Histogram bins for the empirical density
    #[arg(long)]
    pub bins: Option<usize>,
}

/// Fit an exponential by maximum likelihood, bin the data, and report the
/// KL divergence of the empirical density from the fit. Large values mean
/// the memoryless recovery assumption does not hold for these waits.
pub fn check_exponential(ctx: &Ctx, args: &CheckExponentialArgs) -> Result<()> {
    let waits = read_floats(&args.waits)?;
    let bins = ctx.cfg.resolve(&args.bins, "bins", 50)?;
    let mu_hat = mle_exponential(&waits)?;
    let empirical = binned_density(&waits, bins)?;
    let kl = kl_divergence(&empirical, |t| mu_hat * (-mu_hat * t).exp())?;
    let json = serde_json::json!({
        "n": waits.len(),
        "bins": bins,
        "mu_hat": mu_hat,
        "kl": kl,
    });
    println!("{}", serde_json::to_string_pretty(&json)?);
    Ok(())
}
