//! `sweep-beta`: late-time infection density across transmission rates.

use anyhow::Result;
use clap::Args;
use grpsis::network::RegularNetwork;
use grpsis::sim::{derive_seeds, run_ensemble, SimParams};
use grpsis::steady::{critical_beta, steady_densities};

use super::{ensemble_window_mean, linspace, salted_seed, write_svg, Ctx};
use crate::csvio::CsvWriter;
use crate::svg::{Chart, SeriesKind};

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub dist: Option<String>,
    /// Sweep values: either `lo:hi:count` or a comma list
    #[arg(long)]
    pub betas: Option<String>,
    /// Comma list of degrees, e.g. "4,6,10"
    #[arg(long)]
    pub ks: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub rho_i0: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub grid_dt: Option<f64>,
    #[arg(long)]
    pub runs: Option<usize>,
}

pub fn parse_betas(raw: &str) -> Result<Vec<f64>> {
    if let Some((lo, rest)) = raw.split_once(':') {
        let (hi, count) = rest
            .split_once(':')
            .ok_or_else(|| anyhow::anyhow!("expected lo:hi:count, got `{raw}`"))?;
        let lo: f64 = lo.trim().parse()?;
        let hi: f64 = hi.trim().parse()?;
        let count: usize = count.trim().parse()?;
        anyhow::ensure!(count >= 2 && hi > lo, "bad sweep range `{raw}`");
        Ok(linspace(lo, hi, count))
    } else {
        let vals: Result<Vec<f64>, _> = raw.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let vals = vals?;
        anyhow::ensure!(!vals.is_empty(), "empty beta list");
        anyhow::ensure!(
            vals.windows(2).all(|w| w[1] > w[0]),
            "beta list must be ascending"
        );
        Ok(vals)
    }
}

pub fn run(ctx: &Ctx, args: &SweepArgs) -> Result<()> {
    let spec = ctx
        .cfg
        .resolve(&args.dist, "dist", "exponential mu=0.5".to_string())?;
    let dist = ctx.build_dist(&spec)?;
    let betas = parse_betas(&ctx.cfg.resolve(&args.betas, "betas", "0.02:0.5:25".to_string())?)?;
    let ks: Vec<usize> = ctx
        .cfg
        .resolve(&args.ks, "ks", "4,6,10".to_string())?
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()?;
    let n = ctx.scale_n(ctx.cfg.resolve(&args.n, "n", 2500)?);
    let runs = ctx.scale_runs(ctx.cfg.resolve(&args.runs, "runs", 50)?);
    let t_max = ctx.cfg.resolve(&args.t_max, "t_max", 50.0)?;
    let params_base = SimParams {
        beta: 0.0,
        rho_i0: ctx.cfg.resolve(&args.rho_i0, "rho_i0", 0.3)?,
        t_max,
        grid_dt: ctx.cfg.resolve(&args.grid_dt, "grid_dt", 0.1)?,
    };
    let window = (0.8 * t_max, t_max);

    let comment = format!(
        "dist={spec} n={n} runs={runs} t_max={t_max} rho_i0={} window=[{},{}] seed={}",
        params_base.rho_i0, window.0, window.1, ctx.seed
    );
    let mut w = CsvWriter::create(
        &ctx.path("sweep_beta.csv"),
        &comment,
        &["k", "beta", "rho_i_sim", "rho_i_std", "rho_i_theory", "beta_critical"],
    )?;

    let mut chart = Chart::new(
        &format!("steady infection density vs beta — {}", dist.label()),
        "beta",
        "rho_I(inf)",
    );
    for (ki, &k) in ks.iter().enumerate() {
        let net = RegularNetwork::from_seed(n, k, salted_seed(ctx.seed, 1000 + k as u64))?;
        let beta_c = critical_beta(dist.as_ref(), k as f64)?;
        let mut sim_points = Vec::new();
        let mut theory_points = Vec::new();
        for (bi, &beta) in betas.iter().enumerate() {
            let params = SimParams {
                beta,
                ..params_base
            };
            let seeds = derive_seeds(
                salted_seed(ctx.seed, (ki * 10_000 + bi) as u64),
                runs,
            );
            let trajs = run_ensemble(&net, dist.as_ref(), &params, &seeds)?;
            let means: Vec<f64> = trajs
                .iter()
                .map(|t| t.mean_rho_i_over(window.0, window.1))
                .collect();
            let mean = ensemble_window_mean(&trajs, window.0, window.1);
            let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>()
                / (means.len().max(2) - 1) as f64;
            let theory = steady_densities(dist.as_ref(), beta, k as f64)?.rho_i_inf;
            w.row_f64(&[k as f64, beta, mean, var.sqrt(), theory, beta_c])?;
            sim_points.push((beta, mean));
            theory_points.push((beta, theory));
        }
        chart.add_series_colored(&format!("k={k} simulated"), SeriesKind::Line, sim_points, ki);
        chart.add_series_colored(&format!("k={k} theory"), SeriesKind::Dashed, theory_points, ki);
        chart.vline(beta_c, &format!("beta_c(k={k})"));
    }
    w.finish()?;
    write_svg(&ctx.path("sweep_beta.svg"), &chart)?;
    println!(
        "wrote {} and {}",
        ctx.path("sweep_beta.csv").display(),
        ctx.path("sweep_beta.svg").display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_ranges_parse() {
        assert_eq!(parse_betas("0.1,0.2,0.4").unwrap(), vec![0.1, 0.2, 0.4]);
        let r = parse_betas("0.02:0.5:25").unwrap();
        assert_eq!(r.len(), 25);
        assert!((r[0] - 0.02).abs() < 1e-15);
        assert!((r[24] - 0.5).abs() < 1e-15);
        assert!(parse_betas("0.5:0.1:5").is_err());
        assert!(parse_betas("0.4,0.2").is_err());
    }
}
