//! `meanfield`: the age-structured solver, with the same trajectory CSV
//! schema as the simulator so the two overlay directly.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use grpsis::meanfield::{solve_grp_pde, write_grid_dump, InitialAgeDensity, PdeParams};

use super::Ctx;
use crate::csvio::CsvWriter;

#[derive(Args, Debug)]
pub struct MeanfieldArgs {
    #[arg(long)]
    pub dist: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub mean_k: Option<f64>,
    #[arg(long)]
    pub rho_i0: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Grid step shared by the time and age axes
    #[arg(long)]
    pub dt: Option<f64>,
    /// Age-axis extent (default: sized so <= 1e-6 recovery mass escapes)
    #[arg(long)]
    pub tau_max: Option<f64>,
    /// Keep a full age slice every N steps (for --dump-grid)
    #[arg(long)]
    pub stride: Option<usize>,
    /// Write the solved grid as a self-describing binary dump
    #[arg(long)]
    pub dump_grid: Option<PathBuf>,
}

pub fn run(ctx: &Ctx, args: &MeanfieldArgs) -> Result<()> {
    let spec = ctx
        .cfg
        .resolve(&args.dist, "dist", "exponential mu=0.5".to_string())?;
    let dist = ctx.build_dist(&spec)?;
    let p = PdeParams {
        beta: ctx.cfg.resolve(&args.beta, "beta", 0.26)?,
        mean_k: ctx.cfg.resolve(&args.mean_k, "mean_k", 10.0)?,
        rho_i0: ctx.cfg.resolve(&args.rho_i0, "rho_i0", 0.3)?,
        t_max: ctx.cfg.resolve(&args.t_max, "t_max", 50.0)?,
        dt: ctx.cfg.resolve(&args.dt, "dt", 0.01)?,
        tau_max: ctx.cfg.resolve_opt(&args.tau_max, "tau_max")?,
        snapshot_stride: ctx.cfg.resolve_opt(&args.stride, "stride")?,
    };
    let grid = solve_grp_pde(dist.as_ref(), &p, &InitialAgeDensity::AllAtAgeZero)?;
    if grid.truncation_warning {
        eprintln!(
            "warning: tau_max truncation: {:.3e} probability mass crossed the age boundary",
            grid.truncated_mass
        );
    }

    let comment = format!(
        "dist={spec} beta={} mean_k={} rho_i0={} t_max={} dt={} tau_max={} n_bins={}",
        p.beta,
        p.mean_k,
        p.rho_i0,
        p.t_max,
        p.dt,
        p.tau_max.map_or("auto".into(), |x| x.to_string()),
        grid.n_bins
    );
    let mut w = CsvWriter::create(&ctx.path("meanfield.csv"), &comment, &["t", "rho_I", "rho_S"])?;
    for (i, t) in grid.times().enumerate() {
        w.row_f64(&[t, grid.rho_i[i], grid.rho_s[i]])?;
    }
    w.finish()?;
    println!("wrote {}", ctx.path("meanfield.csv").display());

    if let Some(path) = &args.dump_grid {
        let file = std::fs::File::create(path)?;
        write_grid_dump(&grid, std::io::BufWriter::new(file))?;
        println!(
            "wrote {} ({} slices of {} bins)",
            path.display(),
            grid.snapshots.len(),
            grid.n_bins
        );
    }
    Ok(())
}
