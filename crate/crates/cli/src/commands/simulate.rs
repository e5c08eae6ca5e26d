//! `simulate`: event-driven runs on a k-regular graph.

use std::path::PathBuf;

use anyhow::{Context as _, Result};
use clap::Args;
use grpsis::network::RegularNetwork;
use grpsis::sim::{derive_seeds, run_ensemble, run_with_options, SimOptions, SimParams};
use grpsis::stats::summarize_ensemble;

use super::{pooled_final_ages, Ctx};
use crate::csvio::CsvWriter;

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Recovery law, e.g. "exponential mu=0.5" or "powerlaw lambda=4 t0=1"
    #[arg(long)]
    pub dist: Option<String>,
    /// Per-contact transmission rate
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub rho_i0: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub grid_dt: Option<f64>,
    /// Number of independent runs (1 = single trajectory file)
    #[arg(long)]
    pub runs: Option<usize>,
    /// Separate seed for graph generation (defaults to --seed)
    #[arg(long)]
    pub graph_seed: Option<u64>,
    /// Write the generated graph as an edge list
    #[arg(long)]
    pub export_edges: Option<PathBuf>,
    /// Load the graph from an edge list instead of generating it
    #[arg(long)]
    pub import_edges: Option<PathBuf>,
    /// Full queue/state consistency checking after every event (slow)
    #[arg(long)]
    pub check_invariants: bool,
    /// Event scheduling exactly as in the textbook listing (no contact
    /// re-arming on recovery); for comparison only
    #[arg(long)]
    pub literal_rescheduling: bool,
}

pub fn run(ctx: &Ctx, args: &SimulateArgs) -> Result<()> {
    let spec = ctx
        .cfg
        .resolve(&args.dist, "dist", "exponential mu=0.5".to_string())?;
    let dist = ctx.build_dist(&spec)?;
    let n = ctx.cfg.resolve(&args.n, "n", 2500)?;
    let k = ctx.cfg.resolve(&args.k, "k", 10)?;
    let params = SimParams {
        beta: ctx.cfg.resolve(&args.beta, "beta", 0.26)?,
        rho_i0: ctx.cfg.resolve(&args.rho_i0, "rho_i0", 0.3)?,
        t_max: ctx.cfg.resolve(&args.t_max, "t_max", 50.0)?,
        grid_dt: ctx.cfg.resolve(&args.grid_dt, "grid_dt", 0.1)?,
    };
    let runs = ctx.cfg.resolve(&args.runs, "runs", 1)?;
    anyhow::ensure!(runs >= 1, "--runs must be at least 1");
    let graph_seed = ctx.cfg.resolve(&args.graph_seed, "graph_seed", ctx.seed)?;

    let net = match &args.import_edges {
        Some(path) => {
            let file = std::fs::File::open(path)
                .with_context(|| format!("opening {}", path.display()))?;
            RegularNetwork::read_edge_list(std::io::BufReader::new(file))?
        }
        None => RegularNetwork::from_seed(n, k, graph_seed)?,
    };
    if let Some(path) = &args.export_edges {
        let file = std::fs::File::create(path)?;
        net.write_edge_list(std::io::BufWriter::new(file))?;
    }

    if (params.rho_i0 * net.node_count() as f64).floor() as usize == 0 {
        eprintln!(
            "warning: empty initial infection (rho_i0={} on n={} leaves no infected seed)",
            params.rho_i0,
            net.node_count()
        );
    }

    let comment = format!(
        "dist={spec} beta={} n={} k={} rho_i0={} t_max={} grid_dt={} runs={runs} seed={} graph_seed={graph_seed}",
        params.beta,
        net.node_count(),
        net.degree(),
        params.rho_i0,
        params.t_max,
        params.grid_dt,
        ctx.seed
    );

    let trajs = if runs == 1 {
        let options = SimOptions {
            check_invariants: args.check_invariants,
            literal_rescheduling: args.literal_rescheduling,
        };
        vec![run_with_options(&net, dist.as_ref(), &params, ctx.seed, &options)?]
    } else {
        anyhow::ensure!(
            !args.check_invariants && !args.literal_rescheduling,
            "--check-invariants/--literal-rescheduling apply to single runs"
        );
        run_ensemble(&net, dist.as_ref(), &params, &derive_seeds(ctx.seed, runs))?
    };

    if runs == 1 {
        let mut w = CsvWriter::create(&ctx.path("trajectory.csv"), &comment, &["t", "rho_I", "rho_S"])?;
        let t = &trajs[0];
        for i in 0..t.grid.len() {
            w.row_f64(&[t.grid[i], t.rho_i[i], t.rho_s[i]])?;
        }
        w.finish()?;
        println!("wrote {}", ctx.path("trajectory.csv").display());
    } else {
        let mut w = CsvWriter::create(
            &ctx.path("ensemble.csv"),
            &comment,
            &["t", "rho_I", "rho_S", "run_id"],
        )?;
        for (run_id, t) in trajs.iter().enumerate() {
            for i in 0..t.grid.len() {
                w.row(&[
                    t.grid[i].to_string(),
                    t.rho_i[i].to_string(),
                    t.rho_s[i].to_string(),
                    run_id.to_string(),
                ])?;
            }
        }
        w.finish()?;

        let summary = summarize_ensemble(&trajs)?;
        let mut w = CsvWriter::create(
            &ctx.path("ensemble_summary.csv"),
            &comment,
            &["t", "mean", "std", "ci_low", "ci_high"],
        )?;
        for i in 0..summary.grid.len() {
            w.row_f64(&[
                summary.grid[i],
                summary.mean[i],
                summary.std[i],
                summary.ci_low[i],
                summary.ci_high[i],
            ])?;
        }
        w.finish()?;
        println!(
            "wrote {} and {}",
            ctx.path("ensemble.csv").display(),
            ctx.path("ensemble_summary.csv").display()
        );
    }

    let ages = pooled_final_ages(&trajs);
    let absorbed = trajs.iter().filter(|t| t.absorbed).count();
    let mut w = CsvWriter::create(
        &ctx.path("final_ages.csv"),
        &format!("{comment} absorbed_runs={absorbed}"),
        &["age"],
    )?;
    for age in &ages {
        w.row_f64(&[*age])?;
    }
    w.finish()?;
    println!(
        "wrote {} ({} ages from {} non-absorbed run(s))",
        ctx.path("final_ages.csv").display(),
        ages.len(),
        trajs.len() - absorbed
    );
    Ok(())
}
