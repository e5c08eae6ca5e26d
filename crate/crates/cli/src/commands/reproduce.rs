//! `reproduce`: the reference experiment suites, end to end.
//!
//! Each target regenerates one artifact family from a single seed and
//! asserts the quantitative claims attached to it (printed as PASS/FAIL
//! lines). Network size, run counts and tolerances scale down under
//! `--fast`.

use anyhow::Result;
use clap::{Args, ValueEnum};
use grpsis::dist::{survival_quantile, DynDist};
use grpsis::meanfield::{solve_grp_pde, InitialAgeDensity, PdeParams};
use grpsis::network::RegularNetwork;
use grpsis::sim::{derive_seeds, run_ensemble, SimParams, Trajectory};
use grpsis::stats::{binned_density_with_range, kl_divergence, summarize_ensemble};
use grpsis::steady::{
    critical_beta, horizon_truncation_bias, steady_age_mean, steady_age_pdf, steady_densities,
};

use super::{
    ensemble_window_mean, linspace, pooled_final_ages, salted_seed, write_svg, Checks, Ctx,
};
use crate::csvio::CsvWriter;
use crate::svg::{Chart, SeriesKind};

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// Experiment suite to re-run
    #[arg(value_enum)]
    pub target: Target,
    /// Restrict fig3/fig4 to one recovery law (default: all three)
    #[arg(long, value_enum)]
    pub variant: Option<Variant>,
    /// Histogram bins for fig6/table2
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Target {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Table2,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum Variant {
    Exp,
    Lognormal,
    Powerlaw,
}

pub fn run(ctx: &Ctx, args: &ReproduceArgs) -> Result<()> {
    match args.target {
        Target::Fig3 => fig3(ctx, args.variant),
        Target::Fig4 => fig4(ctx, args.variant),
        Target::Fig5 => fig5(ctx),
        Target::Fig6 => fig6(ctx, args.bins, true),
        Target::Table2 => fig6(ctx, args.bins, false),
        Target::Fig7 => fig7(ctx),
    }
}

// ----------------------------------------------------------------------
// shared protocol

#[derive(Clone, Copy)]
struct VariantDef {
    name: &'static str,
    spec: &'static str,
    beta: f64,
}

const VARIANTS: [VariantDef; 3] = [
    VariantDef {
        name: "exp",
        spec: "dist=exponential mu=0.5",
        beta: 0.26,
    },
    VariantDef {
        name: "lognormal",
        spec: "dist=lognormal mu=0 sigma=1",
        beta: 0.33,
    },
    VariantDef {
        name: "powerlaw",
        spec: "dist=powerlaw lambda=4 t0=1",
        beta: 0.3,
    },
];

struct Protocol {
    n: usize,
    k: usize,
    t_max: f64,
    grid_dt: f64,
    rho_i0: f64,
    runs: usize,
}

impl Protocol {
    fn reference(ctx: &Ctx) -> Self {
        Self {
            n: ctx.scale_n(2500),
            k: 10,
            t_max: 50.0,
            grid_dt: 0.1,
            rho_i0: 0.3,
            runs: ctx.scale_runs(50),
        }
    }

    fn comment(&self, ctx: &Ctx, extra: &str) -> String {
        format!(
            "{extra} n={} k={} t_max={} grid_dt={} rho_i0={} runs={} seed={} fast={}",
            self.n, self.k, self.t_max, self.grid_dt, self.rho_i0, self.runs, ctx.seed, ctx.fast
        )
    }
}

fn selected(variant: Option<Variant>) -> Vec<VariantDef> {
    match variant {
        None => VARIANTS.to_vec(),
        Some(Variant::Exp) => vec![VARIANTS[0]],
        Some(Variant::Lognormal) => vec![VARIANTS[1]],
        Some(Variant::Powerlaw) => vec![VARIANTS[2]],
    }
}

fn run_variant_ensemble(
    ctx: &Ctx,
    proto: &Protocol,
    def: &VariantDef,
    salt: u64,
) -> Result<(DynDist, Vec<Trajectory>)> {
    let dist = ctx.build_dist(def.spec)?;
    let net = RegularNetwork::from_seed(proto.n, proto.k, salted_seed(ctx.seed, salt))?;
    let params = SimParams {
        beta: def.beta,
        rho_i0: proto.rho_i0,
        t_max: proto.t_max,
        grid_dt: proto.grid_dt,
    };
    let seeds = derive_seeds(salted_seed(ctx.seed, salt ^ 0xABCD), proto.runs);
    let trajs = run_ensemble(&net, dist.as_ref(), &params, &seeds)?;
    Ok((dist, trajs))
}

// ----------------------------------------------------------------------
// fig3: density evolution + mean-field overlay + steady-state lines

fn fig3(ctx: &Ctx, variant: Option<Variant>) -> Result<()> {
    let proto = Protocol::reference(ctx);
    let mut checks = Checks::new("fig3");
    let pde_dt = if ctx.fast { 0.02 } else { 0.01 };

    for (vi, def) in selected(variant).iter().enumerate() {
        let (dist, trajs) = run_variant_ensemble(ctx, &proto, def, 300 + vi as u64)?;
        let summary = summarize_ensemble(&trajs)?;

        let pde = solve_grp_pde(
            dist.as_ref(),
            &PdeParams {
                beta: def.beta,
                mean_k: proto.k as f64,
                rho_i0: proto.rho_i0,
                t_max: proto.t_max,
                dt: pde_dt,
                tau_max: None,
                snapshot_stride: None,
            },
            &InitialAgeDensity::AllAtAgeZero,
        )?;
        let stride = (proto.grid_dt / pde_dt).round() as usize;

        let steady = steady_densities(dist.as_ref(), def.beta, proto.k as f64)?;

        let name = format!("fig3_{}.csv", def.name);
        let comment = proto.comment(ctx, &format!("{} beta={}", def.spec, def.beta));
        let mut w = CsvWriter::create(
            &ctx.path(&name),
            &format!("{comment} rho_i_inf={}", steady.rho_i_inf),
            &["t", "rho_I_sim", "rho_S_sim", "rho_I_mf", "rho_S_mf"],
        )?;
        for (i, &t) in summary.grid.iter().enumerate() {
            w.row_f64(&[
                t,
                summary.mean[i],
                1.0 - summary.mean[i],
                pde.rho_i[i * stride],
                pde.rho_s[i * stride],
            ])?;
        }
        w.finish()?;

        let mut chart = Chart::new(
            &format!("density evolution — {}", dist.label()),
            "t",
            "density",
        );
        let sim_i: Vec<(f64, f64)> = summary
            .grid
            .iter()
            .zip(&summary.mean)
            .map(|(&t, &r)| (t, r))
            .collect();
        let sim_s: Vec<(f64, f64)> = sim_i.iter().map(|&(t, r)| (t, 1.0 - r)).collect();
        let mf_i: Vec<(f64, f64)> = pde
            .times()
            .zip(&pde.rho_i)
            .map(|(t, &r)| (t, r))
            .collect();
        let mf_s: Vec<(f64, f64)> = mf_i.iter().map(|&(t, r)| (t, 1.0 - r)).collect();
        chart.add_series_colored("rho_I simulated", SeriesKind::Line, sim_i, 0);
        chart.add_series_colored("rho_S simulated", SeriesKind::Line, sim_s, 1);
        chart.add_series_colored("rho_I mean-field", SeriesKind::Dashed, mf_i, 2);
        chart.add_series_colored("rho_S mean-field", SeriesKind::Dashed, mf_s, 3);
        chart.hline(steady.rho_i_inf, "rho_I steady");
        chart.hline(steady.rho_s_inf, "rho_S steady");
        write_svg(&ctx.path(&format!("fig3_{}.svg", def.name)), &chart)?;

        let window_mean = ensemble_window_mean(&trajs, 0.8 * proto.t_max, proto.t_max);
        let err = (window_mean - steady.rho_i_inf).abs();
        checks.check(
            &format!("{} late-time density matches theory", def.name),
            err <= ctx.tol(0.02),
            &format!(
                "ensemble {:.4} vs {:.4} (|diff| {:.4} <= {:.3})",
                window_mean,
                steady.rho_i_inf,
                err,
                ctx.tol(0.02)
            ),
        );
    }
    checks.finish()
}

// ----------------------------------------------------------------------
// fig4: confidence bands and standard deviation over time

fn fig4(ctx: &Ctx, variant: Option<Variant>) -> Result<()> {
    let proto = Protocol::reference(ctx);
    let mut checks = Checks::new("fig4");

    for (vi, def) in selected(variant).iter().enumerate() {
        // same ensembles as fig3 (same salts), so the two figures agree
        let (dist, trajs) = run_variant_ensemble(ctx, &proto, def, 300 + vi as u64)?;
        let summary = summarize_ensemble(&trajs)?;

        let comment = proto.comment(ctx, &format!("{} beta={}", def.spec, def.beta));
        let mut w = CsvWriter::create(
            &ctx.path(&format!("fig4_{}.csv", def.name)),
            &comment,
            &["t", "mean", "std", "ci_low", "ci_high"],
        )?;
        for (i, &t) in summary.grid.iter().enumerate() {
            w.row_f64(&[
                t,
                summary.mean[i],
                summary.std[i],
                summary.ci_low[i],
                summary.ci_high[i],
            ])?;
        }
        w.finish()?;

        let mut chart = Chart::new(
            &format!("infection density with 95% CI — {}", dist.label()),
            "t",
            "rho_I (log scale)",
        );
        chart.log_y = true;
        let mean: Vec<(f64, f64)> = summary
            .grid
            .iter()
            .zip(&summary.mean)
            .map(|(&t, &m)| (t, m))
            .collect();
        let lo: Vec<(f64, f64)> = summary
            .grid
            .iter()
            .zip(&summary.ci_low)
            .map(|(&t, &m)| (t, m))
            .collect();
        let hi: Vec<(f64, f64)> = summary
            .grid
            .iter()
            .zip(&summary.ci_high)
            .map(|(&t, &m)| (t, m))
            .collect();
        chart.add_series_colored("mean", SeriesKind::Line, mean, 0);
        chart.add_series_colored("95% CI", SeriesKind::Dashed, lo, 2);
        chart.add_series_colored("", SeriesKind::Dashed, hi, 2);
        write_svg(&ctx.path(&format!("fig4_{}.svg", def.name)), &chart)?;

        let mut std_chart = Chart::new(
            &format!("per-point standard deviation — {}", dist.label()),
            "t",
            "std of rho_I",
        );
        let std_pts: Vec<(f64, f64)> = summary
            .grid
            .iter()
            .zip(&summary.std)
            .map(|(&t, &s)| (t, s))
            .collect();
        std_chart.add_series_colored("std over runs", SeriesKind::Line, std_pts, 0);
        write_svg(&ctx.path(&format!("fig4_std_{}.svg", def.name)), &std_chart)?;

        let late_std = summary
            .grid
            .iter()
            .zip(&summary.std)
            .filter(|(&t, _)| t > 5.0)
            .map(|(_, &s)| s)
            .fold(0.0_f64, f64::max);
        // per-point fluctuations grow like 1/sqrt(n) when --fast shrinks
        // the network; the reference-scale threshold is unscaled
        let std_tol = ctx.tol(0.015) * (2500.0 / proto.n as f64).sqrt();
        checks.check(
            &format!("{} std stays small after the transient", def.name),
            late_std < std_tol,
            &format!("max std(t>5) {:.4} < {:.4}", late_std, std_tol),
        );
        let max_ci = (0..summary.grid.len())
            .map(|i| summary.ci_width(i))
            .fold(0.0_f64, f64::max);
        checks.check(
            &format!("{} CI band stays narrow", def.name),
            max_ci < ctx.tol(0.07),
            &format!("max CI width {:.4} < {:.3}", max_ci, ctx.tol(0.07)),
        );
    }
    checks.finish()
}

// ----------------------------------------------------------------------
// fig5: steady density vs beta across degrees

fn fig5(ctx: &Ctx) -> Result<()> {
    let proto = Protocol::reference(ctx);
    let mut checks = Checks::new("fig5");
    let ks = [4usize, 6, 10];
    let sweeps: [(&VariantDef, Vec<f64>); 3] = [
        (&VARIANTS[0], linspace(0.02, 0.5, 25)),
        (&VARIANTS[1], linspace(0.03, 0.6, 20)),
        (&VARIANTS[2], linspace(0.03, 0.66, 22)),
    ];

    let comment = proto.comment(ctx, "beta sweep across degrees");
    let mut table = CsvWriter::create(
        &ctx.path("fig5.csv"),
        &comment,
        &["dist", "k", "beta", "rho_i_sim", "rho_i_std", "rho_i_theory", "beta_critical"],
    )?;
    // (dist index, points, bars) for the k=10 summary panel
    type PanelPoint = (usize, Vec<(f64, f64)>, Vec<f64>);
    let mut panel_d: Vec<PanelPoint> = Vec::new();

    for (di, (def, betas)) in sweeps.iter().enumerate() {
        let dist = ctx.build_dist(def.spec)?;
        let mut chart = Chart::new(
            &format!("steady infection density vs beta — {}", dist.label()),
            "beta",
            "rho_I(inf)",
        );
        for (ki, &k) in ks.iter().enumerate() {
            let net =
                RegularNetwork::from_seed(proto.n, k, salted_seed(ctx.seed, 500 + k as u64))?;
            let beta_c = critical_beta(dist.as_ref(), k as f64)?;
            let mut sim_pts = Vec::new();
            let mut theory_pts = Vec::new();
            let mut bars = Vec::new();
            // worst supercritical mismatch, discounted by two standard
            // errors of the ensemble mean so the assertion tests the model,
            // not one noisy draw
            let mut max_super_err: f64 = 0.0;
            let mut max_sub_density: f64 = 0.0;
            for (bi, &beta) in betas.iter().enumerate() {
                let params = SimParams {
                    beta,
                    rho_i0: proto.rho_i0,
                    t_max: proto.t_max,
                    grid_dt: proto.grid_dt,
                };
                let seeds = derive_seeds(
                    salted_seed(ctx.seed, (5000 + di * 1000 + ki * 100 + bi) as u64),
                    proto.runs,
                );
                let trajs = run_ensemble(&net, dist.as_ref(), &params, &seeds)?;
                let means: Vec<f64> = trajs
                    .iter()
                    .map(|t| t.mean_rho_i_over(0.8 * proto.t_max, proto.t_max))
                    .collect();
                let mean = means.iter().sum::<f64>() / means.len() as f64;
                let std = (means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>()
                    / (means.len() - 1) as f64)
                    .sqrt();
                let theory = steady_densities(dist.as_ref(), beta, k as f64)?.rho_i_inf;
                table.row_f64(&[k as f64, beta, mean, std, theory, beta_c])?;
                sim_pts.push((beta, mean));
                theory_pts.push((beta, theory));
                bars.push(std);
                if beta >= 1.5 * beta_c {
                    let se = std / (means.len() as f64).sqrt();
                    max_super_err = max_super_err.max((mean - theory).abs() - 2.0 * se);
                }
                if beta <= 0.5 * beta_c {
                    max_sub_density = max_sub_density.max(mean);
                }
            }
            chart.add_series_colored(&format!("k={k} simulated"), SeriesKind::Line, sim_pts.clone(), ki);
            chart.add_series_colored(&format!("k={k} theory"), SeriesKind::Dashed, theory_pts.clone(), ki);
            chart.vline(beta_c, &format!("beta_c(k={k})"));
            if k == 10 {
                panel_d.push((di, sim_pts.clone(), bars.clone()));
            }

            if k == 10 {
                // the quantitative match is claimed for the degree the
                // quoted thresholds belong to; lower degrees lag more near
                // threshold (finite-size absorption plus pair correlations)
                // and are only required to lag downward, not to match
                checks.check(
                    &format!("{} k={k} matches theory above 1.5x threshold", def.name),
                    max_super_err <= ctx.tol(0.05),
                    &format!("max |sim-theory| {:.4} <= {:.3}", max_super_err, ctx.tol(0.05)),
                );
            } else {
                let max_over = sim_pts
                    .iter()
                    .zip(&theory_pts)
                    .map(|(s, t)| s.1 - t.1)
                    .fold(f64::NEG_INFINITY, f64::max);
                checks.check(
                    &format!("{} k={k} lags theory from below", def.name),
                    max_over <= ctx.tol(0.02),
                    &format!("max sim-theory excess {:.4} <= {:.3}", max_over, ctx.tol(0.02)),
                );
            }
            checks.check(
                &format!("{} k={k} stays near zero below 0.5x threshold", def.name),
                max_sub_density <= ctx.tol(0.02),
                &format!("max subcritical density {:.4} <= {:.3}", max_sub_density, ctx.tol(0.02)),
            );
            if k == 10 {
                let max_bar = bars.iter().fold(0.0_f64, |a, &b| a.max(2.0 * b));
                // run-to-run spread scales like 1/sqrt(n) under --fast
                let bar_tol = ctx.tol(0.04) * (2500.0 / proto.n as f64).sqrt();
                checks.check(
                    &format!("{} k=10 68% error bars stay short", def.name),
                    max_bar <= bar_tol,
                    &format!("max bar length {:.4} <= {:.3}", max_bar, bar_tol),
                );
            }
        }
        write_svg(&ctx.path(&format!("fig5_{}.svg", def.name)), &chart)?;
    }
    table.finish()?;

    let mut chart_d = Chart::new("steady density vs beta, k=10, 68% bars", "beta", "rho_I(inf)");
    for (di, pts, bars) in panel_d {
        let dist = ctx.build_dist(sweeps[di].0.spec)?;
        let beta_c = critical_beta(dist.as_ref(), 10.0)?;
        chart_d.add_error_bars(&dist.label(), pts, bars);
        chart_d.vline(beta_c, "");
    }
    write_svg(&ctx.path("fig5d.svg"), &chart_d)?;

    checks.finish()
}

// ----------------------------------------------------------------------
// fig6 / table2: stationary infection-age density and KL table

struct Fig6Set {
    family: &'static str,
    spec: String,
    beta: f64,
    /// power-law minimum wait, for the plateau check
    t0: Option<f64>,
}

fn fig6_sets() -> Vec<Fig6Set> {
    let mut sets = Vec::new();
    for (mu, beta) in [(0.5, 0.1), (1.0, 0.15), (2.0, 0.25)] {
        sets.push(Fig6Set {
            family: "exponential",
            spec: format!("dist=exponential mu={mu}"),
            beta,
            t0: None,
        });
    }
    for sigma in [0.5, 0.75, 1.0] {
        sets.push(Fig6Set {
            family: "lognormal",
            spec: format!("dist=lognormal mu=0.3 sigma={sigma}"),
            beta: 1.0,
            t0: None,
        });
    }
    for t0 in [1.0, 2.0, 5.0] {
        sets.push(Fig6Set {
            family: "powerlaw",
            spec: format!("dist=powerlaw lambda=4.24 t0={t0}"),
            beta: 1.0,
            t0: Some(t0),
        });
    }
    sets
}

fn fig6(ctx: &Ctx, bins: Option<usize>, emit_plots: bool) -> Result<()> {
    let proto = Protocol::reference(ctx);
    let bins = ctx.cfg.resolve(&bins, "bins", 50)?;
    let mut checks = Checks::new(if emit_plots { "fig6" } else { "table2" });

    let comment = proto.comment(ctx, &format!("stationary age density, bins={bins}"));
    let mut table = CsvWriter::create(
        &ctx.path("table2.csv"),
        &comment,
        &["family", "dist", "beta", "n_ages", "absorbed_runs", "kl"],
    )?;

    let mut charts: std::collections::BTreeMap<&'static str, Chart> = Default::default();
    for (si, set) in fig6_sets().iter().enumerate() {
        let dist = ctx.build_dist(&set.spec)?;
        let net = RegularNetwork::from_seed(proto.n, proto.k, salted_seed(ctx.seed, 700 + si as u64))?;
        let params = SimParams {
            beta: set.beta,
            rho_i0: proto.rho_i0,
            t_max: proto.t_max,
            grid_dt: proto.grid_dt,
        };
        let seeds = derive_seeds(salted_seed(ctx.seed, 7000 + si as u64), proto.runs);
        let trajs = run_ensemble(&net, dist.as_ref(), &params, &seeds)?;
        let mut ages = pooled_final_ages(&trajs);
        let absorbed = trajs.iter().filter(|t| t.absorbed).count();
        anyhow::ensure!(
            !ages.is_empty(),
            "{}: every run absorbed; no ages to bin",
            dist.label()
        );

        // bin up to the 99.9th percentile so a few extreme ages do not
        // stretch the equal-width bins across the kinked model density
        ages.sort_by(f64::total_cmp);
        let hi = ages[((ages.len() - 1) as f64 * 0.999) as usize];
        let empirical = binned_density_with_range(&ages, bins, 0.0, hi)?;
        let kl = kl_divergence(&empirical, |tau| steady_age_pdf(dist.as_ref(), tau))?;
        table.row(&[
            set.family.to_string(),
            dist.label(),
            set.beta.to_string(),
            ages.len().to_string(),
            absorbed.to_string(),
            kl.to_string(),
        ])?;

        // the plug-in KL estimator carries a positive small-sample bias of
        // roughly bins/(2 * ages); allow twice that on top of the target
        // (0.0024 at reference scale, material only under --fast)
        let kl_tol = ctx.tol(0.02) + bins as f64 / ages.len() as f64;
        checks.check(
            &format!("KL({}, beta={})", dist.label(), set.beta),
            kl < kl_tol,
            &format!("KL = {kl:.5} < {kl_tol:.4}"),
        );

        if let Some(t0) = set.t0 {
            // recovery is impossible below t0, so the age density must be
            // flat there; re-bin just that window
            let plateau = binned_density_with_range(&ages, 8, 0.0, t0)?;
            let hmax = plateau.heights.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            let hmin = plateau.heights.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            let hmean = plateau.heights.iter().sum::<f64>() / plateau.heights.len() as f64;
            let flatness = (hmax - hmin) / hmean;
            checks.check(
                &format!("flat age density on [0, {t0}]"),
                flatness <= ctx.tol(0.10),
                &format!("relative spread {flatness:.4} <= {:.3}", ctx.tol(0.10)),
            );
        }

        if emit_plots {
            let chart = charts.entry(set.family).or_insert_with(|| {
                Chart::new(
                    &format!("stationary infection-age density — {}", set.family),
                    "tau",
                    "f(tau)",
                )
            });
            let color = si % 3;
            let tau_hi = survival_quantile(dist.as_ref(), 5e-3);
            let theory: Vec<(f64, f64)> = linspace(0.0, tau_hi, 240)
                .into_iter()
                .map(|tau| (tau, steady_age_pdf(dist.as_ref(), tau)))
                .collect();
            chart.add_series_colored(&dist.label(), SeriesKind::Line, theory, color);
            let pts: Vec<(f64, f64)> = empirical
                .midpoints()
                .zip(&empirical.heights)
                .filter(|&(m, _)| m <= tau_hi)
                .map(|(m, &h)| (m, h))
                .collect();
            chart.add_series_colored("", SeriesKind::Points, pts, color);
        }
    }
    table.finish()?;
    if emit_plots {
        for (family, chart) in charts {
            write_svg(&ctx.path(&format!("fig6_{family}.svg")), &chart)?;
        }
    }
    println!("wrote {}", ctx.path("table2.csv").display());
    checks.finish()
}

// ----------------------------------------------------------------------
// fig7: expected stationary age vs distribution parameters

fn fig7(ctx: &Ctx) -> Result<()> {
    let proto = Protocol::reference(ctx);
    let mut checks = Checks::new("fig7");
    let beta = 1.0;

    let comment = proto.comment(ctx, &format!("expected stationary age, beta={beta}"));
    let mut table = CsvWriter::create(
        &ctx.path("fig7.csv"),
        &comment,
        &[
            "family",
            "shape",
            "param",
            "theory",
            "sim_clean",
            "sim_biased",
            "absorbed_runs",
            "expected_deviation",
        ],
    )?;

    // (family, shape values, param values, spec builder)
    type SpecFn = fn(f64, f64) -> String;
    let lognormal_spec: SpecFn = |sigma, mu| format!("dist=lognormal mu={mu} sigma={sigma}");
    let powerlaw_spec: SpecFn = |t0, lambda| format!("dist=powerlaw lambda={lambda} t0={t0}");
    type Panel<'a> = (&'a str, Vec<f64>, Vec<f64>, SpecFn, &'a str);
    let panels: [Panel; 2] = [
        (
            "lognormal",
            vec![0.5, 0.75, 1.0],
            linspace(0.0, 0.95, 20),
            lognormal_spec,
            "mu",
        ),
        (
            "powerlaw",
            vec![1.0, 2.0, 5.0],
            linspace(4.0, 4.96, 25),
            powerlaw_spec,
            "lambda",
        ),
    ];

    for (pi, (family, shapes, params_axis, spec_fn, x_name)) in panels.iter().enumerate() {
        let net = RegularNetwork::from_seed(
            proto.n,
            proto.k,
            salted_seed(ctx.seed, 900 + pi as u64),
        )?;
        let mut chart = Chart::new(
            &format!("expected stationary infection age — {family}"),
            x_name,
            "E[age]",
        );
        let mut heavy_tail_behaves = true;
        for (si, &shape) in shapes.iter().enumerate() {
            let mut theory_pts = Vec::new();
            let mut sim_pts = Vec::new();
            let mut max_rel_err: f64 = 0.0;
            let mut flagged_count = 0usize;
            for (xi, &x) in params_axis.iter().enumerate() {
                let dist = ctx.build_dist(&spec_fn(shape, x))?;
                let theory = steady_age_mean(dist.as_ref())?;
                let steady = steady_densities(dist.as_ref(), beta, proto.k as f64)?;
                let sim_params = SimParams {
                    beta,
                    rho_i0: proto.rho_i0,
                    t_max: proto.t_max,
                    grid_dt: proto.grid_dt,
                };
                let seeds = derive_seeds(
                    salted_seed(ctx.seed, (90_000 + pi * 10_000 + si * 1000 + xi) as u64),
                    proto.runs,
                );
                let trajs = run_ensemble(&net, dist.as_ref(), &sim_params, &seeds)?;
                let ages = pooled_final_ages(&trajs);
                let absorbed = trajs.iter().filter(|t| t.absorbed).count();
                let clean = if ages.is_empty() {
                    f64::NAN
                } else {
                    ages.iter().sum::<f64>() / ages.len() as f64
                };
                let biased = trajs
                    .iter()
                    .map(|t| {
                        if t.absorbed || t.final_ages.is_empty() {
                            0.0
                        } else {
                            t.final_ages.iter().sum::<f64>() / t.final_ages.len() as f64
                        }
                    })
                    .sum::<f64>()
                    / trajs.len() as f64;

                // expected-deviation points: the steady state sits close to
                // the absorbing state, or the horizon truncates a heavy tail
                let near_absorbing = steady.gap < steady.threshold;
                let truncated = horizon_truncation_bias(dist.as_ref(), proto.t_max)
                    .map_or(true, |b| b > 0.02);
                let flagged = near_absorbing || truncated;
                if flagged {
                    flagged_count += 1;
                    if *family == "powerlaw" && shape == 5.0 && !clean.is_nan() {
                        heavy_tail_behaves &= clean < theory;
                    }
                } else if !clean.is_nan() {
                    max_rel_err = max_rel_err.max((clean - theory).abs() / theory);
                }

                table.row(&[
                    family.to_string(),
                    shape.to_string(),
                    x.to_string(),
                    theory.to_string(),
                    clean.to_string(),
                    biased.to_string(),
                    absorbed.to_string(),
                    (flagged as u8).to_string(),
                ])?;
                theory_pts.push((x, theory));
                sim_pts.push((x, clean));
            }
            chart.add_series_colored(
                &format!("{x_name}-sweep, shape={shape} theory"),
                SeriesKind::Dashed,
                theory_pts,
                si,
            );
            chart.add_series_colored("", SeriesKind::Points, sim_pts, si);
            checks.check(
                &format!("{family} shape={shape} matches expected age"),
                max_rel_err <= ctx.tol(0.05),
                &format!(
                    "max rel err {:.4} <= {:.3} ({} expected-deviation point(s) excluded)",
                    max_rel_err,
                    ctx.tol(0.05),
                    flagged_count
                ),
            );
        }
        if *family == "powerlaw" && !ctx.fast {
            checks.check(
                "powerlaw t0=5 heavy-tail points read below theory",
                heavy_tail_behaves,
                "simulated mean age < theoretical at horizon-truncated points",
            );
        }
        write_svg(&ctx.path(&format!("fig7_{family}.svg")), &chart)?;
    }
    table.finish()?;
    checks.finish()
}
