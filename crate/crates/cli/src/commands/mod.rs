//! Shared command context and small helpers.

pub mod analysis;
pub mod meanfield_cmd;
pub mod reproduce;
pub mod simulate;
pub mod sweep;

use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use grpsis::dist::{DistRegistry, DynDist};

use crate::config::Config;
use crate::Cli;

pub struct Ctx {
    pub cfg: Config,
    pub seed: u64,
    pub out: PathBuf,
    pub fast: bool,
    pub registry: DistRegistry,
}

impl Ctx {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let cfg = match &cli.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        let seed = cfg.resolve(&cli.seed, "seed", 42)?;
        let out = cfg.resolve(&cli.out, "out", PathBuf::from("out"))?;
        let fast = cli.fast || matches!(cfg.raw("fast"), Some("1" | "true" | "yes"));
        let threads = cfg.resolve_opt(&cli.threads, "threads")?;
        if let Some(n) = threads {
            // ignore the error if a pool already exists (tests, repeat calls)
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Ok(Self {
            cfg,
            seed,
            out,
            fast,
            registry: DistRegistry::with_builtins(),
        })
    }

    pub fn build_dist(&self, spec: &str) -> Result<DynDist> {
        self.registry
            .build_from_spec(spec)
            .with_context(|| format!("building distribution from `{spec}`"))
    }

    /// Tolerances are doubled in `--fast` mode.
    pub fn tol(&self, x: f64) -> f64 {
        if self.fast {
            2.0 * x
        } else {
            x
        }
    }

    /// Reference-scale network size, shrunk in `--fast` mode.
    pub fn scale_n(&self, n: usize) -> usize {
        if self.fast {
            n.min(500)
        } else {
            n
        }
    }

    pub fn scale_runs(&self, runs: usize) -> usize {
        if self.fast {
            runs.min(10)
        } else {
            runs
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

/// Deterministic per-task seed: one base seed, salted per use site so
/// sweeps and figures draw independent streams.
pub fn salted_seed(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// PASS/FAIL bookkeeping for `reproduce` assertions.
pub struct Checks {
    context: String,
    failures: usize,
}

impl Checks {
    pub fn new(context: &str) -> Self {
        Self {
            context: context.to_string(),
            failures: 0,
        }
    }

    pub fn check(&mut self, name: &str, ok: bool, detail: &str) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("[{verdict}] {}: {name}: {detail}", self.context);
        if !ok {
            self.failures += 1;
        }
    }

    pub fn finish(self) -> Result<()> {
        anyhow::ensure!(
            self.failures == 0,
            "{}: {} check(s) failed",
            self.context,
            self.failures
        );
        Ok(())
    }
}

pub fn write_svg(path: &Path, chart: &crate::svg::Chart) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, chart.to_svg())
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// `count` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Pool final infection ages from non-absorbed runs.
pub fn pooled_final_ages(trajs: &[grpsis::sim::Trajectory]) -> Vec<f64> {
    trajs
        .iter()
        .filter(|t| !t.absorbed)
        .flat_map(|t| t.final_ages.iter().copied())
        .collect()
}

/// Ensemble average of the late-time window `[lo, hi]`.
pub fn ensemble_window_mean(trajs: &[grpsis::sim::Trajectory], lo: f64, hi: f64) -> f64 {
    let s: f64 = trajs.iter().map(|t| t.mean_rho_i_over(lo, hi)).sum();
    s / trajs.len() as f64
}
