//! Deterministic solvers for the mean-field dynamics.
//!
//! Three routes into the same object:
//!
//! * [`classical_sis_solution`] — the logistic solution of the classical SIS
//!   equation `d rho_I/dt = -mu rho_I + beta <k> (1 - rho_I) rho_I`, which
//!   the general model reduces to under constant hazard,
//! * [`solve_grp_pde`] — the age-structured mean-field equation advanced on
//!   a `(t, tau)` grid by the method of characteristics: age-cohort mass
//!   moves along `d tau / d t = 1` and decays by the exact survival ratio
//!   `F0(tau + dt) / F0(tau)`, while the boundary bin is fed by the birth
//!   term `beta <k> rho_S rho_I`,
//! * [`exp_case_convolution`] — for exponential recovery, the closed
//!   convolution solution of the first-order transport equation, evaluated
//!   by quadrature over the classical solution; an oracle for the PDE.
//!
//! The cumulative age distribution `rho_I(t; tau)` is the probability of
//! being infected with infection age at most `tau`; the solver tracks its
//! density in age bins of width `dt` (midpoints at `(j + 1/2) dt`), so bin
//! masses sum exactly to the infection density `rho_I(t)`.

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::dist::{survival_quantile, RecoveryDistribution};
use crate::quad::adaptive_simpson;

#[derive(Debug, Error)]
pub enum MeanfieldError {
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error("grid too coarse: survival ratio {ratio} at age {tau} is not in [0, 1]")]
    GridTooCoarse { ratio: f64, tau: f64 },
    #[error("initial age density integrates to {got}, expected rho_i0 = {expected}")]
    InvalidInitialDensity { got: f64, expected: f64 },
    #[error("bad grid dump: {0}")]
    BadDump(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Parameters of the classical (constant-hazard) SIS mean-field equation.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalSisParams {
    pub beta: f64,
    pub mu: f64,
    pub mean_k: f64,
    pub rho_i0: f64,
}

/// Logistic solution of the classical SIS equation with `rho_I(0) = rho_i0`.
///
/// The supercritical limit is `1 - mu / (beta <k>)`; the degenerate case
/// `beta <k> = mu` falls back to the hyperbolic solution
/// `1 / (1/rho_i0 + beta <k> t)`.
pub fn classical_sis_solution(p: &ClassicalSisParams, t: f64) -> f64 {
    if p.rho_i0 == 0.0 {
        return 0.0;
    }
    let bk = p.beta * p.mean_k;
    let growth = bk - p.mu;
    if growth.abs() < 1e-12 {
        return 1.0 / (1.0 / p.rho_i0 + bk * t);
    }
    let rho_s0 = 1.0 - p.rho_i0;
    // The decaying exponential makes this solve the ODE for both signs of
    // the growth rate; the growing-exponential variant does not.
    let c = (bk * rho_s0 - p.mu) / p.rho_i0;
    growth / (bk + c * (-growth * t).exp())
}

/// Parameters of the age-structured solver.
#[derive(Debug, Clone, Copy)]
pub struct PdeParams {
    pub beta: f64,
    pub mean_k: f64,
    pub rho_i0: f64,
    pub t_max: f64,
    /// Shared step of the time and age axes.
    pub dt: f64,
    /// Age-axis extent. Defaults to `t_max` plus the age by which all but
    /// 1e-6 of the recovery mass is gone, so no cohort reaches the boundary.
    pub tau_max: Option<f64>,
    /// Record the full age slice every this many steps (the initial and
    /// final slices are always kept). `None` keeps only those two.
    pub snapshot_stride: Option<usize>,
}

/// Initial infection-age profile at `t = 0`.
pub enum InitialAgeDensity<'a> {
    /// Everyone newly infected: mass `rho_i0` in the first age bin.
    AllAtAgeZero,
    /// Arbitrary density over age; must integrate to `rho_i0` within 1e-6.
    Density(&'a (dyn Fn(f64) -> f64 + Sync)),
}

/// One stored age slice: density per bin at a fixed time step.
#[derive(Debug, Clone)]
pub struct AgeSlice {
    pub step: usize,
    pub t: f64,
    /// Density at bin midpoints; bin `j` covers `(j dt, (j+1) dt]`.
    pub density: Vec<f64>,
}

/// Output of [`solve_grp_pde`].
#[derive(Debug, Clone)]
pub struct AgeDensityGrid {
    pub dt: f64,
    /// Number of time steps; marginals have `n_steps + 1` entries.
    pub n_steps: usize,
    /// Number of age bins per slice.
    pub n_bins: usize,
    pub rho_i: Vec<f64>,
    pub rho_s: Vec<f64>,
    pub snapshots: Vec<AgeSlice>,
    /// Cumulative mass that crossed the age boundary (kept, decaying, in the
    /// top bin so the marginals stay conservative).
    pub truncated_mass: f64,
    /// Set when `truncated_mass` exceeded 1e-4.
    pub truncation_warning: bool,
}

impl AgeDensityGrid {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n_steps).map(|i| i as f64 * self.dt)
    }

    pub fn bin_midpoint(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dt
    }

    pub fn final_slice(&self) -> &AgeSlice {
        self.snapshots.last().expect("final slice always recorded")
    }

    /// Snapshot whose time is closest to `t`, if one was recorded within
    /// half a step of it.
    pub fn snapshot_near(&self, t: f64) -> Option<&AgeSlice> {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .filter(|s| (s.t - t).abs() <= 0.5 * self.dt)
    }

    /// Mass of a stored slice: the grid's own quadrature (midpoint rule,
    /// exact for the bin-mass scheme).
    pub fn integrate_slice(&self, slice: &AgeSlice) -> f64 {
        slice.density.iter().sum::<f64>() * self.dt
    }

    /// Cumulative age distribution `rho_I(t; tau)` of a stored slice,
    /// evaluated at bin edges (ages up to `tau`).
    pub fn cumulative(&self, slice: &AgeSlice, tau: f64) -> f64 {
        let full_bins = ((tau / self.dt) + 1e-9).floor().min(self.n_bins as f64) as usize;
        slice.density[..full_bins].iter().sum::<f64>() * self.dt
    }
}

/// Advance the age-structured mean-field equations to `t_max`.
pub fn solve_grp_pde(
    dist: &dyn RecoveryDistribution,
    p: &PdeParams,
    initial: &InitialAgeDensity,
) -> Result<AgeDensityGrid, MeanfieldError> {
    if !p.dt.is_finite() || p.dt <= 0.0 || !p.t_max.is_finite() || p.t_max <= 0.0 {
        return Err(MeanfieldError::InvalidParams(
            "dt and t_max must be positive".into(),
        ));
    }
    if p.beta.is_nan() || p.beta < 0.0 || p.mean_k.is_nan() || p.mean_k <= 0.0 || !(0.0..=1.0).contains(&p.rho_i0) {
        return Err(MeanfieldError::InvalidParams(format!(
            "need beta >= 0, mean_k > 0, rho_i0 in [0, 1]; got beta={}, mean_k={}, rho_i0={}",
            p.beta, p.mean_k, p.rho_i0
        )));
    }
    let n_steps_f = (p.t_max / p.dt).round();
    if (n_steps_f * p.dt - p.t_max).abs() > 1e-9 * p.t_max.max(1.0) {
        return Err(MeanfieldError::InvalidParams(format!(
            "dt={} must divide t_max={}",
            p.dt, p.t_max
        )));
    }
    let n_steps = n_steps_f as usize;
    let tau_max = p
        .tau_max
        .unwrap_or_else(|| p.t_max + survival_quantile(dist, 1e-6));
    if tau_max <= 2.0 * p.dt {
        return Err(MeanfieldError::InvalidParams(format!(
            "tau_max={tau_max} must exceed 2*dt"
        )));
    }
    let n_bins = (tau_max / p.dt - 1e-9).ceil() as usize;

    // Exact per-step survival decay between midpoint ages, precomputed; the
    // product over steps telescopes to the survival ratio between cohort
    // endpoints, so the transport itself introduces no time-stepping error.
    let mut ratio = vec![0.0_f64; n_bins];
    for (j, r) in ratio.iter_mut().enumerate() {
        let lo = dist.survival((j as f64 + 0.5) * p.dt);
        let hi = dist.survival((j as f64 + 1.5) * p.dt);
        *r = if lo > 0.0 { hi / lo } else { 0.0 };
        if !r.is_finite() || *r < 0.0 || *r > 1.0 + 1e-9 {
            return Err(MeanfieldError::GridTooCoarse {
                ratio: *r,
                tau: (j as f64 + 0.5) * p.dt,
            });
        }
    }
    let newborn_decay = dist.survival(0.5 * p.dt);

    // bin masses; bin j covers ages (j dt, (j+1) dt]
    let mut mass = vec![0.0_f64; n_bins];
    match initial {
        InitialAgeDensity::AllAtAgeZero => {
            mass[0] = p.rho_i0;
        }
        InitialAgeDensity::Density(f) => {
            for (j, m) in mass.iter_mut().enumerate() {
                *m = f((j as f64 + 0.5) * p.dt) * p.dt;
            }
            let total: f64 = mass.iter().sum();
            if (total - p.rho_i0).abs() > 1e-6 {
                return Err(MeanfieldError::InvalidInitialDensity {
                    got: total,
                    expected: p.rho_i0,
                });
            }
        }
    }

    let mut rho_i = Vec::with_capacity(n_steps + 1);
    let mut rho_s = Vec::with_capacity(n_steps + 1);
    rho_i.push(mass.iter().sum::<f64>());
    rho_s.push(1.0 - rho_i[0]);

    let mut snapshots = Vec::new();
    let record = |snapshots: &mut Vec<AgeSlice>, step: usize, mass: &[f64]| {
        snapshots.push(AgeSlice {
            step,
            t: step as f64 * p.dt,
            density: mass.iter().map(|m| m / p.dt).collect(),
        });
    };
    record(&mut snapshots, 0, &mass);

    let mut truncated = 0.0_f64;
    for step in 0..n_steps {
        let b = p.beta * p.mean_k * rho_s[step] * rho_i[step];
        // top bin absorbs what would cross tau_max
        let overflow = mass[n_bins - 2] * ratio[n_bins - 2];
        truncated += overflow;
        let mut total = mass[n_bins - 1] * ratio[n_bins - 1] + overflow;
        mass[n_bins - 1] = total;
        for j in (0..n_bins - 2).rev() {
            let moved = mass[j] * ratio[j];
            mass[j + 1] = moved;
            total += moved;
        }
        // newborns of this step, already decayed to their mean age dt/2
        mass[0] = b * p.dt * newborn_decay;
        total += mass[0];

        rho_i.push(total);
        rho_s.push(1.0 - total);

        let at_end = step + 1 == n_steps;
        let on_stride = p
            .snapshot_stride
            .is_some_and(|s| s > 0 && (step + 1) % s == 0);
        if at_end || on_stride {
            record(&mut snapshots, step + 1, &mass);
        }
    }

    Ok(AgeDensityGrid {
        dt: p.dt,
        n_steps,
        n_bins,
        rho_i,
        rho_s,
        snapshots,
        truncated_mass: truncated,
        truncation_warning: truncated > 1e-4,
    })
}

/// Closed convolution solution of the exponential-recovery case: the
/// cumulative age distribution
///
/// ```text
/// rho_I(t; tau) = beta <k> * int_0^min(t,tau) rho_S(t-xi) rho_I(t-xi) e^(-mu xi) d xi
///               + rho_I(0; tau - t) e^(-mu t)
/// ```
///
/// with `rho_I`, `rho_S` the classical solution. Serves as an independent
/// oracle for [`solve_grp_pde`] under constant hazard.
pub fn exp_case_convolution(
    p: &ClassicalSisParams,
    initial: &InitialAgeDensity,
    t: f64,
    tau: f64,
) -> f64 {
    assert!(t >= 0.0, "time must be non-negative");
    if tau < 0.0 {
        return 0.0;
    }
    let bk = p.beta * p.mean_k;
    let upper = t.min(tau);
    let mut value = 0.0;
    if upper > 0.0 {
        let integrand = |xi: f64| {
            let rho = classical_sis_solution(p, t - xi);
            (1.0 - rho) * rho * (-p.mu * xi).exp()
        };
        value += bk * adaptive_simpson(&integrand, 0.0, upper, 1e-11);
    }
    let shifted = tau - t;
    let initial_cumulative = match initial {
        InitialAgeDensity::AllAtAgeZero => {
            if shifted >= 0.0 {
                p.rho_i0
            } else {
                0.0
            }
        }
        InitialAgeDensity::Density(f) => {
            if shifted > 0.0 {
                adaptive_simpson(f, 0.0, shifted, 1e-11)
            } else {
                0.0
            }
        }
    };
    value + initial_cumulative * (-p.mu * t).exp()
}

const DUMP_MAGIC: &[u8; 8] = b"GRPSGRID";
const DUMP_VERSION: u32 = 1;

/// Self-describing binary dump of a solved grid (marginals plus whatever
/// slices were recorded).
pub fn write_grid_dump(grid: &AgeDensityGrid, mut w: impl Write) -> io::Result<()> {
    w.write_all(DUMP_MAGIC)?;
    w.write_all(&DUMP_VERSION.to_le_bytes())?;
    w.write_all(&grid.dt.to_le_bytes())?;
    w.write_all(&(grid.n_steps as u64).to_le_bytes())?;
    w.write_all(&(grid.n_bins as u64).to_le_bytes())?;
    w.write_all(&(grid.snapshots.len() as u64).to_le_bytes())?;
    w.write_all(&grid.truncated_mass.to_le_bytes())?;
    for x in grid.rho_i.iter().chain(&grid.rho_s) {
        w.write_all(&x.to_le_bytes())?;
    }
    for slice in &grid.snapshots {
        w.write_all(&(slice.step as u64).to_le_bytes())?;
        for x in &slice.density {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_grid_dump(mut r: impl Read) -> Result<AgeDensityGrid, MeanfieldError> {
    fn read_f64(r: &mut impl Read) -> Result<f64, MeanfieldError> {
        let mut buf = [0u8; 8];
        r.read_exact(&mut buf)?;
        Ok(f64::from_le_bytes(buf))
    }
    fn read_u64(r: &mut impl Read) -> Result<u64, MeanfieldError> {
        let mut buf = [0u8; 8];
        r.read_exact(&mut buf)?;
        Ok(u64::from_le_bytes(buf))
    }

    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(MeanfieldError::BadDump("wrong magic".into()));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != DUMP_VERSION {
        return Err(MeanfieldError::BadDump(format!(
            "unsupported version {version}"
        )));
    }
    let dt = read_f64(&mut r)?;
    let n_steps = read_u64(&mut r)? as usize;
    let n_bins = read_u64(&mut r)? as usize;
    let n_snapshots = read_u64(&mut r)? as usize;
    let truncated_mass = read_f64(&mut r)?;
    let mut rho_i = Vec::with_capacity(n_steps + 1);
    for _ in 0..=n_steps {
        rho_i.push(read_f64(&mut r)?);
    }
    let mut rho_s = Vec::with_capacity(n_steps + 1);
    for _ in 0..=n_steps {
        rho_s.push(read_f64(&mut r)?);
    }
    let mut snapshots = Vec::with_capacity(n_snapshots);
    for _ in 0..n_snapshots {
        let step = read_u64(&mut r)? as usize;
        let mut density = Vec::with_capacity(n_bins);
        for _ in 0..n_bins {
            density.push(read_f64(&mut r)?);
        }
        snapshots.push(AgeSlice {
            step,
            t: step as f64 * dt,
            density,
        });
    }
    Ok(AgeDensityGrid {
        dt,
        n_steps,
        n_bins,
        rho_i,
        rho_s,
        snapshots,
        truncated_mass,
        truncation_warning: truncated_mass > 1e-4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{ExponentialRecovery, PowerLawRecovery};

    fn fig3a() -> ClassicalSisParams {
        ClassicalSisParams {
            beta: 0.26,
            mu: 0.5,
            mean_k: 10.0,
            rho_i0: 0.3,
        }
    }

    /// Independent oracle: fixed-step RK4 on the classical SIS equation.
    fn rk4_classical(p: &ClassicalSisParams, t_end: f64, dt: f64) -> Vec<(f64, f64)> {
        let f = |rho: f64| -p.mu * rho + p.beta * p.mean_k * (1.0 - rho) * rho;
        let mut rho = p.rho_i0;
        let mut out = vec![(0.0, rho)];
        let steps = (t_end / dt).round() as usize;
        for i in 0..steps {
            let k1 = f(rho);
            let k2 = f(rho + 0.5 * dt * k1);
            let k3 = f(rho + 0.5 * dt * k2);
            let k4 = f(rho + dt * k3);
            rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            out.push(((i + 1) as f64 * dt, rho));
        }
        out
    }

    #[test]
    fn classical_initial_condition_is_exact() {
        assert_eq!(classical_sis_solution(&fig3a(), 0.0), 0.3);
    }

    #[test]
    fn classical_supercritical_limit() {
        let p = fig3a();
        let limit = 1.0 - p.mu / (p.beta * p.mean_k);
        assert!((classical_sis_solution(&p, 300.0) - limit).abs() < 1e-12);
        assert!((limit - 0.8077).abs() < 1e-4);
    }

    #[test]
    fn classical_subcritical_decays_to_zero() {
        let p = ClassicalSisParams {
            beta: 0.02,
            mu: 0.5,
            mean_k: 10.0,
            rho_i0: 0.3,
        };
        assert!(classical_sis_solution(&p, 100.0) < 1e-10);
        for i in 1..50 {
            let a = classical_sis_solution(&p, i as f64);
            let b = classical_sis_solution(&p, (i + 1) as f64);
            assert!(b <= a);
        }
    }

    #[test]
    fn classical_degenerate_case_is_hyperbolic() {
        let p = ClassicalSisParams {
            beta: 0.05,
            mu: 0.5,
            mean_k: 10.0,
            rho_i0: 0.3,
        };
        for i in 0..=20 {
            let t = i as f64;
            let expect = 1.0 / (1.0 / 0.3 + 0.5 * t);
            assert!((classical_sis_solution(&p, t) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn classical_matches_rk4_integration() {
        for p in [
            fig3a(),
            ClassicalSisParams {
                beta: 0.02,
                mu: 0.5,
                mean_k: 10.0,
                rho_i0: 0.3,
            },
        ] {
            for &(t, rho) in &rk4_classical(&p, 50.0, 1e-3) {
                let closed = classical_sis_solution(&p, t);
                assert!(
                    (closed - rho).abs() < 1e-8,
                    "t={t}: closed {closed} vs rk4 {rho}"
                );
            }
        }
    }

    #[test]
    fn convolution_marginal_recovers_classical() {
        // tau -> infinity marginalizes to rho_I(t)
        let p = fig3a();
        for t in [0.5, 2.0, 5.0, 20.0] {
            let marginal = exp_case_convolution(&p, &InitialAgeDensity::AllAtAgeZero, t, 1e6);
            let classical = classical_sis_solution(&p, t);
            assert!(
                (marginal - classical).abs() < 1e-6,
                "t={t}: {marginal} vs {classical}"
            );
        }
    }

    #[test]
    fn convolution_at_time_zero_returns_initial_cumulative() {
        let p = fig3a();
        assert_eq!(
            exp_case_convolution(&p, &InitialAgeDensity::AllAtAgeZero, 0.0, 0.0),
            0.3
        );
        assert_eq!(
            exp_case_convolution(&p, &InitialAgeDensity::AllAtAgeZero, 0.0, -0.5),
            0.0
        );
        let flat = |_tau: f64| 0.3 / 2.0;
        let init = InitialAgeDensity::Density(&flat);
        let got = exp_case_convolution(&p, &init, 0.0, 1.0);
        assert!((got - 0.15).abs() < 1e-9);
    }

    #[test]
    fn pde_marginal_tracks_classical_solution() {
        let dist = ExponentialRecovery::new(0.5).unwrap();
        let p = PdeParams {
            beta: 0.26,
            mean_k: 10.0,
            rho_i0: 0.3,
            t_max: 20.0,
            dt: 0.02,
            tau_max: None,
            snapshot_stride: None,
        };
        let grid = solve_grp_pde(&dist, &p, &InitialAgeDensity::AllAtAgeZero).unwrap();
        let classical = fig3a();
        let mut sup = 0.0_f64;
        for (i, t) in grid.times().enumerate() {
            sup = sup.max((grid.rho_i[i] - classical_sis_solution(&classical, t)).abs());
        }
        assert!(sup < 0.01, "sup-norm {sup}");
        assert!(!grid.truncation_warning);
    }

    #[test]
    fn pde_conserves_and_stays_in_bounds() {
        let dist = PowerLawRecovery::new(4.0, 1.0).unwrap();
        let p = PdeParams {
            beta: 0.3,
            mean_k: 10.0,
            rho_i0: 0.3,
            t_max: 10.0,
            dt: 0.02,
            tau_max: None,
            snapshot_stride: Some(100),
        };
        let grid = solve_grp_pde(&dist, &p, &InitialAgeDensity::AllAtAgeZero).unwrap();
        for (r_i, r_s) in grid.rho_i.iter().zip(&grid.rho_s) {
            assert_eq!(r_i + r_s, 1.0);
            assert!(*r_i >= 0.0 && *r_i <= 1.0);
        }
        // slice mass equals the marginal at the matching step
        for slice in &grid.snapshots {
            let mass = grid.integrate_slice(slice);
            assert!(
                (mass - grid.rho_i[slice.step]).abs() < 1e-12,
                "step {}: {mass} vs {}",
                slice.step,
                grid.rho_i[slice.step]
            );
            assert!(slice.density.iter().all(|&d| d >= 0.0));
            // cumulative is monotone in tau
            let mut prev = 0.0;
            for j in 1..=40 {
                let c = grid.cumulative(slice, j as f64 * 0.25);
                assert!(c >= prev - 1e-15);
                prev = c;
            }
        }
    }

    #[test]
    fn pde_matches_convolution_oracle_pointwise() {
        let dist = ExponentialRecovery::new(0.5).unwrap();
        let p = PdeParams {
            beta: 0.26,
            mean_k: 10.0,
            rho_i0: 0.3,
            t_max: 5.0,
            dt: 0.01,
            tau_max: None,
            snapshot_stride: Some(100),
        };
        let grid = solve_grp_pde(&dist, &p, &InitialAgeDensity::AllAtAgeZero).unwrap();
        let classical = fig3a();
        let slice = grid.snapshot_near(5.0).unwrap();
        for tau in [1.0, 2.0, 3.0] {
            let pde = grid.cumulative(slice, tau);
            let conv = exp_case_convolution(&classical, &InitialAgeDensity::AllAtAgeZero, 5.0, tau);
            assert!((pde - conv).abs() < 2e-3, "tau={tau}: {pde} vs {conv}");
        }
    }

    #[test]
    fn pde_subcritical_density_decays_monotonically() {
        // beta E[W] <k> = 0.04 * 2 * 10 = 0.8 < 1; the decay rate is only
        // mu - beta <k> = 0.1, so give it time to reach the floor
        let dist = ExponentialRecovery::new(0.5).unwrap();
        let p = PdeParams {
            beta: 0.04,
            mean_k: 10.0,
            rho_i0: 0.3,
            t_max: 100.0,
            dt: 0.02,
            tau_max: None,
            snapshot_stride: None,
        };
        let grid = solve_grp_pde(&dist, &p, &InitialAgeDensity::AllAtAgeZero).unwrap();
        for w in grid.rho_i.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        assert!(*grid.rho_i.last().unwrap() < 1e-3);
    }

    #[test]
    fn initial_density_must_integrate_to_rho_i0() {
        let dist = ExponentialRecovery::new(0.5).unwrap();
        let p = PdeParams {
            beta: 0.26,
            mean_k: 10.0,
            rho_i0: 0.3,
            t_max: 1.0,
            dt: 0.01,
            tau_max: Some(10.0),
            snapshot_stride: None,
        };
        let wrong = |_tau: f64| 0.05;
        assert!(matches!(
            solve_grp_pde(&dist, &p, &InitialAgeDensity::Density(&wrong)),
            Err(MeanfieldError::InvalidInitialDensity { .. })
        ));
    }

    #[test]
    fn bad_grids_are_rejected() {
        let dist = ExponentialRecovery::new(0.5).unwrap();
        let p = PdeParams {
            beta: 0.26,
            mean_k: 10.0,
            rho_i0: 0.3,
            t_max: 1.0,
            dt: 0.3,
            tau_max: None,
            snapshot_stride: None,
        };
        assert!(matches!(
            solve_grp_pde(&dist, &p, &InitialAgeDensity::AllAtAgeZero),
            Err(MeanfieldError::InvalidParams(_))
        ));
    }

    #[test]
    fn dump_round_trips() {
        let dist = ExponentialRecovery::new(0.5).unwrap();
        let p = PdeParams {
            beta: 0.26,
            mean_k: 10.0,
            rho_i0: 0.3,
            t_max: 2.0,
            dt: 0.05,
            tau_max: Some(8.0),
            snapshot_stride: Some(10),
        };
        let grid = solve_grp_pde(&dist, &p, &InitialAgeDensity::AllAtAgeZero).unwrap();
        let mut buf = Vec::new();
        write_grid_dump(&grid, &mut buf).unwrap();
        let back = read_grid_dump(buf.as_slice()).unwrap();
        assert_eq!(back.rho_i, grid.rho_i);
        assert_eq!(back.n_bins, grid.n_bins);
        assert_eq!(back.snapshots.len(), grid.snapshots.len());
        assert_eq!(back.final_slice().density, grid.final_slice().density);
    }
}
