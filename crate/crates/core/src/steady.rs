//! Closed-form steady-state quantities.
//!
//! For a recovery law with survival `F0` and mean `E[W]`, the long-time
//! behavior is controlled by the dimensionless effective transmission rate
//! `tau = beta E[W]` against the threshold `tau_c = 1 / <k>`:
//!
//! * infection density `rho_I^inf = (tau - tau_c) / tau` above threshold,
//!   zero at or below it,
//! * the stationary infection-age density `f(tau) = F0(tau) / E[W]`,
//! * its expectation `E[W^2] / (2 E[W])` — which can exceed `E[W]` itself
//!   for high-variance laws (length-biased sampling of long infections).
//!
//! Every specialization in [`closed_form`] is also reachable through the
//! generic `F0 / E[W]` route; tests assert the two stay equal.

use crate::dist::{DistError, RecoveryDistribution};

/// Steady-state summary for one `(distribution, beta, <k>)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateSummary {
    /// Effective transmission rate `beta * E[W]`.
    pub effective_rate: f64,
    /// Epidemic threshold `1 / <k>`.
    pub threshold: f64,
    /// `effective_rate - threshold`; small positive values flag the
    /// near-absorbing regime where finite simulations read low.
    pub gap: f64,
    pub rho_i_inf: f64,
    pub rho_s_inf: f64,
    /// Steady-state mean infection age, when `E[W^2]` exists.
    pub expected_age: Option<f64>,
}

/// Steady infection/susceptibility densities and threshold data.
pub fn steady_densities(
    dist: &dyn RecoveryDistribution,
    beta: f64,
    mean_k: f64,
) -> Result<SteadyStateSummary, DistError> {
    if beta.is_nan() || beta <= 0.0 || mean_k.is_nan() || mean_k <= 0.0 {
        return Err(DistError::InvalidParameter(format!(
            "steady state needs beta > 0 and mean_k > 0, got beta={beta}, mean_k={mean_k}"
        )));
    }
    let effective_rate = beta * dist.mean();
    let threshold = 1.0 / mean_k;
    let rho_i_inf = if effective_rate > threshold {
        (effective_rate - threshold) / effective_rate
    } else {
        0.0
    };
    Ok(SteadyStateSummary {
        effective_rate,
        threshold,
        gap: effective_rate - threshold,
        rho_i_inf,
        rho_s_inf: 1.0 - rho_i_inf,
        expected_age: steady_age_mean(dist).ok(),
    })
}

/// Transmission rate at which the effective rate meets the threshold:
/// `1 / (<k> E[W])`.
pub fn critical_beta(dist: &dyn RecoveryDistribution, mean_k: f64) -> Result<f64, DistError> {
    if mean_k.is_nan() || mean_k <= 0.0 {
        return Err(DistError::InvalidParameter(format!(
            "mean_k must be positive, got {mean_k}"
        )));
    }
    Ok(1.0 / (mean_k * dist.mean()))
}

/// Stationary infection-age density `F0(tau) / E[W]` for `tau >= 0`.
pub fn steady_age_pdf(dist: &dyn RecoveryDistribution, tau: f64) -> f64 {
    if tau < 0.0 {
        0.0
    } else {
        dist.survival(tau) / dist.mean()
    }
}

/// Stationary mean infection age `E[W^2] / (2 E[W])`.
pub fn steady_age_mean(dist: &dyn RecoveryDistribution) -> Result<f64, DistError> {
    Ok(dist.second_moment()? / (2.0 * dist.mean()))
}

/// Relative bias of estimating the stationary mean age from ages observed
/// at a finite horizon `t_max`.
///
/// Ages in a simulation of length `t_max` cannot exceed it, so the
/// estimator misses `int_{t_max}^inf (s - t_max) F0(s) ds / E[W]` of the
/// stationary mean; this returns that deficit relative to the mean itself.
/// Heavy-tailed laws need noticeably longer horizons than light-tailed
/// ones before the deficit becomes negligible.
pub fn horizon_truncation_bias(
    dist: &dyn RecoveryDistribution,
    t_max: f64,
) -> Result<f64, DistError> {
    let mean_age = steady_age_mean(dist)?;
    let upper = crate::dist::survival_quantile(dist, 1e-12).max(t_max * 4.0);
    let f = |s: f64| (s - t_max) * dist.survival(s);
    // geometric splits keep the adaptive rule honest across the decades
    let mut cuts = vec![t_max];
    let mut c = t_max * 4.0;
    while c < upper {
        cuts.push(c);
        c *= 4.0;
    }
    cuts.push(upper);
    let missing: f64 = cuts
        .windows(2)
        .map(|w| crate::quad::adaptive_simpson(&f, w[0], w[1], 1e-10))
        .sum();
    Ok(missing / dist.mean() / mean_age)
}

/// Per-family closed forms, the duals of the generic `F0 / E[W]` route.
///
/// Domains follow the families themselves (`lambda > 3` wherever the
/// expected age appears for the power law); no checking happens here.
pub mod closed_form {
    /// `mu e^(-mu tau)` for `tau >= 0`.
    pub fn exponential_age_pdf(mu: f64, tau: f64) -> f64 {
        if tau < 0.0 {
            0.0
        } else {
            mu * (-mu * tau).exp()
        }
    }

    /// Constant `(lambda-2)/((lambda-1) t0)` on `[0, t0]`, then decaying as
    /// `(tau/t0)^(1-lambda)`.
    pub fn powerlaw_age_pdf(lambda: f64, t0: f64, tau: f64) -> f64 {
        let plateau = (lambda - 2.0) / ((lambda - 1.0) * t0);
        if tau < 0.0 {
            0.0
        } else if tau <= t0 {
            plateau
        } else {
            plateau * (tau / t0).powf(1.0 - lambda)
        }
    }

    /// `erfc((ln tau - mu)/(sqrt2 sigma)) / (2 e^(mu + sigma^2/2))`, with the
    /// limit value `e^(-mu - sigma^2/2)` at `tau = 0`.
    pub fn lognormal_age_pdf(mu: f64, sigma: f64, tau: f64) -> f64 {
        let inv_mean = (-mu - 0.5 * sigma * sigma).exp();
        if tau < 0.0 {
            0.0
        } else if tau == 0.0 {
            inv_mean
        } else {
            0.5 * libm::erfc((tau.ln() - mu) / (std::f64::consts::SQRT_2 * sigma)) * inv_mean
        }
    }

    /// `1 / mu`.
    pub fn exponential_expected_age(mu: f64) -> f64 {
        1.0 / mu
    }

    /// `(lambda-2)/(lambda-3) * t0/2`; finite only for `lambda > 3`.
    pub fn powerlaw_expected_age(lambda: f64, t0: f64) -> f64 {
        (lambda - 2.0) / (lambda - 3.0) * t0 / 2.0
    }

    /// `e^(mu + 3 sigma^2 / 2) / 2`.
    pub fn lognormal_expected_age(mu: f64, sigma: f64) -> f64 {
        0.5 * (mu + 1.5 * sigma * sigma).exp()
    }

    /// `mu / (beta <k>)`.
    pub fn exponential_rho_s_inf(mu: f64, beta: f64, mean_k: f64) -> f64 {
        mu / (beta * mean_k)
    }

    /// `(lambda-2) / ((lambda-1) t0 beta <k>)`.
    pub fn powerlaw_rho_s_inf(lambda: f64, t0: f64, beta: f64, mean_k: f64) -> f64 {
        (lambda - 2.0) / ((lambda - 1.0) * t0 * beta * mean_k)
    }

    /// `e^(-mu - sigma^2/2) / (beta <k>)`.
    pub fn lognormal_rho_s_inf(mu: f64, sigma: f64, beta: f64, mean_k: f64) -> f64 {
        (-mu - 0.5 * sigma * sigma).exp() / (beta * mean_k)
    }
}
