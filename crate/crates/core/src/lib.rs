//! SIS epidemic dynamics on homogeneous networks with a general recovery
//! process.
//!
//! The classical SIS model assumes memoryless (exponential) recovery. This
//! crate implements the generalization in which the time an individual stays
//! infected follows an arbitrary waiting-time law, while infection along each
//! infected-susceptible contact remains a Poisson process of rate `beta`.
//! It provides four mutually validating views of the same process:
//!
//! * [`sim`] — a statistically exact node-centric event-driven simulator on
//!   random k-regular graphs ([`network`]),
//! * [`meanfield`] — the age-structured mean-field equations solved along
//!   characteristics, plus the classical SIS solution and an exponential-case
//!   convolution oracle,
//! * [`steady`] — closed-form steady-state quantities: infection density,
//!   epidemic threshold, and the stationary infection-age distribution,
//! * [`stats`] — the estimation toolkit used to compare them: exponential
//!   MLE, binned density estimation, KL divergence, ensemble summaries.
//!
//! Recovery laws live behind the [`dist::RecoveryDistribution`] trait and are
//! selected at runtime by name through [`dist::DistRegistry`], so custom laws
//! can be registered next to the built-in exponential, power-law and
//! lognormal families.

pub mod dist;
pub mod meanfield;
pub mod network;
pub mod quad;
pub mod sim;
pub mod stats;
pub mod steady;
