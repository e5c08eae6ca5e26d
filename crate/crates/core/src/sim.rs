//! Exact node-centric event-driven simulation.
//!
//! Dynamics: along every directed contact from an infected node to a
//! susceptible neighbor, transmission attempts form a Poisson process of
//! rate `beta`; an infected node recovers after a waiting time drawn fresh
//! from the recovery distribution, independent of history.
//!
//! The event queue holds recovery events and per-contact transmission
//! attempts. Instead of deleting events when they become obsolete, each node
//! carries an epoch counter bumped at every state flip; events remember the
//! epochs they were scheduled under and are discarded on pop if either
//! endpoint has flipped since (lazy invalidation). Because the attempt clock
//! is memoryless, scheduling one exponential attempt per activation of a
//! contact — when the source becomes infected, or when the target recovers
//! back to susceptible while the source is still infected — reproduces the
//! per-contact Poisson process exactly.
//!
//! Ties in event time are broken by insertion sequence, so runs replay
//! deterministically under a fixed seed.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::dist::RecoveryDistribution;
use crate::network::RegularNetwork;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),
}

/// Run parameters shared by single runs and ensembles.
#[derive(Debug, Clone, Copy)]
pub struct SimParams {
    /// Per-contact transmission rate.
    pub beta: f64,
    /// Initial infected fraction; `floor(rho_i0 * n)` nodes start infected,
    /// newly infected (age zero, recovery sampled fresh).
    pub rho_i0: f64,
    /// Simulation horizon.
    pub t_max: f64,
    /// Sampling step of the output grid `0, dt, 2dt, ..., t_max`.
    pub grid_dt: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SimOptions {
    /// Scan the full queue/state consistency invariant after every processed
    /// event. O(queue) per event, so meant for validation runs, not
    /// reference-scale ensembles.
    pub check_invariants: bool,
    /// Textbook event-scheduling variant that does not re-arm a contact when
    /// its target recovers back to susceptible. Under-exposes recovered
    /// nodes and is kept only for comparison; no statistical claims hold.
    pub literal_rescheduling: bool,
}

/// One realization sampled onto a uniform time grid.
///
/// `rho_i + rho_s == 1` holds at every grid point; densities are
/// right-continuous step functions of the event process. `final_ages` holds
/// the infection ages of the nodes still infected at the horizon and is
/// empty for absorbed runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Vec<f64>,
    pub rho_i: Vec<f64>,
    pub rho_s: Vec<f64>,
    pub final_ages: Vec<f64>,
    pub absorbed: bool,
    pub seed: u64,
}

impl Trajectory {
    /// Time average of `rho_i` over `[t_lo, t_hi]`.
    pub fn mean_rho_i_over(&self, t_lo: f64, t_hi: f64) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (t, r) in self.grid.iter().zip(&self.rho_i) {
            if *t >= t_lo && *t <= t_hi {
                sum += r;
                count += 1;
            }
        }
        sum / count.max(1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    Recovery {
        node: u32,
        epoch: u32,
    },
    Attempt {
        source: u32,
        target: u32,
        source_epoch: u32,
        target_epoch: u32,
    },
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Inverted (time, seq) order so BinaryHeap pops the earliest event first.
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct SimState<'a> {
    net: &'a RegularNetwork,
    dist: &'a dyn RecoveryDistribution,
    beta: f64,
    t_max: f64,
    infected: Vec<bool>,
    epoch: Vec<u32>,
    infected_since: Vec<f64>,
    n_infected: usize,
    queue: BinaryHeap<Event>,
    seq: u64,
    rng: ChaCha8Rng,
    rearm_on_target_recovery: bool,
}

impl SimState<'_> {
    fn push(&mut self, time: f64, kind: EventKind) {
        let seq = self.seq;
        self.seq += 1;
        self.queue.push(Event { time, seq, kind });
    }

    fn exp_waiting(&mut self, rate: f64) -> f64 {
        if rate <= 0.0 {
            return f64::INFINITY;
        }
        let u: f64 = self.rng.random();
        -(1.0 - u).ln() / rate
    }

    /// Arm the directed contact `source -> target` with its next attempt.
    fn arm_contact(&mut self, now: f64, source: u32, target: u32) {
        let wait = self.exp_waiting(self.beta);
        let time = now + wait;
        if time <= self.t_max {
            self.push(
                time,
                EventKind::Attempt {
                    source,
                    target,
                    source_epoch: self.epoch[source as usize],
                    target_epoch: self.epoch[target as usize],
                },
            );
        }
    }

    fn infect(&mut self, node: u32, now: f64) {
        let v = node as usize;
        debug_assert!(!self.infected[v]);
        self.infected[v] = true;
        self.epoch[v] = self.epoch[v].wrapping_add(1);
        self.infected_since[v] = now;
        self.n_infected += 1;
        let wait = self.dist.sample(&mut self.rng);
        self.push(
            now + wait,
            EventKind::Recovery {
                node,
                epoch: self.epoch[v],
            },
        );
        for i in 0..self.net.degree() {
            let u = self.net.neighbors(v)[i];
            if !self.infected[u as usize] {
                self.arm_contact(now, node, u);
            }
        }
    }

    fn recover(&mut self, node: u32, now: f64) {
        let v = node as usize;
        debug_assert!(self.infected[v]);
        self.infected[v] = false;
        self.epoch[v] = self.epoch[v].wrapping_add(1);
        self.n_infected -= 1;
        if self.rearm_on_target_recovery {
            // the node is exposed again to every still-infected neighbor
            for i in 0..self.net.degree() {
                let u = self.net.neighbors(v)[i];
                if self.infected[u as usize] {
                    self.arm_contact(now, u, node);
                }
            }
        }
    }

    /// Full queue/state consistency scan; see [`SimOptions::check_invariants`].
    fn check_consistency(&self, clock: f64) {
        assert_eq!(
            self.n_infected,
            self.infected.iter().filter(|&&i| i).count(),
            "infected counter out of sync"
        );
        let n = self.infected.len();
        let mut valid_recoveries = vec![0usize; n];
        for ev in self.queue.iter() {
            match ev.kind {
                EventKind::Recovery { node, epoch } => {
                    if epoch == self.epoch[node as usize] {
                        valid_recoveries[node as usize] += 1;
                    }
                }
                EventKind::Attempt {
                    source,
                    target,
                    source_epoch,
                    target_epoch,
                } => {
                    if source_epoch == self.epoch[source as usize]
                        && target_epoch == self.epoch[target as usize]
                    {
                        assert!(
                            self.infected[source as usize] && !self.infected[target as usize],
                            "valid attempt on an inactive contact at t={clock}"
                        );
                    }
                }
            }
        }
        for (v, &count) in valid_recoveries.iter().enumerate() {
            if self.infected[v] {
                assert_eq!(
                    count, 1,
                    "infected node {v} must hold exactly one pending recovery at t={clock}"
                );
                assert!(self.infected_since[v] <= clock + 1e-12);
            } else {
                assert_eq!(
                    count, 0,
                    "susceptible node {v} must hold no valid recovery at t={clock}"
                );
            }
        }
    }
}

fn validate(params: &SimParams) -> Result<usize, SimError> {
    if params.beta.is_nan() || params.beta < 0.0 {
        return Err(SimError::InvalidParams(format!(
            "beta must be >= 0, got {}",
            params.beta
        )));
    }
    if !(0.0..=1.0).contains(&params.rho_i0) {
        return Err(SimError::InvalidParams(format!(
            "rho_i0 must be in [0, 1], got {}",
            params.rho_i0
        )));
    }
    if !params.t_max.is_finite() || params.t_max <= 0.0 || !params.grid_dt.is_finite() || params.grid_dt <= 0.0 {
        return Err(SimError::InvalidParams(
            "t_max and grid_dt must be positive".into(),
        ));
    }
    let n_grid = (params.t_max / params.grid_dt).round();
    if (n_grid * params.grid_dt - params.t_max).abs() > 1e-9 * params.t_max.max(1.0) {
        return Err(SimError::InvalidParams(format!(
            "grid_dt={} must divide t_max={}",
            params.grid_dt, params.t_max
        )));
    }
    Ok(n_grid as usize)
}

/// Simulate one realization with default options.
pub fn run(
    net: &RegularNetwork,
    dist: &dyn RecoveryDistribution,
    params: &SimParams,
    seed: u64,
) -> Result<Trajectory, SimError> {
    run_with_options(net, dist, params, seed, &SimOptions::default())
}

pub fn run_with_options(
    net: &RegularNetwork,
    dist: &dyn RecoveryDistribution,
    params: &SimParams,
    seed: u64,
    options: &SimOptions,
) -> Result<Trajectory, SimError> {
    let n_grid = validate(params)?;
    let n = net.node_count();
    let mut state = SimState {
        net,
        dist,
        beta: params.beta,
        t_max: params.t_max,
        infected: vec![false; n],
        epoch: vec![0; n],
        infected_since: vec![0.0; n],
        n_infected: 0,
        queue: BinaryHeap::new(),
        seq: 0,
        rng: ChaCha8Rng::seed_from_u64(seed),
        rearm_on_target_recovery: !options.literal_rescheduling,
    };

    // Seed the initial infected set: a uniform random subset, every member
    // newly infected (age 0, recovery drawn fresh).
    let n_seed = (params.rho_i0 * n as f64).floor() as usize;
    for idx in rand::seq::index::sample(&mut state.rng, n, n_seed) {
        state.infected[idx] = true;
    }
    state.n_infected = n_seed;
    for v in 0..n {
        if state.infected[v] {
            let wait = state.dist.sample(&mut state.rng);
            state.push(
                wait,
                EventKind::Recovery {
                    node: v as u32,
                    epoch: 0,
                },
            );
        }
    }
    for v in 0..n {
        if state.infected[v] {
            for i in 0..net.degree() {
                let u = net.neighbors(v)[i];
                if !state.infected[u as usize] {
                    state.arm_contact(0.0, v as u32, u);
                }
            }
        }
    }

    let inv_n = 1.0 / n as f64;
    let mut rho_i = Vec::with_capacity(n_grid + 1);
    let mut next_grid = 0usize;
    let mut last_time = 0.0_f64;
    let mut absorbed = n_seed == 0;

    while let Some(ev) = state.queue.pop() {
        if ev.time > params.t_max {
            break;
        }
        debug_assert!(ev.time >= last_time, "event causality violated");
        last_time = ev.time;
        while next_grid <= n_grid && (next_grid as f64) * params.grid_dt < ev.time {
            rho_i.push(state.n_infected as f64 * inv_n);
            next_grid += 1;
        }
        let mutated = match ev.kind {
            EventKind::Recovery { node, epoch } => {
                if epoch == state.epoch[node as usize] {
                    state.recover(node, ev.time);
                    true
                } else {
                    false
                }
            }
            EventKind::Attempt {
                source,
                target,
                source_epoch,
                target_epoch,
            } => {
                if source_epoch == state.epoch[source as usize]
                    && target_epoch == state.epoch[target as usize]
                {
                    state.infect(target, ev.time);
                    true
                } else {
                    false
                }
            }
        };
        if mutated && options.check_invariants {
            state.check_consistency(ev.time);
        }
        if state.n_infected == 0 {
            absorbed = true;
            break;
        }
    }

    while next_grid <= n_grid {
        rho_i.push(state.n_infected as f64 * inv_n);
        next_grid += 1;
    }

    let grid: Vec<f64> = (0..=n_grid).map(|i| i as f64 * params.grid_dt).collect();
    let rho_s: Vec<f64> = rho_i.iter().map(|r| 1.0 - r).collect();
    let final_ages = if absorbed {
        Vec::new()
    } else {
        (0..n)
            .filter(|&v| state.infected[v])
            .map(|v| params.t_max - state.infected_since[v])
            .collect()
    };

    Ok(Trajectory {
        grid,
        rho_i,
        rho_s,
        final_ages,
        absorbed,
        seed,
    })
}

/// Independent runs, one per seed, executed in parallel and returned in seed
/// order. Bitwise deterministic for a fixed seed list.
pub fn run_ensemble(
    net: &RegularNetwork,
    dist: &dyn RecoveryDistribution,
    params: &SimParams,
    seeds: &[u64],
) -> Result<Vec<Trajectory>, SimError> {
    validate(params)?;
    seeds
        .par_iter()
        .map(|&seed| run(net, dist, params, seed))
        .collect()
}

/// Deterministic stream of run seeds derived from one base seed
/// (SplitMix64).
pub fn derive_seeds(base: u64, count: usize) -> Vec<u64> {
    let mut x = base;
    (0..count)
        .map(|_| {
            x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = x;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        })
        .collect()
}
