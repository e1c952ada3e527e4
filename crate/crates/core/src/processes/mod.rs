//! Bernoulli sieve occupancy and the perturbed random walk `T_k = S_{k-1} + η_k`.
//!
//! Everything is driven by a [`StickBreakingStream`], which generates box
//! frequencies lazily in log coordinates: `S_k = -log Q_k` and
//! `T_k = -log P_k`. Infinite series over boxes are cut with the a-priori
//! bound `Σ_{j>k} P_j = Q_k`, so each truncation carries an explicit error
//! budget rather than a heuristic cutoff.

mod occupancy;
mod series;
mod stick;
mod walk;

use serde::{Deserialize, Serialize};

pub use occupancy::{simulate_occupancy_fixed, simulate_occupancy_nested, simulate_occupancy_poisson};
pub use series::{conditional_mean_r, conditional_variance};
pub use stick::{BoxFrequency, StickBreakingStream};
pub use walk::{walk_functionals, weighted_sum_r, PathFunctionals, WalkPath};

/// Largest fixed sample size accepted by the exact binomial recursion.
pub const BINOMIAL_CAP: u64 = 1_000_000_000_000_000;

/// Default truncation budget for infinite series.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Whether balls are a fixed number `n` or arrivals of a unit-rate Poisson process up to time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Mode {
    Fixed(u64),
    Poisson(f64),
}

/// `(K, I, L)` from one realisation of the sieve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OccupancyResult {
    /// `K`: boxes holding at least one ball.
    pub occupied: u64,
    /// `I`: index of the last occupied box (0 if no box is occupied).
    pub last_occupied: u64,
    /// `L = I - K`: empty boxes before the last occupied one.
    pub empty: u64,
    pub boxes_generated: u64,
    pub mode: Mode,
}
