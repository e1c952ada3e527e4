//! Simulation and numerical analysis of the Bernoulli sieve.
//!
//! Box frequencies are `P_k = W_1 ⋯ W_{k-1} (1 - W_k)` for iid `W_k ∈ (0, 1)`.
//! The crate samples the occupancy counts `K_n`, `L_n`, `I_n` (fixed `n` or
//! Poisson time `t`), evaluates functionals of the associated perturbed
//! random walk, computes the regime-dependent centering and scaling constants
//! of the limit theorems for `K_n`, and runs reproducible parallel Monte Carlo
//! experiments against the limit laws.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod limits;
pub mod mc;
pub mod processes;
pub mod quadrature;

pub use distributions::{DistributionSpec, Family, MomentSet, Regime, StickDraw, TailProfile};
pub use error::{Error, Result};
