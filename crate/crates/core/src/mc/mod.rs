//! Reproducible parallel replication.
//!
//! Replicate `i` of an experiment with seed `s` draws from ChaCha8 keyed by
//! `s` on stream `i`, so its value depends on `(s, i)` alone. Workers write
//! into replicate order, which makes samples identical for any thread count.

mod output;
mod stats;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::limits::Normalization;
use crate::processes::{self, Mode, WalkPath, BINOMIAL_CAP, DEFAULT_EPS};

pub use output::{read_summary, write_samples_csv, RunConfig, Summary};
pub use stats::{ks_distance, ks_two_sample, moment_compare, EmpiricalSample, MomentReport, MomentRow, Welford};

/// Generator for replicate `index` of an experiment seeded with `seed`.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `f(rng_i, i)` for `i < replicates`, in replicate order. `threads = None`
/// uses every available core. The first failing replicate (by index) is
/// reported.
pub fn run_replicates<T, F>(seed: u64, replicates: u64, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> Result<T> + Sync,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::InvalidArgument("thread count must be positive".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))?;
    let results: Vec<Result<T>> = pool.install(|| {
        (0..replicates)
            .into_par_iter()
            .map(|i| f(&mut replicate_rng(seed, i), i))
            .collect()
    });
    results
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| Error::Replicate {
                index: i as u64,
                source: Box::new(e),
            })
        })
        .collect()
}

/// What one replicate measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `K_n`, occupied boxes among `n` balls.
    KN,
    /// `L_n`, empty boxes before the last occupied one.
    LN,
    /// `I_n`, index of the last occupied box.
    IN,
    /// `K(t)` under Poisson arrivals.
    KT,
    /// `N*(x)`, frequencies at least `e^{-x}`.
    NStar,
    /// `ρ*(x)`, first passage count of `-log Q_k` over `x`.
    RhoStar,
    /// Shot noise `M(x)`.
    MShot,
    /// `R(e^x)`.
    RWeighted,
    /// `E(K | frequencies)` at fixed `n` or Poisson time `t`.
    ConditionalMean,
    /// `Var(K(t) | frequencies)`.
    ConditionalVariance,
}

impl Target {
    pub const ALL: [Target; 10] = [
        Target::KN,
        Target::LN,
        Target::IN,
        Target::KT,
        Target::NStar,
        Target::RhoStar,
        Target::MShot,
        Target::RWeighted,
        Target::ConditionalMean,
        Target::ConditionalVariance,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Target::KN => "k_n",
            Target::LN => "l_n",
            Target::IN => "i_n",
            Target::KT => "k_t",
            Target::NStar => "n_star",
            Target::RhoStar => "rho_star",
            Target::MShot => "m_shot",
            Target::RWeighted => "r_weighted",
            Target::ConditionalMean => "conditional_mean",
            Target::ConditionalVariance => "conditional_variance",
        }
    }
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown target `{s}`")))
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Experiment size: a ball count `n`, a Poisson time `t`, or a walk level `x`.
/// Walk targets read `x = log n` (or `log t`) from the first two.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Size {
    Balls(u64),
    Time(f64),
    Level(f64),
}

impl Size {
    pub fn level(&self) -> f64 {
        match *self {
            Size::Balls(n) => (n as f64).ln(),
            Size::Time(t) => t.ln(),
            Size::Level(x) => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub spec: DistributionSpec,
    pub target: Target,
    pub size: Size,
    pub replicates: u64,
    pub seed: u64,
    /// Truncation budget for series and Poisson tails.
    pub eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
}

impl ExperimentPlan {
    pub fn new(spec: DistributionSpec, target: Target, size: Size, replicates: u64, seed: u64) -> Self {
        Self {
            spec,
            target,
            size,
            replicates,
            seed,
            eps: DEFAULT_EPS,
            normalization: None,
        }
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = Some(normalization);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if !(self.eps > 0.0) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        match (self.target, self.size) {
            (Target::KN | Target::LN | Target::IN, Size::Balls(n)) => {
                if n == 0 {
                    return bad("sample size must be at least 1".into());
                }
                if n > BINOMIAL_CAP {
                    return Err(Error::Overflow { n, cap: BINOMIAL_CAP });
                }
            }
            (Target::KN | Target::LN | Target::IN, s) => {
                return bad(format!("target {} needs a ball count, got {s:?}", self.target))
            }
            (Target::KT | Target::ConditionalVariance, Size::Time(t)) if t > 0.0 && t.is_finite() => {}
            (Target::KT | Target::ConditionalVariance, s) => {
                return bad(format!("target {} needs a positive Poisson time, got {s:?}", self.target))
            }
            (Target::ConditionalMean, Size::Balls(n)) if n >= 1 => {}
            (Target::ConditionalMean, Size::Time(t)) if t > 0.0 && t.is_finite() => {}
            (Target::ConditionalMean, s) => {
                return bad(format!("conditional_mean needs n ≥ 1 or t > 0, got {s:?}"))
            }
            (_, s) => {
                let x = s.level();
                if !(x >= 0.0 && x.is_finite()) {
                    return bad(format!("walk level must be finite and non-negative, got {x}"));
                }
            }
        }
        if let Some(norm) = &self.normalization {
            if !(norm.a > 0.0 && norm.a.is_finite() && norm.b.is_finite()) {
                return bad("normalization needs finite b and positive a".into());
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("plans always serialize");
        hex::encode(Sha256::digest(bytes))
    }

    /// One replicate's raw value.
    pub fn evaluate(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let spec = &self.spec;
        let x = self.size.level();
        let v = match (self.target, self.size) {
            (Target::KN, Size::Balls(n)) => processes::simulate_occupancy_fixed(spec, n, rng)?.occupied as f64,
            (Target::LN, Size::Balls(n)) => processes::simulate_occupancy_fixed(spec, n, rng)?.empty as f64,
            (Target::IN, Size::Balls(n)) => {
                processes::simulate_occupancy_fixed(spec, n, rng)?.last_occupied as f64
            }
            (Target::KT, Size::Time(t)) => {
                processes::simulate_occupancy_poisson(spec, t, rng, self.eps)?.occupied as f64
            }
            (Target::ConditionalMean, Size::Balls(n)) => {
                processes::conditional_mean_r(spec, Mode::Fixed(n), rng, self.eps)?
            }
            (Target::ConditionalMean, Size::Time(t)) => {
                processes::conditional_mean_r(spec, Mode::Poisson(t), rng, self.eps)?
            }
            (Target::ConditionalVariance, Size::Time(t)) => {
                processes::conditional_variance(spec, t, rng, self.eps)?
            }
            (Target::NStar, _) => WalkPath::generate(spec, x, 0.0, self.eps, rng)?.n_count(x) as f64,
            (Target::RhoStar, _) => WalkPath::generate(spec, x, 0.0, self.eps, rng)?.rho(x) as f64,
            (Target::MShot, _) => WalkPath::generate(spec, x, 0.0, self.eps, rng)?.m_shot(x, spec),
            (Target::RWeighted, _) => processes::weighted_sum_r(spec, x.exp(), rng, self.eps)?,
            (target, size) => {
                return Err(Error::InvalidArgument(format!("target {target} does not accept {size:?}")))
            }
        };
        Ok(v)
    }
}

/// Runs every replicate of `plan` on `threads` workers (all cores if `None`).
pub fn run_experiment(plan: &ExperimentPlan, threads: Option<usize>) -> Result<EmpiricalSample> {
    plan.validate()?;
    let raw = run_replicates(plan.seed, plan.replicates, threads, |rng, _| plan.evaluate(rng))?;
    Ok(EmpiricalSample::new(raw, plan.normalization.as_ref(), plan.seed, plan.hash()))
}
