//! Named verification suites behind `sieve verify`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use sieve::mc::{self, run_replicates, ExperimentPlan, Size, Target, Welford};
use sieve::processes::{self, WalkPath};
use sieve::quadrature::{self, Tolerance};
use sieve::{DistributionSpec, Error, Family, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    EwensMean,
    VarianceLog2,
    ShotNoise,
    Invariants,
    Determinism,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::EwensMean,
        Suite::VarianceLog2,
        Suite::ShotNoise,
        Suite::Invariants,
        Suite::Determinism,
    ];

    fn name(self) -> &'static str {
        match self {
            Suite::EwensMean => "ewens-mean",
            Suite::VarianceLog2 => "variance-log2",
            Suite::ShotNoise => "shot-noise",
            Suite::Invariants => "invariants",
            Suite::Determinism => "determinism",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            format!("unknown suite `{s}`; expected one of {}", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub estimate: f64,
    pub target: f64,
    /// Allowed `|estimate - target|`.
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, estimate: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            estimate,
            target,
            tolerance,
            pass: (estimate - target).abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub law: String,
    pub replicates: u64,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<Check>,
}

pub struct Options {
    pub replicates: Option<u64>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub n: Option<u64>,
}

fn beta_theta(spec: &DistributionSpec, suite: Suite) -> Result<f64> {
    match spec.family() {
        Family::BetaThetaOne { theta } => Ok(*theta),
        _ => Err(Error::InvalidArgument(format!("suite {suite} needs a beta:<θ> law, got {spec}"))),
    }
}

pub fn run(suite: Suite, spec: &DistributionSpec, opts: &Options) -> Result<Report> {
    let (replicates, checks) = match suite {
        Suite::EwensMean => ewens_mean(spec, opts)?,
        Suite::VarianceLog2 => variance_log2(spec, opts)?,
        Suite::ShotNoise => shot_noise(spec, opts)?,
        Suite::Invariants => invariants(spec, opts)?,
        Suite::Determinism => determinism(spec, opts)?,
    };
    Ok(Report {
        suite: suite.to_string(),
        law: spec.to_string(),
        replicates,
        seed: opts.seed,
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}

/// Mean `K_n` against `Σ_{i<n} θ/(θ+i)`, within 3 standard errors.
fn ewens_mean(spec: &DistributionSpec, opts: &Options) -> Result<(u64, Vec<Check>)> {
    let theta = beta_theta(spec, Suite::EwensMean)?;
    let reps = opts.replicates.unwrap_or(100_000);
    let sizes = match opts.n {
        Some(n) => vec![n],
        None => vec![100, 10_000],
    };
    let mut checks = Vec::new();
    for n in sizes {
        let plan = ExperimentPlan::new(spec.clone(), Target::KN, Size::Balls(n), reps, opts.seed);
        let s = mc::run_experiment(&plan, opts.threads)?;
        let exact: f64 = (0..n).map(|i| theta / (theta + i as f64)).sum();
        checks.push(Check::new(format!("mean K_n, n={n}"), s.mean, exact, 3.0 * s.standard_error()));
    }
    Ok((reps, checks))
}

/// Mean conditional variance of `K(e^10)` against `log 2 / μ`, within 5%.
fn variance_log2(spec: &DistributionSpec, opts: &Options) -> Result<(u64, Vec<Check>)> {
    let mu = spec.moments()?.mu;
    if !mu.is_finite() {
        return Err(Error::InvalidArgument(format!("suite variance-log2 needs a finite mean, {spec} has none")));
    }
    let reps = opts.replicates.unwrap_or(10_000);
    let t = 10f64.exp();
    let plan = ExperimentPlan::new(spec.clone(), Target::ConditionalVariance, Size::Time(t), reps, opts.seed);
    let s = mc::run_experiment(&plan, opts.threads)?;
    let target = std::f64::consts::LN_2 / mu;
    Ok((reps, vec![Check::new("mean Var(K(e^10) | P)", s.mean, target, 0.05 * target)]))
}

/// `E(N(5) - M(5))^2` against `∫_{[0,5]} F(5-y)(1-F(5-y)) dU(y)`, where for
/// `ξ ~ exponential(θ)` the renewal measure is `δ_0 + θ dy`.
fn shot_noise(spec: &DistributionSpec, opts: &Options) -> Result<(u64, Vec<Check>)> {
    let theta = beta_theta(spec, Suite::ShotNoise)?;
    let x = 5.0;
    let reps = opts.replicates.unwrap_or(100_000);
    let values = run_replicates(opts.seed, reps, opts.threads, |rng, _| {
        let path = WalkPath::generate(spec, x, 0.0, processes::DEFAULT_EPS, rng)?;
        Ok((path.n_count(x) as f64 - path.m_shot(x, spec)).powi(2))
    })?;
    let sq: Welford = values.into_iter().collect();
    let h = |z: f64| {
        let f = spec.eta_cdf(z);
        f * (1.0 - f)
    };
    let target = h(x) + theta * quadrature::integrate(h, 0.0, x, Tolerance::abs(1e-12))?;
    Ok((reps, vec![Check::new("E(N(5) - M(5))^2", sq.mean(), target, 3.0 * sq.standard_error())]))
}

/// Pathwise `N ≤ ρ`, the lower sandwich bound, and `K + L = I`.
fn invariants(spec: &DistributionSpec, opts: &Options) -> Result<(u64, Vec<Check>)> {
    let reps = opts.replicates.unwrap_or(100_000);
    let n = opts.n.unwrap_or(1_000_000);
    let counts = run_replicates(opts.seed, reps, opts.threads, |rng, i| {
        let x = 1.0 + (i % 40) as f64;
        let path = WalkPath::generate(spec, x, 0.0, processes::DEFAULT_EPS, rng)?;
        let (rho, count) = (path.rho(x), path.n_count(x));
        let ordering = u64::from(count > rho);
        let sandwich = [0.1, 0.5, 0.9]
            .iter()
            .filter(|&&f| path.rho(x - f * x) as i64 - path.eta_exceedances(rho, f * x) as i64 > count as i64)
            .count() as u64;
        let occ = processes::simulate_occupancy_fixed(spec, n, rng)?;
        let bookkeeping = u64::from(occ.occupied + occ.empty != occ.last_occupied);
        Ok([ordering, sandwich, bookkeeping])
    })?;
    let total = |j: usize| counts.iter().map(|c| c[j]).sum::<u64>() as f64;
    Ok((
        reps,
        vec![
            Check::new("violations of N(x) ≤ ρ(x)", total(0), 0.0, 0.0),
            Check::new("violations of the sandwich lower bound", total(1), 0.0, 0.0),
            Check::new("violations of K + L = I", total(2), 0.0, 0.0),
        ],
    ))
}

/// CSV bytes of one plan under 1, 4 and all threads; reports the number of
/// runs that differ from the single-threaded one.
fn determinism(spec: &DistributionSpec, opts: &Options) -> Result<(u64, Vec<Check>)> {
    let reps = opts.replicates.unwrap_or(10_000);
    let n = opts.n.unwrap_or(1_000_000);
    let plan = ExperimentPlan::new(spec.clone(), Target::KN, Size::Balls(n), reps, opts.seed);
    let max = std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1);
    let mut outputs = Vec::new();
    for threads in [1, 4, max] {
        let mut buf = Vec::new();
        mc::write_samples_csv(&mc::run_experiment(&plan, Some(threads))?, &mut buf)?;
        outputs.push(buf);
    }
    let differing = outputs.iter().filter(|o| **o != outputs[0]).count() as f64;
    Ok((reps, vec![Check::new(format!("runs differing from 1 thread (threads 1, 4, {max})"), differing, 0.0, 0.0)]))
}
