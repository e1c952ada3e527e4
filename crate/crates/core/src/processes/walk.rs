use rand::Rng;
use serde::{Deserialize, Serialize};

use super::StickBreakingStream;
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};

/// One path of the sieve walk: `S_0 = 0, S_1, …` and the perturbations
/// `η_1, η_2, …`, so that `T_k = S_{k-1} + η_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkPath {
    partial_sums: Vec<f64>,
    perturbations: Vec<f64>,
}

impl WalkPath {
    /// Generates steps until `S_k > x` and `r · e^{-S_k} ≤ eps`. The first
    /// condition fixes `ρ`, `N` and `M` at `x`; the second bounds the dropped
    /// tail of `R(r)` by `eps`. Pass `r = 0` when `R` is not needed.
    pub fn generate<R: Rng + ?Sized>(
        spec: &DistributionSpec,
        x: f64,
        r: f64,
        eps: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::InvalidArgument(format!("walk level must be finite and non-negative, got {x}")));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("R scale must be finite and non-negative, got {r}")));
        }
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        let log_budget = if r > 0.0 { r.ln() - eps.ln() } else { f64::NEG_INFINITY };
        let mut stream = StickBreakingStream::new(spec);
        let mut partial_sums = vec![0.0];
        let mut perturbations = Vec::new();
        while stream.log_q() <= x || stream.log_q() < log_budget {
            let b = stream.next_box(rng);
            perturbations.push(b.draw.eta);
            partial_sums.push(b.log_q);
        }
        Ok(Self {
            partial_sums,
            perturbations,
        })
    }

    /// `S_0, S_1, …, S_m`
    pub fn partial_sums(&self) -> &[f64] {
        &self.partial_sums
    }

    /// `η_1, …, η_m`
    pub fn perturbations(&self) -> &[f64] {
        &self.perturbations
    }

    /// `T_1, …, T_m`
    pub fn perturbed(&self) -> impl Iterator<Item = f64> + '_ {
        self.partial_sums.iter().zip(&self.perturbations).map(|(s, e)| s + e)
    }

    /// Largest level the path resolves exactly.
    pub fn horizon(&self) -> f64 {
        *self.partial_sums.last().expect("path holds S_0")
    }

    fn check_level(&self, x: f64) {
        debug_assert!(x < self.horizon(), "level {x} beyond generated horizon {}", self.horizon());
    }

    /// `ρ(x) = #{k ≥ 0 : S_k ≤ x}`
    pub fn rho(&self, x: f64) -> u64 {
        self.check_level(x);
        self.partial_sums.partition_point(|&s| s <= x) as u64
    }

    /// `N(x) = #{k ≥ 1 : T_k ≤ x}`
    pub fn n_count(&self, x: f64) -> u64 {
        self.check_level(x);
        self.perturbed().filter(|&t| t <= x).count() as u64
    }

    /// `M(x) = Σ_{k < ρ(x)} F(x - S_k)` with `F` the distribution function of `η`.
    pub fn m_shot(&self, x: f64, spec: &DistributionSpec) -> f64 {
        let rho = self.rho(x) as usize;
        self.partial_sums[..rho].iter().map(|&s| spec.eta_cdf(x - s)).sum()
    }

    /// `Σ_{j ≤ count} 1{η_j > y}`
    pub fn eta_exceedances(&self, count: u64, y: f64) -> u64 {
        self.perturbations
            .iter()
            .take(count as usize)
            .filter(|&&e| e > y)
            .count() as u64
    }

    /// `R(r) = Σ_k 1 - exp(-r e^{-T_k})` over the generated steps.
    pub fn r_weighted(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        let log_r = r.ln();
        self.perturbed().map(|t| -(-(log_r - t).exp()).exp_m1()).sum()
    }
}

/// `ρ(x)`, `N(x)`, `M(x)` and `R(r_scale)` read off one walk path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathFunctionals {
    pub x: f64,
    pub rho: u64,
    pub n_count: u64,
    pub m_shot: f64,
    pub r_weighted: f64,
    pub r_scale: f64,
}

pub fn walk_functionals<R: Rng + ?Sized>(
    spec: &DistributionSpec,
    x: f64,
    rng: &mut R,
    r_scale: f64,
    eps: f64,
) -> Result<PathFunctionals> {
    let path = WalkPath::generate(spec, x, r_scale, eps, rng)?;
    Ok(PathFunctionals {
        x,
        rho: path.rho(x),
        n_count: path.n_count(x),
        m_shot: path.m_shot(x, spec),
        r_weighted: path.r_weighted(r_scale),
        r_scale,
    })
}

/// `R(x)` on a fresh path, with the dropped tail bounded by
/// `Σ_{j≥k} x e^{-T_j} = x Q_{k-1} ≤ eps`.
pub fn weighted_sum_r<R: Rng + ?Sized>(
    spec: &DistributionSpec,
    x: f64,
    rng: &mut R,
    eps: f64,
) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let path = WalkPath::generate(spec, 0.0, x, eps, rng)?;
    Ok(path.r_weighted(x))
}
