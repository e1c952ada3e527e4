//! Centering and scaling constants for `(K_n - b_n) / a_n` and the limit laws
//! they lead to.
//!
//! With `L = log n`, the centering is always a mixture
//! `b_n = ∫_0^L g(L - y) dF(y)` of a kernel `g` against the law `F` of `η`,
//! and the scaling is `a_n = f(L)`. Both depend on the regime the tail of
//! `ξ` falls into.

mod law;

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, Family, SlowlyVarying, TailIndex};
use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::Regime;

pub use law::{gil_pelaez_cdf, ml_moment, LimitLaw};

/// Relative agreement demanded between the two routes to `b_n`.
pub const CENTERING_CROSS_CHECK: f64 = 1e-6;

/// Largest acceptable `|n L(c) / c^α - 1|` from [`solve_c`].
pub const SOLVER_RESIDUAL: f64 = 1e-8;

/// The kernel `g` entering `b_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GKernel {
    /// `g(x) = x / μ`
    Linear { mu: f64 },
    /// `g(x) = x / m(r(x / m(x)))`
    OneStable,
    /// `g ≡ 0`
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub regime: Regime,
    pub n: u64,
    pub a: f64,
    pub b: f64,
    pub g_kernel: GKernel,
    /// `c_{⌊log n⌋}` in regimes B and C.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_n: Option<f64>,
    /// `m(log n)` in regime D.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// `r(log n / m(log n))` in regime D.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

impl Normalization {
    /// `(k - b_n) / a_n`
    pub fn apply(&self, k: f64) -> f64 {
        (k - self.b) / self.a
    }

    pub fn limit_law(&self, spec: &DistributionSpec) -> LimitLaw {
        limit_law(spec, self.regime)
    }
}

fn log_n(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("normalization needs n ≥ 2, got {n}")));
    }
    Ok((n as f64).ln())
}

/// `⌊log n⌋`, clamped below at 1 so that `n = 2` still has an index.
pub fn floor_log(n: u64) -> Result<u64> {
    Ok((log_n(n)?.floor() as u64).max(1))
}

fn tail_alpha(spec: &DistributionSpec) -> Result<f64> {
    match spec.tail().alpha {
        TailIndex::Regular(a) => Ok(a),
        TailIndex::Light => Err(Error::Unclassifiable(format!("{spec} has a light tail"))),
    }
}

fn slowly_varying(spec: &DistributionSpec) -> Result<SlowlyVarying> {
    spec.tail()
        .slowly_varying
        .ok_or_else(|| Error::Unclassifiable(format!("{spec} declares no slowly varying factor")))
}

fn expect_regime(spec: &DistributionSpec, allowed: &[Regime]) -> Result<Regime> {
    let regime = spec.classify_regime()?;
    if allowed.contains(&regime) {
        Ok(regime)
    } else {
        Err(Error::RegimeMismatch {
            expected: allowed.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("/"),
            found: regime.to_string(),
        })
    }
}

fn finite_mu(spec: &DistributionSpec) -> Result<f64> {
    let mu = spec.moments()?.mu;
    if mu.is_finite() {
        Ok(mu)
    } else {
        Err(Error::RegimeMismatch {
            expected: "finite mean".into(),
            found: format!("{spec} has infinite mean"),
        })
    }
}

/// `∫_0^L h(L - y) dF(y)` over the law of `η`, computed as
/// `∫_0^{-ln S_η(L)} h(L - y(e^{-w})) e^{-w} dw` where `S_η(y(s)) = s`.
pub fn eta_mixture<H: Fn(f64) -> f64>(spec: &DistributionSpec, h: H, level: f64) -> Result<f64> {
    if level <= 0.0 {
        return Ok(0.0);
    }
    let tail = spec.survival_eta(level);
    // Past w = 60 the integrand is below level·e^{-60}.
    let upper = if tail > 0.0 { (-tail.ln()).min(60.0) } else { 60.0 };
    quadrature::integrate(
        |w| {
            let y = spec.eta_tail_quantile((-w).exp()).clamp(0.0, level);
            h(level - y) * (-w).exp()
        },
        0.0,
        upper,
        Tolerance::abs(1e-12),
    )
}

/// `μ^{-1} (L - ∫_0^L P{η > x} dx)`
pub fn centering_reduced(spec: &DistributionSpec, level: f64) -> Result<f64> {
    let mu = finite_mu(spec)?;
    Ok((level - spec.integrated_survival_eta(level)?) / mu)
}

/// `b_n` for the regime of `spec`. In regimes A to C the closed reduction and
/// the mixture integral are both evaluated and must agree.
pub fn centering_b(spec: &DistributionSpec, n: u64) -> Result<f64> {
    let level = log_n(n)?;
    match spec.classify_regime()? {
        Regime::A | Regime::B | Regime::C => {
            let mu = finite_mu(spec)?;
            let reduced = centering_reduced(spec, level)?;
            let mixed = eta_mixture(spec, |x| x / mu, level)?;
            let scale = reduced.abs().max(1.0);
            if (reduced - mixed).abs() > CENTERING_CROSS_CHECK * scale {
                return Err(Error::QuadratureFailure(format!(
                    "centering routes disagree for {spec} at n={n}: {reduced} vs {mixed}"
                )));
            }
            Ok(reduced)
        }
        Regime::D => eta_mixture(spec, |x| g_one_stable(spec, x), level),
        Regime::E => Ok(0.0),
    }
}

/// `a_n` for the regime of `spec`.
pub fn scaling_a(spec: &DistributionSpec, n: u64) -> Result<f64> {
    Ok(normalization(spec, n)?.a)
}

/// Root `c ≥ 1` of `n L(c) / c^α = 1`, with `α = 2` in regime B.
pub fn solve_c(spec: &DistributionSpec, n: u64) -> Result<f64> {
    expect_regime(spec, &[Regime::B, Regime::C])?;
    let alpha = tail_alpha(spec)?;
    let sv = slowly_varying(spec)?;
    if n == 0 {
        return Err(Error::InvalidArgument("c_n needs n ≥ 1".into()));
    }
    let nf = n as f64;
    let residual = |c: f64| nf * sv.eval(c) / c.powf(alpha) - 1.0;
    let check = |c: f64| {
        let res = residual(c);
        if res.abs() <= SOLVER_RESIDUAL {
            Ok(c)
        } else {
            Err(Error::SolverFailure(format!("c_{n} for {spec}: residual {res:e} at {c}")))
        }
    };
    let mut lo = 1.0;
    if residual(lo) <= 0.0 {
        return check(lo);
    }
    let mut hi = 2.0;
    while residual(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::SolverFailure(format!("no bracket for c_{n} of {spec}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = if residual(lo).abs() < residual(hi).abs() { lo } else { hi };
    check(c)
}

/// `m(x) = ∫_0^x P{ξ > y} dy`
pub fn truncated_mean_m(spec: &DistributionSpec, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let power = |alpha: f64| {
        if x <= 1.0 {
            x
        } else if alpha == 1.0 {
            1.0 + x.ln()
        } else {
            1.0 + (1.0 - x.powf(1.0 - alpha)) / (alpha - 1.0)
        }
    };
    match spec.family() {
        Family::ParetoLogTail { alpha } => Ok(power(*alpha)),
        Family::TruncatedSecondMomentTail => Ok(power(2.0)),
        Family::BetaThetaOne { theta } => Ok(-(-theta * x).exp_m1() / theta),
        _ => spec.integrated_survival_xi(x),
    }
}

/// `r(y) = inf{x : 1 / P{ξ > x} > y}`, so that `y P{ξ > r(y)} → 1`.
pub fn quantile_r(spec: &DistributionSpec, y: f64) -> f64 {
    if y < 1.0 {
        0.0
    } else {
        spec.xi_survival_inverse(1.0 / y)
    }
}

/// `g(x) = x / m(r(x / m(x)))`, taken as 0 at the origin.
pub fn g_one_stable(spec: &DistributionSpec, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let m = |z: f64| truncated_mean_m(spec, z).unwrap_or(f64::NAN);
    x / m(quantile_r(spec, x / m(x)))
}

/// `f(x) = r(x / m(x)) / m(x)` in regime D.
pub fn f_one_stable(spec: &DistributionSpec, x: f64) -> Result<f64> {
    let m = truncated_mean_m(spec, x)?;
    Ok(quantile_r(spec, x / m) / m)
}

/// The kernel `g` for a regime.
pub fn g_kernel(spec: &DistributionSpec) -> Result<GKernel> {
    Ok(match spec.classify_regime()? {
        Regime::A | Regime::B | Regime::C => GKernel::Linear { mu: finite_mu(spec)? },
        Regime::D => GKernel::OneStable,
        Regime::E => GKernel::Zero,
    })
}

impl GKernel {
    pub fn eval(&self, spec: &DistributionSpec, x: f64) -> f64 {
        match *self {
            GKernel::Linear { mu } => x / mu,
            GKernel::OneStable => g_one_stable(spec, x),
            GKernel::Zero => 0.0,
        }
    }
}

pub fn limit_law(spec: &DistributionSpec, regime: Regime) -> LimitLaw {
    match regime {
        Regime::A | Regime::B => LimitLaw::Normal,
        Regime::C => LimitLaw::StableC(tail_alpha(spec).unwrap_or(f64::NAN)),
        Regime::D => LimitLaw::StableD,
        Regime::E => LimitLaw::MittagLeffler(tail_alpha(spec).unwrap_or(f64::NAN)),
    }
}

/// Regime, `a_n`, `b_n` and the auxiliary constants behind them.
pub fn normalization(spec: &DistributionSpec, n: u64) -> Result<Normalization> {
    let level = log_n(n)?;
    let regime = spec.classify_regime()?;
    let b = centering_b(spec, n)?;
    let g_kernel = g_kernel(spec)?;
    let mut out = Normalization {
        regime,
        n,
        a: f64::NAN,
        b,
        g_kernel,
        c_n: None,
        m: None,
        r: None,
    };
    out.a = match regime {
        Regime::A => {
            let moments = spec.moments()?;
            (moments.sigma2 * level / moments.mu.powi(3)).sqrt()
        }
        Regime::B | Regime::C => {
            let alpha = if regime == Regime::B { 2.0 } else { tail_alpha(spec)? };
            let c = solve_c(spec, floor_log(n)?)?;
            out.c_n = Some(c);
            finite_mu(spec)?.powf(-(alpha + 1.0) / alpha) * c
        }
        Regime::D => {
            let m = truncated_mean_m(spec, level)?;
            let r = quantile_r(spec, level / m);
            out.m = Some(m);
            out.r = Some(r);
            r / m
        }
        Regime::E => {
            let alpha = tail_alpha(spec)?;
            level.powf(alpha) / slowly_varying(spec)?.eval(level)
        }
    };
    if !(out.a > 0.0 && out.a.is_finite()) {
        return Err(Error::SolverFailure(format!("non-positive scaling {} for {spec} at n={n}", out.a)));
    }
    Ok(out)
}
