//! Laws of the stick-breaking fraction `W` and of the derived variables
//! `ξ = |log W|` and `η = |log(1 - W)|`.
//!
//! Every family is sampled by inversion of a single uniform, and sampling
//! happens in the log domain: a [`StickDraw`] carries `ξ` and `η` computed
//! without forming `1 - W` in floating point, so laws such as
//! `paretolog:0.5` (where `W` routinely underflows) or `example:0.3` (where
//! `1 - W` does) are represented faithfully.

mod table;
mod tail;

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

pub use table::InverseCdfTable;
pub use tail::{classify, Regime, SlowlyVarying, TailIndex, TailProfile};

/// Absolute tolerance for moment and survival integrals.
pub const QUADRATURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `W ~ beta(θ, 1)`, so `-log W` is exponential with rate `θ`.
    BetaThetaOne { theta: f64 },
    /// `P{W > x} = 1 / (1 + |log(1 - x)|^γ)` with `γ ∈ (0, 1/2)`.
    ExampleGamma { gamma: f64 },
    /// `P{ξ > x} = min(1, x^{-α})`.
    ParetoLogTail { alpha: f64 },
    /// `P{ξ > x} = min(1, x^{-2})`, declared with truncated second moment `1 + 2 ln x`.
    TruncatedSecondMomentTail,
    UserTable(InverseCdfTable),
}

/// One realisation of `W` with its two logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StickDraw {
    pub w: f64,
    /// `ξ = -log W`
    pub xi: f64,
    /// `η = -log(1 - W)`
    pub eta: f64,
}

impl StickDraw {
    /// `1 - W`, accurate for `W` near one.
    pub fn one_minus_w(&self) -> f64 {
        (-self.eta).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    /// `E|log W|`
    pub mu: f64,
    /// `Var log W`
    pub sigma2: f64,
    /// `E|log(1 - W)|`
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec {
    family: Family,
    tail: TailProfile,
}

/// `t ↦ -log(1 - e^{-t})`. It maps `ξ` to `η` and back.
pub fn complement_log(t: f64) -> f64 {
    if t <= 0.0 {
        f64::INFINITY
    } else if t < std::f64::consts::LN_2 {
        -(-(-t).exp_m1()).ln()
    } else {
        -(-(-t).exp()).ln_1p()
    }
}

// A positive quantity that underflows is rounded up to the least subnormal.
fn positive(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        f64::from_bits(1)
    }
}

impl DistributionSpec {
    pub fn beta(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidLaw(format!("beta parameter must be positive, got {theta}")));
        }
        let tail = TailProfile::new(TailIndex::Light, None, true, true)?;
        Ok(Self {
            family: Family::BetaThetaOne { theta },
            tail,
        })
    }

    pub fn example_gamma(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 0.5) {
            return Err(Error::InvalidLaw(format!("example law needs γ in (0, 1/2), got {gamma}")));
        }
        let tail = TailProfile::new(TailIndex::Light, None, true, false)?;
        Ok(Self {
            family: Family::ExampleGamma { gamma },
            tail,
        })
    }

    pub fn pareto_log(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidLaw(format!(
                "log-Pareto index must be positive and finite, got {alpha}"
            )));
        }
        let tail = TailProfile::new(
            TailIndex::Regular(alpha),
            Some(SlowlyVarying::Constant(1.0)),
            alpha > 2.0,
            true,
        )?;
        Ok(Self {
            family: Family::ParetoLogTail { alpha },
            tail,
        })
    }

    pub fn truncated_second_moment() -> Self {
        let tail = TailProfile::new(
            TailIndex::Regular(2.0),
            Some(SlowlyVarying::TruncatedSecondMoment {
                offset: 1.0,
                slope: 2.0,
            }),
            false,
            true,
        )
        .expect("static profile is consistent");
        Self {
            family: Family::TruncatedSecondMomentTail,
            tail,
        }
    }

    /// Tables have bounded `ξ` and `η`, so their profile follows from the support.
    pub fn table(table: InverseCdfTable) -> Self {
        let tail = TailProfile::new(TailIndex::Light, None, true, true)
            .expect("static profile is consistent");
        Self {
            family: Family::UserTable(table),
            tail,
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn tail(&self) -> &TailProfile {
        &self.tail
    }

    pub fn classify_regime(&self) -> Result<Regime> {
        classify(&self.tail)
    }

    /// Transforms a uniform `u ∈ (0, 1)` into a draw of `W`.
    pub fn draw_from_uniform(&self, u: f64) -> StickDraw {
        let (xi, eta) = match &self.family {
            Family::BetaThetaOne { theta } => {
                let log_w = u.ln() / theta;
                (-log_w, -(-log_w.exp_m1()).ln())
            }
            Family::ExampleGamma { gamma } => {
                // u plays the role of the survival level P{W > w}.
                let eta = (1.0 / u - 1.0).powf(1.0 / gamma);
                (complement_log(eta), eta)
            }
            Family::ParetoLogTail { alpha } => {
                let xi = u.powf(-1.0 / alpha);
                (xi, complement_log(xi))
            }
            Family::TruncatedSecondMomentTail => {
                let xi = u.powf(-0.5);
                (xi, complement_log(xi))
            }
            Family::UserTable(t) => {
                let w = t.quantile(u);
                (-w.ln(), -(-w).ln_1p())
            }
        };
        let xi = positive(xi);
        let eta = positive(eta);
        StickDraw {
            w: (-xi).exp(),
            xi,
            eta,
        }
    }

    /// Log-domain draw used by all simulations.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> StickDraw {
        loop {
            let u: f64 = rng.sample(Open01);
            let d = self.draw_from_uniform(u);
            if d.xi.is_finite() && d.eta.is_finite() {
                return d;
            }
        }
    }

    /// A sample of `W` itself, retried until it is representable inside `(0, 1)`.
    pub fn sample_w<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let d = self.draw(rng);
            if d.w > 0.0 && d.w < 1.0 {
                return d.w;
            }
        }
    }

    /// `P{|log W| > x}`
    pub fn survival_xi(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match &self.family {
            Family::BetaThetaOne { theta } => (-theta * x).exp(),
            Family::ExampleGamma { gamma } => {
                let l = complement_log(x);
                1.0 / (1.0 + l.powf(-gamma))
            }
            Family::ParetoLogTail { alpha } => pareto_survival(x, *alpha),
            Family::TruncatedSecondMomentTail => pareto_survival(x, 2.0),
            Family::UserTable(t) => t.cdf((-x).exp()),
        }
    }

    /// `P{|log(1 - W)| > x}`
    pub fn survival_eta(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match &self.family {
            Family::BetaThetaOne { theta } => -(theta * (-(-x).exp()).ln_1p()).exp_m1(),
            Family::ExampleGamma { gamma } => 1.0 / (1.0 + x.powf(*gamma)),
            Family::ParetoLogTail { .. } | Family::TruncatedSecondMomentTail => {
                // η > x  ⟺  ξ < complement_log(x); ξ is continuous.
                1.0 - self.survival_xi(complement_log(x))
            }
            Family::UserTable(t) => 1.0 - t.cdf(-(-x).exp_m1()),
        }
    }

    /// `F(x) = P{η ≤ x}`
    pub fn eta_cdf(&self, x: f64) -> f64 {
        1.0 - self.survival_eta(x)
    }

    /// `inf{x ≥ 0 : P{ξ > x} < p}` for `p ∈ (0, 1]`, the right-continuous
    /// generalised inverse of the survival function.
    pub fn xi_survival_inverse(&self, p: f64) -> f64 {
        if p > 1.0 {
            return 0.0;
        }
        match &self.family {
            Family::BetaThetaOne { theta } => -p.ln() / theta,
            Family::ParetoLogTail { alpha } => p.powf(-1.0 / alpha),
            Family::TruncatedSecondMomentTail => p.powf(-0.5),
            _ => {
                let s = |x: f64| self.survival_xi(x);
                let mut hi = 1.0;
                while s(hi) >= p {
                    hi *= 2.0;
                    if hi > 1e300 {
                        return f64::INFINITY;
                    }
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if s(mid) < p {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        }
    }

    /// The level `y` at which `P{η > y} = s`, for `s ∈ (0, 1]`.
    pub fn eta_tail_quantile(&self, s: f64) -> f64 {
        match &self.family {
            Family::BetaThetaOne { theta } => -(-((-s).ln_1p() / theta).exp_m1()).ln(),
            Family::ExampleGamma { gamma } => (1.0 / s - 1.0).powf(1.0 / gamma),
            Family::ParetoLogTail { alpha } => complement_log((1.0 - s).powf(-1.0 / alpha)),
            Family::TruncatedSecondMomentTail => complement_log((1.0 - s).powf(-0.5)),
            Family::UserTable(t) => -(-t.quantile(1.0 - s)).ln_1p(),
        }
    }

    /// `μ, σ², ν`, in closed form where the family has one.
    pub fn moments(&self) -> Result<MomentSet> {
        match &self.family {
            Family::BetaThetaOne { theta } => Ok(MomentSet {
                mu: 1.0 / theta,
                sigma2: 1.0 / (theta * theta),
                nu: digamma(theta + 1.0) - digamma(1.0),
            }),
            Family::ParetoLogTail { alpha } => {
                let a = *alpha;
                let mu = if a > 1.0 { a / (a - 1.0) } else { f64::INFINITY };
                let sigma2 = if a > 2.0 {
                    a / ((a - 1.0) * (a - 1.0) * (a - 2.0))
                } else {
                    f64::INFINITY
                };
                Ok(MomentSet {
                    mu,
                    sigma2,
                    nu: self.nu_by_quadrature()?,
                })
            }
            Family::TruncatedSecondMomentTail => Ok(MomentSet {
                mu: 2.0,
                sigma2: f64::INFINITY,
                nu: self.nu_by_quadrature()?,
            }),
            Family::ExampleGamma { .. } | Family::UserTable(_) => self.moments_by_quadrature(),
        }
    }

    /// Moments from quadrature of the survival functions; infinite entries
    /// come from the tail profile and are never integrated.
    pub fn moments_by_quadrature(&self) -> Result<MomentSet> {
        let mu = if self.tail.mean_finite() {
            integrate_tail(|x| self.survival_xi(x))?
        } else {
            f64::INFINITY
        };
        let sigma2 = if self.tail.second_moment_finite {
            let second = integrate_tail(|x| 2.0 * x * self.survival_xi(x))?;
            (second - mu * mu).max(0.0)
        } else {
            f64::INFINITY
        };
        Ok(MomentSet {
            mu,
            sigma2,
            nu: self.nu_by_quadrature()?,
        })
    }

    fn nu_by_quadrature(&self) -> Result<f64> {
        if self.tail.nu_finite {
            integrate_tail(|x| self.survival_eta(x))
        } else {
            Ok(f64::INFINITY)
        }
    }

    /// `∫_0^x P{|log(1 - W)| > y} dy`
    pub fn integrated_survival_eta(&self, x: f64) -> Result<f64> {
        quadrature::log_axis(|y| self.survival_eta(y), x, Tolerance::abs(QUADRATURE_TOL))
    }

    /// `∫_0^x P{|log W| > y} dy`
    pub fn integrated_survival_xi(&self, x: f64) -> Result<f64> {
        quadrature::log_axis(|y| self.survival_xi(y), x, Tolerance::abs(QUADRATURE_TOL))
    }
}

fn pareto_survival(x: f64, alpha: f64) -> f64 {
    if x <= 1.0 {
        1.0
    } else {
        x.powf(-alpha)
    }
}

fn integrate_tail<H: Fn(f64) -> f64>(h: H) -> Result<f64> {
    let cap = quadrature::tail_cap(&h, QUADRATURE_TOL)?;
    quadrature::log_axis(&h, cap, Tolerance::abs(QUADRATURE_TOL))
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::BetaThetaOne { theta } => write!(f, "beta:{theta}"),
            Family::ExampleGamma { gamma } => write!(f, "example:{gamma}"),
            Family::ParetoLogTail { alpha } => write!(f, "paretolog:{alpha}"),
            Family::TruncatedSecondMomentTail => f.write_str("tsm2"),
            Family::UserTable(t) => write!(f, "table:{}", t.source().unwrap_or("<inline>")),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    /// Grammar: `beta:<theta>`, `example:<gamma>`, `paretolog:<alpha>`, `tsm2`, `table:<path>`.
    fn from_str(s: &str) -> Result<Self> {
        let syntax = |reason: &str| Error::LawSyntax {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let number = |a: Option<&str>| -> Result<f64> {
            let a = a.ok_or_else(|| syntax("missing parameter"))?;
            a.trim().parse::<f64>().map_err(|_| syntax("parameter is not a number"))
        };
        match name.trim() {
            "beta" => Self::beta(number(arg)?),
            "example" => Self::example_gamma(number(arg)?),
            "paretolog" => Self::pareto_log(number(arg)?),
            "tsm2" if arg.is_none() => Ok(Self::truncated_second_moment()),
            "tsm2" => Err(syntax("tsm2 takes no parameter")),
            "table" => {
                let path = arg.filter(|p| !p.is_empty()).ok_or_else(|| syntax("missing path"))?;
                Ok(Self::table(InverseCdfTable::from_path(path)?))
            }
            _ => Err(syntax("unknown family")),
        }
    }
}

impl Serialize for DistributionSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DistributionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests;
