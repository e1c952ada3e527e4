use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

/// Limit distributions of `(K_n - b_n) / a_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "alpha", rename_all = "snake_case")]
pub enum LimitLaw {
    Normal,
    /// `φ(t) = exp{-|t|^α Γ(1-α)(cos(πα/2) + i sin(πα/2) sgn t)}`, `α ∈ (1, 2)`.
    StableC(f64),
    /// `φ(t) = exp{-|t|(π/2 - i log|t| sgn t)}`
    StableD,
    /// Determined by its moments, see [`ml_moment`].
    MittagLeffler(f64),
}

impl LimitLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LimitLaw::StableC(a) if !(a > 1.0 && a < 2.0) => {
                Err(Error::InvalidArgument(format!("stable index must lie in (1, 2), got {a}")))
            }
            LimitLaw::MittagLeffler(a) if !(0.0..1.0).contains(&a) => {
                Err(Error::InvalidArgument(format!("Mittag-Leffler index must lie in [0, 1), got {a}")))
            }
            _ => Ok(()),
        }
    }

    pub fn characteristic_function(&self, t: f64) -> Result<Complex64> {
        self.validate()?;
        Ok(match *self {
            LimitLaw::Normal => Complex64::new((-0.5 * t * t).exp(), 0.0),
            LimitLaw::StableC(alpha) => {
                if t == 0.0 {
                    return Ok(Complex64::new(1.0, 0.0));
                }
                let angle = FRAC_PI_2 * alpha;
                let exponent = Complex64::new(angle.cos(), angle.sin() * t.signum())
                    * (-t.abs().powf(alpha) * gamma(1.0 - alpha));
                exponent.exp()
            }
            LimitLaw::StableD => {
                if t == 0.0 {
                    return Ok(Complex64::new(1.0, 0.0));
                }
                let a = t.abs();
                Complex64::new(-a * FRAC_PI_2, t * a.ln()).exp()
            }
            LimitLaw::MittagLeffler(_) => {
                return Err(Error::KindMismatch(
                    "the Mittag-Leffler law is evaluated through its moments".into(),
                ))
            }
        })
    }

    /// `|φ(t)|`, used to truncate the inversion integral.
    fn envelope(&self, t: f64) -> f64 {
        match *self {
            LimitLaw::Normal => (-0.5 * t * t).exp(),
            LimitLaw::StableC(alpha) => {
                (-t.abs().powf(alpha) * gamma(1.0 - alpha) * (FRAC_PI_2 * alpha).cos()).exp()
            }
            LimitLaw::StableD => (-t.abs() * FRAC_PI_2).exp(),
            LimitLaw::MittagLeffler(_) => f64::NAN,
        }
    }

    /// Distribution function. Normal uses the error function; the stable
    /// laws go through [`gil_pelaez_cdf`].
    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        match *self {
            LimitLaw::Normal => Ok(0.5 * erfc(-x / SQRT_2)),
            LimitLaw::MittagLeffler(_) => Err(Error::KindMismatch(
                "no distribution function for the Mittag-Leffler law; compare moments".into(),
            )),
            _ => gil_pelaez_cdf(self, x),
        }
    }

    pub fn moment(&self, k: u32) -> Result<f64> {
        match *self {
            LimitLaw::MittagLeffler(alpha) => ml_moment(alpha, k),
            _ => Err(Error::KindMismatch(format!("moments are only tabulated for Mittag-Leffler, not {self:?}"))),
        }
    }
}

/// `E θ^k = k! / (Γ(1-α)^k Γ(1+αk))` for the Mittag-Leffler law of index `α`.
pub fn ml_moment(alpha: f64, k: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("Mittag-Leffler index must lie in [0, 1), got {alpha}")));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let kf = f64::from(k);
    let log = ln_gamma(kf + 1.0) - kf * ln_gamma(1.0 - alpha) - ln_gamma(1.0 + alpha * kf);
    Ok(log.exp())
}

const ENVELOPE_CUT: f64 = 1e-12;

/// `F(x) = 1/2 - (1/π) ∫_0^∞ Im(e^{-itx} φ(t)) / t dt`.
///
/// The range is split at `t = 1`. Below, `t = e^{-s}` turns the `log t`
/// singularity of the 1-stable kernel into an exponentially damped integrand.
/// Above, the integral stops where `|φ(t)| / t < 10^{-12}` and is cut into
/// pieces shorter than one period of the phase.
pub fn gil_pelaez_cdf(law: &LimitLaw, x: f64) -> Result<f64> {
    law.validate()?;
    if let LimitLaw::MittagLeffler(_) = law {
        return Err(Error::KindMismatch("Mittag-Leffler has no characteristic function here".into()));
    }
    if x.is_nan() {
        return Err(Error::InvalidArgument("cdf evaluated at NaN".into()));
    }
    if x.is_infinite() {
        return Ok(if x > 0.0 { 1.0 } else { 0.0 });
    }
    let integrand = |t: f64| -> f64 {
        let phi = law.characteristic_function(t).unwrap_or(Complex64::new(f64::NAN, 0.0));
        (Complex64::from_polar(1.0, -t * x) * phi).im / t
    };
    let tol = Tolerance {
        abs: 1e-11,
        rel: 1e-12,
        max_intervals: 20_000,
    };
    let fail = |e: Error| Error::InversionFailure(format!("{law:?} at x={x}: {e}"));

    // (0, 1] through t = e^{-s}; below e^{-40} the integrand is O(t |x| + t^{α-1}).
    let inner = quadrature::integrate(
        |s| {
            let t = (-s).exp();
            integrand(t) * t
        },
        0.0,
        40.0,
        tol,
    )
    .map_err(fail)?;

    let mut upper = 1.0;
    while law.envelope(upper) / upper >= ENVELOPE_CUT {
        upper *= 1.25;
        if upper > 1e6 {
            return Err(Error::InversionFailure(format!("{law:?}: envelope does not decay")));
        }
    }
    // Phase speed |x| plus the log|t| drift of the 1-stable kernel.
    let speed = x.abs() + upper.ln() + 1.0;
    let pieces = (((upper - 1.0) * speed / PI).ceil() as usize).max(1);
    let width = (upper - 1.0) / pieces as f64;
    let mut outer = 0.0;
    for i in 0..pieces {
        let a = 1.0 + width * i as f64;
        outer += quadrature::integrate(integrand, a, a + width, tol).map_err(fail)?;
    }
    Ok((0.5 - (inner + outer) / PI).clamp(0.0, 1.0))
}
