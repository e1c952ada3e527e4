use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regular-variation index of `P{|log W| > x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailIndex {
    /// Tail lighter than any power (exponential decay or bounded support).
    Light,
    /// `P{|log W| > x} ~ x^{-α} L(x)`.
    Regular(f64),
}

/// Declared slowly varying factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SlowlyVarying {
    /// `L(x) ≡ c`, multiplying the survival tail.
    Constant(f64),
    /// `L(x) = offset + slope·ln x`, declared as the truncated second
    /// moment `E min(|log W|, x)^2` at the `α = 2` boundary.
    TruncatedSecondMoment { offset: f64, slope: f64 },
}

impl SlowlyVarying {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            SlowlyVarying::Constant(c) => c,
            SlowlyVarying::TruncatedSecondMoment { offset, slope } => offset + slope * x.ln(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailProfile {
    pub alpha: TailIndex,
    pub slowly_varying: Option<SlowlyVarying>,
    pub second_moment_finite: bool,
    pub nu_finite: bool,
}

impl TailProfile {
    pub fn new(
        alpha: TailIndex,
        slowly_varying: Option<SlowlyVarying>,
        second_moment_finite: bool,
        nu_finite: bool,
    ) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidLaw(format!("inconsistent tail profile: {msg}")));
        match alpha {
            TailIndex::Light => {
                if !second_moment_finite {
                    return bad("light tail implies a finite second moment");
                }
            }
            TailIndex::Regular(a) => {
                if !(a.is_finite() && a >= 0.0) {
                    return bad("tail index must be finite and non-negative");
                }
                if a > 2.0 && !second_moment_finite {
                    return bad("index above 2 implies a finite second moment");
                }
                if a < 2.0 && second_moment_finite {
                    return bad("index below 2 implies an infinite second moment");
                }
                if slowly_varying.is_none() {
                    return bad("a regularly varying tail needs a declared slowly varying factor");
                }
            }
        }
        if let Some(SlowlyVarying::TruncatedSecondMoment { slope, .. }) = slowly_varying {
            if alpha != TailIndex::Regular(2.0) || second_moment_finite {
                return bad("truncated second moment declarations belong to the α = 2 boundary");
            }
            if !(slope > 0.0) {
                return bad("truncated second moment must grow");
            }
        }
        if let Some(SlowlyVarying::Constant(c)) = slowly_varying {
            if !(c > 0.0 && c.is_finite()) {
                return bad("constant slowly varying factor must be positive");
            }
        }
        Ok(Self {
            alpha,
            slowly_varying,
            second_moment_finite,
            nu_finite,
        })
    }

    pub fn mean_finite(&self) -> bool {
        match self.alpha {
            TailIndex::Light => true,
            TailIndex::Regular(a) => a > 1.0 || self.second_moment_finite,
        }
    }
}

/// The five convergence types for `K_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// Finite variance of `log W`: normal limit.
    A,
    /// Infinite variance, slowly varying truncated second moment: normal limit.
    B,
    /// Stable domain with `α ∈ (1, 2)`.
    C,
    /// Stable domain with `α = 1`.
    D,
    /// `α ∈ [0, 1)`: Mittag-Leffler limit without centering.
    E,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::A => "A",
            Regime::B => "B",
            Regime::C => "C",
            Regime::D => "D",
            Regime::E => "E",
        };
        f.write_str(s)
    }
}

/// Reads the regime off declared metadata. Nothing is estimated.
pub fn classify(tail: &TailProfile) -> Result<Regime> {
    if tail.second_moment_finite {
        return Ok(Regime::A);
    }
    let TailIndex::Regular(alpha) = tail.alpha else {
        return Err(Error::Unclassifiable("light tail with infinite variance".into()));
    };
    match tail.slowly_varying {
        Some(SlowlyVarying::TruncatedSecondMoment { .. }) if alpha == 2.0 => Ok(Regime::B),
        _ if alpha == 2.0 => Err(Error::Unclassifiable(
            "α = 2 without a truncated second moment declaration".into(),
        )),
        _ if alpha > 1.0 && alpha < 2.0 => Ok(Regime::C),
        _ if alpha == 1.0 => Ok(Regime::D),
        _ if (0.0..1.0).contains(&alpha) => Ok(Regime::E),
        _ => Err(Error::Unclassifiable(format!("index {alpha}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regular(alpha: f64) -> TailProfile {
        TailProfile::new(
            TailIndex::Regular(alpha),
            Some(SlowlyVarying::Constant(1.0)),
            alpha > 2.0,
            true,
        )
        .unwrap()
    }

    #[test]
    fn stable_ranges() {
        assert_eq!(classify(&regular(1.5)).unwrap(), Regime::C);
        assert_eq!(classify(&regular(1.0)).unwrap(), Regime::D);
        assert_eq!(classify(&regular(0.5)).unwrap(), Regime::E);
        assert_eq!(classify(&regular(0.0)).unwrap(), Regime::E);
        assert_eq!(classify(&regular(3.0)).unwrap(), Regime::A);
    }

    #[test]
    fn boundary_needs_declaration() {
        assert!(matches!(classify(&regular(2.0)), Err(Error::Unclassifiable(_))));
        let declared = TailProfile::new(
            TailIndex::Regular(2.0),
            Some(SlowlyVarying::TruncatedSecondMoment { offset: 1.0, slope: 2.0 }),
            false,
            true,
        )
        .unwrap();
        assert_eq!(classify(&declared).unwrap(), Regime::B);
    }

    #[test]
    fn inconsistent_profiles_rejected() {
        assert!(TailProfile::new(TailIndex::Light, None, false, true).is_err());
        assert!(TailProfile::new(TailIndex::Regular(3.0), Some(SlowlyVarying::Constant(1.0)), false, true).is_err());
        assert!(TailProfile::new(TailIndex::Regular(1.5), Some(SlowlyVarying::Constant(1.0)), true, true).is_err());
        assert!(TailProfile::new(TailIndex::Regular(1.5), None, false, true).is_err());
        assert!(TailProfile::new(
            TailIndex::Regular(1.5),
            Some(SlowlyVarying::TruncatedSecondMoment { offset: 1.0, slope: 2.0 }),
            false,
            true
        )
        .is_err());
    }
}
