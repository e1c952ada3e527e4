use rand::Rng;

use super::{Mode, StickBreakingStream};
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")))
    }
}

/// Sums `term(P_k)` over one frequency realisation until `scale · Q_k ≤ eps`.
/// Every term is assumed bounded by `scale · P_k`, so the dropped tail is at
/// most `scale · Q_k`.
fn truncated_series<R, F>(spec: &DistributionSpec, scale: f64, rng: &mut R, eps: f64, term: F) -> f64
where
    R: Rng + ?Sized,
    F: Fn(&super::BoxFrequency) -> f64,
{
    let log_scale = scale.ln();
    let log_eps = eps.ln();
    let mut stream = StickBreakingStream::new(spec);
    let mut sum = 0.0;
    while log_scale - stream.log_q() > log_eps {
        let b = stream.next_box(rng);
        sum += term(&b);
    }
    sum
}

/// `R*_n = E(K_n | (P_k)) = Σ 1 - (1 - P_k)^n` or `R*(t) = Σ 1 - e^{-t P_k}`
/// evaluated on a freshly drawn frequency realisation.
pub fn conditional_mean_r<R: Rng + ?Sized>(
    spec: &DistributionSpec,
    mode: Mode,
    rng: &mut R,
    eps: f64,
) -> Result<f64> {
    check_eps(eps)?;
    match mode {
        Mode::Fixed(n) => {
            if n == 0 {
                return Err(Error::InvalidArgument("sample size must be at least 1".into()));
            }
            let n = n as f64;
            Ok(truncated_series(spec, n, rng, eps, |b| -(n * b.log_miss()).exp_m1()))
        }
        Mode::Poisson(t) => {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidArgument(format!("Poisson time must be non-negative, got {t}")));
            }
            if t == 0.0 {
                return Ok(0.0);
            }
            Ok(truncated_series(spec, t, rng, eps, |b| -(-t * b.frequency()).exp_m1()))
        }
    }
}

/// `Var(K(t) | (P_k)) = Σ e^{-t P_k} - e^{-2 t P_k}` on one frequency realisation.
pub fn conditional_variance<R: Rng + ?Sized>(
    spec: &DistributionSpec,
    t: f64,
    rng: &mut R,
    eps: f64,
) -> Result<f64> {
    check_eps(eps)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("Poisson time must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(truncated_series(spec, t, rng, eps, |b| {
        let a = t * b.frequency();
        -(-a).exp() * (-a).exp_m1()
    }))
}
