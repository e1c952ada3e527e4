use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};

use super::{Mode, OccupancyResult, StickBreakingStream, BINOMIAL_CAP};
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};

fn binomial<R: Rng + ?Sized>(trials: u64, p: f64, rng: &mut R) -> Result<u64> {
    if p >= 1.0 {
        return Ok(trials);
    }
    if p <= 0.0 || trials == 0 {
        return Ok(0);
    }
    let dist = Binomial::new(trials, p)
        .map_err(|e| Error::InvalidArgument(format!("binomial({trials}, {p}): {e}")))?;
    Ok(dist.sample(rng))
}

fn check_size(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    if n > BINOMIAL_CAP {
        return Err(Error::Overflow { n, cap: BINOMIAL_CAP });
    }
    Ok(())
}

/// Exact sample of `(K_n, I_n, L_n)` for `n` balls.
///
/// Balls that pass boxes `1..k-1` land in box `k` with conditional
/// probability `1 - W_k`, so the recursion `B_k ~ Binomial(r_{k-1}, 1 - W_k)`,
/// `r_k = r_{k-1} - B_k` reproduces the joint law of the box counts. It stops
/// at the first `k` with `r_k = 0`; later boxes cannot change `K`, `I` or `L`.
pub fn simulate_occupancy_fixed<R: Rng + ?Sized>(
    spec: &DistributionSpec,
    n: u64,
    rng: &mut R,
) -> Result<OccupancyResult> {
    check_size(n)?;
    let mut stream = StickBreakingStream::new(spec);
    let mut remaining = n;
    let mut occupied = 0;
    let mut empty = 0;
    let mut last = 0;
    while remaining > 0 {
        let b = stream.next_box(rng);
        let hits = binomial(remaining, b.hit_probability(), rng)?;
        if hits > 0 {
            occupied += 1;
            last = b.index;
        } else {
            empty += 1;
        }
        remaining -= hits;
    }
    Ok(OccupancyResult {
        occupied,
        last_occupied: last,
        empty,
        boxes_generated: stream.index(),
        mode: Mode::Fixed(n),
    })
}

/// Poissonised occupancy at time `t`: box `k` receives `Poisson(t P_k)` balls,
/// independently given the frequencies.
///
/// Generation stops before box `k` once `t Q_{k-1} < tail_eps`, which bounds
/// the expected number of occupied boxes left out by `tail_eps`.
pub fn simulate_occupancy_poisson<R: Rng + ?Sized>(
    spec: &DistributionSpec,
    t: f64,
    rng: &mut R,
    tail_eps: f64,
) -> Result<OccupancyResult> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("Poisson time must be positive, got {t}")));
    }
    if !(tail_eps > 0.0) {
        return Err(Error::InvalidArgument(format!("tail_eps must be positive, got {tail_eps}")));
    }
    let log_t = t.ln();
    let log_eps = tail_eps.ln();
    let mut stream = StickBreakingStream::new(spec);
    let mut occupied = 0;
    let mut empty = 0;
    let mut pending_empty = 0;
    let mut last = 0;
    while log_t - stream.log_q() >= log_eps {
        let b = stream.next_box(rng);
        let rate = (log_t - b.neg_log_frequency()).exp();
        let count = if rate > 0.0 {
            let dist = Poisson::new(rate)
                .map_err(|e| Error::InvalidArgument(format!("Poisson({rate}): {e}")))?;
            dist.sample(rng) as u64
        } else {
            0
        };
        if count > 0 {
            occupied += 1;
            last = b.index;
            empty += pending_empty;
            pending_empty = 0;
        } else {
            pending_empty += 1;
        }
    }
    Ok(OccupancyResult {
        occupied,
        last_occupied: last,
        empty,
        boxes_generated: stream.index(),
        mode: Mode::Poisson(t),
    })
}

/// Occupancy for nested ball sets `n_1 ≤ n_2 ≤ …` thrown into one shared
/// frequency realisation. Ball batch `j` holds `n_j - n_{j-1}` balls, each
/// batch running its own binomial recursion; the result for `n_j` sees the
/// union of batches `1..=j`.
pub fn simulate_occupancy_nested<R: Rng + ?Sized>(
    spec: &DistributionSpec,
    sizes: &[u64],
    rng: &mut R,
) -> Result<Vec<OccupancyResult>> {
    for &n in sizes {
        check_size(n)?;
    }
    if sizes.windows(2).any(|p| p[1] < p[0]) {
        return Err(Error::InvalidArgument("nested sizes must be non-decreasing".into()));
    }
    let mut remaining: Vec<u64> = sizes
        .iter()
        .scan(0, |prev, &n| {
            let batch = n - *prev;
            *prev = n;
            Some(batch)
        })
        .collect();
    let mut results: Vec<OccupancyResult> = sizes
        .iter()
        .map(|&n| OccupancyResult {
            occupied: 0,
            last_occupied: 0,
            empty: 0,
            boxes_generated: 0,
            mode: Mode::Fixed(n),
        })
        .collect();
    let mut stream = StickBreakingStream::new(spec);
    while remaining.iter().any(|&r| r > 0) {
        let b = stream.next_box(rng);
        let p = b.hit_probability();
        let mut any_hit = false;
        let mut alive = false;
        for (batch, result) in remaining.iter_mut().zip(results.iter_mut()) {
            alive |= *batch > 0;
            let hits = binomial(*batch, p, rng)?;
            *batch -= hits;
            any_hit |= hits > 0;
            if !alive {
                continue;
            }
            // Batches up to this one still had balls entering box k.
            result.boxes_generated = b.index;
            if any_hit {
                result.occupied += 1;
                result.last_occupied = b.index;
            } else {
                result.empty += 1;
            }
        }
    }
    Ok(results)
}
