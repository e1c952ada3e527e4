use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::{LimitLaw, Normalization};

/// Streaming mean and variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (0 for fewer than two points).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn standard_error(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for Welford {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut w = Welford::default();
        for x in iter {
            w.push(x);
        }
        w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSample {
    /// Raw replicate values in replicate order.
    pub raw: Vec<f64>,
    /// `(raw - b) / a` when a normalization was given, else `raw`; replicate order.
    pub normalized: Vec<f64>,
    /// `normalized`, sorted ascending.
    pub values: Vec<f64>,
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub seed: u64,
    pub plan_hash: String,
}

impl EmpiricalSample {
    pub fn new(raw: Vec<f64>, normalization: Option<&Normalization>, seed: u64, plan_hash: String) -> Self {
        let normalized: Vec<f64> = match normalization {
            Some(n) => raw.iter().map(|&x| n.apply(x)).collect(),
            None => raw.clone(),
        };
        let stats: Welford = normalized.iter().copied().collect();
        let mut values = normalized.clone();
        values.sort_by(f64::total_cmp);
        Self {
            count: raw.len() as u64,
            mean: stats.mean(),
            variance: stats.variance(),
            raw,
            normalized,
            values,
            seed,
            plan_hash,
        }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        Self::new(values, None, 0, String::new())
    }

    pub fn standard_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

/// `sup_x |F_n(x) - F(x)|` for the empirical CDF of `sample` against a
/// continuous `law`. Ties enter as a single jump.
pub fn ks_distance(sample: &EmpiricalSample, law: &LimitLaw) -> Result<f64> {
    if let LimitLaw::MittagLeffler(_) = law {
        return Err(Error::KindMismatch(
            "Mittag-Leffler samples are compared by moments".into(),
        ));
    }
    ks_sorted(&sample.values, |x| law.cdf(x))
}

/// One-sample statistic on ascending `values` against any continuous `cdf`.
pub fn ks_sorted<F: Fn(f64) -> Result<f64>>(values: &[f64], cdf: F) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("KS distance of an empty sample".into()));
    }
    let n = values.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < values.len() {
        let x = values[i];
        let mut j = i;
        while j < values.len() && values[j] == x {
            j += 1;
        }
        let f = cdf(x)?;
        d = d.max(f - i as f64 / n).max(j as f64 / n - f);
        i = j;
    }
    Ok(d)
}

/// `sup_x |F_n(x) - G_m(x)|` between two samples.
pub fn ks_two_sample(a: &EmpiricalSample, b: &EmpiricalSample) -> Result<f64> {
    let (x, y) = (&a.values, &b.values);
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidArgument("KS distance of an empty sample".into()));
    }
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub k: u32,
    pub empirical: f64,
    pub analytic: f64,
    /// `empirical / analytic - 1`
    pub relative_error: f64,
    /// Standard error of the empirical moment.
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub law: LimitLaw,
    pub rows: Vec<MomentRow>,
}

/// Empirical moments `k = 1..=k_max` of the normalized sample against a
/// Mittag-Leffler law.
pub fn moment_compare(sample: &EmpiricalSample, law: &LimitLaw, k_max: u32) -> Result<MomentReport> {
    if !(1..=4).contains(&k_max) {
        return Err(Error::InvalidArgument(format!("k_max must be in 1..=4, got {k_max}")));
    }
    let rows = (1..=k_max)
        .map(|k| {
            let analytic = law.moment(k)?;
            let stats: Welford = sample.values.iter().map(|x| x.powi(k as i32)).collect();
            Ok(MomentRow {
                k,
                empirical: stats.mean(),
                analytic,
                relative_error: stats.mean() / analytic - 1.0,
                standard_error: stats.standard_error(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(MomentReport { law: *law, rows })
}
