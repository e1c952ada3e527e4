use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{EmpiricalSample, ExperimentPlan, MomentReport};
use crate::error::{Error, Result};

/// Writes `replicate,raw,normalized`, one row per replicate in order.
pub fn write_samples_csv<W: Write>(sample: &EmpiricalSample, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["replicate", "raw", "normalized"])?;
    for (i, (raw, norm)) in sample.raw.iter().zip(&sample.normalized).enumerate() {
        w.write_record([i.to_string(), raw.to_string(), norm.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Settings that shaped a run without being part of the plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub threads: Option<usize>,
    pub version: String,
}

impl RunConfig {
    pub fn new(threads: Option<usize>) -> Self {
        Self {
            threads,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub plan: ExperimentPlan,
    pub plan_hash: String,
    pub count: u64,
    pub mean: f64,
    pub var: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<MomentReport>,
    pub config: RunConfig,
}

impl Summary {
    pub fn new(plan: &ExperimentPlan, sample: &EmpiricalSample, config: RunConfig) -> Self {
        Self {
            plan: plan.clone(),
            plan_hash: sample.plan_hash.clone(),
            count: sample.count,
            mean: sample.mean,
            var: sample.variance,
            ks: None,
            moments: None,
            config,
        }
    }

    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Reads a summary and checks that its plan still hashes to the recorded value.
pub fn read_summary<R: Read>(input: R) -> Result<Summary> {
    let summary: Summary = serde_json::from_reader(input).map_err(|e| Error::Io(e.to_string()))?;
    let hash = summary.plan.hash();
    if hash != summary.plan_hash {
        return Err(Error::InvalidArgument(format!(
            "plan hash mismatch: recorded {}, recomputed {hash}",
            summary.plan_hash
        )));
    }
    Ok(summary)
}
