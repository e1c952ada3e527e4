use rand::Rng;

use crate::distributions::{DistributionSpec, StickDraw};

/// Box `k` of the sieve together with the partial sums around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxFrequency {
    pub index: u64,
    pub draw: StickDraw,
    /// `S_{k-1} = -log Q_{k-1}`
    pub log_q_before: f64,
    /// `S_k = -log Q_k`
    pub log_q: f64,
}

impl BoxFrequency {
    /// `T_k = -log P_k`
    pub fn neg_log_frequency(&self) -> f64 {
        self.log_q_before + self.draw.eta
    }

    /// `P_k = Q_{k-1} (1 - W_k)`
    pub fn frequency(&self) -> f64 {
        (-self.neg_log_frequency()).exp()
    }

    /// `log(1 - P_k)`
    pub fn log_miss(&self) -> f64 {
        if self.index == 1 {
            -self.draw.xi
        } else {
            (-self.frequency()).ln_1p()
        }
    }

    /// Conditional probability `1 - W_k` that a ball reaching box `k` stays there.
    pub fn hit_probability(&self) -> f64 {
        self.draw.one_minus_w()
    }

    pub fn q(&self) -> f64 {
        (-self.log_q).exp()
    }
}

/// Lazily generated frequencies `P_k = W_1 ⋯ W_{k-1}(1 - W_k)`.
///
/// The stream holds no randomness of its own; each box consumes one draw of
/// `W` from the generator passed to [`Self::next_box`].
#[derive(Debug, Clone)]
pub struct StickBreakingStream<'a> {
    spec: &'a DistributionSpec,
    k: u64,
    log_q: f64,
}

impl<'a> StickBreakingStream<'a> {
    pub fn new(spec: &'a DistributionSpec) -> Self {
        Self {
            spec,
            k: 0,
            log_q: 0.0,
        }
    }

    /// Boxes generated so far.
    pub fn index(&self) -> u64 {
        self.k
    }

    /// `S_k` for the last generated box (0 before the first).
    pub fn log_q(&self) -> f64 {
        self.log_q
    }

    /// `Q_k`
    pub fn q(&self) -> f64 {
        (-self.log_q).exp()
    }

    pub fn next_box<R: Rng + ?Sized>(&mut self, rng: &mut R) -> BoxFrequency {
        let draw = self.spec.draw(rng);
        let before = self.log_q;
        self.k += 1;
        self.log_q = before + draw.xi;
        BoxFrequency {
            index: self.k,
            draw,
            log_q_before: before,
            log_q: self.log_q,
        }
    }
}
