//! Moments of the counting sums S_m = 1_{A_1} + ... + 1_{A_m}.

use serde::{Deserialize, Serialize};

use super::{Model, Result};
use crate::sum::KahanSum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub m: usize,
    pub mean: f64,
    pub variance: f64,
    /// Var S_m / (E S_m)^2, `None` when E S_m = 0.
    pub ratio: Option<f64>,
}

impl MomentEntry {
    pub fn new(m: usize, mean: f64, variance: f64) -> Self {
        let ratio = (mean > 0.0).then(|| variance / (mean * mean));
        Self {
            m,
            mean,
            variance,
            ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub entries: Vec<MomentEntry>,
}

impl MomentTable {
    /// Entry for a specific m (1-based; entries are stored for 1..=m_max).
    pub fn at(&self, m: usize) -> &MomentEntry {
        &self.entries[m - 1]
    }

    pub fn last(&self) -> &MomentEntry {
        self.entries.last().expect("nonempty moment table")
    }
}

/// O(m) work per step: the variance double sum is extended incrementally
/// using symmetry of the covariance terms.
pub(super) fn generic_moments(model: &Model, m_max: usize) -> Result<MomentTable> {
    let mut marginals = Vec::with_capacity(m_max);
    let mut mean = KahanSum::new();
    let mut var = KahanSum::new();
    let mut entries = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let pm = model.marginal(m)?;
        mean.add(pm);
        var.add(pm * (1.0 - pm));
        for (i, &pi) in marginals.iter().enumerate() {
            let cov = model.pair(i + 1, m)? - pi * pm;
            var.add(2.0 * cov);
        }
        marginals.push(pm);
        entries.push(MomentEntry::new(m, mean.value(), var.value().max(0.0)));
    }
    Ok(MomentTable { entries })
}
