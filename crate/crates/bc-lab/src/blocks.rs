//! Block plans: increasing boundaries 0 = n_0 < n_1 < ... with induced
//! blocks B_k = ∪_{j ∈ (n_{k-1}, n_k]} A_j, plus the two inductive
//! constructions that certify Σ P(B_k) ≤ 2 (tail-vanishing side) and
//! P(B_k) > 1 − 2^{-k} (coverage side) respectively.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{Model, ModelError};
use crate::sum::KahanSum;

#[derive(Debug, Error)]
pub enum BlockError {
    #[error("tail bound never drops to {threshold:.3e} for block {block} within scan limit (bound at limit: {bound_at_limit:.3e}); the event sum is likely not almost surely finite")]
    TailDoesNotVanish {
        block: usize,
        threshold: f64,
        bound_at_limit: f64,
    },
    #[error("scan limit {limit} exceeded at block {block}; partial plan has {} boundaries", partial.len())]
    ScanLimitExceeded {
        block: usize,
        limit: usize,
        partial: BlockPlan,
    },
    #[error("union probability saturates at {saturated_at} below threshold {threshold} for block {block}; the event sum is likely not almost surely infinite")]
    CoverageUnreachable {
        block: usize,
        threshold: f64,
        saturated_at: f64,
    },
    #[error("invalid block plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionTag {
    TheoremA,
    TheoremB,
    UserGiven,
}

/// A block decomposition with its construction certificates. Theorem-A plans
/// record the certified tail bound used at each boundary; Theorem-B plans
/// record the achieved union probability of each block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPlan {
    boundaries: Vec<usize>,
    tag: ConstructionTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail_bounds: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    achieved_unions: Option<Vec<f64>>,
}

impl BlockPlan {
    /// Plan from explicit boundaries; validated for strict monotonicity only.
    pub fn user_given(boundaries: Vec<usize>) -> Result<Self, BlockError> {
        Self::validate_boundaries(&boundaries)?;
        Ok(Self {
            boundaries,
            tag: ConstructionTag::UserGiven,
            tail_bounds: None,
            achieved_unions: None,
        })
    }

    /// Identity plan n_k = k for k ≤ count.
    pub fn identity(count: usize) -> Self {
        Self {
            boundaries: (1..=count).collect(),
            tag: ConstructionTag::UserGiven,
            tail_bounds: None,
            achieved_unions: None,
        }
    }

    fn validate_boundaries(boundaries: &[usize]) -> Result<(), BlockError> {
        if boundaries.is_empty() {
            return Err(BlockError::InvalidPlan("no boundaries".into()));
        }
        if boundaries[0] < 1 || !boundaries.windows(2).all(|w| w[0] < w[1]) {
            return Err(BlockError::InvalidPlan(
                "boundaries must be strictly increasing and >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, BlockError> {
        let plan: BlockPlan = serde_json::from_str(text)
            .map_err(|e| BlockError::InvalidPlan(e.to_string()))?;
        Self::validate_boundaries(&plan.boundaries)?;
        Ok(plan)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serialization")
    }

    pub fn len(&self) -> usize {
        self.boundaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundaries.is_empty()
    }

    pub fn tag(&self) -> ConstructionTag {
        self.tag
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// Half-open index range (n_{k-1}, n_k] of block k (1-based).
    pub fn block_range(&self, k: usize) -> (usize, usize) {
        let lo = if k == 1 { 0 } else { self.boundaries[k - 2] };
        (lo, self.boundaries[k - 1])
    }

    pub fn tail_bounds(&self) -> Option<&[f64]> {
        self.tail_bounds.as_deref()
    }

    pub fn achieved_unions(&self) -> Option<&[f64]> {
        self.achieved_unions.as_deref()
    }
}

/// Least `n` in `(lo, limit]` with `f(n) <= threshold`, for nonincreasing
/// `f`. Galloping then bisection; `None` if even `f(limit)` is above.
fn least_below<F: FnMut(usize) -> Result<f64, ModelError>>(
    mut f: F,
    lo: usize,
    limit: usize,
    threshold: f64,
) -> Result<Option<usize>, ModelError> {
    if f(limit)? > threshold {
        return Ok(None);
    }
    if f(lo + 1)? <= threshold {
        return Ok(Some(lo + 1));
    }
    // invariant: f(bad) > threshold, f(good) <= threshold
    let mut bad = lo + 1;
    let mut good = limit;
    let mut step = 1usize;
    loop {
        let probe = bad.saturating_add(step).min(limit);
        if probe == limit {
            break;
        }
        if f(probe)? <= threshold {
            good = probe;
            break;
        }
        bad = probe;
        step *= 2;
    }
    while good - bad > 1 {
        let mid = bad + (good - bad) / 2;
        if f(mid)? <= threshold {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(Some(good))
}

/// Tail-vanishing construction: n_k is the least N > n_{k-1} whose certified
/// tail bound is ≤ 2^{-k}. The recorded bounds give P(B_k) ≤ 2^{-(k-1)} and
/// hence Σ P(B_k) ≤ 2.
pub fn build_blocks_theorem_a(
    model: &Model,
    block_count: usize,
    scan_limit: usize,
) -> Result<BlockPlan, BlockError> {
    if block_count < 1 {
        return Err(BlockError::InvalidPlan("block count must be >= 1".into()));
    }
    let mut boundaries = Vec::with_capacity(block_count);
    let mut bounds = Vec::with_capacity(block_count);
    let mut prev = 0usize;
    for k in 1..=block_count {
        let threshold = 0.5f64.powi(k as i32);
        let found = least_below(|n| model.tail_union_upper(n), prev, scan_limit, threshold)?;
        match found {
            Some(n) => {
                bounds.push(model.tail_union_upper(n)?);
                boundaries.push(n);
                prev = n;
            }
            None => {
                let at_limit = model.tail_union_upper(scan_limit)?;
                // A tail bound still above 1/2 at the scan limit is evidence
                // the tail does not vanish at all; otherwise the scan was
                // simply too short.
                if at_limit > 0.5 {
                    return Err(BlockError::TailDoesNotVanish {
                        block: k,
                        threshold,
                        bound_at_limit: at_limit,
                    });
                }
                return Err(BlockError::ScanLimitExceeded {
                    block: k,
                    limit: scan_limit,
                    partial: BlockPlan {
                        boundaries,
                        tag: ConstructionTag::TheoremA,
                        tail_bounds: Some(bounds),
                        achieved_unions: None,
                    },
                });
            }
        }
    }
    Ok(BlockPlan {
        boundaries,
        tag: ConstructionTag::TheoremA,
        tail_bounds: Some(bounds),
        achieved_unions: None,
    })
}

/// Coverage construction: n_k is the least M > n_{k-1} with
/// P(∪_{j ∈ (n_{k-1}, M]} A_j) > 1 − 2^{-k} (strict). Evaluated through the
/// survival probability so the strict threshold keeps full precision.
pub fn build_blocks_theorem_b(
    model: &Model,
    block_count: usize,
    scan_limit: usize,
) -> Result<BlockPlan, BlockError> {
    if block_count < 1 {
        return Err(BlockError::InvalidPlan("block count must be >= 1".into()));
    }
    let mut boundaries = Vec::with_capacity(block_count);
    let mut achieved = Vec::with_capacity(block_count);
    let mut prev = 0usize;
    for k in 1..=block_count {
        let threshold = 0.5f64.powi(k as i32);
        // survival < 2^{-k}  <=>  union > 1 - 2^{-k}; nextafter makes the
        // nonstrict search primitive implement the strict comparison.
        let strict = next_down(threshold);
        let found = least_below(|m| model.range_none(prev, m), prev, scan_limit, strict)?;
        match found {
            Some(m) => {
                achieved.push(model.range_union(prev, m)?);
                boundaries.push(m);
                prev = m;
            }
            None => {
                let at_limit = model.range_none(prev, scan_limit)?;
                let halfway = model.range_none(prev, prev + (scan_limit - prev).div_ceil(2))?;
                if (at_limit - halfway).abs() <= f64::EPSILON {
                    return Err(BlockError::CoverageUnreachable {
                        block: k,
                        threshold: 1.0 - threshold,
                        saturated_at: 1.0 - at_limit,
                    });
                }
                return Err(BlockError::ScanLimitExceeded {
                    block: k,
                    limit: scan_limit,
                    partial: BlockPlan {
                        boundaries,
                        tag: ConstructionTag::TheoremB,
                        tail_bounds: None,
                        achieved_unions: Some(achieved),
                    },
                });
            }
        }
    }
    Ok(BlockPlan {
        boundaries,
        tag: ConstructionTag::TheoremB,
        tail_bounds: None,
        achieved_unions: Some(achieved),
    })
}

fn next_down(x: f64) -> f64 {
    f64::from_bits(x.to_bits() - 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockProbabilities {
    pub probabilities: Vec<f64>,
    pub partial_sums: Vec<f64>,
}

/// P(B_k) = P(∪_{j ∈ (n_{k-1}, n_k]} A_j) for every block, with partial sums.
pub fn block_probabilities(
    model: &Model,
    plan: &BlockPlan,
) -> Result<BlockProbabilities, BlockError> {
    let mut probabilities = Vec::with_capacity(plan.len());
    let mut partial = KahanSum::new();
    let mut partial_sums = Vec::with_capacity(plan.len());
    for k in 1..=plan.len() {
        let (lo, hi) = plan.block_range(k);
        let p = model.range_union(lo, hi)?;
        partial.add(p);
        probabilities.push(p);
        partial_sums.push(partial.value());
    }
    Ok(BlockProbabilities {
        probabilities,
        partial_sums,
    })
}

/// Derived model whose k-th event is B_k.
pub fn blocked_model(model: &Model, plan: &BlockPlan) -> Result<Model, BlockError> {
    crate::models::BlockedModel::build(model.clone(), plan.clone())
}
