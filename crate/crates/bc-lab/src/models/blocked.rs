//! Model derived from a base model and a block plan: the k-th event is
//! B_k = ∪_{j ∈ (n_{k-1}, n_k]} A_j. Pair probabilities stay exact per base
//! family; sampling maps a base path through 1_{B_k} = max over the block.

use rand_chacha::ChaCha8Rng;

use super::finite_static::moments_by_atom;
use super::{Model, ModelError, MomentTable, Result};
use crate::blocks::{BlockError, BlockPlan};
use crate::space::Event;
use crate::sum::KahanSum;

#[derive(Debug, Clone)]
pub struct BlockedModel {
    base: Box<Model>,
    plan: BlockPlan,
}

impl BlockedModel {
    /// Blocking a blocked model composes the plans over the original base,
    /// so `base` is always one of the three ground families.
    pub(crate) fn build(base: Model, plan: BlockPlan) -> std::result::Result<Model, BlockError> {
        match base {
            Model::Blocked(inner) => {
                let composed: Vec<usize> = plan
                    .boundaries()
                    .iter()
                    .map(|&k| {
                        inner
                            .plan
                            .boundaries()
                            .get(k - 1)
                            .copied()
                            .ok_or(BlockError::InvalidPlan(format!(
                                "boundary {k} exceeds base horizon {}",
                                inner.plan.len()
                            )))
                    })
                    .collect::<std::result::Result<_, _>>()?;
                Ok(Model::Blocked(BlockedModel {
                    base: inner.base,
                    plan: BlockPlan::user_given(composed)?,
                }))
            }
            other => {
                if let Some(h) = other.horizon() {
                    let last = *plan.boundaries().last().unwrap();
                    if last > h {
                        return Err(BlockError::InvalidPlan(format!(
                            "boundary {last} exceeds base horizon {h}"
                        )));
                    }
                }
                Ok(Model::Blocked(BlockedModel {
                    base: Box::new(other),
                    plan,
                }))
            }
        }
    }

    pub fn base(&self) -> &Model {
        &self.base
    }

    pub fn plan(&self) -> &BlockPlan {
        &self.plan
    }

    pub fn block_count(&self) -> usize {
        self.plan.len()
    }

    /// Maps block index bounds to base index bounds: n_0 = 0.
    fn base_bound(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            self.plan.boundaries()[k - 1]
        }
    }

    pub fn marginal(&self, k: usize) -> Result<f64> {
        let (lo, hi) = self.plan.block_range(k);
        self.base.range_union(lo, hi)
    }

    pub fn pair(&self, k: usize, l: usize) -> Result<f64> {
        debug_assert!(k < l);
        let (k_lo, k_hi) = self.plan.block_range(k);
        let (l_lo, l_hi) = self.plan.block_range(l);
        match self.base.as_ref() {
            // disjoint index blocks of independent events stay independent
            Model::Independent(_) => Ok(self.marginal(k)? * self.marginal(l)?),
            Model::FiniteStatic(fs) => {
                let a = fs.union_mask(k_lo, k_hi);
                let b = fs.union_mask(l_lo, l_hi);
                let mut acc = KahanSum::new();
                for i in 0..a.len() {
                    if a[i] && b[i] {
                        acc.add(fs.space().weight(i));
                    }
                }
                Ok(acc.value())
            }
            Model::Markov(mk) => {
                let s_k = mk.range_none(k_lo, k_hi);
                let s_l = mk.range_none(l_lo, l_hi);
                let s_kl = mk.joint_range_none(k_lo, k_hi, l_lo, l_hi);
                Ok(1.0 - s_k - s_l + s_kl)
            }
            Model::Blocked(_) => unreachable!("nested blocks are flattened in build"),
        }
    }

    pub fn range_none(&self, a: usize, b: usize) -> Result<f64> {
        self.base
            .range_none(self.base_bound(a), self.base_bound(b))
    }

    pub fn tail_union_upper(&self, k: usize) -> Result<f64> {
        // ∪_{j ≥ k} B_j is contained in the base tail past n_{k-1}.
        self.base.tail_union_upper(self.base_bound(k - 1) + 1)
    }

    /// The blocked sequence is finite (K blocks), so the tail sum past any
    /// index is an exact finite computation.
    pub fn tail_marginal_sum_upper(&self, k: usize) -> Result<Option<f64>> {
        let mut acc = KahanSum::new();
        for j in k..=self.block_count() {
            acc.add(self.marginal(j)?);
        }
        Ok(Some(acc.value()))
    }

    pub fn sample_prefix(&self, rng: &mut ChaCha8Rng, k: usize) -> Result<Vec<u8>> {
        let base_path = self.base.sample_prefix_with(rng, self.base_bound(k))?;
        Ok(map_path_through_blocks(&base_path, &self.plan, k))
    }

    pub fn moments(&self, m_max: usize) -> Result<MomentTable> {
        if m_max > self.block_count() {
            return Err(ModelError::IndexOutOfRange {
                index: m_max,
                max: self.block_count(),
            });
        }
        if let Model::FiniteStatic(fs) = self.base.as_ref() {
            let events: Vec<Event> = (1..=m_max)
                .map(|k| {
                    let (lo, hi) = self.plan.block_range(k);
                    let mask = fs.union_mask(lo, hi);
                    let members = (0..mask.len()).filter(|&i| mask[i]).collect();
                    fs.space().event(members).expect("mask indices in range")
                })
                .collect();
            let refs: Vec<&Event> = events.iter().collect();
            return moments_by_atom(fs.space(), &refs, m_max);
        }
        super::moments::generic_moments(&Model::Blocked(self.clone()), m_max)
    }
}

/// 1_{B_k} = max_{j ∈ (n_{k-1}, n_k]} 1_{A_j} on a sampled base path.
pub fn map_path_through_blocks(base_path: &[u8], plan: &BlockPlan, blocks: usize) -> Vec<u8> {
    (1..=blocks)
        .map(|k| {
            let (lo, hi) = plan.block_range(k);
            u8::from(base_path[lo..hi].iter().any(|&x| x == 1))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::blocked_model;
    use crate::models::{FiniteStaticModel, IndependentModel, TwoStateMarkovModel};

    #[test]
    fn identity_blocking_preserves_counterexample() {
        let base = Model::FiniteStatic(FiniteStaticModel::counterexample_preset());
        let plan = BlockPlan::identity(10);
        let blocked = blocked_model(&base, &plan).unwrap();
        for n in 1..=10 {
            assert!(
                (blocked.marginal(n).unwrap() - base.marginal(n).unwrap()).abs() < 1e-15
            );
            for j in 1..n {
                assert!((blocked.pair(j, n).unwrap() - base.pair(j, n).unwrap()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn blocked_independent_marginal_is_union() {
        let base = Model::Independent(IndependentModel::constant(0.5).unwrap());
        let plan = BlockPlan::user_given(vec![2, 4, 6]).unwrap();
        let blocked = blocked_model(&base, &plan).unwrap();
        for k in 1..=3 {
            assert!((blocked.marginal(k).unwrap() - 0.75).abs() < 1e-15);
        }
        assert!((blocked.pair(1, 3).unwrap() - 0.75 * 0.75).abs() < 1e-15);
    }

    #[test]
    fn blocked_markov_pair_via_complement_identity() {
        let base = Model::Markov(TwoStateMarkovModel::symmetric(0.3).unwrap());
        let plan = BlockPlan::user_given(vec![2, 4]).unwrap();
        let blocked = blocked_model(&base, &plan).unwrap();
        let p = blocked.pair(1, 2).unwrap();
        assert!(p >= 0.0 && p <= 1.0);
        assert!(p <= blocked.marginal(1).unwrap() + 1e-15);
        assert!(p <= blocked.marginal(2).unwrap() + 1e-15);
    }

    #[test]
    fn horizon_enforced() {
        let base = Model::Independent(IndependentModel::constant(0.5).unwrap());
        let plan = BlockPlan::user_given(vec![2, 4]).unwrap();
        let blocked = blocked_model(&base, &plan).unwrap();
        assert!(blocked.marginal(3).is_err());
        assert!(blocked.moments(3).is_err());
    }

    #[test]
    fn nested_blocking_flattens() {
        let base = Model::Independent(IndependentModel::constant(0.5).unwrap());
        let inner = BlockPlan::user_given(vec![2, 4, 6, 8]).unwrap();
        let once = blocked_model(&base, &inner).unwrap();
        let outer = BlockPlan::user_given(vec![2, 4]).unwrap();
        let twice = blocked_model(&once, &outer).unwrap();
        match &twice {
            Model::Blocked(b) => {
                assert_eq!(b.plan().boundaries(), &[4, 8]);
                assert!(matches!(b.base().clone(), Model::Independent(_)));
            }
            _ => panic!("expected blocked model"),
        }
        // B'_1 = union of first 4 base events
        assert!((twice.marginal(1).unwrap() - (1.0 - 0.5f64.powi(4))).abs() < 1e-15);
    }

    #[test]
    fn sampled_blocks_respect_max_rule() {
        let base = Model::Markov(TwoStateMarkovModel::symmetric(0.4).unwrap());
        let plan = BlockPlan::user_given(vec![3, 5, 9]).unwrap();
        let blocked = blocked_model(&base, &plan).unwrap();
        for seed in 0..20 {
            let base_path = base.sample_prefix(seed, 9).unwrap();
            let block_path = blocked.sample_prefix(seed, 3).unwrap();
            assert_eq!(
                block_path,
                map_path_through_blocks(&base_path, &plan, 3)
            );
        }
    }
}
