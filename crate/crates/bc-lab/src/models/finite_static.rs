//! Events on a single finite space with an eventually periodic schedule
//! n ↦ A_n. Everything is computed exactly by atom enumeration; periodicity
//! keeps tail unions finite computations.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::moments::{MomentEntry, MomentTable};
use super::{ModelError, Result};
use crate::space::{Event, FiniteSpace, SpaceError};
use crate::sum::kahan_sum;

#[derive(Debug, Clone)]
pub struct FiniteStaticModel {
    space: FiniteSpace,
    prefix: Vec<Event>,
    cycle: Vec<Event>,
    cumulative_weights: Vec<f64>,
}

impl FiniteStaticModel {
    pub fn new(space: FiniteSpace, prefix: Vec<Event>, cycle: Vec<Event>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(ModelError::InvalidParameter(
                "schedule cycle must be nonempty".into(),
            ));
        }
        for e in prefix.iter().chain(&cycle) {
            if e.space() != space.id() {
                return Err(ModelError::Space(SpaceError::SpaceMismatch));
            }
        }
        let mut cumulative_weights = Vec::with_capacity(space.len());
        let mut acc = 0.0;
        for i in 0..space.len() {
            acc += space.weight(i);
            cumulative_weights.push(acc);
        }
        Ok(Self {
            space,
            prefix,
            cycle,
            cumulative_weights,
        })
    }

    /// The three-point counterexample model: X uniform on {1,2,3},
    /// A_{2n-1} = {X ≠ 1}, A_{2n} = {X ≠ 2}.
    pub fn counterexample_preset() -> Self {
        let space = FiniteSpace::uniform(3).expect("uniform space");
        let not_one = space.event(vec![1, 2]).expect("event");
        let not_two = space.event(vec![0, 2]).expect("event");
        Self::new(space, vec![], vec![not_one, not_two]).expect("preset")
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn event_at(&self, n: usize) -> &Event {
        debug_assert!(n >= 1);
        let i = n - 1;
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn marginal(&self, n: usize) -> Result<f64> {
        Ok(self.space.probability(self.event_at(n))?)
    }

    pub fn pair(&self, i: usize, j: usize) -> Result<f64> {
        let inter = self.event_at(i).intersect(self.event_at(j));
        Ok(kahan_sum(inter.iter().map(|&a| self.space.weight(a))))
    }

    /// Union mask over atoms of the events with indices in `(a, b]`.
    /// Bounded work: once the range covers a full cycle every cycle event
    /// is in, regardless of how large `b` is.
    pub(super) fn union_mask(&self, a: usize, b: usize) -> Vec<bool> {
        let mut mask = vec![false; self.space.len()];
        let prefix_end = b.min(self.prefix.len());
        for n in (a + 1)..=prefix_end {
            self.prefix[n - 1].mark(&mut mask);
        }
        let lo = a.max(self.prefix.len()); // cyclic indices are (lo, b]
        if b > lo {
            if b - lo >= self.cycle.len() {
                for e in &self.cycle {
                    e.mark(&mut mask);
                }
            } else {
                for n in (lo + 1)..=b {
                    self.event_at(n).mark(&mut mask);
                }
            }
        }
        mask
    }

    pub fn range_none(&self, a: usize, b: usize) -> Result<f64> {
        Ok(self.space.survival_weight(&self.union_mask(a, b)))
    }

    /// Exact tail union: events at indices ≥ N form a finite set by
    /// periodicity (every cycle event reappears beyond any N).
    pub fn tail_union_upper(&self, n: usize) -> Result<f64> {
        let mut mask = vec![false; self.space.len()];
        for k in n..=self.prefix.len() {
            self.prefix[k - 1].mark(&mut mask);
        }
        for e in &self.cycle {
            e.mark(&mut mask);
        }
        Ok(self.space.union_weight(&mask))
    }

    pub fn tail_marginal_sum_upper(&self, n: usize) -> Result<Option<f64>> {
        for e in &self.cycle {
            if self.space.probability(e)? > 0.0 {
                return Ok(None);
            }
        }
        let mut acc = 0.0;
        for k in n..=self.prefix.len() {
            acc += self.space.probability(&self.prefix[k - 1])?;
        }
        Ok(Some(acc))
    }

    /// One atom draw decides the whole path: the sequence is a deterministic
    /// function of X.
    pub fn sample_prefix(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
        let atom = self.draw_atom(rng);
        (1..=n)
            .map(|k| u8::from(self.event_at(k).contains(atom)))
            .collect()
    }

    pub(super) fn draw_atom(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.gen();
        match self
            .cumulative_weights
            .iter()
            .position(|&c| u < c)
        {
            Some(i) => i,
            None => self.space.len() - 1,
        }
    }

    pub fn moments(&self, m_max: usize) -> Result<MomentTable> {
        let masks: Vec<&Event> = (1..=m_max).map(|n| self.event_at(n)).collect();
        moments_by_atom(&self.space, &masks, m_max)
    }
}

/// Exact moments of S_m by enumerating atoms: S_m(ω) is the number of the
/// first m events containing ω.
pub(super) fn moments_by_atom(
    space: &FiniteSpace,
    events: &[&Event],
    m_max: usize,
) -> Result<MomentTable> {
    let atoms = space.len();
    let mut counts = vec![0u64; atoms];
    let mut entries = Vec::with_capacity(m_max);
    for (m, e) in events.iter().enumerate().take(m_max) {
        for &a in e.members() {
            counts[a] += 1;
        }
        let mean = kahan_sum((0..atoms).map(|a| space.weight(a) * counts[a] as f64));
        // Centered form: E[S^2] - mean^2 cancels catastrophically once the
        // counts grow, while the deviations stay O(m).
        let variance = kahan_sum((0..atoms).map(|a| {
            let d = counts[a] as f64 - mean;
            space.weight(a) * d * d
        }))
        .max(0.0);
        entries.push(MomentEntry::new(m + 1, mean, variance));
    }
    Ok(MomentTable { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_marginals_by_parity() {
        let m = FiniteStaticModel::counterexample_preset();
        for n in 1..=10 {
            assert!((m.marginal(n).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn cross_parity_pair_is_one_third() {
        let m = FiniteStaticModel::counterexample_preset();
        // {X≠1} ∩ {X≠2} = {X=3}
        assert!((m.pair(1, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.pair(1, 3).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn two_event_union_covers_everything() {
        let m = FiniteStaticModel::counterexample_preset();
        assert!((1.0 - m.range_none(0, 2).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(m.tail_union_upper(5).unwrap(), 1.0);
    }

    #[test]
    fn single_event_range_is_marginal() {
        let m = FiniteStaticModel::counterexample_preset();
        for n in 1..=6 {
            let u = 1.0 - m.range_none(n - 1, n).unwrap();
            assert!((u - m.marginal(n).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn mean_is_two_thirds_m() {
        let m = FiniteStaticModel::counterexample_preset();
        let table = m.moments(100).unwrap();
        for e in &table.entries {
            assert!((e.mean - 2.0 * e.m as f64 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_paths_follow_atom_patterns() {
        let m = FiniteStaticModel::counterexample_preset();
        for seed in 0..50 {
            let path = {
                use rand_chacha::rand_core::SeedableRng;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                m.sample_prefix(&mut rng, 8)
            };
            let odd = path[0];
            let even = path[1];
            assert!(matches!((odd, even), (0, 1) | (1, 0) | (1, 1)));
            for (i, &v) in path.iter().enumerate() {
                let expected = if i % 2 == 0 { odd } else { even };
                assert_eq!(v, expected);
            }
        }
    }

    #[test]
    fn no_certificate_for_divergent_marginals() {
        let m = FiniteStaticModel::counterexample_preset();
        assert_eq!(m.tail_marginal_sum_upper(1).unwrap(), None);
    }
}
