//! Finite discrete probability spaces and events over them.

use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

use crate::sum::kahan_sum;

/// Absolute tolerance for the weight-sum-equals-one invariant.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

static NEXT_SPACE_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceId(u64);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("a probability space needs at least one atom")]
    EmptySpace,
    #[error("atom {index} has negative weight {weight}")]
    NegativeWeight { index: usize, weight: f64 },
    #[error("atom weights sum to {sum}, outside tolerance {tol} of 1")]
    WeightSumOutOfTolerance { sum: f64, tol: f64 },
    #[error("atom index {index} out of range for space with {atoms} atoms")]
    IndexOutOfRange { index: usize, atoms: usize },
    #[error("event members must be strictly increasing atom indices")]
    MembersNotIncreasing,
    #[error("event belongs to a different space")]
    SpaceMismatch,
}

/// Finite discrete probability space: ordered atoms with weights summing to 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteSpace {
    #[serde(skip, default = "fresh_space_id")]
    id: SpaceId,
    atoms: Vec<(String, f64)>,
}

fn fresh_space_id() -> SpaceId {
    SpaceId(NEXT_SPACE_ID.fetch_add(1, Ordering::Relaxed))
}

impl FiniteSpace {
    /// Builds a space from `(label, weight)` pairs. Weights are not
    /// auto-normalized; the sum must already lie within `WEIGHT_SUM_TOL` of 1.
    pub fn new<L: Into<String>>(atoms: Vec<(L, f64)>) -> Result<Self, SpaceError> {
        if atoms.is_empty() {
            return Err(SpaceError::EmptySpace);
        }
        let atoms: Vec<(String, f64)> = atoms.into_iter().map(|(l, w)| (l.into(), w)).collect();
        for (index, (_, w)) in atoms.iter().enumerate() {
            if *w < 0.0 || !w.is_finite() {
                return Err(SpaceError::NegativeWeight { index, weight: *w });
            }
        }
        let sum = kahan_sum(atoms.iter().map(|(_, w)| *w));
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(SpaceError::WeightSumOutOfTolerance {
                sum,
                tol: WEIGHT_SUM_TOL,
            });
        }
        Ok(Self {
            id: fresh_space_id(),
            atoms,
        })
    }

    /// Uniform space over integer labels `1..=n`.
    pub fn uniform(n: usize) -> Result<Self, SpaceError> {
        let w = 1.0 / n as f64;
        Self::new((1..=n).map(|i| (i.to_string(), w)).collect())
    }

    pub fn id(&self) -> SpaceId {
        self.id
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.atoms[atom].1
    }

    pub fn label(&self, atom: usize) -> &str {
        &self.atoms[atom].0
    }

    /// Event over this space from strictly increasing atom indices.
    pub fn event(&self, members: Vec<usize>) -> Result<Event, SpaceError> {
        if !members.windows(2).all(|w| w[0] < w[1]) {
            return Err(SpaceError::MembersNotIncreasing);
        }
        if let Some(&last) = members.last() {
            if last >= self.atoms.len() {
                return Err(SpaceError::IndexOutOfRange {
                    index: last,
                    atoms: self.atoms.len(),
                });
            }
        }
        Ok(Event {
            space: self.id,
            members,
        })
    }

    /// Exact probability of an event: compensated sum of member weights.
    pub fn probability(&self, e: &Event) -> Result<f64, SpaceError> {
        if e.space != self.id {
            return Err(SpaceError::SpaceMismatch);
        }
        Ok(kahan_sum(e.members.iter().map(|&i| self.atoms[i].1)))
    }

    /// Probability of the complement of a union of events, summed directly
    /// over non-member atoms so values near 0 keep full precision.
    pub fn survival_weight(&self, union_mask: &[bool]) -> f64 {
        kahan_sum(
            self.atoms
                .iter()
                .zip(union_mask)
                .filter(|(_, &m)| !m)
                .map(|((_, w), _)| *w),
        )
    }

    pub fn union_weight(&self, union_mask: &[bool]) -> f64 {
        kahan_sum(
            self.atoms
                .iter()
                .zip(union_mask)
                .filter(|&(_, &m)| m)
                .map(|((_, w), _)| *w),
        )
    }
}

/// Subset of a [`FiniteSpace`], stored as strictly increasing atom indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    space: SpaceId,
    members: Vec<usize>,
}

impl Event {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn space(&self) -> SpaceId {
        self.space
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.members.binary_search(&atom).is_ok()
    }

    pub fn mark(&self, mask: &mut [bool]) {
        for &i in &self.members {
            mask[i] = true;
        }
    }

    /// Sorted intersection of member lists.
    pub fn intersect(&self, other: &Event) -> Vec<usize> {
        let mut out = Vec::new();
        let (mut a, mut b) = (0, 0);
        while a < self.members.len() && b < other.members.len() {
            match self.members[a].cmp(&other.members[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.members[a]);
                    a += 1;
                    b += 1;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_three_point_space() {
        let s = FiniteSpace::uniform(3).unwrap();
        assert_eq!(s.len(), 3);
        let not_one = s.event(vec![1, 2]).unwrap();
        let p = s.probability(&not_one).unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_single_atom() {
        let s = FiniteSpace::new(vec![("a", 1.0)]).unwrap();
        let full = s.event(vec![0]).unwrap();
        assert_eq!(s.probability(&full).unwrap(), 1.0);
        let empty = s.event(vec![]).unwrap();
        assert_eq!(s.probability(&empty).unwrap(), 0.0);
    }

    #[test]
    fn weight_sum_out_of_tolerance() {
        let err = FiniteSpace::new(vec![("a", 0.5), ("b", 0.4)]).unwrap_err();
        match err {
            SpaceError::WeightSumOutOfTolerance { sum, .. } => {
                assert!((sum - 0.9).abs() < 1e-15)
            }
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn rejects_empty_and_negative() {
        assert_eq!(
            FiniteSpace::new(Vec::<(String, f64)>::new()).unwrap_err(),
            SpaceError::EmptySpace
        );
        assert!(matches!(
            FiniteSpace::new(vec![("a", -0.1), ("b", 1.1)]).unwrap_err(),
            SpaceError::NegativeWeight { index: 0, .. }
        ));
    }

    #[test]
    fn event_validation() {
        let s = FiniteSpace::uniform(3).unwrap();
        assert!(matches!(
            s.event(vec![2, 1]).unwrap_err(),
            SpaceError::MembersNotIncreasing
        ));
        assert!(matches!(
            s.event(vec![0, 3]).unwrap_err(),
            SpaceError::IndexOutOfRange { index: 3, atoms: 3 }
        ));
        let other = FiniteSpace::uniform(3).unwrap();
        let e = other.event(vec![0]).unwrap();
        assert_eq!(s.probability(&e).unwrap_err(), SpaceError::SpaceMismatch);
    }

    #[test]
    fn intersection_of_parity_events() {
        let s = FiniteSpace::uniform(3).unwrap();
        let not_one = s.event(vec![1, 2]).unwrap();
        let not_two = s.event(vec![0, 2]).unwrap();
        assert_eq!(not_one.intersect(&not_two), vec![2]);
    }
}
