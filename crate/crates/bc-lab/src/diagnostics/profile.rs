//! Closed enumerations of mixing-rate sequences and correlation-bound
//! matrices, so that ℓ¹ sums and norm bounds can be certified analytically.

use serde::{Deserialize, Serialize};

/// Nonnegative sequence ρ_1, ρ_2, ... with a declared ℓ¹ story.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MixingProfile {
    /// ρ_k = c r^k with 0 ≤ r < 1.
    Geometric { c: f64, r: f64 },
    /// ρ_k = c / k^beta.
    Power { c: f64, beta: f64 },
    /// Explicit prefix; ρ_k = 0 beyond it.
    Explicit { values: Vec<f64> },
}

impl MixingProfile {
    pub fn rho(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        match self {
            MixingProfile::Geometric { c, r } => c * r.powi(k as i32),
            MixingProfile::Power { c, beta } => c / (k as f64).powf(*beta),
            MixingProfile::Explicit { values } => values.get(k - 1).copied().unwrap_or(0.0),
        }
    }

    /// Certified bound on Σ_k ρ_k, `None` when the series has no finite
    /// certificate (profile then fails the ℓ¹ requirement).
    pub fn l1_bound(&self) -> Option<f64> {
        match self {
            MixingProfile::Geometric { c, r } => {
                (*r < 1.0).then(|| c * r / (1.0 - r))
            }
            MixingProfile::Power { c, beta } => {
                if *c == 0.0 {
                    return Some(0.0);
                }
                // Σ 1/k^β ≤ 1 + ∫_1^∞ x^{-β} dx for β > 1
                (*beta > 1.0).then(|| c * (1.0 + 1.0 / (beta - 1.0)))
            }
            MixingProfile::Explicit { values } => {
                Some(crate::sum::kahan_sum(values.iter().copied()))
            }
        }
    }

    pub fn is_valid(&self) -> bool {
        let nonneg = match self {
            MixingProfile::Geometric { c, r } => *c >= 0.0 && (0.0..1.0).contains(r),
            MixingProfile::Power { c, beta } => *c >= 0.0 && *beta > 0.0,
            MixingProfile::Explicit { values } => values.iter().all(|v| *v >= 0.0),
        };
        nonneg && self.l1_bound().is_some()
    }
}

/// Entry rule for the infinite matrix M of the correlation-bound condition,
/// queried on finite truncations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CorrelationMatrixSpec {
    Zero,
    /// M_{i,j} = c r^{|i-j|}.
    Banded { c: f64, r: f64 },
    /// M_{i,j} = v everywhere.
    Constant { v: f64 },
    /// Explicit dense block; entries outside it are 0.
    Explicit { rows: Vec<Vec<f64>> },
}

impl CorrelationMatrixSpec {
    /// M_{i,j} for 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match self {
            CorrelationMatrixSpec::Zero => 0.0,
            CorrelationMatrixSpec::Banded { c, r } => {
                c * r.powi(i.abs_diff(j) as i32)
            }
            CorrelationMatrixSpec::Constant { v } => *v,
            CorrelationMatrixSpec::Explicit { rows } => rows
                .get(i - 1)
                .and_then(|row| row.get(j - 1))
                .copied()
                .unwrap_or(0.0),
        }
    }

    /// Dense n×n truncation (1-based indices 1..=n).
    pub fn truncation(&self, n: usize) -> Vec<Vec<f64>> {
        (1..=n)
            .map(|i| (1..=n).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        match self {
            CorrelationMatrixSpec::Zero => true,
            CorrelationMatrixSpec::Banded { c, r } => {
                *c >= 0.0 && c.is_finite() && *r >= 0.0 && r.is_finite()
            }
            CorrelationMatrixSpec::Constant { v } => *v >= 0.0 && v.is_finite(),
            CorrelationMatrixSpec::Explicit { rows } => rows
                .iter()
                .all(|row| row.iter().all(|v| *v >= 0.0 && v.is_finite())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_l1_bound_dominates_partials() {
        let p = MixingProfile::Geometric { c: 0.5, r: 0.4 };
        let bound = p.l1_bound().unwrap();
        let mut partial = 0.0;
        for k in 1..=100 {
            partial += p.rho(k);
            assert!(bound >= partial - 1e-15);
        }
    }

    #[test]
    fn power_profile_needs_beta_above_one() {
        assert!(MixingProfile::Power { c: 1.0, beta: 2.0 }.is_valid());
        assert!(!MixingProfile::Power { c: 1.0, beta: 1.0 }.is_valid());
    }

    #[test]
    fn banded_entries() {
        let s = CorrelationMatrixSpec::Banded { c: 1.0, r: 0.5 };
        assert_eq!(s.entry(3, 3), 1.0);
        assert_eq!(s.entry(1, 3), 0.25);
        let t = s.truncation(3);
        assert_eq!(t[0][2], 0.25);
        assert_eq!(t[2][0], 0.25);
    }
}
