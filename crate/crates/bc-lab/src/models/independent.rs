//! Independent events with marginals from a closed spec family, so that
//! analytic tail sums (and hence certified tail-union bounds) exist.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ModelError, Result};
use crate::sum::KahanSum;

/// How many explicit terms to sum before switching to the integral bound in
/// power-law tail sums. Larger means tighter bounds, linearly slower scans.
const POWER_TAIL_CUTOFF: usize = 50_000;

/// Closed enumeration of marginal sequences. Arbitrary callbacks are
/// deliberately not supported: every variant here has an analytic tail-sum
/// story, which keeps `tail_union_upper` certified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarginalSpec {
    /// p_n = p.
    Constant { p: f64 },
    /// p_n = c / (n + shift)^alpha.
    Power { c: f64, alpha: f64, shift: u32 },
    /// p_n = c / n.
    Harmonic { c: f64 },
    /// Explicit prefix, then constant continuation.
    Explicit { values: Vec<f64>, continuation: f64 },
}

impl MarginalSpec {
    pub fn value(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        match self {
            MarginalSpec::Constant { p } => *p,
            MarginalSpec::Power { c, alpha, shift } => {
                c / ((n as f64) + f64::from(*shift)).powf(*alpha)
            }
            MarginalSpec::Harmonic { c } => c / n as f64,
            MarginalSpec::Explicit {
                values,
                continuation,
            } => values.get(n - 1).copied().unwrap_or(*continuation),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ModelError::InvalidParameter(msg));
        let prob = |x: f64, what: &str| -> Result<()> {
            if !(0.0..=1.0).contains(&x) || !x.is_finite() {
                return bad(format!("{what} = {x} is not a probability"));
            }
            Ok(())
        };
        match self {
            MarginalSpec::Constant { p } => prob(*p, "constant marginal"),
            MarginalSpec::Power { c, alpha, shift } => {
                if *c < 0.0 || !c.is_finite() || *alpha < 0.0 || !alpha.is_finite() {
                    return bad(format!("power spec needs c >= 0, alpha >= 0 (got c={c}, alpha={alpha})"));
                }
                prob(c / (1.0 + f64::from(*shift)).powf(*alpha), "first power marginal")
            }
            MarginalSpec::Harmonic { c } => prob(*c, "harmonic coefficient"),
            MarginalSpec::Explicit {
                values,
                continuation,
            } => {
                for (i, v) in values.iter().enumerate() {
                    prob(*v, &format!("explicit marginal #{}", i + 1))?;
                }
                prob(*continuation, "continuation marginal")
            }
        }
    }

    /// Certified upper bound on Σ_{n ≥ from} p_n, or `None` if the series
    /// has no finite certificate.
    fn tail_sum_upper(&self, from: usize) -> Option<f64> {
        match self {
            MarginalSpec::Constant { p } => (*p == 0.0).then_some(0.0),
            MarginalSpec::Harmonic { c } => (*c == 0.0).then_some(0.0),
            MarginalSpec::Power { c, alpha, shift } => {
                if *c == 0.0 {
                    return Some(0.0);
                }
                if *alpha <= 1.0 {
                    return None;
                }
                // Explicit terms up to M, then ∫_M^∞ c (x+shift)^{-alpha} dx
                // dominates the remainder since the terms are decreasing.
                let m = from + POWER_TAIL_CUTOFF;
                let mut acc = KahanSum::new();
                for n in from..=m {
                    acc.add(self.value(n));
                }
                let edge = (m as f64) + f64::from(*shift);
                Some(acc.value() + c * edge.powf(1.0 - alpha) / (alpha - 1.0))
            }
            MarginalSpec::Explicit {
                values,
                continuation,
            } => {
                if *continuation > 0.0 {
                    return None;
                }
                let mut acc = KahanSum::new();
                for v in values.iter().skip(from - 1) {
                    acc.add(*v);
                }
                Some(acc.value())
            }
        }
    }
}

/// Mutually independent events A_n with P(A_n) given by a [`MarginalSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependentModel {
    marginal: MarginalSpec,
}

impl IndependentModel {
    pub fn new(marginal: MarginalSpec) -> Result<Self> {
        marginal.validate()?;
        Ok(Self { marginal })
    }

    pub fn constant(p: f64) -> Result<Self> {
        Self::new(MarginalSpec::Constant { p })
    }

    pub fn spec(&self) -> &MarginalSpec {
        &self.marginal
    }

    pub fn marginal(&self, n: usize) -> f64 {
        self.marginal.value(n)
    }

    pub fn range_none(&self, a: usize, b: usize) -> f64 {
        let mut prod = 1.0;
        for j in (a + 1)..=b {
            prod *= 1.0 - self.marginal.value(j);
        }
        prod
    }

    pub fn tail_union_upper(&self, n: usize) -> f64 {
        match self.marginal.tail_sum_upper(n) {
            Some(s) => s.min(1.0),
            None => 1.0,
        }
    }

    pub fn tail_marginal_sum_upper(&self, n: usize) -> Option<f64> {
        self.marginal.tail_sum_upper(n)
    }

    pub fn sample_prefix(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
        (1..=n)
            .map(|k| u8::from(rng.gen::<f64>() < self.marginal.value(k)))
            .collect()
    }
}
