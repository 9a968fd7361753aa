//! Event-sequence models: marginals, pair probabilities, exact range unions,
//! certified tail-union bounds and seeded path sampling.
//!
//! Indices are 1-based throughout and ranges are half-open `(a, b]`.

mod blocked;
mod finite_static;
mod independent;
mod markov;
mod moments;

pub use blocked::{map_path_through_blocks, BlockedModel};
pub use finite_static::FiniteStaticModel;
pub use independent::{IndependentModel, MarginalSpec};
pub use markov::TwoStateMarkovModel;
pub use moments::{MomentEntry, MomentTable};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::space::SpaceError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("event index {index} out of range (valid: 1..={max})")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("empty index range ({a}, {b}]")]
    EmptyRange { a: usize, b: usize },
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

pub type Result<T> = std::result::Result<T, ModelError>;

const UNBOUNDED: usize = usize::MAX;

/// An event sequence `{A_n}` with an exact probability engine. One of three
/// base families, or a blocked derivation whose n-th event is the union of
/// base events over a block of indices.
#[derive(Debug, Clone)]
pub enum Model {
    Independent(IndependentModel),
    FiniteStatic(FiniteStaticModel),
    Markov(TwoStateMarkovModel),
    Blocked(BlockedModel),
}

impl Model {
    /// Number of defined events, or `None` when the sequence is infinite.
    pub fn horizon(&self) -> Option<usize> {
        match self {
            Model::Blocked(b) => Some(b.block_count()),
            Model::Independent(_) | Model::FiniteStatic(_) | Model::Markov(_) => None,
        }
    }

    fn check_index(&self, n: usize) -> Result<()> {
        let max = self.horizon().unwrap_or(UNBOUNDED);
        if n == 0 || n > max {
            return Err(ModelError::IndexOutOfRange { index: n, max });
        }
        Ok(())
    }

    /// P(A_n).
    pub fn marginal(&self, n: usize) -> Result<f64> {
        self.check_index(n)?;
        match self {
            Model::Independent(m) => Ok(m.marginal(n)),
            Model::FiniteStatic(m) => m.marginal(n),
            Model::Markov(m) => Ok(m.marginal(n)),
            Model::Blocked(m) => m.marginal(n),
        }
    }

    /// P(A_i ∩ A_j). Symmetric; equals the marginal when `i == j`.
    pub fn pair(&self, i: usize, j: usize) -> Result<f64> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return self.marginal(i);
        }
        let (i, j) = (i.min(j), i.max(j));
        match self {
            Model::Independent(m) => Ok(m.marginal(i) * m.marginal(j)),
            Model::FiniteStatic(m) => m.pair(i, j),
            Model::Markov(m) => Ok(m.pair(i, j)),
            Model::Blocked(m) => m.pair(i, j),
        }
    }

    /// Exact P(∪_{j ∈ (a, b]} A_j).
    pub fn range_union(&self, a: usize, b: usize) -> Result<f64> {
        Ok(1.0 - self.range_none(a, b)?)
    }

    /// Exact P(no A_j occurs for j ∈ (a, b]). Computed multiplicatively /
    /// by complements, so values near 0 keep full precision; this is the
    /// primitive behind `range_union` and the strict Theorem-B threshold.
    pub fn range_none(&self, a: usize, b: usize) -> Result<f64> {
        if a >= b {
            return Err(ModelError::EmptyRange { a, b });
        }
        self.check_index(b)?;
        match self {
            Model::Independent(m) => Ok(m.range_none(a, b)),
            Model::FiniteStatic(m) => m.range_none(a, b),
            Model::Markov(m) => Ok(m.range_none(a, b)),
            Model::Blocked(m) => m.range_none(a, b),
        }
    }

    /// Certified upper bound U(N) ≥ P(∪_{n ≥ N} A_n), nonincreasing in N.
    pub fn tail_union_upper(&self, n: usize) -> Result<f64> {
        self.check_index(n)?;
        match self {
            Model::Independent(m) => Ok(m.tail_union_upper(n)),
            Model::FiniteStatic(m) => m.tail_union_upper(n),
            Model::Markov(m) => Ok(m.tail_union_upper(n)),
            Model::Blocked(m) => m.tail_union_upper(n),
        }
    }

    /// Certified upper bound on Σ_{n ≥ N} P(A_n) when the family admits an
    /// analytic tail-sum certificate; `None` means no certificate (the sum
    /// may diverge — this method never proves divergence).
    pub fn tail_marginal_sum_upper(&self, n: usize) -> Result<Option<f64>> {
        self.check_index(n)?;
        match self {
            Model::Independent(m) => Ok(m.tail_marginal_sum_upper(n)),
            Model::FiniteStatic(m) => m.tail_marginal_sum_upper(n),
            Model::Markov(m) => Ok(m.tail_marginal_sum_upper(n)),
            Model::Blocked(m) => m.tail_marginal_sum_upper(n),
        }
    }

    /// Indicator path `(1_{A_1}, ..., 1_{A_n})`, deterministic in the seed.
    pub fn sample_prefix(&self, seed: u64, n: usize) -> Result<Vec<u8>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_prefix_with(&mut rng, n)
    }

    /// Same as [`Model::sample_prefix`] but drawing from a caller-provided
    /// stream, for replicated Monte Carlo runs.
    pub fn sample_prefix_with(&self, rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<u8>> {
        self.check_index(n)?;
        match self {
            Model::Independent(m) => Ok(m.sample_prefix(rng, n)),
            Model::FiniteStatic(m) => Ok(m.sample_prefix(rng, n)),
            Model::Markov(m) => Ok(m.sample_prefix(rng, n)),
            Model::Blocked(m) => m.sample_prefix(rng, n),
        }
    }

    /// E S_m, Var S_m and the Kochen-Stone ratio for every m ≤ m_max.
    pub fn moments(&self, m_max: usize) -> Result<MomentTable> {
        self.check_index(m_max)?;
        match self {
            Model::FiniteStatic(m) => m.moments(m_max),
            Model::Blocked(b) => b.moments(m_max),
            _ => moments::generic_moments(self, m_max),
        }
    }
}
