//! Seeded path sampling and empirical cross-validation. Every routine is a
//! pure function of (model, arguments, seed); replications draw from
//! per-replication ChaCha streams and are aggregated with a pairwise
//! summation tree, so results do not depend on thread scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::blocks::BlockPlan;
use crate::models::{map_path_through_blocks, Model, ModelError};
use crate::sum::pairwise_sum;

/// Recorded in output metadata: the reproducibility contract names the
/// generator, not just the seed.
pub const GENERATOR_NAME: &str = "chacha8";

#[derive(Debug, Error)]
pub enum MonteCarloError {
    #[error("path of length {len} too short for plan ending at {needed}")]
    PathTooShort { len: usize, needed: usize },
    #[error("E S_m = 0 at grid point {m}; ratio undefined")]
    ZeroMean { m: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

type Result<T> = std::result::Result<T, MonteCarloError>;

fn stream_rng(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathSample {
    pub indicators: Vec<u8>,
    pub partial_sums: Vec<u32>,
    pub seed: u64,
}

impl PathSample {
    fn from_indicators(indicators: Vec<u8>, seed: u64) -> Self {
        let mut acc = 0u32;
        let partial_sums = indicators
            .iter()
            .map(|&x| {
                acc += u32::from(x);
                acc
            })
            .collect();
        Self {
            indicators,
            partial_sums,
            seed,
        }
    }

    pub fn total(&self) -> u32 {
        self.partial_sums.last().copied().unwrap_or(0)
    }
}

/// Indicator path (1_{A_1}, ..., 1_{A_n}), deterministic in the seed.
pub fn sample_path(model: &Model, n: usize, seed: u64) -> Result<PathSample> {
    Ok(PathSample::from_indicators(
        model.sample_prefix(seed, n)?,
        seed,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalMoments {
    pub m: usize,
    pub mean_hat: f64,
    pub var_hat: f64,
    /// Standard error of the mean estimate.
    pub se_mean: f64,
    /// Asymptotic standard error of the variance estimate (fourth-moment
    /// based).
    pub se_var: f64,
    pub paths: usize,
    pub seed: u64,
    pub generator: &'static str,
}

/// Unbiased sample mean/variance of S_m across independent replications.
pub fn empirical_moments(
    model: &Model,
    m: usize,
    paths: usize,
    seed: u64,
) -> Result<EmpiricalMoments> {
    if paths < 2 {
        return Err(MonteCarloError::InvalidArgument(
            "at least 2 replication paths required".into(),
        ));
    }
    let sums = replicate_sums(model, m, paths, seed)?;
    let n = paths as f64;
    let mean = pairwise_sum(&sums) / n;
    let dev2: Vec<f64> = sums.iter().map(|s| (s - mean) * (s - mean)).collect();
    let ss = pairwise_sum(&dev2);
    let var = ss / (n - 1.0);
    let dev4: Vec<f64> = dev2.iter().map(|d| d * d).collect();
    let m4 = pairwise_sum(&dev4) / n;
    let se_var = ((m4 - var * var).max(0.0) / n).sqrt();
    Ok(EmpiricalMoments {
        m,
        mean_hat: mean,
        var_hat: var,
        se_mean: (var / n).sqrt(),
        se_var,
        paths,
        seed,
        generator: GENERATOR_NAME,
    })
}

/// S_m per replication, in replication order.
fn replicate_sums(model: &Model, m: usize, paths: usize, seed: u64) -> Result<Vec<f64>> {
    (0..paths as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(seed, rep);
            let path = model.sample_prefix_with(&mut rng, m)?;
            Ok(path.iter().map(|&x| f64::from(x)).sum())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyVerdict {
    pub holds: bool,
    pub first_failing_block: Option<usize>,
}

/// Pathwise block equivalence: 1_{B_k} must equal the max of the base
/// indicators over block k, and the block count can never exceed the base
/// count on the same path.
pub fn block_path_consistency(path: &PathSample, plan: &BlockPlan) -> Result<ConsistencyVerdict> {
    let needed = *plan.boundaries().last().unwrap();
    if path.indicators.len() < needed {
        return Err(MonteCarloError::PathTooShort {
            len: path.indicators.len(),
            needed,
        });
    }
    let block_path = map_path_through_blocks(&path.indicators, plan, plan.len());
    for (k, &b) in block_path.iter().enumerate() {
        let (lo, hi) = plan.block_range(k + 1);
        let max = path.indicators[lo..hi].iter().copied().max().unwrap_or(0);
        if b != max {
            return Ok(ConsistencyVerdict {
                holds: false,
                first_failing_block: Some(k + 1),
            });
        }
    }
    let block_total: u32 = block_path.iter().map(|&x| u32::from(x)).sum();
    let base_total = path.partial_sums[needed - 1];
    if block_total > base_total {
        return Ok(ConsistencyVerdict {
            holds: false,
            first_failing_block: Some(plan.len()),
        });
    }
    Ok(ConsistencyVerdict {
        holds: true,
        first_failing_block: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthVerdict {
    /// Every path stopped accumulating events in the second half of the
    /// horizon — evidence the total count is almost surely finite.
    Saturating,
    /// Every path gained at least one event in every dyadic window —
    /// evidence the total count is almost surely infinite.
    LinearGrowth,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub verdict: GrowthVerdict,
    pub horizon: usize,
    pub paths: usize,
    pub seed: u64,
    pub generator: &'static str,
    /// Heuristic thresholds are a convention, never a proof.
    pub note: &'static str,
    /// Fraction of paths with no events in the second half of the horizon.
    pub saturating_fraction: f64,
    /// Fraction of paths with at least one event in every dyadic window.
    pub growing_fraction: f64,
    pub min_final_count: u32,
    pub max_final_count: u32,
}

/// Dyadic-window growth heuristic over sampled paths. Windows are
/// (2^i, 2^{i+1}] for 2 ≤ 2^i < horizon; saturation compares S at the
/// horizon against S at half the horizon.
pub fn growth_verdict(model: &Model, horizon: usize, paths: usize, seed: u64) -> Result<GrowthReport> {
    if horizon < 10 || paths < 10 {
        return Err(MonteCarloError::InvalidArgument(
            "need horizon >= 10 and paths >= 10".into(),
        ));
    }
    let samples: Vec<PathSample> = (0..paths as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(seed, rep);
            Ok(PathSample::from_indicators(
                model.sample_prefix_with(&mut rng, horizon)?,
                seed,
            ))
        })
        .collect::<Result<_>>()?;

    let mut saturating = 0usize;
    let mut growing = 0usize;
    for s in &samples {
        if s.partial_sums[horizon - 1] == s.partial_sums[horizon / 2 - 1] {
            saturating += 1;
        }
        let mut every_window = true;
        let mut lo = 2usize;
        while lo * 2 <= horizon {
            let hi = lo * 2;
            if s.partial_sums[hi - 1] - s.partial_sums[lo - 1] < 1 {
                every_window = false;
                break;
            }
            lo = hi;
        }
        if every_window {
            growing += 1;
        }
    }
    let saturating_fraction = saturating as f64 / paths as f64;
    let growing_fraction = growing as f64 / paths as f64;
    // Small dyadic windows are empty with non-negligible probability even
    // under steady growth, so the growing threshold is a majority, not
    // unanimity; saturation tolerates the occasional straggler event.
    let verdict = if saturating_fraction >= 0.99 {
        GrowthVerdict::Saturating
    } else if growing_fraction >= 0.5 && saturating_fraction <= 0.01 {
        GrowthVerdict::LinearGrowth
    } else {
        GrowthVerdict::Inconclusive
    };
    Ok(GrowthReport {
        verdict,
        horizon,
        paths,
        seed,
        generator: GENERATOR_NAME,
        note: "heuristic evidence from finite paths, not a proof",
        saturating_fraction,
        growing_fraction,
        min_final_count: samples.iter().map(PathSample::total).min().unwrap_or(0),
        max_final_count: samples.iter().map(PathSample::total).max().unwrap_or(0),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioQuantileRow {
    pub m: usize,
    pub exact_mean: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioQuantileTable {
    pub rows: Vec<RatioQuantileRow>,
    /// True when the 5–95% band of S_m / E S_m at the largest grid point
    /// lies within `window` of 1.
    pub converged: bool,
    pub window: f64,
    pub paths: usize,
    pub seed: u64,
    pub generator: &'static str,
}

/// Empirical quantiles of S_m / E S_m along a grid of m.
pub fn xz_ratio_paths(
    model: &Model,
    m_grid: &[usize],
    paths: usize,
    seed: u64,
    window: f64,
) -> Result<RatioQuantileTable> {
    if m_grid.is_empty() || !m_grid.windows(2).all(|w| w[0] < w[1]) || m_grid[0] < 1 {
        return Err(MonteCarloError::InvalidArgument(
            "m_grid must be nonempty and strictly increasing".into(),
        ));
    }
    if paths < 2 {
        return Err(MonteCarloError::InvalidArgument("need at least 2 paths".into()));
    }
    let horizon = *m_grid.last().unwrap();
    let exact = model.moments(horizon)?;
    for &m in m_grid {
        if exact.at(m).mean <= 0.0 {
            return Err(MonteCarloError::ZeroMean { m });
        }
    }
    let samples: Vec<Vec<u32>> = (0..paths as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(seed, rep);
            let path = model.sample_prefix_with(&mut rng, horizon)?;
            let mut acc = 0u32;
            let sums: Vec<u32> = path
                .iter()
                .map(|&x| {
                    acc += u32::from(x);
                    acc
                })
                .collect();
            Ok(m_grid.iter().map(|&m| sums[m - 1]).collect())
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(m_grid.len());
    for (gi, &m) in m_grid.iter().enumerate() {
        let mean = exact.at(m).mean;
        let mut ratios: Vec<f64> = samples.iter().map(|s| f64::from(s[gi]) / mean).collect();
        ratios.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
        let q = |p: f64| ratios[((p * (paths - 1) as f64).round() as usize).min(paths - 1)];
        rows.push(RatioQuantileRow {
            m,
            exact_mean: mean,
            q05: q(0.05),
            q50: q(0.50),
            q95: q(0.95),
        });
    }
    let last = rows.last().expect("nonempty grid");
    let converged = last.q05 >= 1.0 - window && last.q95 <= 1.0 + window;
    Ok(RatioQuantileTable {
        rows,
        converged,
        window,
        paths,
        seed,
        generator: GENERATOR_NAME,
    })
}
