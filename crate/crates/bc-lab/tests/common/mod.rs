//! Slow reference implementations shared by the integration tests. These
//! deliberately avoid the library's algorithms: unions by inclusion-exclusion
//! or path enumeration, variances by the raw double sum, norms via Jacobi
//! eigenvalues.

#![allow(dead_code)]

use bc_lab::models::{Model, MomentEntry};

/// P(A_a+1 ∪ ... ∪ A_b) for independent events by inclusion-exclusion over
/// all nonempty index subsets. Exponential; keep b - a small.
pub fn union_inclusion_exclusion(marginals: &[f64]) -> f64 {
    let n = marginals.len();
    assert!(n <= 20, "inclusion-exclusion oracle limited to 20 events");
    let mut total = 0.0;
    for mask in 1u32..(1 << n) {
        let mut product = 1.0;
        for (i, &p) in marginals.iter().enumerate() {
            if mask & (1 << i) != 0 {
                product *= p;
            }
        }
        let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * product;
    }
    total
}

/// Moments of S_m from raw per-outcome enumeration: each outcome is a
/// 0/1 indicator vector with a weight. E and Var are computed directly
/// from the distribution of the count.
pub fn moments_from_outcomes(outcomes: &[(f64, Vec<u8>)], m: usize) -> (f64, f64) {
    let counts: Vec<f64> = outcomes
        .iter()
        .map(|(_, ind)| ind[..m].iter().map(|&x| f64::from(x)).sum::<f64>())
        .collect();
    let mean: f64 = outcomes
        .iter()
        .zip(&counts)
        .map(|((w, _), c)| w * c)
        .sum();
    // Centered two-pass form; the naive E[c^2] - mean^2 cancels badly.
    let var: f64 = outcomes
        .iter()
        .zip(&counts)
        .map(|((w, _), c)| w * (c - mean) * (c - mean))
        .sum();
    (mean, var)
}

/// All outcomes of a two-state chain of length n: (probability, indicator
/// vector of state-1 visits). 2^n paths; keep n ≤ 12.
pub fn markov_outcomes(initial: [f64; 2], transition: [[f64; 2]; 2], n: usize) -> Vec<(f64, Vec<u8>)> {
    assert!(n <= 12, "path enumeration oracle limited to 2^12 paths");
    let mut outcomes = Vec::with_capacity(1 << n);
    for code in 0u32..(1 << n) {
        let states: Vec<usize> = (0..n).map(|i| ((code >> i) & 1) as usize).collect();
        let mut p = initial[states[0]];
        for w in states.windows(2) {
            p *= transition[w[0]][w[1]];
        }
        outcomes.push((p, states.iter().map(|&s| s as u8).collect()));
    }
    outcomes
}

/// P(at least one state-1 visit in positions a+1..=b), from enumerated
/// outcomes.
pub fn outcome_range_union(outcomes: &[(f64, Vec<u8>)], a: usize, b: usize) -> f64 {
    outcomes
        .iter()
        .filter(|(_, ind)| ind[a..b].iter().any(|&x| x == 1))
        .map(|(w, _)| w)
        .sum()
}

/// Var(S_m) from the raw double sum over pair probabilities, no
/// incremental tricks.
pub fn variance_double_sum(model: &Model, m: usize) -> f64 {
    let mut var = 0.0;
    for i in 1..=m {
        for j in 1..=m {
            let pij = model.pair(i, j).unwrap();
            let pi = model.marginal(i).unwrap();
            let pj = model.marginal(j).unwrap();
            var += pij - pi * pj;
        }
    }
    var
}

pub fn mean_simple_sum(model: &Model, m: usize) -> f64 {
    (1..=m).map(|i| model.marginal(i).unwrap()).sum()
}

/// First N > lower with tail bound ≤ threshold, by plain linear scan.
pub fn linear_scan_boundary(
    model: &Model,
    lower: usize,
    limit: usize,
    threshold: f64,
) -> Option<usize> {
    (lower + 1..=limit).find(|&n| model.tail_union_upper(n).unwrap() <= threshold)
}

/// First M > lower with P(union over (lower, M]) > 1 - 2^{-k}, strict,
/// evaluated through the survival product like the paper's construction.
pub fn linear_scan_coverage(
    model: &Model,
    lower: usize,
    limit: usize,
    threshold: f64,
) -> Option<usize> {
    (lower + 1..=limit).find(|&m| model.range_none(lower, m).unwrap() < threshold)
}

/// Largest eigenvalue magnitude of a symmetric matrix by cyclic Jacobi
/// rotations.
pub fn jacobi_spectral_radius(matrix: &[Vec<f64>]) -> f64 {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i].abs()).fold(0.0, f64::max)
}

/// Operator (spectral) norm of a general matrix: sqrt of the largest
/// eigenvalue of AᵀA, via the Jacobi oracle.
pub fn operator_norm_oracle(matrix: &[Vec<f64>]) -> f64 {
    let n = matrix.len();
    let mut gram = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            gram[i][j] = (0..n).map(|k| matrix[k][i] * matrix[k][j]).sum();
        }
    }
    jacobi_spectral_radius(&gram).max(0.0).sqrt()
}

/// Moment-table comparison helper with absolute tolerance.
pub fn assert_entry_close(entry: &MomentEntry, mean: f64, variance: f64, tol: f64) {
    assert!(
        (entry.mean - mean).abs() <= tol,
        "mean at m={}: {} vs {}",
        entry.m,
        entry.mean,
        mean
    );
    assert!(
        (entry.variance - variance).abs() <= tol,
        "variance at m={}: {} vs {}",
        entry.m,
        entry.variance,
        variance
    );
}
