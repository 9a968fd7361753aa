//! Largest-singular-value estimation for dense truncations, via power
//! iteration on the Gram product with a deterministic start vector.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("matrix is not square: row {row} has length {len}, expected {n}")]
    NonSquare { row: usize, len: usize, n: usize },
    #[error("matrix has a non-finite entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("max_iters must be >= 1")]
    NoIterations,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn mat_vec(a: &[Vec<f64>], x: &[f64], out: &mut [f64]) {
    for (i, row) in a.iter().enumerate() {
        out[i] = row.iter().zip(x).map(|(r, v)| r * v).sum();
    }
}

fn mat_t_vec(a: &[Vec<f64>], x: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for (row, &xi) in a.iter().zip(x) {
        for (o, r) in out.iter_mut().zip(row) {
            *o += r * xi;
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// Power iteration on AᵀA. The start vector is all-ones with a tiny index
/// ramp (breaks symmetry deterministically); on stagnation without
/// convergence the vector is perturbed deterministically and iteration
/// continues.
pub fn operator_norm_estimate(
    matrix: &[Vec<f64>],
    max_iters: usize,
    tol: f64,
) -> Result<NormEstimate, NormError> {
    if max_iters == 0 {
        return Err(NormError::NoIterations);
    }
    let n = matrix.len();
    for (row, r) in matrix.iter().enumerate() {
        if r.len() != n {
            return Err(NormError::NonSquare {
                row,
                len: r.len(),
                n,
            });
        }
        for (j, v) in r.iter().enumerate() {
            if !v.is_finite() {
                return Err(NormError::NonFinite { i: row, j });
            }
        }
    }
    if n == 0 {
        return Ok(NormEstimate {
            value: 0.0,
            converged: true,
            iterations: 0,
        });
    }

    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * 1e-6).collect();
    normalize(&mut v);
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut sigma_prev = f64::NAN;
    let mut stagnant = 0usize;
    for iter in 1..=max_iters {
        mat_vec(matrix, &v, &mut y);
        mat_t_vec(matrix, &y, &mut z);
        // Rayleigh quotient of AᵀA at the unit vector v
        let lambda: f64 = v.iter().zip(&z).map(|(a, b)| a * b).sum();
        let sigma = lambda.max(0.0).sqrt();
        if sigma == 0.0 {
            return Ok(NormEstimate {
                value: 0.0,
                converged: true,
                iterations: iter,
            });
        }
        if sigma_prev.is_finite() {
            let rel = (sigma - sigma_prev).abs() / sigma.max(f64::MIN_POSITIVE);
            if rel <= tol {
                // residual check distinguishes convergence from a stall in
                // a subdominant eigenspace
                let resid: f64 = z
                    .iter()
                    .zip(&v)
                    .map(|(zi, vi)| (zi - lambda * vi).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if resid <= tol.max(1e-12) * lambda.max(1.0) {
                    return Ok(NormEstimate {
                        value: sigma,
                        converged: true,
                        iterations: iter,
                    });
                }
                stagnant += 1;
                if stagnant >= 5 {
                    for (i, x) in v.iter_mut().enumerate() {
                        *x += ((i + 1) as f64) * 1e-4 * if i % 2 == 0 { 1.0 } else { -1.0 };
                    }
                    stagnant = 0;
                }
            } else {
                stagnant = 0;
            }
        }
        sigma_prev = sigma;
        v.copy_from_slice(&z);
        if normalize(&mut v) == 0.0 {
            return Ok(NormEstimate {
                value: sigma,
                converged: true,
                iterations: iter,
            });
        }
    }
    Ok(NormEstimate {
        value: sigma_prev,
        converged: false,
        iterations: max_iters,
    })
}
