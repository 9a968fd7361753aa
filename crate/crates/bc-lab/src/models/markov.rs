//! Two-state Markov chain with A_n = {X_n = 1}. Marginals come from matrix
//! powers, pair probabilities from the transition kernel between the two
//! times, and range unions from taboo products (paths confined to state 0).

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Mutex;

use super::{ModelError, Result};

type Mat2 = [[f64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn vec_mul(v: &[f64; 2], m: &Mat2) -> [f64; 2] {
    [
        v[0] * m[0][0] + v[1] * m[1][0],
        v[0] * m[0][1] + v[1] * m[1][1],
    ]
}

const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

#[derive(Debug, Serialize, Deserialize)]
pub struct TwoStateMarkovModel {
    initial: [f64; 2],
    transition: Mat2,
    /// Repeated-squaring cache: squares[i] = P^(2^i). Grown lazily so pair
    /// tables cost O(m^2 + log m) matrix work instead of O(m^3).
    #[serde(skip)]
    squares: Mutex<Vec<Mat2>>,
}

impl Clone for TwoStateMarkovModel {
    fn clone(&self) -> Self {
        Self {
            initial: self.initial,
            transition: self.transition,
            squares: Mutex::new(self.squares.lock().unwrap().clone()),
        }
    }
}

impl TwoStateMarkovModel {
    pub fn new(initial: [f64; 2], transition: Mat2) -> Result<Self> {
        let bad = |msg: String| Err(ModelError::InvalidParameter(msg));
        let dist = |v: &[f64], what: &str| -> Result<()> {
            if v.iter().any(|x| *x < 0.0 || !x.is_finite()) {
                return bad(format!("{what} has a negative or non-finite entry"));
            }
            let s: f64 = v.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return bad(format!("{what} sums to {s}, expected 1"));
            }
            Ok(())
        };
        dist(&initial, "initial distribution")?;
        dist(&transition[0], "transition row 0")?;
        dist(&transition[1], "transition row 1")?;
        Ok(Self {
            initial,
            transition,
            squares: Mutex::new(vec![]),
        })
    }

    /// Symmetric chain: P(0→1) = P(1→0) = a, uniform start.
    pub fn symmetric(a: f64) -> Result<Self> {
        Self::new([0.5, 0.5], [[1.0 - a, a], [a, 1.0 - a]])
    }

    pub fn initial(&self) -> [f64; 2] {
        self.initial
    }

    pub fn transition(&self) -> Mat2 {
        self.transition
    }

    fn power(&self, e: usize) -> Mat2 {
        if e == 0 {
            return IDENTITY;
        }
        let bits = usize::BITS - e.leading_zeros();
        let mut squares = self.squares.lock().unwrap();
        if squares.is_empty() {
            squares.push(self.transition);
        }
        while squares.len() < bits as usize {
            let last = *squares.last().unwrap();
            squares.push(mat_mul(&last, &last));
        }
        let mut out = IDENTITY;
        for (i, sq) in squares.iter().enumerate().take(bits as usize) {
            if e >> i & 1 == 1 {
                out = mat_mul(&out, sq);
            }
        }
        out
    }

    /// Distribution of X_n (n ≥ 1).
    fn distribution_at(&self, n: usize) -> [f64; 2] {
        vec_mul(&self.initial, &self.power(n - 1))
    }

    pub fn marginal(&self, n: usize) -> f64 {
        self.distribution_at(n)[1]
    }

    /// P(X_i = 1, X_j = 1) for i < j.
    pub fn pair(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < j);
        self.marginal(i) * self.power(j - i)[1][1]
    }

    /// Taboo product: avoiding state 1 over (a, b] means sitting in state 0
    /// the whole window.
    pub fn range_none(&self, a: usize, b: usize) -> f64 {
        let enter = self.distribution_at(a + 1)[0];
        enter * self.transition[0][0].powi((b - a - 1) as i32)
    }

    fn state_one_recurrent(&self) -> bool {
        // From state 0 the chain keeps re-entering 1 whenever 0 is not
        // absorbing; then 1 is visited infinitely often almost surely.
        self.transition[0][0] < 1.0
    }

    pub fn tail_union_upper(&self, n: usize) -> f64 {
        if self.state_one_recurrent() {
            return 1.0;
        }
        match self.tail_marginal_sum_upper(n) {
            Some(s) => s.min(1.0),
            None => 1.0,
        }
    }

    pub fn tail_marginal_sum_upper(&self, n: usize) -> Option<f64> {
        if self.state_one_recurrent() {
            return None;
        }
        // State 0 absorbing: P(X_n = 1) = i1 * p11^(n-1), a geometric tail.
        let i1 = self.initial[1];
        let p11 = self.transition[1][1];
        if i1 == 0.0 {
            return Some(0.0);
        }
        if p11 >= 1.0 {
            return None;
        }
        Some(i1 * p11.powi((n - 1) as i32) / (1.0 - p11))
    }

    /// Joint survival for two disjoint windows (a1,b1], (a2,b2] with b1 ≤ a2:
    /// no state-1 visit in either window.
    pub fn joint_range_none(&self, a1: usize, b1: usize, a2: usize, b2: usize) -> f64 {
        debug_assert!(a1 < b1 && b1 <= a2 && a2 < b2);
        let enter = self.distribution_at(a1 + 1)[0];
        let through_first = enter * self.transition[0][0].powi((b1 - a1 - 1) as i32);
        // Free evolution from time b1 (state 0) to time a2 + 1.
        let v = vec_mul(&[through_first, 0.0], &self.power(a2 + 1 - b1));
        v[0] * self.transition[0][0].powi((b2 - a2 - 1) as i32)
    }

    pub fn sample_prefix(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(n);
        let mut state = usize::from(rng.gen::<f64>() >= self.initial[0]);
        out.push(state as u8);
        for _ in 1..n {
            state = usize::from(rng.gen::<f64>() >= self.transition[state][0]);
            out.push(state as u8);
        }
        out
    }
}
