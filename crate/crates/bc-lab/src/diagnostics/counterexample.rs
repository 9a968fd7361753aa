//! Closed-form arithmetic of the three-point counterexample: X uniform on
//! {1,2,3}, single-event selections B_k = A_{n_k} chosen by parity, with
//! E S_m = 2m/3 and Var S_m = (2/9)(t² + (m−t)² − t(m−t)) ≥ m²/18, so the
//! variance-to-squared-mean ratio never drops below 1/8.

use serde::{Deserialize, Serialize};

use super::DiagnosticsError;
use crate::models::{FiniteStaticModel, Model};
use crate::space::FiniteSpace;

/// Rule choosing the parity of the selected index n_k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ParityRule {
    /// n_k odd for odd k.
    Alternating,
    AllOdd,
    AllEven,
    /// Explicit odd/even flags, true = odd.
    Explicit { odd: Vec<bool> },
}

impl ParityRule {
    pub fn is_odd(&self, k: usize) -> bool {
        debug_assert!(k >= 1);
        match self {
            ParityRule::Alternating => k % 2 == 1,
            ParityRule::AllOdd => true,
            ParityRule::AllEven => false,
            ParityRule::Explicit { odd } => odd.get(k - 1).copied().unwrap_or(false),
        }
    }
}

/// Var S_m for a selection with t odd indices among the first m:
/// (2/9)(t² + (m−t)² − t(m−t)).
pub fn counterexample_variance(m: usize, t: usize) -> Result<f64, DiagnosticsError> {
    if t > m || m < 1 {
        return Err(DiagnosticsError::OutOfRange { t, m });
    }
    let (m, t) = (m as f64, t as f64);
    Ok((2.0 / 9.0) * (t * t + (m - t) * (m - t) - t * (m - t)))
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleRow {
    pub m: usize,
    pub t: usize,
    pub mean: f64,
    pub variance: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub rows: Vec<CounterexampleRow>,
    /// True when every row has ratio ≥ 1/8.
    pub all_ratios_at_least_eighth: bool,
    /// Max relative deviation between the closed form and the exact engine
    /// on the matching parity selection.
    pub max_engine_deviation: f64,
}

/// Builds the selection model (k-th event is {X≠1} or {X≠2} by parity) so
/// its exact moments cross-validate the closed forms.
pub fn selection_model(rule: &ParityRule, m_max: usize) -> Model {
    let space = FiniteSpace::uniform(3).expect("uniform space");
    let not_one = space.event(vec![1, 2]).expect("event");
    let not_two = space.event(vec![0, 2]).expect("event");
    let prefix: Vec<_> = (1..=m_max)
        .map(|k| {
            if rule.is_odd(k) {
                not_one.clone()
            } else {
                not_two.clone()
            }
        })
        .collect();
    let cycle = vec![prefix.last().cloned().unwrap_or_else(|| not_one.clone())];
    Model::FiniteStatic(FiniteStaticModel::new(space, prefix, cycle).expect("selection model"))
}

/// Table of (m, t_m, E S_m, Var S_m, ratio) for m = 1..=m_max, with the
/// closed forms cross-validated against the exact engine.
pub fn counterexample_report(
    rule: &ParityRule,
    m_max: usize,
) -> Result<CounterexampleReport, DiagnosticsError> {
    if m_max < 1 {
        return Err(DiagnosticsError::OutOfRange { t: 0, m: m_max });
    }
    let engine = selection_model(rule, m_max).moments(m_max)?;
    let mut rows = Vec::with_capacity(m_max);
    let mut t = 0usize;
    let mut all_ok = true;
    let mut max_dev: f64 = 0.0;
    for m in 1..=m_max {
        if rule.is_odd(m) {
            t += 1;
        }
        let mean = 2.0 * m as f64 / 3.0;
        let variance = counterexample_variance(m, t)?;
        let ratio = variance / (mean * mean);
        all_ok &= ratio >= 0.125 - 1e-12;
        let e = engine.at(m);
        max_dev = max_dev
            .max((e.variance - variance).abs() / variance.max(f64::MIN_POSITIVE))
            .max((e.mean - mean).abs() / mean);
        rows.push(CounterexampleRow {
            m,
            t,
            mean,
            variance,
            ratio,
        });
    }
    Ok(CounterexampleReport {
        rows,
        all_ratios_at_least_eighth: all_ok,
        max_engine_deviation: max_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tight_case_m2_t1() {
        let v = counterexample_variance(2, 1).unwrap();
        assert!((v - 2.0 / 9.0).abs() < 1e-15);
        // bound m²/18 is tight here
        assert!((v - 4.0 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn all_even_selection() {
        let v = counterexample_variance(5, 0).unwrap();
        assert!((v - (2.0 / 9.0) * 25.0).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(counterexample_variance(3, 4).is_err());
        assert!(counterexample_variance(0, 0).is_err());
    }

    #[test]
    fn lower_bound_sweep() {
        for m in 1..=200 {
            for t in 0..=m {
                let v = counterexample_variance(m, t).unwrap();
                assert!(v >= (m * m) as f64 / 18.0 - 1e-12);
            }
        }
    }

    #[test]
    fn alternating_ratio_is_exactly_eighth_at_even_m() {
        let report = counterexample_report(&ParityRule::Alternating, 1000).unwrap();
        assert!(report.all_ratios_at_least_eighth);
        for row in report.rows.iter().filter(|r| r.m % 2 == 0) {
            assert!((row.ratio - 0.125).abs() < 1e-12, "m = {}", row.m);
        }
        assert!(report.max_engine_deviation < 1e-10);
    }

    #[test]
    fn all_odd_ratio_is_half() {
        let report = counterexample_report(&ParityRule::AllOdd, 100).unwrap();
        for row in &report.rows {
            assert!((row.ratio - 0.5).abs() < 1e-12);
        }
        assert!(report.max_engine_deviation < 1e-10);
    }

    #[test]
    fn explicit_rule_cross_validates() {
        let odd: Vec<bool> = (0..64).map(|i| i % 3 == 0).collect();
        let report = counterexample_report(&ParityRule::Explicit { odd }, 64).unwrap();
        assert!(report.all_ratios_at_least_eighth);
        assert!(report.max_engine_deviation < 1e-10);
    }
}
