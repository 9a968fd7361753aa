//! Finite-scan condition checkers.

use serde::Serialize;

use super::norm::operator_norm_estimate;
use super::profile::{CorrelationMatrixSpec, MixingProfile};
use super::report::{ConditionId, DiagnosticsReport, ScanRange, Verdict, Witness};
use super::DiagnosticsError;
use crate::models::{Model, MomentEntry};
use crate::sum::KahanSum;

pub const DEFAULT_CHECK_TOL: f64 = 1e-9;
pub const DEFAULT_KS_EPSILON: f64 = 1e-3;

type Result<T> = std::result::Result<T, DiagnosticsError>;

fn effective_scan(model: &Model, requested: usize) -> usize {
    match model.horizon() {
        Some(h) => requested.min(h),
        None => requested,
    }
}

/// Summability check for Σ P(A_n): `Holds` with an explicit bound when the
/// model family provides an analytic tail certificate, `Inconclusive`
/// otherwise. Never claims divergence.
pub fn check_bc1(model: &Model, scan: usize) -> Result<DiagnosticsReport> {
    if scan < 1 {
        return Err(DiagnosticsError::InvalidScan("scan depth must be >= 1".into()));
    }
    let scan = effective_scan(model, scan);
    let mut partial = KahanSum::new();
    for n in 1..=scan {
        partial.add(model.marginal(n)?);
    }
    let range = ScanRange { from: 1, to: scan };
    let tail = if model.horizon() == Some(scan) {
        Some(0.0)
    } else {
        model.tail_marginal_sum_upper(scan + 1)?
    };
    Ok(match tail {
        Some(t) => DiagnosticsReport::new(ConditionId::SummableMarginals, Verdict::Holds, range)
            .with_witness(Witness {
                indices: vec![scan],
                values: vec![partial.value() + t],
                note: "certified bound on the full series".into(),
            })
            .with_note(format!(
                "partial sum {} plus analytic tail bound {}",
                partial.value(),
                t
            )),
        None => DiagnosticsReport::new(
            ConditionId::SummableMarginals,
            Verdict::Inconclusive,
            range,
        )
        .with_note(format!(
            "no tail certificate; partial sum reached {} at depth {}",
            partial.value(),
            scan
        )),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KochenStoneDiagnostic {
    /// Moment entries at the requested grid points.
    pub grid_entries: Vec<MomentEntry>,
    /// Running infimum of the ratio over defined grid points.
    pub running_infimum: Vec<f64>,
    /// Grid points skipped because E S_m = 0.
    pub skipped_zero_mean: Vec<usize>,
    pub epsilon: f64,
    pub verdict: Verdict,
    pub note: String,
}

/// Ratio diagnostic: Var(S_m)/(E S_m)^2 along a grid with its running
/// infimum. Verdict `Holds` means "liminf plausibly 0": the infimum dropped
/// below epsilon with a non-increasing trend. Finite scans cannot prove the
/// liminf statement, so `Fails` is never reported here.
pub fn kochen_stone_ratio(
    model: &Model,
    m_grid: &[usize],
    epsilon: f64,
) -> Result<KochenStoneDiagnostic> {
    if m_grid.is_empty() || !m_grid.windows(2).all(|w| w[0] < w[1]) || m_grid[0] < 1 {
        return Err(DiagnosticsError::InvalidScan(
            "m_grid must be nonempty and strictly increasing".into(),
        ));
    }
    let table = model.moments(*m_grid.last().unwrap())?;
    let mut grid_entries = Vec::with_capacity(m_grid.len());
    let mut running_infimum = Vec::new();
    let mut skipped = Vec::new();
    let mut inf = f64::INFINITY;
    for &m in m_grid {
        let e = table.at(m).clone();
        match e.ratio {
            Some(r) => {
                inf = inf.min(r);
                running_infimum.push(inf);
            }
            None => skipped.push(m),
        }
        grid_entries.push(e);
    }
    if running_infimum.is_empty() {
        return Err(DiagnosticsError::ZeroMean);
    }
    let first = *running_infimum.first().unwrap();
    let last_ratio = grid_entries
        .iter()
        .rev()
        .find_map(|e| e.ratio)
        .unwrap_or(f64::INFINITY);
    let (verdict, note) = if inf < epsilon && last_ratio <= first {
        (
            Verdict::Holds,
            format!("liminf plausibly 0: infimum {inf:.3e} below epsilon {epsilon:.1e} with non-increasing trend"),
        )
    } else {
        (
            Verdict::Inconclusive,
            format!("running infimum {inf:.6} has not certified a vanishing trend"),
        )
    };
    Ok(KochenStoneDiagnostic {
        grid_entries,
        running_infimum,
        skipped_zero_mean: skipped,
        epsilon,
        verdict,
        note,
    })
}

/// |P(A_i ∩ A_j) − P(A_i)P(A_j)| ≤ tol for all 1 ≤ i < j ≤ N; on failure
/// the witness is the pair maximizing the gap.
pub fn check_pairwise_independent(
    model: &Model,
    scan: usize,
    tol: f64,
) -> Result<DiagnosticsReport> {
    if scan < 2 {
        return Err(DiagnosticsError::InvalidScan("scan size must be >= 2".into()));
    }
    let scan = effective_scan(model, scan);
    let range = ScanRange { from: 1, to: scan };
    let mut worst: Option<(usize, usize, f64, f64, f64)> = None;
    let marginals: Vec<f64> = (1..=scan)
        .map(|n| model.marginal(n))
        .collect::<std::result::Result<_, _>>()?;
    for i in 1..=scan {
        for j in (i + 1)..=scan {
            let pair = model.pair(i, j)?;
            let prod = marginals[i - 1] * marginals[j - 1];
            let gap = (pair - prod).abs();
            if worst.map_or(true, |w| gap > w.4) {
                worst = Some((i, j, pair, prod, gap));
            }
        }
    }
    let (i, j, pair, prod, gap) = worst.expect("scan >= 2");
    if gap <= tol {
        Ok(
            DiagnosticsReport::new(ConditionId::PairwiseIndependence, Verdict::Holds, range)
                .with_note(format!("max gap {gap:.3e} within tolerance {tol:.1e}")),
        )
    } else {
        Ok(
            DiagnosticsReport::new(ConditionId::PairwiseIndependence, Verdict::Fails, range)
                .with_witness(Witness {
                    indices: vec![i, j],
                    values: vec![pair, prod, gap],
                    note: "pair probability, marginal product, gap".into(),
                })
                .with_note(format!("gap {gap} at pair ({i}, {j}) exceeds tolerance")),
        )
    }
}

/// Covariance bounded by ρ_{|i−j|} (P(A_i) + P(A_j)) over the scanned square.
pub fn check_mixing_condition(
    model: &Model,
    profile: &MixingProfile,
    scan: usize,
    tol: f64,
) -> Result<DiagnosticsReport> {
    if scan < 2 {
        return Err(DiagnosticsError::InvalidScan("scan size must be >= 2".into()));
    }
    if !profile.is_valid() {
        return Err(DiagnosticsError::InvalidScan(
            "mixing profile is not a nonnegative l1 sequence".into(),
        ));
    }
    let scan = effective_scan(model, scan);
    let range = ScanRange { from: 1, to: scan };
    let marginals: Vec<f64> = (1..=scan)
        .map(|n| model.marginal(n))
        .collect::<std::result::Result<_, _>>()?;
    for i in 1..=scan {
        for j in (i + 1)..=scan {
            let cov = model.pair(i, j)? - marginals[i - 1] * marginals[j - 1];
            let rhs = profile.rho(j - i) * (marginals[i - 1] + marginals[j - 1]);
            if cov > rhs + tol {
                return Ok(DiagnosticsReport::new(
                    ConditionId::UniformMixing,
                    Verdict::Fails,
                    range,
                )
                .with_witness(Witness {
                    indices: vec![i, j],
                    values: vec![cov, rhs],
                    note: "covariance, mixing bound".into(),
                })
                .with_note(format!(
                    "covariance {cov} exceeds bound {rhs} at ({i}, {j})"
                )));
            }
        }
    }
    Ok(
        DiagnosticsReport::new(ConditionId::UniformMixing, Verdict::Holds, range).with_note(
            format!(
                "mixing inequality holds on the scanned square; declared l1 bound {}",
                profile.l1_bound().expect("validated profile")
            ),
        ),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixBoundDiagnostic {
    pub report: DiagnosticsReport,
    /// Operator-norm estimates of the N'×N' truncations on a doubling grid.
    pub truncation_norms: Vec<(usize, f64)>,
}

/// Correlation-matrix condition: the covariance inequality on the scanned
/// square plus boundedness *evidence* from truncation norms on a doubling
/// sequence. Holds only when the inequality holds and every truncation norm
/// stays within `norm_cap`; an exceeded cap downgrades to inconclusive
/// (truncations cannot prove unboundedness of the infinite matrix either).
pub fn check_matrix_condition(
    model: &Model,
    spec: &CorrelationMatrixSpec,
    scan: usize,
    norm_cap: f64,
    tol: f64,
) -> Result<MatrixBoundDiagnostic> {
    if scan < 2 {
        return Err(DiagnosticsError::InvalidScan("scan size must be >= 2".into()));
    }
    if !spec.is_valid() {
        return Err(DiagnosticsError::InvalidScan(
            "matrix spec entries must be nonnegative and finite".into(),
        ));
    }
    let scan = effective_scan(model, scan);
    let range = ScanRange { from: 1, to: scan };
    let marginals: Vec<f64> = (1..=scan)
        .map(|n| model.marginal(n))
        .collect::<std::result::Result<_, _>>()?;

    let mut violation: Option<Witness> = None;
    'outer: for i in 1..=scan {
        for j in (i + 1)..=scan {
            let cov = model.pair(i, j)? - marginals[i - 1] * marginals[j - 1];
            let root = (marginals[i - 1] * marginals[j - 1]).sqrt();
            let entry = spec.entry(i, j).min(spec.entry(j, i));
            let rhs = entry * root;
            if cov > rhs + tol {
                violation = Some(Witness {
                    indices: vec![i, j],
                    values: vec![cov, rhs],
                    note: "covariance, matrix bound".into(),
                });
                break 'outer;
            }
        }
    }

    let mut truncation_norms = Vec::new();
    let mut size = 2usize;
    loop {
        let n = size.min(scan);
        let est = operator_norm_estimate(&spec.truncation(n), 2000, 1e-9)?;
        truncation_norms.push((n, est.value));
        if n == scan {
            break;
        }
        size *= 2;
    }
    let norms_bounded = truncation_norms.iter().all(|&(_, v)| v <= norm_cap + tol);

    let report = match (violation, norms_bounded) {
        (Some(w), _) => DiagnosticsReport::new(ConditionId::MatrixBound, Verdict::Fails, range)
            .with_witness(w)
            .with_note("covariance inequality violated"),
        (None, true) => DiagnosticsReport::new(ConditionId::MatrixBound, Verdict::Holds, range)
            .with_note(format!(
                "inequality holds and all truncation norms within cap {norm_cap}"
            )),
        (None, false) => {
            DiagnosticsReport::new(ConditionId::MatrixBound, Verdict::Inconclusive, range)
                .with_note(format!(
                    "inequality holds but truncation norms exceed cap {norm_cap}; boundedness evidence insufficient"
                ))
        }
    };
    Ok(MatrixBoundDiagnostic {
        report,
        truncation_norms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum XzForm {
    Strong,
    WeakOnly,
}

#[derive(Debug, Clone, Serialize)]
pub struct XzDiagnostic {
    pub report: DiagnosticsReport,
    /// Which inequality form held, when the verdict is `Holds`.
    pub form: Option<XzForm>,
    /// Grid points where the weak (logarithmic) form is undefined (E S_m ≤ 1).
    pub skipped_log_points: Vec<usize>,
    /// E S_m at the first and last grid point, as divergence evidence.
    pub mean_first_last: (f64, f64),
}

/// Variance-growth conditions: Var(S_m) ≤ C (E S_m)^{2−δ} (strong) or
/// Var(S_m) ≤ C (E S_m)^2 / (ln E S_m)^{1+δ} (weak), evaluated on a grid.
pub fn check_xz_conditions(
    model: &Model,
    c: f64,
    delta: f64,
    m_grid: &[usize],
    tol: f64,
) -> Result<XzDiagnostic> {
    if c <= 0.0 || delta <= 0.0 {
        return Err(DiagnosticsError::InvalidScan("C and delta must be positive".into()));
    }
    if m_grid.is_empty() || !m_grid.windows(2).all(|w| w[0] < w[1]) || m_grid[0] < 1 {
        return Err(DiagnosticsError::InvalidScan(
            "m_grid must be nonempty and strictly increasing".into(),
        ));
    }
    let table = model.moments(*m_grid.last().unwrap())?;
    let range = ScanRange {
        from: m_grid[0],
        to: *m_grid.last().unwrap(),
    };
    let mut strong_all = true;
    let mut weak_all = true;
    let mut skipped = Vec::new();
    let mut first_failure: Option<Witness> = None;
    for &m in m_grid {
        let e = table.at(m);
        let strong_ok = e.variance <= c * e.mean.powf(2.0 - delta) + tol;
        let weak_ok = if e.mean > 1.0 {
            e.variance <= c * e.mean * e.mean / e.mean.ln().powf(1.0 + delta) + tol
        } else {
            skipped.push(m);
            // logarithm nonpositive: point skipped for the weak form
            strong_ok
        };
        strong_all &= strong_ok;
        weak_all &= strong_ok || weak_ok;
        if !(strong_ok || weak_ok) && first_failure.is_none() {
            first_failure = Some(Witness {
                indices: vec![m],
                values: vec![e.variance, c * e.mean.powf(2.0 - delta)],
                note: "variance, strong-form bound".into(),
            });
        }
    }
    let mean_first_last = (table.at(m_grid[0]).mean, table.last().mean);
    let (report, form) = if strong_all {
        (
            DiagnosticsReport::new(ConditionId::VarianceGrowth, Verdict::Holds, range)
                .with_note("strong form holds on every grid point"),
            Some(XzForm::Strong),
        )
    } else if weak_all {
        (
            DiagnosticsReport::new(ConditionId::VarianceGrowth, Verdict::Holds, range)
                .with_note("weak (logarithmic) form only"),
            Some(XzForm::WeakOnly),
        )
    } else {
        (
            DiagnosticsReport::new(ConditionId::VarianceGrowth, Verdict::Fails, range)
                .with_witness(first_failure.expect("failure recorded"))
                .with_note("both inequality forms violated"),
            None,
        )
    };
    Ok(XzDiagnostic {
        report,
        form,
        skipped_log_points: skipped,
        mean_first_last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{FiniteStaticModel, IndependentModel, MarginalSpec, TwoStateMarkovModel};

    fn inv_square() -> Model {
        Model::Independent(
            IndependentModel::new(MarginalSpec::Power {
                c: 1.0,
                alpha: 2.0,
                shift: 1,
            })
            .unwrap(),
        )
    }

    fn counterexample() -> Model {
        Model::FiniteStatic(FiniteStaticModel::counterexample_preset())
    }

    #[test]
    fn bc1_holds_with_basel_bound() {
        let r = check_bc1(&inv_square(), 100).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let bound = r.witness.unwrap().values[0];
        let exact = std::f64::consts::PI.powi(2) / 6.0 - 1.0;
        assert!(bound >= exact && bound - exact < 1e-6);
    }

    #[test]
    fn bc1_zero_model_bound_zero() {
        let model = Model::Independent(IndependentModel::constant(0.0).unwrap());
        let r = check_bc1(&model, 10).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.witness.unwrap().values[0], 0.0);
    }

    #[test]
    fn bc1_inconclusive_on_counterexample() {
        for scan in [5, 50, 500] {
            let r = check_bc1(&counterexample(), scan).unwrap();
            assert_eq!(r.verdict, Verdict::Inconclusive);
        }
    }

    #[test]
    fn kochen_stone_constant_half_ratios() {
        let model = Model::Independent(IndependentModel::constant(0.5).unwrap());
        let d = kochen_stone_ratio(&model, &[10, 100, 1000], DEFAULT_KS_EPSILON).unwrap();
        let expected = [0.1, 0.01, 0.001];
        for (e, x) in d.grid_entries.iter().zip(expected) {
            assert!((e.ratio.unwrap() - x).abs() < 1e-12);
        }
        assert_eq!(d.verdict, Verdict::Inconclusive); // 0.001 not < 1e-3
    }

    #[test]
    fn kochen_stone_counterexample_infimum_stays_above_eighth() {
        let d = kochen_stone_ratio(&counterexample(), &[10, 50, 200, 500], 1e-3).unwrap();
        for &inf in &d.running_infimum {
            assert!(inf >= 0.125 - 1e-12);
        }
        assert_eq!(d.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn kochen_stone_deterministic_events() {
        let model = Model::Independent(IndependentModel::constant(1.0).unwrap());
        let d = kochen_stone_ratio(&model, &[5, 10], 1e-3).unwrap();
        assert_eq!(d.grid_entries[0].ratio, Some(0.0));
        assert_eq!(d.verdict, Verdict::Holds);
    }

    #[test]
    fn kochen_stone_zero_mean_errors() {
        let model = Model::Independent(IndependentModel::constant(0.0).unwrap());
        assert!(matches!(
            kochen_stone_ratio(&model, &[5, 10], 1e-3),
            Err(DiagnosticsError::ZeroMean)
        ));
    }

    #[test]
    fn pairwise_holds_on_independent() {
        let model = Model::Independent(IndependentModel::constant(0.5).unwrap());
        let r = check_pairwise_independent(&model, 20, DEFAULT_CHECK_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn pairwise_fails_on_counterexample_with_gap() {
        let r = check_pairwise_independent(&counterexample(), 8, DEFAULT_CHECK_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        let w = r.witness.unwrap();
        // max gap is the same-parity covariance 2/3 - 4/9 = 2/9
        assert!((w.values[2] - 2.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn pairwise_holds_on_identical_row_chain() {
        let iid =
            TwoStateMarkovModel::new([0.4, 0.6], [[0.4, 0.6], [0.4, 0.6]]).unwrap();
        let r = check_pairwise_independent(&Model::Markov(iid), 12, DEFAULT_CHECK_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn mixing_holds_trivially_on_independent() {
        let model = Model::Independent(IndependentModel::constant(0.3).unwrap());
        let profile = MixingProfile::Geometric { c: 0.1, r: 0.5 };
        let r = check_mixing_condition(&model, &profile, 20, DEFAULT_CHECK_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn mixing_holds_on_markov_with_matching_profile() {
        let model = Model::Markov(TwoStateMarkovModel::symmetric(0.3).unwrap());
        // cov(i,j) = 0.25 * 0.4^{|i-j|}; rhs = rho_d * 1.0
        let profile = MixingProfile::Geometric { c: 0.5, r: 0.4 };
        let r = check_mixing_condition(&model, &profile, 40, DEFAULT_CHECK_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn mixing_fails_on_counterexample() {
        let profile = MixingProfile::Geometric { c: 0.5, r: 0.4 };
        let r =
            check_mixing_condition(&counterexample(), &profile, 20, DEFAULT_CHECK_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(r.witness.is_some());
    }

    #[test]
    fn matrix_condition_zero_spec_on_independent() {
        let model = Model::Independent(IndependentModel::constant(0.5).unwrap());
        let d = check_matrix_condition(
            &model,
            &CorrelationMatrixSpec::Zero,
            16,
            1.0,
            DEFAULT_CHECK_TOL,
        )
        .unwrap();
        assert_eq!(d.report.verdict, Verdict::Holds);
        assert!(d.truncation_norms.iter().all(|&(_, v)| v == 0.0));
    }

    #[test]
    fn matrix_condition_banded_norms_within_row_sum_bound() {
        let model = Model::Independent(IndependentModel::constant(0.5).unwrap());
        let spec = CorrelationMatrixSpec::Banded { c: 1.0, r: 0.5 };
        // row sums are bounded by 1 + 2 Σ 0.5^k = 3
        let d = check_matrix_condition(&model, &spec, 32, 3.0, DEFAULT_CHECK_TOL).unwrap();
        assert_eq!(d.report.verdict, Verdict::Holds);
        assert!(d.truncation_norms.iter().all(|&(_, v)| v <= 3.0));
    }

    #[test]
    fn matrix_condition_all_ones_exceeds_cap() {
        let model = Model::Independent(IndependentModel::constant(0.5).unwrap());
        let spec = CorrelationMatrixSpec::Constant { v: 1.0 };
        let d = check_matrix_condition(&model, &spec, 32, 3.0, DEFAULT_CHECK_TOL).unwrap();
        assert_eq!(d.report.verdict, Verdict::Inconclusive);
        // rank-one all-ones truncation has norm exactly N'
        let &(n, v) = d.truncation_norms.last().unwrap();
        assert!((v - n as f64).abs() < 1e-6 * n as f64);
    }

    #[test]
    fn xz_strong_form_on_constant_half() {
        let model = Model::Independent(IndependentModel::constant(0.5).unwrap());
        let d = check_xz_conditions(&model, 1.0, 1.0, &[10, 50, 100], DEFAULT_CHECK_TOL).unwrap();
        assert_eq!(d.report.verdict, Verdict::Holds);
        assert_eq!(d.form, Some(XzForm::Strong));
    }

    #[test]
    fn xz_fails_on_counterexample() {
        let d =
            check_xz_conditions(&counterexample(), 1.0, 1.0, &[10, 50, 100], DEFAULT_CHECK_TOL)
                .unwrap();
        assert_eq!(d.report.verdict, Verdict::Fails);
        assert!(d.report.witness.is_some());
    }

    #[test]
    fn xz_trivial_on_deterministic_events() {
        let model = Model::Independent(IndependentModel::constant(1.0).unwrap());
        let d = check_xz_conditions(&model, 1.0, 1.0, &[5, 20], DEFAULT_CHECK_TOL).unwrap();
        assert_eq!(d.report.verdict, Verdict::Holds);
    }
}
