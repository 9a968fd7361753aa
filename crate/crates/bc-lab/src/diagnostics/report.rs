use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    SummableMarginals,
    KochenStoneRatio,
    PairwiseIndependence,
    UniformMixing,
    MatrixBound,
    VarianceGrowth,
}

impl ConditionId {
    pub fn name(&self) -> &'static str {
        match self {
            ConditionId::SummableMarginals => "summable_marginals",
            ConditionId::KochenStoneRatio => "kochen_stone_ratio",
            ConditionId::PairwiseIndependence => "pairwise_independence",
            ConditionId::UniformMixing => "uniform_mixing",
            ConditionId::MatrixBound => "matrix_bound",
            ConditionId::VarianceGrowth => "variance_growth",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// Indices and values exhibiting a violation, or the binding quantity of a
/// passing check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRange {
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub condition: ConditionId,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub scan_range: ScanRange,
    /// Free-form qualifier, e.g. which inequality form held or the certified
    /// bound value.
    pub note: String,
}

impl DiagnosticsReport {
    pub fn new(condition: ConditionId, verdict: Verdict, scan_range: ScanRange) -> Self {
        debug_assert!(verdict != Verdict::Fails || scan_range.to >= scan_range.from);
        Self {
            condition,
            verdict,
            witness: None,
            scan_range,
            note: String::new(),
        }
    }

    pub fn with_witness(mut self, witness: Witness) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}
