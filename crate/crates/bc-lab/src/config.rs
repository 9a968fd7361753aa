//! JSON run configuration: strict schema (unknown keys rejected), preset
//! registry, and conversion into live models.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocks::BlockPlan;
use crate::diagnostics::{CorrelationMatrixSpec, MixingProfile, ParityRule};
use crate::models::{
    FiniteStaticModel, IndependentModel, MarginalSpec, Model, TwoStateMarkovModel,
};
use crate::space::FiniteSpace;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("schema error at /{pointer}: {message}")]
    SchemaError { pointer: String, message: String },
    #[error("invalid value at {context}: {message}")]
    ValueError { context: String, message: String },
}

fn value_error(context: &str, message: impl ToString) -> ConfigError {
    ConfigError::ValueError {
        context: context.to_string(),
        message: message.to_string(),
    }
}

/// Strictly validated configuration document for one `bc-lab` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    /// Explicit user-given plan (mutually exclusive with `construction`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<BlockPlan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConstructionSpec>,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub moments: MomentsConfig,
    #[serde(default)]
    pub montecarlo: MonteCarloConfig,
    #[serde(default)]
    pub counterexample: CounterexampleConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn for_model(model: ModelSpec) -> Self {
        Self {
            model,
            plan: None,
            construction: None,
            diagnostics: DiagnosticsConfig::default(),
            moments: MomentsConfig::default(),
            montecarlo: MonteCarloConfig::default(),
            counterexample: CounterexampleConfig::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.plan.is_some() && self.construction.is_some() {
            return Err(value_error(
                "plan",
                "give either an explicit plan or a construction request, not both",
            ));
        }
        self.model.build()?;
        Ok(())
    }
}

/// Parses and validates a config document. Error paths are reported
/// JSON-pointer style.
pub fn parse_config(document: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let config: RunConfig =
        serde_path_to_error::deserialize(de).map_err(|e| ConfigError::SchemaError {
            pointer: e.path().to_string().replace('.', "/"),
            message: e.inner().to_string(),
        })?;
    config.validate()?;
    Ok(config)
}

pub fn serialize_config(config: &RunConfig) -> String {
    serde_json::to_string_pretty(config).expect("config serialization")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Independent {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        preset: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        marginal: Option<MarginalSpec>,
    },
    FiniteStatic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        preset: Option<String>,
        /// Atom (label, weight) pairs.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        atoms: Option<Vec<(String, f64)>>,
        /// Events as atom index lists; schedule is `prefix` then `cycle`
        /// repeated forever.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prefix: Option<Vec<Vec<usize>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cycle: Option<Vec<Vec<usize>>>,
    },
    TwoStateMarkov {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        preset: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial: Option<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        transition: Option<[[f64; 2]; 2]>,
    },
}

/// Built-in models reproducing the headline computations from one flag.
pub const PRESET_NAMES: &[&str] = &[
    "paper_s3",
    "independent_half",
    "independent_power",
    "markov_symmetric",
];

/// Model spec for a named preset.
pub fn preset_spec(name: &str) -> Option<ModelSpec> {
    match name {
        // uniform three-point space, odd events {X≠1}, even events {X≠2}
        "paper_s3" => Some(ModelSpec::FiniteStatic {
            preset: Some("paper_s3".into()),
            atoms: None,
            prefix: None,
            cycle: None,
        }),
        // constant p = 1/2, the coverage-construction workhorse
        "independent_half" => Some(ModelSpec::Independent {
            preset: None,
            marginal: Some(MarginalSpec::Constant { p: 0.5 }),
        }),
        // p_n = 1/(n+1)^2, summable with analytic tail
        "independent_power" => Some(ModelSpec::Independent {
            preset: None,
            marginal: Some(MarginalSpec::Power {
                c: 1.0,
                alpha: 2.0,
                shift: 1,
            }),
        }),
        // symmetric flip probability 0.3, uniform start
        "markov_symmetric" => Some(ModelSpec::TwoStateMarkov {
            preset: Some("markov_symmetric".into()),
            initial: None,
            transition: None,
        }),
        _ => None,
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<Model, ConfigError> {
        match self {
            ModelSpec::Independent { preset, marginal } => match (preset, marginal) {
                (Some(name), None) => match preset_spec(name) {
                    Some(ModelSpec::Independent { marginal: Some(m), .. }) => {
                        Ok(Model::Independent(
                            IndependentModel::new(m).map_err(|e| value_error("model/marginal", e))?,
                        ))
                    }
                    _ => Err(value_error("model/preset", format!("unknown independent preset '{name}'"))),
                },
                (None, Some(m)) => Ok(Model::Independent(
                    IndependentModel::new(m.clone())
                        .map_err(|e| value_error("model/marginal", e))?,
                )),
                _ => Err(value_error(
                    "model",
                    "independent model needs exactly one of 'preset' or 'marginal'",
                )),
            },
            ModelSpec::FiniteStatic {
                preset,
                atoms,
                prefix,
                cycle,
            } => match preset {
                Some(name) if name == "paper_s3" => {
                    if atoms.is_some() || prefix.is_some() || cycle.is_some() {
                        return Err(value_error(
                            "model",
                            "preset and explicit schedule are mutually exclusive",
                        ));
                    }
                    Ok(Model::FiniteStatic(FiniteStaticModel::counterexample_preset()))
                }
                Some(name) => Err(value_error(
                    "model/preset",
                    format!("unknown finite_static preset '{name}'"),
                )),
                None => {
                    let atoms = atoms.clone().ok_or_else(|| {
                        value_error("model/atoms", "finite_static model needs atoms or a preset")
                    })?;
                    let space = FiniteSpace::new(atoms)
                        .map_err(|e| value_error("model/atoms", e))?;
                    let to_events = |lists: &Option<Vec<Vec<usize>>>, field: &str| {
                        lists
                            .clone()
                            .unwrap_or_default()
                            .into_iter()
                            .map(|members| {
                                space
                                    .event(members)
                                    .map_err(|e| value_error(&format!("model/{field}"), e))
                            })
                            .collect::<Result<Vec<_>, _>>()
                    };
                    let prefix = to_events(prefix, "prefix")?;
                    let cycle = to_events(cycle, "cycle")?;
                    Ok(Model::FiniteStatic(
                        FiniteStaticModel::new(space, prefix, cycle)
                            .map_err(|e| value_error("model/cycle", e))?,
                    ))
                }
            },
            ModelSpec::TwoStateMarkov {
                preset,
                initial,
                transition,
            } => match preset {
                Some(name) if name == "markov_symmetric" => {
                    if initial.is_some() || transition.is_some() {
                        return Err(value_error(
                            "model",
                            "preset and explicit parameters are mutually exclusive",
                        ));
                    }
                    Ok(Model::Markov(
                        TwoStateMarkovModel::symmetric(0.3)
                            .map_err(|e| value_error("model", e))?,
                    ))
                }
                Some(name) => Err(value_error(
                    "model/preset",
                    format!("unknown two_state_markov preset '{name}'"),
                )),
                None => {
                    let initial = initial.ok_or_else(|| {
                        value_error("model/initial", "two_state_markov needs 'initial'")
                    })?;
                    let transition = transition.ok_or_else(|| {
                        value_error("model/transition", "two_state_markov needs 'transition'")
                    })?;
                    Ok(Model::Markov(
                        TwoStateMarkovModel::new(initial, transition)
                            .map_err(|e| value_error("model", e))?,
                    ))
                }
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremTag {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionSpec {
    pub theorem: TheoremTag,
    pub k: usize,
    #[serde(default = "default_scan_limit")]
    pub scan_limit: usize,
}

fn default_scan_limit() -> usize {
    1 << 22
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Which checks `analyze` runs: any of "bc1", "kochen_stone",
    /// "pairwise", "mixing", "matrix", "xz".
    #[serde(default = "default_select")]
    pub select: Vec<String>,
    /// Scan size N for the pairwise / mixing / matrix squares.
    #[serde(default = "default_scan")]
    pub scan: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Moment grid for ratio and variance-growth checks.
    #[serde(default = "default_grid")]
    pub grid: Vec<usize>,
    #[serde(default = "default_ks_epsilon")]
    pub ks_epsilon: f64,
    #[serde(default = "default_mixing_profile")]
    pub mixing_profile: MixingProfile,
    #[serde(default = "default_matrix_spec")]
    pub matrix_spec: CorrelationMatrixSpec,
    #[serde(default = "default_norm_cap")]
    pub norm_cap: f64,
    #[serde(default = "default_xz_c")]
    pub xz_c: f64,
    #[serde(default = "default_xz_delta")]
    pub xz_delta: f64,
}

fn default_select() -> Vec<String> {
    vec!["bc1".into(), "kochen_stone".into(), "pairwise".into()]
}
fn default_scan() -> usize {
    64
}
fn default_tol() -> f64 {
    crate::diagnostics::DEFAULT_CHECK_TOL
}
fn default_grid() -> Vec<usize> {
    vec![10, 100, 1000]
}
fn default_ks_epsilon() -> f64 {
    crate::diagnostics::DEFAULT_KS_EPSILON
}
fn default_mixing_profile() -> MixingProfile {
    MixingProfile::Geometric { c: 0.5, r: 0.4 }
}
fn default_matrix_spec() -> CorrelationMatrixSpec {
    CorrelationMatrixSpec::Banded { c: 1.0, r: 0.5 }
}
fn default_norm_cap() -> f64 {
    3.0
}
fn default_xz_c() -> f64 {
    1.0
}
fn default_xz_delta() -> f64 {
    1.0
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            select: default_select(),
            scan: default_scan(),
            tol: default_tol(),
            grid: default_grid(),
            ks_epsilon: default_ks_epsilon(),
            mixing_profile: default_mixing_profile(),
            matrix_spec: default_matrix_spec(),
            norm_cap: default_norm_cap(),
            xz_c: default_xz_c(),
            xz_delta: default_xz_delta(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsConfig {
    #[serde(default = "default_m_max")]
    pub m_max: usize,
}

fn default_m_max() -> usize {
    100
}

impl Default for MomentsConfig {
    fn default() -> Self {
        Self {
            m_max: default_m_max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Mandatory for any sampling command; there is no wall-clock default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_m_grid")]
    pub m_grid: Vec<usize>,
    #[serde(default = "default_window")]
    pub window: f64,
}

fn default_paths() -> usize {
    1000
}
fn default_horizon() -> usize {
    1000
}
fn default_m_grid() -> Vec<usize> {
    vec![10, 100]
}
fn default_window() -> f64 {
    0.1
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            paths: default_paths(),
            horizon: default_horizon(),
            seed: None,
            m_grid: default_m_grid(),
            window: default_window(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleConfig {
    #[serde(default = "default_ce_m_max")]
    pub m_max: usize,
    #[serde(default = "default_parity")]
    pub parity: ParityRule,
}

fn default_ce_m_max() -> usize {
    1000
}
fn default_parity() -> ParityRule {
    ParityRule::Alternating
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self {
            m_max: default_ce_m_max(),
            parity: default_parity(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_format")]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

fn default_format() -> OutputFormat {
    OutputFormat::Json
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            format: default_format(),
            path: None,
        }
    }
}
