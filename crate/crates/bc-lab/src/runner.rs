//! Command execution: turns a parsed config plus a subcommand into report
//! artifacts on disk and a machine-readable summary for exit codes.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::blocks::{
    block_probabilities, blocked_model, build_blocks_theorem_a, build_blocks_theorem_b,
    BlockError, BlockPlan,
};
use crate::config::{ConfigError, OutputFormat, RunConfig, TheoremTag};
use crate::diagnostics::{
    check_bc1, check_matrix_condition, check_mixing_condition, check_pairwise_independent,
    check_xz_conditions, counterexample_report, kochen_stone_ratio, DiagnosticsError, Verdict,
};
use crate::models::{Model, ModelError, MomentTable};
use crate::montecarlo::{
    block_path_consistency, empirical_moments, growth_verdict, sample_path, xz_ratio_paths,
    MonteCarloError,
};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    MonteCarlo(#[from] MonteCarloError),
    #[error("io error writing {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    InvalidRequest(String),
}

type Result<T> = std::result::Result<T, RunnerError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Blocks,
    Moments,
    Simulate,
    Counterexample,
    Check,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Blocks => "blocks",
            Command::Moments => "moments",
            Command::Simulate => "simulate",
            Command::Counterexample => "counterexample",
            Command::Check => "check",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub command: &'static str,
    /// (label, verdict) per evaluated condition; empty for pure-table runs.
    pub verdicts: Vec<(String, Verdict)>,
    /// Files written, relative to the output directory.
    pub artifacts: Vec<String>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.verdicts.iter().any(|(_, v)| *v == Verdict::Fails) {
            1
        } else {
            0
        }
    }
}

/// Executes one subcommand. All artifacts land in `out_dir` via atomic
/// (write-then-rename) replacement; output is byte-identical for a fixed
/// config and seed.
pub fn run_command(command: Command, config: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    config.validate()?;
    let model = config.model.build()?;
    let mut summary = RunSummary {
        command: command.name(),
        verdicts: Vec::new(),
        artifacts: Vec::new(),
    };
    match command {
        Command::Analyze => {
            let target = match resolve_plan(&model, config)? {
                Some(plan) => {
                    write_plan_artifacts(&model, &plan, config, out_dir, &mut summary)?;
                    blocked_model(&model, &plan)?
                }
                None => model,
            };
            let table = target.moments(config.moments.m_max)?;
            write_moment_table(&table, config, out_dir, &mut summary)?;
            for name in &config.diagnostics.select {
                run_check(name, &target, config, out_dir, &mut summary)?;
            }
        }
        Command::Blocks => {
            let plan = resolve_plan(&model, config)?.ok_or_else(|| {
                RunnerError::InvalidRequest(
                    "blocks needs a 'plan' or 'construction' section in the config".into(),
                )
            })?;
            write_plan_artifacts(&model, &plan, config, out_dir, &mut summary)?;
        }
        Command::Moments => {
            let table = model.moments(config.moments.m_max)?;
            write_moment_table(&table, config, out_dir, &mut summary)?;
        }
        Command::Simulate => {
            let mc = &config.montecarlo;
            let seed = mc.seed.ok_or_else(|| {
                RunnerError::InvalidRequest(
                    "simulate needs an explicit seed (montecarlo.seed or --seed)".into(),
                )
            })?;
            let horizon = effective_horizon(&model, mc.horizon);
            let m = mc.m_grid.last().copied().unwrap_or(horizon).min(horizon);
            let empirical = empirical_moments(&model, m, mc.paths, seed)?;
            write_report(out_dir, "simulate_moments.json", &empirical, &mut summary)?;
            let growth = growth_verdict(&model, horizon, mc.paths, seed)?;
            write_report(out_dir, "simulate_growth.json", &growth, &mut summary)?;
            let grid: Vec<usize> = mc.m_grid.iter().copied().filter(|&g| g <= horizon).collect();
            if grid.len() >= 2 || (grid.len() == 1 && mc.m_grid.len() == 1) {
                let ratios = xz_ratio_paths(&model, &grid, mc.paths, seed, mc.window)?;
                match config.output.format {
                    OutputFormat::Json => {
                        write_report(out_dir, "simulate_ratios.json", &ratios, &mut summary)?
                    }
                    OutputFormat::Csv => {
                        let mut csv = String::from("m,exact_mean,q05,q50,q95\n");
                        for row in &ratios.rows {
                            csv.push_str(&format!(
                                "{},{},{},{},{}\n",
                                row.m,
                                sig(row.exact_mean),
                                sig(row.q05),
                                sig(row.q50),
                                sig(row.q95)
                            ));
                        }
                        write_bytes(out_dir, "simulate_ratios.csv", csv.as_bytes(), &mut summary)?;
                    }
                }
            }
            if let Some(plan) = resolve_plan(&model, config)? {
                let path = sample_path(&model, horizon, seed)?;
                let verdict = block_path_consistency(&path, &plan)?;
                write_report(out_dir, "simulate_consistency.json", &verdict, &mut summary)?;
                summary.verdicts.push((
                    "block_path_consistency".into(),
                    if verdict.holds { Verdict::Holds } else { Verdict::Fails },
                ));
            }
        }
        Command::Counterexample => {
            let ce = &config.counterexample;
            let report = counterexample_report(&ce.parity, ce.m_max)?;
            match config.output.format {
                OutputFormat::Json => {
                    write_report(out_dir, "counterexample.json", &report, &mut summary)?
                }
                OutputFormat::Csv => {
                    let mut csv = String::from("m,t,mean,variance,ratio\n");
                    for row in &report.rows {
                        csv.push_str(&format!(
                            "{},{},{},{},{}\n",
                            row.m,
                            row.t,
                            sig(row.mean),
                            sig(row.variance),
                            sig(row.ratio)
                        ));
                    }
                    write_bytes(out_dir, "counterexample.csv", csv.as_bytes(), &mut summary)?;
                }
            }
            summary.verdicts.push((
                "counterexample_ratio_bound".into(),
                if report.all_ratios_at_least_eighth {
                    Verdict::Holds
                } else {
                    Verdict::Fails
                },
            ));
        }
        Command::Check => {
            for name in &config.diagnostics.select {
                run_check(name, &model, config, out_dir, &mut summary)?;
            }
        }
    }
    let summary_name = format!("{}_summary.json", command.name());
    summary.artifacts.push(summary_name.clone());
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serialization");
    text.push('\n');
    let mut sink = summary.clone();
    write_bytes(out_dir, &summary_name, text.as_bytes(), &mut sink)?;
    Ok(summary)
}

pub const CHECK_NAMES: &[&str] = &["bc1", "kochen_stone", "pairwise", "mixing", "matrix", "xz"];

fn run_check(
    name: &str,
    model: &Model,
    config: &RunConfig,
    out_dir: &Path,
    summary: &mut RunSummary,
) -> Result<()> {
    let d = &config.diagnostics;
    let file = format!("check_{name}.json");
    let verdict = match name {
        "bc1" => {
            let report = check_bc1(model, d.scan)?;
            let v = report.verdict;
            write_report(out_dir, &file, &report, summary)?;
            v
        }
        "kochen_stone" => {
            let diag = kochen_stone_ratio(model, &d.grid, d.ks_epsilon)?;
            let v = diag.verdict;
            write_report(out_dir, &file, &diag, summary)?;
            v
        }
        "pairwise" => {
            let report = check_pairwise_independent(model, d.scan, d.tol)?;
            let v = report.verdict;
            write_report(out_dir, &file, &report, summary)?;
            v
        }
        "mixing" => {
            let report = check_mixing_condition(model, &d.mixing_profile, d.scan, d.tol)?;
            let v = report.verdict;
            write_report(out_dir, &file, &report, summary)?;
            v
        }
        "matrix" => {
            let diag = check_matrix_condition(model, &d.matrix_spec, d.scan, d.norm_cap, d.tol)?;
            let v = diag.report.verdict;
            write_report(out_dir, &file, &diag, summary)?;
            v
        }
        "xz" => {
            let diag = check_xz_conditions(model, d.xz_c, d.xz_delta, &d.grid, d.tol)?;
            let v = diag.report.verdict;
            write_report(out_dir, &file, &diag, summary)?;
            v
        }
        other => {
            return Err(RunnerError::InvalidRequest(format!(
                "unknown condition '{other}' (expected one of {CHECK_NAMES:?})"
            )))
        }
    };
    summary.verdicts.push((name.to_string(), verdict));
    Ok(())
}

fn resolve_plan(model: &Model, config: &RunConfig) -> Result<Option<BlockPlan>> {
    if let Some(plan) = &config.plan {
        return Ok(Some(plan.clone()));
    }
    let Some(spec) = &config.construction else {
        return Ok(None);
    };
    let plan = match spec.theorem {
        TheoremTag::A => build_blocks_theorem_a(model, spec.k, spec.scan_limit)?,
        TheoremTag::B => build_blocks_theorem_b(model, spec.k, spec.scan_limit)?,
    };
    Ok(Some(plan))
}

fn write_plan_artifacts(
    model: &Model,
    plan: &BlockPlan,
    config: &RunConfig,
    out_dir: &Path,
    summary: &mut RunSummary,
) -> Result<()> {
    write_bytes(out_dir, "blocks_plan.json", plan.to_json().as_bytes(), summary)?;
    let probs = block_probabilities(model, plan)?;
    match config.output.format {
        OutputFormat::Json => write_report(out_dir, "blocks_probabilities.json", &probs, summary),
        OutputFormat::Csv => {
            let mut csv = String::from("k,probability,partial_sum\n");
            for (k, (p, s)) in probs
                .probabilities
                .iter()
                .zip(&probs.partial_sums)
                .enumerate()
            {
                csv.push_str(&format!("{},{},{}\n", k + 1, sig(*p), sig(*s)));
            }
            write_bytes(out_dir, "blocks_probabilities.csv", csv.as_bytes(), summary)
        }
    }
}

fn write_moment_table(
    table: &MomentTable,
    config: &RunConfig,
    out_dir: &Path,
    summary: &mut RunSummary,
) -> Result<()> {
    match config.output.format {
        OutputFormat::Json => write_report(out_dir, "moments.json", table, summary),
        OutputFormat::Csv => {
            let mut csv = String::from("m,mean,variance,ratio\n");
            for e in &table.entries {
                let ratio = e.ratio.map(sig).unwrap_or_default();
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    e.m,
                    sig(e.mean),
                    sig(e.variance),
                    ratio
                ));
            }
            write_bytes(out_dir, "moments.csv", csv.as_bytes(), summary)
        }
    }
}

/// Sampling on a finite-horizon (blocked) model is capped at the horizon.
fn effective_horizon(model: &Model, requested: usize) -> usize {
    match model.horizon() {
        Some(h) => requested.min(h),
        None => requested,
    }
}

/// 17 significant digits: enough to round-trip any f64 exactly.
fn sig(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_report<T: Serialize>(
    out_dir: &Path,
    name: &str,
    value: &T,
    summary: &mut RunSummary,
) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serialization");
    text.push('\n');
    write_bytes(out_dir, name, text.as_bytes(), summary)
}

fn write_bytes(out_dir: &Path, name: &str, bytes: &[u8], summary: &mut RunSummary) -> Result<()> {
    let target: PathBuf = out_dir.join(name);
    let io_err = |source| RunnerError::Io {
        path: target.display().to_string(),
        source,
    };
    std::fs::create_dir_all(out_dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(out_dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(&target).map_err(|e| io_err(e.error))?;
    summary.artifacts.push(name.to_string());
    Ok(())
}
