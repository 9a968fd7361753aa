use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bc_lab::config::{
    parse_config, preset_spec, ConstructionSpec, OutputFormat, RunConfig, TheoremTag,
};
use bc_lab::diagnostics::ParityRule;
use bc_lab::runner::{run_command, Command as RunCmd};

/// Numerical laboratory for block constructions, second-moment ratios and
/// related diagnostics on sequences of events.
#[derive(Parser)]
#[command(name = "bc-lab", version, disable_help_subcommand = true)]
struct Cli {
    /// JSON configuration file. Omit to use --preset instead.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Built-in model preset (paper_s3, independent_half, independent_power,
    /// markov_symmetric) used when no --config is given.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output directory for report artifacts (default: current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Table output format.
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Monte Carlo seed; overrides the config value.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Build a plan if requested, then compute moments and run the selected
    /// diagnostic checks.
    Analyze,
    /// Build or validate a block plan and report the block probabilities.
    Blocks {
        /// Construction to run: "a" (summable tail bounds) or "b"
        /// (coverage blocks). Overrides the config.
        #[arg(long)]
        theorem: Option<String>,
        /// Number of blocks to construct.
        #[arg(long)]
        k: Option<usize>,
        /// Index scan cutoff for the boundary search.
        #[arg(long)]
        scan_limit: Option<usize>,
    },
    /// Exact mean/variance/ratio table for S_m up to m_max.
    Moments {
        #[arg(long)]
        m_max: Option<usize>,
    },
    /// Monte Carlo validation: empirical moments, growth heuristic, ratio
    /// quantiles, and block-path consistency when a plan is present.
    Simulate {
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Closed-form vs engine table for the dependent selection example.
    Counterexample {
        #[arg(long)]
        m_max: Option<usize>,
        /// Parity rule: alternating, all_odd, all_even.
        #[arg(long)]
        parity: Option<String>,
    },
    /// Run diagnostic conditions and map verdicts to the exit code.
    Check {
        /// Single condition (bc1, kochen_stone, pairwise, mixing, matrix,
        /// xz); default is the config's selection.
        #[arg(long)]
        condition: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("BC_LAB_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    match run(cli) {
        Ok(summary) => {
            for (name, verdict) in &summary.verdicts {
                println!("{name}: {verdict:?}");
            }
            for artifact in &summary.artifacts {
                println!("wrote {artifact}");
            }
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bc_lab::runner::RunSummary, String> {
    let mut config = load_config(&cli)?;
    if let Some(seed) = cli.seed {
        config.montecarlo.seed = Some(seed);
    }
    if let Some(format) = &cli.format {
        config.output.format = match format.as_str() {
            "csv" => OutputFormat::Csv,
            _ => OutputFormat::Json,
        };
    }
    let out_dir = cli
        .out
        .clone()
        .or_else(|| config.output.path.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    let command = match &cli.command {
        CliCommand::Analyze => RunCmd::Analyze,
        CliCommand::Blocks {
            theorem,
            k,
            scan_limit,
        } => {
            if theorem.is_some() || k.is_some() || scan_limit.is_some() {
                let base = config.construction.clone().unwrap_or(ConstructionSpec {
                    theorem: TheoremTag::B,
                    k: 10,
                    scan_limit: 1 << 22,
                });
                let theorem = match theorem.as_deref() {
                    Some("a") => TheoremTag::A,
                    Some("b") => TheoremTag::B,
                    Some(other) => return Err(format!("unknown theorem '{other}'")),
                    None => base.theorem,
                };
                config.plan = None;
                config.construction = Some(ConstructionSpec {
                    theorem,
                    k: k.unwrap_or(base.k),
                    scan_limit: scan_limit.unwrap_or(base.scan_limit),
                });
            }
            RunCmd::Blocks
        }
        CliCommand::Moments { m_max } => {
            if let Some(m) = m_max {
                config.moments.m_max = *m;
            }
            RunCmd::Moments
        }
        CliCommand::Simulate { paths, horizon } => {
            if let Some(p) = paths {
                config.montecarlo.paths = *p;
            }
            if let Some(h) = horizon {
                config.montecarlo.horizon = *h;
            }
            RunCmd::Simulate
        }
        CliCommand::Counterexample { m_max, parity } => {
            if let Some(m) = m_max {
                config.counterexample.m_max = *m;
            }
            if let Some(rule) = parity {
                config.counterexample.parity = match rule.as_str() {
                    "alternating" => ParityRule::Alternating,
                    "all_odd" => ParityRule::AllOdd,
                    "all_even" => ParityRule::AllEven,
                    other => return Err(format!("unknown parity rule '{other}'")),
                };
            }
            RunCmd::Counterexample
        }
        CliCommand::Check { condition } => {
            if let Some(name) = condition {
                config.diagnostics.select = vec![name.clone()];
            }
            RunCmd::Check
        }
    };
    run_command(command, &config, &out_dir).map_err(|e| e.to_string())
}

fn load_config(cli: &Cli) -> Result<RunConfig, String> {
    match (&cli.config, &cli.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| e.to_string())
        }
        (None, Some(name)) => preset_spec(name)
            .map(RunConfig::for_model)
            .ok_or_else(|| format!("unknown preset '{name}'")),
        (None, None) => Err("give --config <file> or --preset <name>".into()),
        (Some(_), Some(_)) => Err("--config and --preset are mutually exclusive".into()),
    }
}
