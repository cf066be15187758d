use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bayes_regress::baseline::{nadaraya_watson, NwConfig};
use bayes_regress::conjugate::{closed_form_regression, SufficientStats};
use bayes_regress::grid::build_grid;
use bayes_regress::model::{Dataset, Model, ObsPair};
use bayes_regress::report::{compare_csv, consistency_csv, estimate_csv, risk_csv, CurvePoint};
use bayes_regress::risk::{
    bayes_risk, compare_estimators, consistency_paths, default_nw, EstimatorId, Experiment,
};
use bayes_regress::Error;
use clap::Parser;
use serde_json::json;

mod config;

use config::{Command, ExperimentConfig, FieldError};

pub const ARTIFACT_VERSION: &str = concat!("bayes-regress/", env!("CARGO_PKG_VERSION"));
pub const THREADS_ENV: &str = "BAYES_REGRESS_THREADS";

/// Bayes estimation of regression curves: point estimates and Monte Carlo experiments.
#[derive(Debug, Parser)]
#[command(name = "bayes-regress", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// Experiment config (TOML, or the JSON metadata of an earlier run).
    #[arg(long)]
    config: PathBuf,
}

enum Failure {
    Config(FieldError),
    Experiment(Error),
    Other(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Experiment(_) => 3,
            Failure::Other(_) => 1,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Failure::Config(e) => json!({"error": "config", "field": e.field, "message": e.message}),
            Failure::Experiment(e) => json!({"error": "experiment", "message": e.to_string()}),
            Failure::Other(m) => json!({"error": "runtime", "message": m}),
        }
    }
}

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ExperimentFailure { .. } => Failure::Experiment(e),
            other => Failure::Other(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, &cli.config) {
        Ok(csv_path) => {
            println!("wrote {}", csv_path.display());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(command: Command, config_path: &Path) -> Result<PathBuf, Failure> {
    let cfg = config::load(config_path, command)?;
    let threads = threads_from_env()?;
    let csv = match command {
        Command::Estimate => run_estimate(&cfg)?,
        _ => {
            let exp = experiment(&cfg, threads)?;
            match command {
                Command::Risk => risk_csv(&bayes_risk(&exp, cfg.loss_k)?),
                Command::Compare => compare_csv(&compare_estimators(&exp, cfg.loss_k)?),
                Command::Consistency => consistency_csv(&consistency_paths(&exp, &cfg.x1_eval)?),
                Command::Estimate => unreachable!(),
            }
        }
    };
    write_outputs(&cfg, &csv)
}

fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(FieldError::new(THREADS_ENV, format!("expected a positive integer, got {s:?}")).into()),
        },
    }
}

fn experiment(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Experiment, Failure> {
    let mut exp = Experiment::new(
        cfg.hyper,
        cfg.estimators.clone(),
        cfg.n_schedule.clone(),
        cfg.replications,
        cfg.seed,
    );
    exp.grid_size = cfg.grid_size;
    exp.trim = cfg.trim;
    if let Some(b) = cfg.bandwidth {
        exp.nw = NwConfig { bandwidth: b };
    }
    exp.threads = threads;
    exp.validate()
        .map_err(|e| FieldError::new("config", e.to_string()))?;
    Ok(exp)
}

/// Reads headerless `x1,x2` rows.
fn read_dataset(path: &Path, model: &dyn Model) -> Result<Dataset, FieldError> {
    let text = fs::read_to_string(path)
        .map_err(|e| FieldError::new("dataset", format!("cannot read {}: {e}", path.display())))?;
    let mut data = Dataset::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| FieldError::new("dataset", format!("line {}: {msg}", i + 1));
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| bad(format!("expected two comma-separated values, got {line:?}")))?;
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
        let pair = ObsPair::new(parse(a)?, parse(b)?);
        model.check_pair(pair).map_err(|e| bad(e.to_string()))?;
        data.push(pair);
    }
    Ok(data)
}

fn run_estimate(cfg: &ExperimentConfig) -> Result<String, Failure> {
    let model = cfg.hyper.model();
    let data = match &cfg.dataset {
        Some(path) => read_dataset(path, &model)?,
        None => Dataset::new(),
    };
    let nw = NwConfig {
        bandwidth: cfg.bandwidth.unwrap_or(default_nw(&cfg.hyper).bandwidth),
    };
    if data.is_empty() && cfg.estimators.contains(&EstimatorId::NadarayaWatson) {
        return Err(FieldError::new("dataset", "nadaraya-watson needs at least one observation").into());
    }
    let stats = SufficientStats::from_dataset(&cfg.hyper, &data)?;
    let grid = if cfg.estimators.contains(&EstimatorId::BayesGrid) {
        Some(build_grid(&model, &cfg.hyper.prior(), &data, cfg.grid_size)?)
    } else {
        None
    };

    let mut points = Vec::with_capacity(cfg.x1_eval.len() * cfg.estimators.len());
    for &x1 in &cfg.x1_eval {
        for &estimator in &cfg.estimators {
            let value = match estimator {
                EstimatorId::BayesClosed(variant) => closed_form_regression(&cfg.hyper, &stats, x1, variant)?,
                EstimatorId::BayesGrid => grid.as_ref().unwrap().predictive_regression(&model, x1)?,
                EstimatorId::NadarayaWatson => nadaraya_watson(&data, x1, &nw)?,
                EstimatorId::Truth => unreachable!("rejected by config validation"),
            };
            points.push(CurvePoint { x1, estimator, value });
        }
    }
    Ok(estimate_csv(&points))
}

fn write_outputs(cfg: &ExperimentConfig, csv: &str) -> Result<PathBuf, Failure> {
    let io = |e: std::io::Error| Failure::Other(format!("cannot write to {}: {e}", cfg.output_dir.display()));
    fs::create_dir_all(&cfg.output_dir).map_err(io)?;
    let name = cfg.command.name();
    let csv_path = cfg.output_dir.join(format!("{name}.csv"));
    fs::write(&csv_path, csv).map_err(io)?;

    let metadata = json!({
        "artifact_version": ARTIFACT_VERSION,
        "command": name,
        "seed": cfg.seed.0,
        "output": format!("{name}.csv"),
        "config": cfg.to_json(),
    });
    let mut text = serde_json::to_string_pretty(&metadata).expect("metadata serializes");
    text.push('\n');
    fs::write(cfg.output_dir.join(format!("{name}.metadata.json")), text).map_err(io)?;
    Ok(csv_path)
}
