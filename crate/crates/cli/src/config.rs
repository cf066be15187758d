//! Experiment configuration: a flat key-value document in TOML or JSON.

use std::fmt;
use std::path::{Path, PathBuf};

use bayes_regress::baseline::Bandwidth;
use bayes_regress::conjugate::HyperParams;
use bayes_regress::model::Model;
use bayes_regress::risk::{default_trim, EstimatorId, LossExponent, Trim};
use bayes_regress::Seed;
use clap::ValueEnum;
use serde_json::{json, Map, Value};

use bayes_regress::grid::{ORACLE_GRID_SIZE, SIMULATION_GRID_SIZE};

pub const DEFAULT_REPLICATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Estimate,
    Consistency,
    Risk,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Estimate => "estimate",
            Command::Consistency => "consistency",
            Command::Risk => "risk",
            Command::Compare => "compare",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        <Command as ValueEnum>::from_str(s, false).ok()
    }

    fn simulates(self) -> bool {
        self != Command::Estimate
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A config problem tied to one key.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        FieldError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

type FieldResult<T> = std::result::Result<T, FieldError>;

/// Fully resolved experiment settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub hyper: HyperParams,
    pub estimators: Vec<EstimatorId>,
    pub n_schedule: Vec<usize>,
    pub replications: usize,
    pub grid_size: usize,
    pub x1_eval: Vec<f64>,
    pub loss_k: LossExponent,
    pub trim: Option<Trim>,
    pub seed: Seed,
    pub output_dir: PathBuf,
    pub dataset: Option<PathBuf>,
    pub bandwidth: Option<Bandwidth>,
}

fn hyper_keys(model: &str) -> &'static [&'static str] {
    match model {
        "example1" => &["lambda"],
        "example3" => &["mu", "tau", "sigma", "rho"],
        _ => &[],
    }
}

fn command_keys(command: Command) -> &'static [&'static str] {
    match command {
        Command::Estimate => &["x1_eval", "dataset"],
        Command::Risk | Command::Compare => &["n_schedule", "replications", "loss_k", "trim"],
        Command::Consistency => &["n_schedule", "replications", "x1_eval"],
    }
}

const COMMON_KEYS: [&str; 7] = [
    "command",
    "model",
    "estimator",
    "grid_size",
    "seed",
    "output_dir",
    "bandwidth",
];

/// Reads the config file. JSON metadata written by a previous run is accepted:
/// its `config` object is used.
pub fn load(path: &Path, command: Command) -> FieldResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FieldError::new("config", format!("cannot read {}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let doc: Value = if is_json {
        serde_json::from_str(&text).map_err(|e| FieldError::new("config", format!("invalid JSON: {e}")))?
    } else {
        let table: toml::Table =
            toml::from_str(&text).map_err(|e| FieldError::new("config", format!("invalid TOML: {e}")))?;
        serde_json::to_value(table).map_err(|e| FieldError::new("config", e.to_string()))?
    };
    let mut map = match doc {
        Value::Object(m) => m,
        _ => return Err(FieldError::new("config", "expected a table of keys")),
    };
    if let Some(inner) = map.remove("config") {
        match inner {
            Value::Object(m) => map = m,
            _ => return Err(FieldError::new("config", "expected an object")),
        }
    }
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let base = std::path::absolute(dir)
        .map_err(|e| FieldError::new("config", format!("cannot resolve {}: {e}", dir.display())))?;
    resolve(&map, command, &base)
}

/// Validates a flat key map. Relative paths are taken from `base`.
pub fn resolve(map: &Map<String, Value>, command: Command, base: &Path) -> FieldResult<ExperimentConfig> {
    if let Some(v) = map.get("command") {
        let named = string(v, "command")?;
        match Command::parse(&named) {
            Some(c) if c == command => {}
            Some(c) => {
                return Err(FieldError::new(
                    "command",
                    format!("config is for {c} but {command} was invoked"),
                ))
            }
            None => return Err(FieldError::new("command", format!("unknown command {named:?}"))),
        }
    }

    let model = string(required(map, "model")?, "model")?;
    let hyper = parse_hyper(map, &model)?;

    for key in map.keys() {
        let known = COMMON_KEYS.contains(&key.as_str())
            || hyper_keys(&model).contains(&key.as_str())
            || command_keys(command).contains(&key.as_str());
        if !known {
            return Err(FieldError::new(key.clone(), format!("not a valid key for {command} on {model}")));
        }
    }

    let seed = match required(map, "seed")? {
        Value::Number(n) => n
            .as_u64()
            .ok_or_else(|| FieldError::new("seed", "must be an integer in [0, 2^64)"))?,
        Value::String(s) => parse_seed(s).ok_or_else(|| FieldError::new("seed", format!("cannot parse {s:?}")))?,
        _ => return Err(FieldError::new("seed", "must be an integer")),
    };

    let estimators = match map.get("estimator") {
        None => vec![EstimatorId::BayesClosed(Default::default())],
        Some(Value::String(s)) => vec![parse_estimator(s)?],
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| parse_estimator(&string(v, "estimator")?))
            .collect::<FieldResult<_>>()?,
        Some(_) => return Err(FieldError::new("estimator", "must be a string or a list of strings")),
    };
    if estimators.is_empty() {
        return Err(FieldError::new("estimator", "at least one estimator is required"));
    }
    match command {
        Command::Estimate if estimators.contains(&EstimatorId::Truth) => {
            return Err(FieldError::new("estimator", "truth needs a known θ and is not available for estimate"))
        }
        Command::Consistency if estimators.len() != 1 => {
            return Err(FieldError::new("estimator", "consistency takes exactly one estimator"))
        }
        _ => {}
    }

    let default_grid = if command.simulates() {
        SIMULATION_GRID_SIZE
    } else {
        ORACLE_GRID_SIZE
    };
    let grid_size = match map.get("grid_size") {
        None => default_grid,
        Some(v) => count(v, "grid_size")?,
    };
    if grid_size < 2 {
        return Err(FieldError::new("grid_size", format!("must be at least 2, got {grid_size}")));
    }

    let n_schedule = if command.simulates() {
        let v = required(map, "n_schedule")?;
        let items = v
            .as_array()
            .ok_or_else(|| FieldError::new("n_schedule", "must be a list of counts"))?;
        let sched = items
            .iter()
            .map(|v| count(v, "n_schedule"))
            .collect::<FieldResult<Vec<_>>>()?;
        if sched.is_empty() {
            return Err(FieldError::new("n_schedule", "must not be empty"));
        }
        if !sched.windows(2).all(|w| w[0] < w[1]) {
            return Err(FieldError::new("n_schedule", "must be strictly increasing"));
        }
        if sched[0] == 0 && estimators.contains(&EstimatorId::NadarayaWatson) {
            return Err(FieldError::new("n_schedule", "nadaraya-watson needs n >= 1"));
        }
        sched
    } else {
        Vec::new()
    };

    let replications = if command.simulates() {
        let r = match map.get("replications") {
            None => DEFAULT_REPLICATIONS,
            Some(v) => count(v, "replications")?,
        };
        if r < 2 {
            return Err(FieldError::new("replications", format!("must be at least 2, got {r}")));
        }
        r
    } else {
        0
    };

    let x1_eval = if command == Command::Risk || command == Command::Compare {
        Vec::new()
    } else {
        let v = required(map, "x1_eval")?;
        let items = v
            .as_array()
            .ok_or_else(|| FieldError::new("x1_eval", "must be a list of reals"))?;
        let support = hyper.model().predictor_support();
        let xs = items
            .iter()
            .map(|v| {
                let x = real(v, "x1_eval")?;
                support
                    .check("x1", x)
                    .map_err(|e| FieldError::new("x1_eval", e.to_string()))
            })
            .collect::<FieldResult<Vec<_>>>()?;
        if xs.is_empty() {
            return Err(FieldError::new("x1_eval", "must not be empty"));
        }
        xs
    };

    let loss_k = match map.get("loss_k") {
        None => LossExponent::Squared,
        Some(v) => {
            let k = count(v, "loss_k")?;
            u32::try_from(k)
                .ok()
                .and_then(|k| LossExponent::try_from(k).ok())
                .ok_or_else(|| FieldError::new("loss_k", format!("must be 1 or 2, got {k}")))?
        }
    };

    let trim = match map.get("trim") {
        None if command == Command::Risk || command == Command::Compare => default_trim(&hyper),
        None => None,
        Some(v) => {
            let pair = v
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| FieldError::new("trim", "must be a pair [lo, hi]"))?;
            let t = Trim::new(real(&pair[0], "trim")?, real(&pair[1], "trim")?)
                .map_err(|e| FieldError::new("trim", e.to_string()))?;
            if t.is_active() && matches!(hyper, HyperParams::Example2) {
                return Err(FieldError::new("trim", "example2 has a binary predictor and cannot be trimmed"));
            }
            // An empty band is the same as no trimming.
            Some(t).filter(Trim::is_active)
        }
    };

    let bandwidth = match map.get("bandwidth") {
        None => None,
        Some(Value::String(s)) => Some(s.parse().map_err(|e: bayes_regress::Error| FieldError::new("bandwidth", e.to_string()))?),
        Some(v) => Some(
            Bandwidth::fixed(real(v, "bandwidth")?).map_err(|e| FieldError::new("bandwidth", e.to_string()))?,
        ),
    };

    let output_dir = match map.get("output_dir") {
        None => base.to_path_buf(),
        Some(v) => base.join(string(v, "output_dir")?),
    };
    let dataset = match map.get("dataset") {
        None => None,
        Some(v) => Some(base.join(string(v, "dataset")?)),
    };

    Ok(ExperimentConfig {
        command,
        hyper,
        estimators,
        n_schedule,
        replications,
        grid_size,
        x1_eval,
        loss_k,
        trim,
        seed: Seed(seed),
        output_dir,
        dataset,
        bandwidth,
    })
}

impl ExperimentConfig {
    /// The resolved config as a flat key map; loading it back yields `self`.
    pub fn to_json(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command.name()));
        match self.hyper {
            HyperParams::Example1 { lambda } => {
                m.insert("model".into(), json!("example1"));
                m.insert("lambda".into(), json!(lambda));
            }
            HyperParams::Example2 => {
                m.insert("model".into(), json!("example2"));
            }
            HyperParams::Example3 { mu, tau, sigma, rho } => {
                m.insert("model".into(), json!("example3"));
                m.insert("mu".into(), json!(mu));
                m.insert("tau".into(), json!(tau));
                m.insert("sigma".into(), json!(sigma));
                m.insert("rho".into(), json!(rho));
            }
        }
        let names: Vec<String> = self.estimators.iter().map(|e| e.to_string()).collect();
        m.insert("estimator".into(), json!(names));
        if self.command.simulates() {
            m.insert("n_schedule".into(), json!(self.n_schedule));
            m.insert("replications".into(), json!(self.replications));
        }
        m.insert("grid_size".into(), json!(self.grid_size));
        if !self.x1_eval.is_empty() {
            m.insert("x1_eval".into(), json!(self.x1_eval));
        }
        if matches!(self.command, Command::Risk | Command::Compare) {
            m.insert("loss_k".into(), json!(self.loss_k.k()));
            let t = self.trim.map_or([0.0, 1.0], |t| [t.lo, t.hi]);
            m.insert("trim".into(), json!(t));
        }
        if let Some(b) = self.bandwidth {
            m.insert("bandwidth".into(), json!(b.to_string()));
        }
        m.insert("seed".into(), json!(self.seed.0));
        m.insert("output_dir".into(), json!(self.output_dir.display().to_string()));
        if let Some(d) = &self.dataset {
            m.insert("dataset".into(), json!(d.display().to_string()));
        }
        m
    }
}

fn required<'a>(map: &'a Map<String, Value>, key: &str) -> FieldResult<&'a Value> {
    map.get(key)
        .ok_or_else(|| FieldError::new(key, "missing required key"))
}

fn string(v: &Value, field: &str) -> FieldResult<String> {
    v.as_str()
        .map(str::to_owned)
        .ok_or_else(|| FieldError::new(field, format!("expected a string, got {v}")))
}

fn real(v: &Value, field: &str) -> FieldResult<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| FieldError::new(field, format!("expected a finite number, got {v}")))
}

fn count(v: &Value, field: &str) -> FieldResult<usize> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| FieldError::new(field, format!("expected a nonnegative integer, got {v}")))
}

fn parse_seed(s: &str) -> Option<u64> {
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => s.parse().ok(),
    }
}

fn parse_estimator(s: &str) -> FieldResult<EstimatorId> {
    s.parse().map_err(|e: bayes_regress::Error| FieldError::new("estimator", e.to_string()))
}

fn parse_hyper(map: &Map<String, Value>, model: &str) -> FieldResult<HyperParams> {
    let get = |key: &str| required(map, key).and_then(|v| real(v, key));
    let hyper = match model {
        "example1" => HyperParams::example1(get("lambda")?),
        "example2" => Ok(HyperParams::example2()),
        "example3" => HyperParams::example3(get("mu")?, get("tau")?, get("sigma")?, get("rho")?),
        other => {
            return Err(FieldError::new(
                "model",
                format!("unknown model {other:?} (expected example1, example2 or example3)"),
            ))
        }
    };
    hyper.map_err(|e| match e {
        bayes_regress::Error::Domain { what, .. } => FieldError::new(what, e.to_string()),
        other => FieldError::new("model", other.to_string()),
    })
}
