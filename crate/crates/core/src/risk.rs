//! Monte Carlo laboratory for the Bayes risk, consistency along growing sample
//! paths, and paired estimator comparisons.
//!
//! One replication draws `θ ~ Q`, an evaluation point `x1 ~ P_θ^{X1}` and a
//! single sample path; the datasets at successive sample sizes are prefixes of
//! that path. Replication `i` uses the stream `seed.rng(tag, i)` (see
//! [`crate::seed`]), replications may run on any number of worker threads, and
//! aggregation always proceeds in replication order, so results are identical
//! for every worker count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{nadaraya_watson, Bandwidth, NwConfig, DISCRETE_BANDWIDTH};
use crate::conjugate::{
    closed_form_regression, update_stats, Example, FormulaVariant, HyperParams, SufficientStats,
};
use crate::error::{Error, Result};
use crate::grid::{PosteriorGrid, SIMULATION_GRID_SIZE};
use crate::model::{Dataset, Model, Prior, Theta};
use crate::numeric::{mean_and_se, sorted_quantile};
use crate::seed::{Seed, SimRng};

/// Stream tag for risk and comparison replications.
pub const RISK_TAG: &str = "risk";
/// Stream tag for consistency-path replications.
pub const PATH_TAG: &str = "paths";
/// Largest tolerated fraction of replications that fell back.
pub const MAX_FALLBACK_FRACTION: f64 = 0.05;
/// Default predictor trimming band for the exponential-chain model.
pub const EXAMPLE1_DEFAULT_TRIM: Trim = Trim { lo: 0.05, hi: 1.0 };

const MAX_TRIM_ATTEMPTS: usize = 100_000;

/// Estimator of the regression curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorId {
    /// Closed-form Bayes estimator from sufficient statistics.
    BayesClosed(FormulaVariant),
    /// Posterior-predictive regression on a quantile grid.
    BayesGrid,
    /// Nadaraya–Watson kernel regression.
    NadarayaWatson,
    /// The true curve `r_θ`; zero loss by construction. For testing the harness.
    Truth,
}

impl EstimatorId {
    /// Whether the estimator is the exact Bayes estimator for `example`.
    pub fn is_bayes(&self, example: Example) -> bool {
        match self {
            EstimatorId::BayesClosed(FormulaVariant::Posterior) | EstimatorId::BayesGrid => true,
            EstimatorId::BayesClosed(FormulaVariant::Paper) => example == Example::Example1,
            EstimatorId::NadarayaWatson | EstimatorId::Truth => false,
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimatorId::BayesClosed(FormulaVariant::Posterior) => "bayes-closed",
            EstimatorId::BayesClosed(FormulaVariant::Paper) => "bayes-closed-paper",
            EstimatorId::BayesGrid => "bayes-grid",
            EstimatorId::NadarayaWatson => "nadaraya-watson",
            EstimatorId::Truth => "truth",
        })
    }
}

impl FromStr for EstimatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bayes-closed" | "bayes-closed-posterior" | "bayes-closed-beta-posterior" => {
                EstimatorId::BayesClosed(FormulaVariant::Posterior)
            }
            "bayes-closed-paper" => EstimatorId::BayesClosed(FormulaVariant::Paper),
            "bayes-grid" => EstimatorId::BayesGrid,
            "nadaraya-watson" => EstimatorId::NadarayaWatson,
            "truth" => EstimatorId::Truth,
            other => {
                return Err(Error::Usage(format!(
                    "unknown estimator {other:?} (expected bayes-closed, bayes-closed-paper, \
                     bayes-grid, nadaraya-watson or truth)"
                )))
            }
        })
    }
}

impl Serialize for EstimatorId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EstimatorId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Loss exponent `k` in `|m - r_θ|^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossExponent {
    Abs,
    Squared,
}

impl LossExponent {
    pub fn k(self) -> u32 {
        match self {
            LossExponent::Abs => 1,
            LossExponent::Squared => 2,
        }
    }

    pub fn apply(self, deviation: f64) -> f64 {
        match self {
            LossExponent::Abs => deviation.abs(),
            LossExponent::Squared => deviation * deviation,
        }
    }
}

impl TryFrom<u32> for LossExponent {
    type Error = Error;

    fn try_from(k: u32) -> Result<Self> {
        match k {
            1 => Ok(LossExponent::Abs),
            2 => Ok(LossExponent::Squared),
            _ => Err(Error::Usage(format!("loss_k must be 1 or 2, got {k}"))),
        }
    }
}

/// Quantile band `[lo, hi]` of `P_θ^{X1}` to which evaluation points are restricted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trim {
    pub lo: f64,
    pub hi: f64,
}

impl Trim {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi) && lo < hi {
            Ok(Trim { lo, hi })
        } else {
            Err(Error::Usage(format!(
                "trim must satisfy 0 <= lo < hi <= 1, got ({lo}, {hi})"
            )))
        }
    }

    pub fn is_active(&self) -> bool {
        self.lo > 0.0 || self.hi < 1.0
    }
}

/// Trim applied by default to risk experiments on `hyper`.
pub fn default_trim(hyper: &HyperParams) -> Option<Trim> {
    match hyper.example() {
        Example::Example1 => Some(EXAMPLE1_DEFAULT_TRIM),
        _ => None,
    }
}

/// Nadaraya–Watson configuration used for `hyper` when none is given:
/// per-cell means for the binary predictor, the rule-of-thumb bandwidth otherwise.
pub fn default_nw(hyper: &HyperParams) -> NwConfig {
    match hyper.example() {
        Example::Example2 => NwConfig {
            bandwidth: Bandwidth::Fixed(DISCRETE_BANDWIDTH),
        },
        _ => NwConfig::default(),
    }
}

/// A seeded Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub hyper: HyperParams,
    pub estimators: Vec<EstimatorId>,
    /// Strictly increasing sample sizes along each path.
    pub n_schedule: Vec<usize>,
    pub replications: usize,
    pub trim: Option<Trim>,
    pub seed: Seed,
    /// Grid size for [`EstimatorId::BayesGrid`].
    pub grid_size: usize,
    pub nw: NwConfig,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Experiment {
    /// An experiment with the model's default trim, grid size and kernel settings.
    pub fn new(
        hyper: HyperParams,
        estimators: Vec<EstimatorId>,
        n_schedule: Vec<usize>,
        replications: usize,
        seed: Seed,
    ) -> Self {
        Experiment {
            trim: default_trim(&hyper),
            nw: default_nw(&hyper),
            hyper,
            estimators,
            n_schedule,
            replications,
            seed,
            grid_size: SIMULATION_GRID_SIZE,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.hyper.validate()?;
        if self.estimators.is_empty() {
            return Err(Error::Usage("at least one estimator is required".into()));
        }
        if self.n_schedule.is_empty() {
            return Err(Error::Usage("n_schedule must not be empty".into()));
        }
        if !self.n_schedule.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Usage("n_schedule must be strictly increasing".into()));
        }
        if self.replications < 2 {
            return Err(Error::Usage(format!(
                "replications must be at least 2, got {}",
                self.replications
            )));
        }
        if self.grid_size < 2 {
            return Err(Error::Usage(format!("grid_size must be at least 2, got {}", self.grid_size)));
        }
        if self.n_schedule[0] == 0 && self.estimators.contains(&EstimatorId::NadarayaWatson) {
            return Err(Error::Usage("nadaraya-watson needs n >= 1 in n_schedule".into()));
        }
        if let Some(trim) = self.trim {
            Trim::new(trim.lo, trim.hi)?;
            if trim.is_active() && self.hyper.example() == Example::Example2 {
                return Err(Error::Usage(format!(
                    "trimming is only defined for continuous predictors; {} has a binary predictor",
                    self.hyper.example()
                )));
            }
        }
        if let Some(0) = self.threads {
            return Err(Error::Usage("threads must be at least 1".into()));
        }
        Ok(())
    }

    fn trimmed(&self) -> bool {
        self.trim.is_some_and(|t| t.is_active())
    }

    /// Runs `f` for every replication index on the configured pool, in index order.
    fn par_replications<T: Send>(&self, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
        let run = || (0..self.replications).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
        match self.threads {
            None => run(),
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Usage(format!("cannot start {t} worker threads: {e}")))?
                .install(run),
        }
    }
}

/// Estimator state fed incrementally along one sample path.
enum Running {
    Closed(FormulaVariant, SufficientStats),
    Grid(std::result::Result<PosteriorGrid, Error>),
    Nw,
    Truth,
}

impl Running {
    fn start(id: EstimatorId, exp: &Experiment) -> Result<Self> {
        Ok(match id {
            EstimatorId::BayesClosed(v) => Running::Closed(v, exp.hyper.empty_stats()),
            EstimatorId::BayesGrid => {
                Running::Grid(Ok(PosteriorGrid::prior(&exp.hyper.prior(), exp.grid_size)?))
            }
            EstimatorId::NadarayaWatson => Running::Nw,
            EstimatorId::Truth => Running::Truth,
        })
    }

    fn observe(&mut self, hyper: &HyperParams, new_pairs: &[crate::model::ObsPair]) -> Result<()> {
        match self {
            Running::Closed(_, stats) => {
                for &p in new_pairs {
                    *stats = update_stats(hyper, *stats, p)?;
                }
            }
            Running::Grid(state) => {
                if let Ok(grid) = state {
                    if let Err(e) = grid.observe(&hyper.model(), new_pairs) {
                        *state = Err(e);
                    }
                }
            }
            Running::Nw | Running::Truth => {}
        }
        Ok(())
    }

    fn estimate(&self, exp: &Experiment, data: &Dataset, theta: Theta, x1: f64) -> Result<f64> {
        let model = exp.hyper.model();
        match self {
            Running::Closed(variant, stats) => closed_form_regression(&exp.hyper, stats, x1, *variant),
            Running::Grid(Ok(grid)) => grid.predictive_regression(&model, x1),
            Running::Grid(Err(e)) => Err(e.clone()),
            Running::Nw => nadaraya_watson(data, x1, &exp.nw),
            Running::Truth => Ok(model.regression(theta, x1)),
        }
    }
}

/// Outcome of one estimator at one sample size.
#[derive(Debug, Clone, Copy)]
struct Evaluation {
    value: f64,
    fell_back: bool,
}

/// Estimate with the fallback policy: recoverable estimator failures are
/// replaced by the sample mean of the responses.
fn evaluate(state: &Running, exp: &Experiment, data: &Dataset, theta: Theta, x1: f64) -> Result<Evaluation> {
    match state.estimate(exp, data, theta, x1) {
        Ok(value) if value.is_finite() => Ok(Evaluation {
            value,
            fell_back: false,
        }),
        Ok(_) => Err(Error::NonFinite("estimator output".into())),
        Err(
            e @ (Error::NoKernelMass { .. }
            | Error::NoPredictiveMass { .. }
            | Error::DegeneratePosterior { .. }
            | Error::NonFinite(_)),
        ) => {
            if data.is_empty() {
                return Err(e);
            }
            let mean = data.pairs().iter().map(|p| p.x2).sum::<f64>() / data.len() as f64;
            Ok(Evaluation {
                value: mean,
                fell_back: true,
            })
        }
        Err(e) => Err(e),
    }
}

/// Draws the evaluation point `x1 ~ P_θ^{X1}`, rejecting draws outside the trim band.
fn draw_eval_point(exp: &Experiment, theta: Theta, rng: &mut SimRng) -> Result<f64> {
    let model = exp.hyper.model();
    let trim = match exp.trim {
        Some(t) if t.is_active() => t,
        _ => return Ok(model.draw_pair(theta, rng).x1),
    };
    for _ in 0..MAX_TRIM_ATTEMPTS {
        let x1 = model.draw_pair(theta, rng).x1;
        let u = model.x1_cdf(theta, x1).ok_or_else(|| {
            Error::Usage(format!("{} does not support trimming", exp.hyper.example()))
        })?;
        if u >= trim.lo && u <= trim.hi {
            return Ok(x1);
        }
    }
    Err(Error::Usage(format!(
        "no evaluation point fell in the trim band [{}, {}] after {MAX_TRIM_ATTEMPTS} draws",
        trim.lo, trim.hi
    )))
}

/// Signed errors `m - r_θ(x1)` of one replication, indexed `[n][estimator]`.
struct ReplicationErrors {
    errors: Vec<Vec<f64>>,
    fallbacks: Vec<Vec<bool>>,
}

fn simulate_replication(exp: &Experiment, index: usize) -> Result<ReplicationErrors> {
    let mut rng = exp.seed.rng(RISK_TAG, index as u64);
    let model = exp.hyper.model();
    let theta = exp.hyper.prior().sample(&mut rng);
    let x1 = draw_eval_point(exp, theta, &mut rng)?;
    let truth = model.regression(theta, x1);

    let mut states = exp
        .estimators
        .iter()
        .map(|&id| Running::start(id, exp))
        .collect::<Result<Vec<_>>>()?;
    let mut data = Dataset::new();
    let mut errors = Vec::with_capacity(exp.n_schedule.len());
    let mut fallbacks = Vec::with_capacity(exp.n_schedule.len());
    for &n in &exp.n_schedule {
        let before = data.len();
        data = crate::model::grow_dataset(&model, theta, n, &mut rng, data)?;
        let mut row = Vec::with_capacity(states.len());
        let mut fb = Vec::with_capacity(states.len());
        for state in &mut states {
            state.observe(&exp.hyper, &data.pairs()[before..])?;
            let e = evaluate(state, exp, &data, theta, x1)?;
            row.push(e.value - truth);
            fb.push(e.fell_back);
        }
        errors.push(row);
        fallbacks.push(fb);
    }
    Ok(ReplicationErrors { errors, fallbacks })
}

fn check_fallbacks(exp: &Experiment, reps: &[ReplicationErrors]) -> Result<Vec<Vec<usize>>> {
    let mut counts = vec![vec![0usize; exp.estimators.len()]; exp.n_schedule.len()];
    for rep in reps {
        for (i, row) in rep.fallbacks.iter().enumerate() {
            for (j, &f) in row.iter().enumerate() {
                counts[i][j] += usize::from(f);
            }
        }
    }
    for (i, row) in counts.iter().enumerate() {
        for (j, &failed) in row.iter().enumerate() {
            if failed as f64 > MAX_FALLBACK_FRACTION * exp.replications as f64 {
                return Err(Error::ExperimentFailure {
                    estimator: exp.estimators[j].to_string(),
                    n: exp.n_schedule[i],
                    failed,
                    replications: exp.replications,
                });
            }
        }
    }
    Ok(counts)
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// One Monte Carlo Bayes-risk estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskRow {
    pub n: usize,
    pub loss_k: u32,
    pub estimator: EstimatorId,
    pub estimate: f64,
    /// Sample sd of per-replication losses over `sqrt(replications)`.
    pub mc_se: f64,
    pub replications: usize,
    pub trimmed: bool,
    pub fallbacks: usize,
}

/// Bayes-risk estimates per sample size and estimator, in schedule order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskCurve {
    pub rows: Vec<RiskRow>,
}

impl RiskCurve {
    pub fn row(&self, n: usize, estimator: EstimatorId) -> Option<&RiskRow> {
        self.rows.iter().find(|r| r.n == n && r.estimator == estimator)
    }
}

fn risk_rows(
    exp: &Experiment,
    reps: &[ReplicationErrors],
    counts: &[Vec<usize>],
    loss: LossExponent,
) -> Result<Vec<RiskRow>> {
    let mut rows = Vec::new();
    for (i, &n) in exp.n_schedule.iter().enumerate() {
        for (j, &estimator) in exp.estimators.iter().enumerate() {
            let losses: Vec<f64> = reps.iter().map(|r| loss.apply(r.errors[i][j])).collect();
            let (estimate, mc_se) = mean_and_se(&losses);
            rows.push(RiskRow {
                n,
                loss_k: loss.k(),
                estimator,
                estimate: finite(estimate, "risk estimate")?,
                mc_se: finite(mc_se, "risk standard error")?,
                replications: exp.replications,
                trimmed: exp.trimmed(),
                fallbacks: counts[i][j],
            });
        }
    }
    Ok(rows)
}

/// Monte Carlo estimate of `E[|m(x', x1) - r_θ(x1)|^k]` for each estimator and
/// sample size. All estimators see the same draws.
pub fn bayes_risk(exp: &Experiment, loss: LossExponent) -> Result<RiskCurve> {
    exp.validate()?;
    let reps = exp.par_replications(|i| simulate_replication(exp, i))?;
    let counts = check_fallbacks(exp, &reps)?;
    Ok(RiskCurve {
        rows: risk_rows(exp, &reps, &counts, loss)?,
    })
}

/// Risk of one estimator relative to the reference (the first estimator).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub risk: RiskRow,
    /// Mean of `loss(estimator) - loss(reference)` over common draws.
    pub paired_diff: f64,
    pub paired_se: f64,
    /// The reference is a Bayes estimator, this one is not, and this one has
    /// lower risk by more than two paired standard errors.
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub reference: EstimatorId,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn row(&self, n: usize, estimator: EstimatorId) -> Option<&ComparisonRow> {
        self.rows
            .iter()
            .find(|r| r.risk.n == n && r.risk.estimator == estimator)
    }

    pub fn violations(&self) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().filter(|r| r.violation)
    }
}

/// Paired comparison of estimators on common random numbers; the first
/// estimator is the reference.
pub fn compare_estimators(exp: &Experiment, loss: LossExponent) -> Result<Comparison> {
    if exp.estimators.len() < 2 {
        return Err(Error::Usage("compare needs at least two estimators".into()));
    }
    exp.validate()?;
    let reps = exp.par_replications(|i| simulate_replication(exp, i))?;
    let counts = check_fallbacks(exp, &reps)?;
    let risk = risk_rows(exp, &reps, &counts, loss)?;
    let reference = exp.estimators[0];
    let example = exp.hyper.example();
    let per_n = exp.estimators.len();
    let rows = risk
        .into_iter()
        .enumerate()
        .map(|(idx, risk)| {
            let (i, j) = (idx / per_n, idx % per_n);
            let diffs: Vec<f64> = reps
                .iter()
                .map(|r| loss.apply(r.errors[i][j]) - loss.apply(r.errors[i][0]))
                .collect();
            let (paired_diff, paired_se) = mean_and_se(&diffs);
            let violation = reference.is_bayes(example)
                && !risk.estimator.is_bayes(example)
                && paired_diff + 2.0 * paired_se < 0.0;
            Ok(ComparisonRow {
                risk,
                paired_diff: finite(paired_diff, "paired difference")?,
                paired_se: finite(paired_se, "paired standard error")?,
                violation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Comparison { reference, rows })
}

/// Deviations along one replication's path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathReplication {
    pub theta: Theta,
    /// `|m*_n(x1) - r_θ(x1)|`, indexed `[n][x1]`.
    pub deviations: Vec<Vec<f64>>,
    /// Maximum over the evaluation points, per `n`.
    pub max_deviation: Vec<f64>,
    pub fallbacks: usize,
}

/// 10%, 50% and 90% sample quantiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantiles {
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
}

impl Quantiles {
    fn of(mut xs: Vec<f64>) -> Self {
        xs.sort_by(f64::total_cmp);
        Quantiles {
            q10: sorted_quantile(&xs, 0.1),
            median: sorted_quantile(&xs, 0.5),
            q90: sorted_quantile(&xs, 0.9),
        }
    }
}

/// Cross-replication summary at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSummary {
    pub n: usize,
    pub max_deviation: Quantiles,
    /// Per evaluation point.
    pub pointwise: Vec<Quantiles>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathReport {
    pub estimator: EstimatorId,
    pub n_schedule: Vec<usize>,
    pub x1_eval: Vec<f64>,
    pub replications: Vec<PathReplication>,
    pub summary: Vec<PathSummary>,
}

impl PathReport {
    /// Fraction of replications whose max deviation at schedule position `i` is at most `bound`.
    pub fn fraction_within(&self, i: usize, bound: f64) -> f64 {
        let hits = self
            .replications
            .iter()
            .filter(|r| r.max_deviation[i] <= bound)
            .count();
        hits as f64 / self.replications.len() as f64
    }
}

/// Traces `|m_n(x1) - r_θ(x1)|` at fixed evaluation points along growing paths.
/// The experiment must name exactly one estimator.
pub fn consistency_paths(exp: &Experiment, x1_eval: &[f64]) -> Result<PathReport> {
    exp.validate()?;
    if exp.estimators.len() != 1 {
        return Err(Error::Usage(format!(
            "consistency paths take exactly one estimator, got {}",
            exp.estimators.len()
        )));
    }
    if x1_eval.is_empty() {
        return Err(Error::Usage("x1_eval must not be empty".into()));
    }
    let model = exp.hyper.model();
    for &x1 in x1_eval {
        model.predictor_support().check("x1", x1)?;
    }
    let estimator = exp.estimators[0];

    let replications = exp.par_replications(|index| {
        let mut rng = exp.seed.rng(PATH_TAG, index as u64);
        let theta = exp.hyper.prior().sample(&mut rng);
        let mut state = Running::start(estimator, exp)?;
        let mut data = Dataset::new();
        let mut deviations = Vec::with_capacity(exp.n_schedule.len());
        let mut fallbacks = 0;
        for &n in &exp.n_schedule {
            let before = data.len();
            data = crate::model::grow_dataset(&model, theta, n, &mut rng, data)?;
            state.observe(&exp.hyper, &data.pairs()[before..])?;
            let row = x1_eval
                .iter()
                .map(|&x1| {
                    let e = evaluate(&state, exp, &data, theta, x1)?;
                    fallbacks += usize::from(e.fell_back);
                    finite((e.value - model.regression(theta, x1)).abs(), "path deviation")
                })
                .collect::<Result<Vec<f64>>>()?;
            deviations.push(row);
        }
        let max_deviation = deviations
            .iter()
            .map(|row| row.iter().copied().fold(0.0, f64::max))
            .collect();
        Ok(PathReplication {
            theta,
            deviations,
            max_deviation,
            fallbacks,
        })
    })?;

    let failed = replications.iter().filter(|r| r.fallbacks > 0).count();
    if failed as f64 > MAX_FALLBACK_FRACTION * exp.replications as f64 {
        return Err(Error::ExperimentFailure {
            estimator: estimator.to_string(),
            n: *exp.n_schedule.last().unwrap_or(&0),
            failed,
            replications: exp.replications,
        });
    }

    let summary = exp
        .n_schedule
        .iter()
        .enumerate()
        .map(|(i, &n)| PathSummary {
            n,
            max_deviation: Quantiles::of(replications.iter().map(|r| r.max_deviation[i]).collect()),
            pointwise: (0..x1_eval.len())
                .map(|k| Quantiles::of(replications.iter().map(|r| r.deviations[i][k]).collect()))
                .collect(),
        })
        .collect();

    Ok(PathReport {
        estimator,
        n_schedule: exp.n_schedule.clone(),
        x1_eval: x1_eval.to_vec(),
        replications,
        summary,
    })
}
