use thiserror::Error;

/// Errors raised by the estimation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the support declared by a model or prior.
    #[error("{what} = {value} is outside the support {support}")]
    Domain {
        what: &'static str,
        value: f64,
        support: String,
    },

    /// The caller combined arguments that cannot be used together.
    #[error("invalid usage: {0}")]
    Usage(String),

    /// Every grid node has zero likelihood for the observed data.
    #[error("degenerate posterior: all {nodes} node log-likelihoods are -inf or NaN (finite range: {range})")]
    DegeneratePosterior { nodes: usize, range: String },

    /// The predictor value has vanishing predictive density at every grid node.
    #[error("no predictive mass at x1 = {x1}")]
    NoPredictiveMass { x1: f64 },

    /// The kernel weights of a local-average estimator summed below the floor.
    #[error("kernel weights vanish at x1 = {x1} (sum = {sum:e})")]
    NoKernelMass { x1: f64, sum: f64 },

    /// A computation produced NaN or an infinity where a finite number is required.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// Errors collected from a batch evaluation, tagged with their positions.
    #[error("{} of {} points failed; first at index {}: {}", .failures.len(), .total, .failures[0].0, .failures[0].1)]
    PointFailures {
        total: usize,
        failures: Vec<(usize, Box<Error>)>,
    },

    /// Too many replications of an experiment fell back after estimator failures.
    #[error("experiment failed: estimator {estimator} fell back in {failed} of {replications} replications at n = {n} (limit 5%)")]
    ExperimentFailure {
        estimator: String,
        n: usize,
        failed: usize,
        replications: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
