//! Posterior over θ on a prior-quantile grid, and the posterior-predictive
//! regression curve evaluated on it.
//!
//! Nodes sit at prior quantiles `θ_j = Q⁻¹((j - 0.5) / J)`, so each carries
//! prior mass `1/J` and the posterior weight of a node is proportional to the
//! likelihood alone. All accumulation happens in log space.

use crate::error::{Error, Result};
use crate::model::{Dataset, Model, ObsPair, Prior, Theta};
use crate::numeric::log_sum_exp;

/// Grid size for oracle-grade evaluations.
pub const ORACLE_GRID_SIZE: usize = 4096;
/// Grid size used inside Monte Carlo loops.
pub const SIMULATION_GRID_SIZE: usize = 512;

/// Discrete approximation of the posterior distribution of θ.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorGrid {
    nodes: Vec<Theta>,
    log_weights: Vec<f64>,
    weights: Vec<f64>,
    n_obs: usize,
}

impl PosteriorGrid {
    /// Builds a grid from explicit nodes and unnormalized log masses.
    pub fn from_parts(nodes: Vec<Theta>, log_weights: Vec<f64>, n_obs: usize) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != log_weights.len() {
            return Err(Error::Usage(format!(
                "grid needs matching non-empty nodes and weights (got {} and {})",
                nodes.len(),
                log_weights.len()
            )));
        }
        if nodes.iter().any(|t| !t.0.is_finite()) {
            return Err(Error::NonFinite("grid nodes".into()));
        }
        if !nodes.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::Usage("grid nodes must be strictly increasing".into()));
        }
        let mut grid = PosteriorGrid {
            weights: vec![0.0; nodes.len()],
            nodes,
            log_weights,
            n_obs,
        };
        grid.normalize()?;
        Ok(grid)
    }

    /// The prior discretized at `grid_size` equal-mass quantile nodes.
    pub fn prior<P: Prior + ?Sized>(prior: &P, grid_size: usize) -> Result<Self> {
        if grid_size < 2 {
            return Err(Error::Usage(format!("grid_size must be at least 2, got {grid_size}")));
        }
        let j = grid_size as f64;
        let nodes = (0..grid_size)
            .map(|i| prior.quantile((i as f64 + 0.5) / j))
            .collect();
        Self::from_parts(nodes, vec![0.0; grid_size], 0)
    }

    pub fn nodes(&self) -> &[Theta] {
        &self.nodes
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Conditions on further observations.
    pub fn observe<M: Model + ?Sized>(&mut self, model: &M, pairs: &[ObsPair]) -> Result<()> {
        for &pair in pairs {
            model.check_pair(pair)?;
        }
        for (lw, &theta) in self.log_weights.iter_mut().zip(&self.nodes) {
            for &pair in pairs {
                *lw += model.log_joint(theta, pair);
            }
        }
        self.n_obs += pairs.len();
        self.normalize()
    }

    fn normalize(&mut self) -> Result<()> {
        let lse = log_sum_exp(&self.log_weights);
        if !lse.is_finite() || self.log_weights.iter().any(|w| w.is_nan()) {
            let finite = self.log_weights.iter().copied().filter(|w| w.is_finite());
            let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), w| {
                (lo.min(w), hi.max(w))
            });
            let range = if lo <= hi {
                format!("[{lo}, {hi}]")
            } else {
                "no finite values".to_string()
            };
            return Err(Error::DegeneratePosterior {
                nodes: self.nodes.len(),
                range,
            });
        }
        // exp(lw - lse), computed as a ratio so that equal log weights give exactly 1/J.
        let max = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for (w, &lw) in self.weights.iter_mut().zip(&self.log_weights) {
            *w = (lw - max).exp();
            total += *w;
        }
        for w in &mut self.weights {
            *w /= total;
        }
        Ok(())
    }

    /// Posterior-predictive regression curve at `x1`:
    /// `Σ w_j r_j(x1) f1_j(x1) / Σ w_j f1_j(x1)` with `f1` the `X1` marginal.
    ///
    /// Terms are scaled by the largest `log w_j + log f1_j` before
    /// exponentiation, so signed regression values need no separate handling.
    pub fn predictive_regression<M: Model + ?Sized>(&self, model: &M, x1: f64) -> Result<f64> {
        model.predictor_support().check("x1", x1)?;
        let log_terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.log_weights)
            .map(|(&t, &lw)| lw + model.log_x1_marginal(t, x1))
            .collect();
        let max = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::NoPredictiveMass { x1 });
        }
        let (mut num, mut den) = (0.0, 0.0);
        for (&t, &lt) in self.nodes.iter().zip(&log_terms) {
            let d = (lt - max).exp();
            if d > 0.0 {
                num += d * model.regression(t, x1);
                den += d;
            }
        }
        finite(num / den, "predictive regression")
    }

    /// Posterior-predictive mean of a statistic with θ-wise mean `mean_under_theta`,
    /// `Σ w_j E_θj[X]`.
    pub fn predictive_statistic_mean(&self, mean_under_theta: impl Fn(Theta) -> f64) -> Result<f64> {
        let v: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * mean_under_theta(t))
            .sum();
        finite(v, "predictive statistic mean")
    }

    /// Posterior mean of θ.
    pub fn posterior_mean(&self) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(t, w)| t.0 * w).sum()
    }

    /// [`predictive_regression`](Self::predictive_regression) at each point.
    /// Failures are collected with their positions.
    pub fn curve_estimate<M: Model + ?Sized>(&self, model: &M, x1_grid: &[f64]) -> Result<Vec<f64>> {
        let mut values = Vec::with_capacity(x1_grid.len());
        let mut failures = Vec::new();
        for (i, &x1) in x1_grid.iter().enumerate() {
            match self.predictive_regression(model, x1) {
                Ok(v) => values.push(v),
                Err(e) => failures.push((i, Box::new(e))),
            }
        }
        if failures.is_empty() {
            Ok(values)
        } else {
            Err(Error::PointFailures {
                total: x1_grid.len(),
                failures,
            })
        }
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Posterior grid for `data` under `model` and `prior`.
pub fn build_grid<M, P>(model: &M, prior: &P, data: &Dataset, grid_size: usize) -> Result<PosteriorGrid>
where
    M: Model + ?Sized,
    P: Prior + ?Sized,
{
    let mut grid = PosteriorGrid::prior(prior, grid_size)?;
    grid.observe(model, data.pairs())?;
    Ok(grid)
}
