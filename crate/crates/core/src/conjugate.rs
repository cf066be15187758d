//! Closed-form Bayes estimators of the regression curve for the three bundled
//! conjugate models, driven by streaming sufficient statistics.
//!
//! Each estimator is the conditional mean of `x2` given `x1` under the posterior
//! predictive distribution. For the coin and bivariate-normal models two
//! formulas are provided:
//!
//! * [`FormulaVariant::Posterior`] (default) evaluates the defining integral
//!   over the conjugate posterior (Beta for the coin model, normal for the
//!   bivariate normal model).
//! * [`FormulaVariant::Paper`] evaluates the closed forms as they were
//!   originally published. They disagree with the integral; at `n = 0` the coin
//!   model gives 1/3 and 1/4 instead of 2/3 and 2/3. They are kept so the
//!   discrepancy can be measured.
//!
//! For the exponential-chain model both variants coincide.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bundled::{
    BivariateNormal, BundledModel, BundledPrior, ExponentialChain, ExponentialPrior, NormalPrior,
    TwoCoinToss, UnitUniformPrior,
};
use crate::error::{Error, Result};
use crate::model::{Dataset, Model, ObsPair, Support};
use crate::numeric::CompensatedSum;

/// Which of the three worked models an object belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    Example1,
    Example2,
    Example3,
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Example::Example1 => "example1",
            Example::Example2 => "example2",
            Example::Example3 => "example3",
        })
    }
}

impl FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example1" => Ok(Example::Example1),
            "example2" => Ok(Example::Example2),
            "example3" => Ok(Example::Example3),
            other => Err(Error::Usage(format!(
                "unknown model {other:?} (expected example1, example2 or example3)"
            ))),
        }
    }
}

/// Model and prior hyperparameters of a worked example.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum HyperParams {
    /// Exponential chain with prior rate `lambda`.
    Example1 { lambda: f64 },
    /// Two-coin toss with a uniform prior on (0, 1).
    Example2,
    /// Bivariate normal with known `sigma`, `rho`, prior `N(mu, tau²)`.
    Example3 {
        mu: f64,
        tau: f64,
        sigma: f64,
        rho: f64,
    },
}

impl HyperParams {
    pub fn example1(lambda: f64) -> Result<Self> {
        positive("lambda", lambda)?;
        Ok(HyperParams::Example1 { lambda })
    }

    pub fn example2() -> Self {
        HyperParams::Example2
    }

    pub fn example3(mu: f64, tau: f64, sigma: f64, rho: f64) -> Result<Self> {
        Support::REAL_LINE.check("mu", mu)?;
        positive("tau", tau)?;
        positive("sigma", sigma)?;
        Support::Interval {
            lo: crate::model::Bound::Open(-1.0),
            hi: crate::model::Bound::Open(1.0),
        }
        .check("rho", rho)?;
        Ok(HyperParams::Example3 { mu, tau, sigma, rho })
    }

    /// Re-checks the range constraints (for values built without a constructor).
    pub fn validate(self) -> Result<Self> {
        match self {
            HyperParams::Example1 { lambda } => Self::example1(lambda),
            HyperParams::Example2 => Ok(self),
            HyperParams::Example3 { mu, tau, sigma, rho } => Self::example3(mu, tau, sigma, rho),
        }
    }

    pub fn example(&self) -> Example {
        match self {
            HyperParams::Example1 { .. } => Example::Example1,
            HyperParams::Example2 => Example::Example2,
            HyperParams::Example3 { .. } => Example::Example3,
        }
    }

    pub fn model(&self) -> BundledModel {
        match *self {
            HyperParams::Example1 { .. } => BundledModel::ExponentialChain(ExponentialChain),
            HyperParams::Example2 => BundledModel::TwoCoinToss(TwoCoinToss),
            HyperParams::Example3 { sigma, rho, .. } => {
                BundledModel::BivariateNormal(BivariateNormal { sigma, rho })
            }
        }
    }

    pub fn prior(&self) -> BundledPrior {
        match *self {
            HyperParams::Example1 { lambda } => {
                BundledPrior::Exponential(ExponentialPrior { rate: lambda })
            }
            HyperParams::Example2 => BundledPrior::UnitUniform(UnitUniformPrior),
            HyperParams::Example3 { mu, tau, .. } => {
                BundledPrior::Normal(NormalPrior { mean: mu, sd: tau })
            }
        }
    }

    pub fn empty_stats(&self) -> SufficientStats {
        match self {
            HyperParams::Example1 { .. } => SufficientStats::Example1 {
                n: 0,
                s: CompensatedSum::new(),
            },
            HyperParams::Example2 => SufficientStats::Example2 {
                n00: 0,
                n01: 0,
                n10: 0,
                n11: 0,
            },
            HyperParams::Example3 { .. } => SufficientStats::Example3 {
                n: 0,
                s1: CompensatedSum::new(),
            },
        }
    }
}

fn positive(what: &'static str, x: f64) -> Result<f64> {
    Support::POSITIVE.check(what, x)
}

/// Statistics that determine the closed-form estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SufficientStats {
    /// `s = Σ x1_i (1 + x2_i)`.
    Example1 { n: usize, s: CompensatedSum },
    /// `n_jk = #{i : (x1_i, x2_i) = (j, k)}`.
    Example2 {
        n00: usize,
        n01: usize,
        n10: usize,
        n11: usize,
    },
    /// `s1 = Σ (x1_i + x2_i)`.
    Example3 { n: usize, s1: CompensatedSum },
}

impl SufficientStats {
    pub fn n(&self) -> usize {
        match *self {
            SufficientStats::Example1 { n, .. } | SufficientStats::Example3 { n, .. } => n,
            SufficientStats::Example2 { n00, n01, n10, n11 } => n00 + n01 + n10 + n11,
        }
    }

    pub fn example(&self) -> Example {
        match self {
            SufficientStats::Example1 { .. } => Example::Example1,
            SufficientStats::Example2 { .. } => Example::Example2,
            SufficientStats::Example3 { .. } => Example::Example3,
        }
    }

    /// Batch computation over a dataset.
    pub fn from_dataset(hyper: &HyperParams, data: &Dataset) -> Result<Self> {
        data.pairs()
            .iter()
            .try_fold(hyper.empty_stats(), |acc, &p| update_stats(hyper, acc, p))
    }
}

/// Which closed form to evaluate; see the module docs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaVariant {
    #[default]
    Posterior,
    Paper,
}

impl fmt::Display for FormulaVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormulaVariant::Posterior => "posterior",
            FormulaVariant::Paper => "paper",
        })
    }
}

/// Adds one observation to the statistics.
pub fn update_stats(
    hyper: &HyperParams,
    stats: SufficientStats,
    pair: ObsPair,
) -> Result<SufficientStats> {
    if stats.example() != hyper.example() {
        return Err(Error::Usage(format!(
            "statistics for {} cannot be updated with {} hyperparameters",
            stats.example(),
            hyper.example()
        )));
    }
    hyper.model().check_pair(pair)?;
    Ok(match stats {
        SufficientStats::Example1 { n, mut s } => {
            s.add(pair.x1 * (1.0 + pair.x2));
            SufficientStats::Example1 { n: n + 1, s }
        }
        SufficientStats::Example2 {
            mut n00,
            mut n01,
            mut n10,
            mut n11,
        } => {
            match (pair.x1 == 1.0, pair.x2 == 1.0) {
                (false, false) => n00 += 1,
                (false, true) => n01 += 1,
                (true, false) => n10 += 1,
                (true, true) => n11 += 1,
            }
            SufficientStats::Example2 { n00, n01, n10, n11 }
        }
        SufficientStats::Example3 { n, mut s1 } => {
            s1.add(pair.x1 + pair.x2);
            SufficientStats::Example3 { n: n + 1, s1 }
        }
    })
}

/// The Bayes estimate `m*_n(x', x1)` from sufficient statistics.
pub fn closed_form_regression(
    hyper: &HyperParams,
    stats: &SufficientStats,
    x1: f64,
    variant: FormulaVariant,
) -> Result<f64> {
    hyper.model().predictor_support().check("x1", x1)?;
    match (*hyper, *stats) {
        (HyperParams::Example1 { lambda }, SufficientStats::Example1 { n, s }) => {
            Ok((lambda + x1 + s.value()) / ((2 * n + 1) as f64 * x1))
        }
        (HyperParams::Example2, SufficientStats::Example2 { n00, n01, n10, n11 }) => {
            let heads = x1 == 1.0;
            Ok(match variant {
                FormulaVariant::Posterior => coin::posterior_estimate(n00, n01, n10, n11, heads),
                FormulaVariant::Paper => coin::paper_estimate(n00, n01, n10, n11, heads),
            })
        }
        (HyperParams::Example3 { mu, tau, sigma, rho }, SufficientStats::Example3 { n, s1 }) => {
            let (slope, intercept_mean) = match variant {
                FormulaVariant::Posterior => {
                    let post = normal::Posterior::new(n, s1.value(), mu, tau, sigma, rho);
                    (post.predictive_slope(sigma, rho), post.mean)
                }
                FormulaVariant::Paper => {
                    let rho1 = normal::paper_rho1(n, rho, sigma, tau);
                    (rho1, normal::paper_m1(n, s1.value(), mu, tau, sigma, rho))
                }
            };
            Ok((1.0 - slope) * intercept_mean + slope * x1)
        }
        (h, s) => Err(Error::Usage(format!(
            "statistics for {} used with {} hyperparameters",
            s.example(),
            h.example()
        ))),
    }
}

/// Two-coin-toss estimators.
pub mod coin {
    /// Parameters `(α, β)` of the Beta posterior under the uniform prior:
    /// the likelihood is `θ^(n+0 + 2 n11) (1 - θ)^(n+0 + 2 n01)`.
    pub fn beta_posterior(n00: usize, n01: usize, n10: usize, n11: usize) -> (f64, f64) {
        let tails_second = (n00 + n10) as f64;
        (
            tails_second + 2.0 * n11 as f64 + 1.0,
            tails_second + 2.0 * n01 as f64 + 1.0,
        )
    }

    /// `P(x2 = 1 | x1)` under the posterior predictive: `E[θ²]/E[θ]` for heads,
    /// `E[(1-θ)²]/E[1-θ]` for tails.
    pub fn posterior_estimate(n00: usize, n01: usize, n10: usize, n11: usize, heads: bool) -> f64 {
        let (a, b) = beta_posterior(n00, n01, n10, n11);
        if heads {
            (a + 1.0) / (a + b + 1.0)
        } else {
            (b + 1.0) / (a + b + 1.0)
        }
    }

    /// The published closed form.
    pub fn paper_estimate(n00: usize, n01: usize, n10: usize, n11: usize, heads: bool) -> f64 {
        let n = (n00 + n01 + n10 + n11) as f64;
        let num = (n00 + n10) as f64 + 2.0 * n01 as f64 + 1.0;
        let extra = if heads { 4.0 } else { 3.0 };
        num / (2.0 * n + (n00 + n10) as f64 + 2.0 * n01 as f64 + extra)
    }
}

/// Bivariate-normal estimators.
pub mod normal {
    /// Normal posterior of θ after `n` pairs with `s1 = Σ (x1 + x2)`.
    ///
    /// Each pair contributes precision `2 / (σ² (1 + ρ))`.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct Posterior {
        pub mean: f64,
        pub variance: f64,
    }

    impl Posterior {
        pub fn new(n: usize, s1: f64, mu: f64, tau: f64, sigma: f64, rho: f64) -> Self {
            let pair_scale = sigma * sigma * (1.0 + rho);
            let precision = 2.0 * n as f64 / pair_scale + 1.0 / (tau * tau);
            let mean = (s1 / pair_scale + mu / (tau * tau)) / precision;
            Posterior {
                mean,
                variance: 1.0 / precision,
            }
        }

        /// Slope of the predictive regression: `Cov(X1, X2) / Var(X1)` under
        /// the posterior predictive, `(ρσ² + v) / (σ² + v)`.
        pub fn predictive_slope(&self, sigma: f64, rho: f64) -> f64 {
            let s2 = sigma * sigma;
            (rho * s2 + self.variance) / (s2 + self.variance)
        }
    }

    /// `a_n = 2 (n + 1)(1 + ρ) + σ²/τ²` as published.
    pub fn paper_a_n(n: usize, rho: f64, sigma: f64, tau: f64) -> f64 {
        2.0 * (n as f64 + 1.0) * (1.0 + rho) + sigma * sigma / (tau * tau)
    }

    /// `ρ1 = -ρ (a_n + c) / (a_n - c)` with `c = (1 - ρ)/(1 + ρ)`, as published.
    pub fn paper_rho1(n: usize, rho: f64, sigma: f64, tau: f64) -> f64 {
        let a = paper_a_n(n, rho, sigma, tau);
        let c = (1.0 - rho) / (1.0 + rho);
        -(a + c) / (a - c) * rho
    }

    /// `m1 = (s1 + (1 + ρ) σ²/τ² μ) / (2 (1 - ρ1)(1 + ρ)² σ² a_n)`, as published.
    pub fn paper_m1(n: usize, s1: f64, mu: f64, tau: f64, sigma: f64, rho: f64) -> f64 {
        let s2 = sigma * sigma;
        let a = paper_a_n(n, rho, sigma, tau);
        let rho1 = paper_rho1(n, rho, sigma, tau);
        (s1 + (1.0 + rho) * s2 / (tau * tau) * mu)
            / (2.0 * (1.0 - rho1) * (1.0 + rho) * (1.0 + rho) * s2 * a)
    }
}
