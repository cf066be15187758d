//! The three worked models and their priors.
//!
//! * [`ExponentialChain`]: `X1 ~ Exp(rate θ)`, `X2 | X1 = x1 ~ Exp(rate θ·x1)`,
//!   joint density `θ² x1 exp(-θ x1 (1 + x2))` on `(0, ∞)²`.
//! * [`TwoCoinToss`]: `X1 ~ Bernoulli(θ)`, `X2 | X1 = k ~ Bernoulli(θ)` if
//!   `k = 1` and `Bernoulli(1 - θ)` if `k = 0`.
//! * [`BivariateNormal`]: `(X1, X2) ~ N2((θ, θ), σ² [[1, ρ], [ρ, 1]])`.
//!
//! Gamma distributions are parameterised shape–scale throughout, so the prior
//! `G(1, 1/λ)` is the exponential distribution with rate `λ`.

use std::f64::consts::{LN_2, PI, SQRT_2};

use rand::Rng;
use rand_distr::{Open01, StandardNormal};
use statrs::function::erf::{erfc, erfc_inv};

use crate::model::{Bound, Model, ObsPair, Prior, Support, Theta};
use crate::seed::SimRng;

/// Exponential draw with the given rate by inversion; strictly positive.
fn exp_draw(rate: f64, rng: &mut SimRng) -> f64 {
    let u: f64 = rng.sample(Open01);
    -u.ln() / rate
}

/// Exponential predictor with exponential response whose rate scales with the predictor.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExponentialChain;

impl Model for ExponentialChain {
    fn parameter_support(&self) -> Support {
        Support::POSITIVE
    }

    fn predictor_support(&self) -> Support {
        Support::POSITIVE
    }

    fn response_support(&self) -> Support {
        Support::POSITIVE
    }

    fn log_joint(&self, theta: Theta, pair: ObsPair) -> f64 {
        let t = theta.0;
        2.0 * t.ln() + pair.x1.ln() - t * pair.x1 * (1.0 + pair.x2)
    }

    fn log_x1_marginal(&self, theta: Theta, x1: f64) -> f64 {
        theta.0.ln() - theta.0 * x1
    }

    fn regression(&self, theta: Theta, x1: f64) -> f64 {
        1.0 / (theta.0 * x1)
    }

    fn draw_pair(&self, theta: Theta, rng: &mut SimRng) -> ObsPair {
        let x1 = exp_draw(theta.0, rng);
        let x2 = exp_draw(theta.0 * x1, rng);
        ObsPair { x1, x2 }
    }

    fn x1_cdf(&self, theta: Theta, x1: f64) -> Option<f64> {
        Some(-(-theta.0 * x1).exp_m1())
    }
}

/// Two tosses of a coin with heads probability θ; the second toss is replaced by
/// a coin with heads probability `1 - θ` when the first lands tails.
/// Outcomes are encoded as `0.0` / `1.0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TwoCoinToss;

impl TwoCoinToss {
    fn cell(value: f64) -> Option<bool> {
        if value == 1.0 {
            Some(true)
        } else if value == 0.0 {
            Some(false)
        } else {
            None
        }
    }
}

impl Model for TwoCoinToss {
    // The kernel is well defined at θ ∈ {0, 1}; the uniform prior never reaches them.
    fn parameter_support(&self) -> Support {
        Support::Interval {
            lo: Bound::Closed(0.0),
            hi: Bound::Closed(1.0),
        }
    }

    fn predictor_support(&self) -> Support {
        Support::binary()
    }

    fn response_support(&self) -> Support {
        Support::binary()
    }

    fn log_joint(&self, theta: Theta, pair: ObsPair) -> f64 {
        let ln_t = theta.0.ln();
        let ln_1mt = (-theta.0).ln_1p();
        match (Self::cell(pair.x1), Self::cell(pair.x2)) {
            (Some(_), Some(false)) => ln_t + ln_1mt,
            (Some(false), Some(true)) => 2.0 * ln_1mt,
            (Some(true), Some(true)) => 2.0 * ln_t,
            _ => f64::NEG_INFINITY,
        }
    }

    fn log_x1_marginal(&self, theta: Theta, x1: f64) -> f64 {
        match Self::cell(x1) {
            Some(true) => theta.0.ln(),
            Some(false) => (-theta.0).ln_1p(),
            None => f64::NEG_INFINITY,
        }
    }

    fn regression(&self, theta: Theta, x1: f64) -> f64 {
        if x1 == 1.0 {
            theta.0
        } else {
            1.0 - theta.0
        }
    }

    fn draw_pair(&self, theta: Theta, rng: &mut SimRng) -> ObsPair {
        let first = rng.random::<f64>() < theta.0;
        let p2 = if first { theta.0 } else { 1.0 - theta.0 };
        let second = rng.random::<f64>() < p2;
        ObsPair {
            x1: f64::from(u8::from(first)),
            x2: f64::from(u8::from(second)),
        }
    }
}

/// Bivariate normal with common unknown mean θ, known scale σ and correlation ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateNormal {
    pub sigma: f64,
    pub rho: f64,
}

impl Model for BivariateNormal {
    fn parameter_support(&self) -> Support {
        Support::REAL_LINE
    }

    fn predictor_support(&self) -> Support {
        Support::REAL_LINE
    }

    fn response_support(&self) -> Support {
        Support::REAL_LINE
    }

    fn log_joint(&self, theta: Theta, pair: ObsPair) -> f64 {
        let s2 = self.sigma * self.sigma;
        let one_m_r2 = 1.0 - self.rho * self.rho;
        let d1 = pair.x1 - theta.0;
        let d2 = pair.x2 - theta.0;
        let q = d1 * d1 - 2.0 * self.rho * d1 * d2 + d2 * d2;
        -(2.0 * PI * s2).ln() - 0.5 * one_m_r2.ln() - q / (2.0 * s2 * one_m_r2)
    }

    fn log_x1_marginal(&self, theta: Theta, x1: f64) -> f64 {
        let z = (x1 - theta.0) / self.sigma;
        -0.5 * (LN_2 + PI.ln()) - self.sigma.ln() - 0.5 * z * z
    }

    fn regression(&self, theta: Theta, x1: f64) -> f64 {
        (1.0 - self.rho) * theta.0 + self.rho * x1
    }

    fn draw_pair(&self, theta: Theta, rng: &mut SimRng) -> ObsPair {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let x1 = theta.0 + self.sigma * z1;
        let x2 = theta.0 + self.sigma * (self.rho * z1 + (1.0 - self.rho * self.rho).sqrt() * z2);
        ObsPair { x1, x2 }
    }

    fn x1_cdf(&self, theta: Theta, x1: f64) -> Option<f64> {
        Some(0.5 * erfc(-(x1 - theta.0) / (self.sigma * SQRT_2)))
    }
}

/// Exponential prior with rate `λ` (the gamma `G(1, 1/λ)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialPrior {
    pub rate: f64,
}

impl Prior for ExponentialPrior {
    fn log_density(&self, theta: Theta) -> f64 {
        if theta.0 < 0.0 {
            return f64::NEG_INFINITY;
        }
        self.rate.ln() - self.rate * theta.0
    }

    fn sample(&self, rng: &mut SimRng) -> Theta {
        Theta(exp_draw(self.rate, rng))
    }

    fn quantile(&self, u: f64) -> Theta {
        Theta(-(-u).ln_1p() / self.rate)
    }
}

/// Uniform prior on `(0, 1)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UnitUniformPrior;

impl Prior for UnitUniformPrior {
    fn log_density(&self, theta: Theta) -> f64 {
        if theta.0 > 0.0 && theta.0 < 1.0 {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    }

    fn sample(&self, rng: &mut SimRng) -> Theta {
        Theta(rng.sample(Open01))
    }

    fn quantile(&self, u: f64) -> Theta {
        Theta(u)
    }
}

/// Normal prior `N(μ, τ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalPrior {
    pub mean: f64,
    pub sd: f64,
}

impl Prior for NormalPrior {
    fn log_density(&self, theta: Theta) -> f64 {
        let z = (theta.0 - self.mean) / self.sd;
        -0.5 * (LN_2 + PI.ln()) - self.sd.ln() - 0.5 * z * z
    }

    fn sample(&self, rng: &mut SimRng) -> Theta {
        let z: f64 = rng.sample(StandardNormal);
        Theta(self.mean + self.sd * z)
    }

    fn quantile(&self, u: f64) -> Theta {
        Theta(self.mean - self.sd * SQRT_2 * erfc_inv(2.0 * u))
    }
}


/// Any of the bundled models, dispatched statically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BundledModel {
    ExponentialChain(ExponentialChain),
    TwoCoinToss(TwoCoinToss),
    BivariateNormal(BivariateNormal),
}

macro_rules! dispatch {
    ($self:ident, $m:ident => $body:expr) => {
        match $self {
            BundledModel::ExponentialChain($m) => $body,
            BundledModel::TwoCoinToss($m) => $body,
            BundledModel::BivariateNormal($m) => $body,
        }
    };
}

impl Model for BundledModel {
    fn parameter_support(&self) -> Support {
        dispatch!(self, m => m.parameter_support())
    }

    fn predictor_support(&self) -> Support {
        dispatch!(self, m => m.predictor_support())
    }

    fn response_support(&self) -> Support {
        dispatch!(self, m => m.response_support())
    }

    fn log_joint(&self, theta: Theta, pair: ObsPair) -> f64 {
        dispatch!(self, m => m.log_joint(theta, pair))
    }

    fn log_x1_marginal(&self, theta: Theta, x1: f64) -> f64 {
        dispatch!(self, m => m.log_x1_marginal(theta, x1))
    }

    fn regression(&self, theta: Theta, x1: f64) -> f64 {
        dispatch!(self, m => m.regression(theta, x1))
    }

    fn draw_pair(&self, theta: Theta, rng: &mut SimRng) -> ObsPair {
        dispatch!(self, m => m.draw_pair(theta, rng))
    }

    fn x1_cdf(&self, theta: Theta, x1: f64) -> Option<f64> {
        dispatch!(self, m => m.x1_cdf(theta, x1))
    }
}

/// Any of the bundled priors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BundledPrior {
    Exponential(ExponentialPrior),
    UnitUniform(UnitUniformPrior),
    Normal(NormalPrior),
}

impl Prior for BundledPrior {
    fn log_density(&self, theta: Theta) -> f64 {
        match self {
            BundledPrior::Exponential(p) => p.log_density(theta),
            BundledPrior::UnitUniform(p) => p.log_density(theta),
            BundledPrior::Normal(p) => p.log_density(theta),
        }
    }

    fn sample(&self, rng: &mut SimRng) -> Theta {
        match self {
            BundledPrior::Exponential(p) => p.sample(rng),
            BundledPrior::UnitUniform(p) => p.sample(rng),
            BundledPrior::Normal(p) => p.sample(rng),
        }
    }

    fn quantile(&self, u: f64) -> Theta {
        match self {
            BundledPrior::Exponential(p) => p.quantile(u),
            BundledPrior::UnitUniform(p) => p.quantile(u),
            BundledPrior::Normal(p) => p.quantile(u),
        }
    }
}
