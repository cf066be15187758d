//! Bayes estimation of a regression curve `r_θ(x1) = E_θ[X2 | X1 = x1]` by the
//! regression curve of the posterior predictive distribution, for scalar-parameter
//! models.
//!
//! * [`model`]: the experiment abstraction and sampling operations.
//! * [`bundled`]: three worked models with their priors.
//! * [`conjugate`]: streaming sufficient statistics and closed-form estimators.
//! * [`grid`]: quantile-grid posterior and the generic posterior-predictive
//!   regression curve.
//! * [`baseline`]: Nadaraya–Watson kernel regression.
//! * [`risk`]: Monte Carlo Bayes risk, consistency paths and estimator comparison.

pub mod baseline;
pub mod bundled;
pub mod conjugate;
pub mod error;
pub mod grid;
pub mod model;
pub mod numeric;
#[cfg(test)]
mod quadrature;
pub mod report;
pub mod risk;
pub mod seed;

pub use error::{Error, Result};
pub use model::{Dataset, Model, ObsPair, Prior, Theta};
pub use seed::{Seed, SimRng};
