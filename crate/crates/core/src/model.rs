//! The Bayesian experiment abstraction: a scalar parameter with a prior, a
//! sampling kernel on pairs `(x1, x2)`, and the true regression curve
//! `r_θ(x1) = E_θ[X2 | X1 = x1]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::SimRng;

/// Scalar model parameter.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Theta(pub f64);

/// One observation: predictor `x1` and response `x2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObsPair {
    pub x1: f64,
    pub x2: f64,
}

impl ObsPair {
    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }
}

impl From<(f64, f64)> for ObsPair {
    fn from((x1, x2): (f64, f64)) -> Self {
        Self { x1, x2 }
    }
}

/// An ordered sample. Prefixes of a dataset are themselves datasets.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pairs: Vec<ObsPair>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[ObsPair] {
        &self.pairs
    }

    pub fn push(&mut self, pair: ObsPair) {
        self.pairs.push(pair);
    }

    /// The first `n` pairs, or `None` if `n` exceeds the length.
    pub fn prefix(&self, n: usize) -> Option<Dataset> {
        self.pairs.get(..n).map(|p| Dataset { pairs: p.to_vec() })
    }
}

impl From<Vec<ObsPair>> for Dataset {
    fn from(pairs: Vec<ObsPair>) -> Self {
        Self { pairs }
    }
}

impl FromIterator<ObsPair> for Dataset {
    fn from_iter<I: IntoIterator<Item = ObsPair>>(iter: I) -> Self {
        Self {
            pairs: iter.into_iter().collect(),
        }
    }
}

/// Interval endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Open(f64),
    Closed(f64),
    Unbounded,
}

/// Support descriptor of a scalar quantity.
#[derive(Debug, Clone, PartialEq)]
pub enum Support {
    Interval { lo: Bound, hi: Bound },
    Finite(Vec<f64>),
}

impl Support {
    pub const REAL_LINE: Support = Support::Interval {
        lo: Bound::Unbounded,
        hi: Bound::Unbounded,
    };

    pub const POSITIVE: Support = Support::Interval {
        lo: Bound::Open(0.0),
        hi: Bound::Unbounded,
    };

    pub const UNIT_OPEN: Support = Support::Interval {
        lo: Bound::Open(0.0),
        hi: Bound::Open(1.0),
    };

    pub fn binary() -> Support {
        Support::Finite(vec![0.0, 1.0])
    }

    pub fn contains(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        match self {
            Support::Interval { lo, hi } => {
                let above = match *lo {
                    Bound::Open(a) => x > a,
                    Bound::Closed(a) => x >= a,
                    Bound::Unbounded => true,
                };
                let below = match *hi {
                    Bound::Open(b) => x < b,
                    Bound::Closed(b) => x <= b,
                    Bound::Unbounded => true,
                };
                above && below
            }
            Support::Finite(points) => points.contains(&x),
        }
    }

    /// `Ok(x)` if `x` is in the support, otherwise a domain error naming `what`.
    pub fn check(&self, what: &'static str, x: f64) -> Result<f64> {
        if self.contains(x) {
            Ok(x)
        } else {
            Err(Error::Domain {
                what,
                value: x,
                support: self.to_string(),
            })
        }
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Support::Interval { lo, hi } => {
                match lo {
                    Bound::Open(a) => write!(f, "({a}")?,
                    Bound::Closed(a) => write!(f, "[{a}")?,
                    Bound::Unbounded => write!(f, "(-inf")?,
                }
                write!(f, ", ")?;
                match hi {
                    Bound::Open(b) => write!(f, "{b})"),
                    Bound::Closed(b) => write!(f, "{b}]"),
                    Bound::Unbounded => write!(f, "inf)"),
                }
            }
            Support::Finite(points) => {
                let items: Vec<String> = points.iter().map(|p| p.to_string()).collect();
                write!(f, "{{{}}}", items.join(", "))
            }
        }
    }
}

/// A one-parameter sampling kernel on `(x1, x2)` pairs.
///
/// The unchecked methods assume their arguments lie in the declared supports;
/// the free functions [`sample_pair`] and [`regression_truth`] validate first.
pub trait Model: Send + Sync {
    fn parameter_support(&self) -> Support;
    fn predictor_support(&self) -> Support;
    fn response_support(&self) -> Support;

    /// Log density (or log probability) of a pair under `θ`.
    fn log_joint(&self, theta: Theta, pair: ObsPair) -> f64;

    /// Log density (or log probability) of `x1` under the `X1` marginal.
    fn log_x1_marginal(&self, theta: Theta, x1: f64) -> f64;

    /// `E_θ[X2 | X1 = x1]`.
    fn regression(&self, theta: Theta, x1: f64) -> f64;

    /// Draws `x1` from its marginal, then `x2` from the conditional kernel.
    fn draw_pair(&self, theta: Theta, rng: &mut SimRng) -> ObsPair;

    /// CDF of the `X1` marginal, for continuous predictors only.
    fn x1_cdf(&self, _theta: Theta, _x1: f64) -> Option<f64> {
        None
    }

    fn in_support(&self, pair: ObsPair) -> bool {
        self.predictor_support().contains(pair.x1) && self.response_support().contains(pair.x2)
    }

    fn check_theta(&self, theta: Theta) -> Result<Theta> {
        self.parameter_support().check("theta", theta.0).map(Theta)
    }

    fn check_pair(&self, pair: ObsPair) -> Result<ObsPair> {
        self.predictor_support().check("x1", pair.x1)?;
        self.response_support().check("x2", pair.x2)?;
        Ok(pair)
    }
}

/// A prior distribution on the scalar parameter.
pub trait Prior: Send + Sync {
    fn log_density(&self, theta: Theta) -> f64;
    fn sample(&self, rng: &mut SimRng) -> Theta;
    /// Quantile function on `(0, 1)`; nondecreasing in `u`.
    fn quantile(&self, u: f64) -> Theta;
}

/// One draw `(x1, x2) ~ R_θ`.
pub fn sample_pair<M: Model + ?Sized>(model: &M, theta: Theta, rng: &mut SimRng) -> Result<ObsPair> {
    model.check_theta(theta)?;
    Ok(model.draw_pair(theta, rng))
}

/// Extends `existing` with i.i.d. draws until it holds `target_n` pairs.
/// Existing pairs are left untouched.
pub fn grow_dataset<M: Model + ?Sized>(
    model: &M,
    theta: Theta,
    target_n: usize,
    rng: &mut SimRng,
    existing: Dataset,
) -> Result<Dataset> {
    if existing.len() > target_n {
        return Err(Error::Usage(format!(
            "cannot grow a dataset of {} pairs to {target_n}",
            existing.len()
        )));
    }
    model.check_theta(theta)?;
    let mut data = existing;
    data.pairs.reserve(target_n - data.len());
    while data.len() < target_n {
        data.push(model.draw_pair(theta, rng));
    }
    Ok(data)
}

/// `r_θ(x1)` with support checks on both arguments.
pub fn regression_truth<M: Model + ?Sized>(model: &M, theta: Theta, x1: f64) -> Result<f64> {
    model.check_theta(theta)?;
    model.predictor_support().check("x1", x1)?;
    Ok(model.regression(theta, x1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_membership() {
        assert!(Support::POSITIVE.contains(1e-300));
        assert!(!Support::POSITIVE.contains(0.0));
        assert!(!Support::UNIT_OPEN.contains(1.0));
        assert!(Support::REAL_LINE.contains(-5.0));
        assert!(!Support::REAL_LINE.contains(f64::NAN));
        assert!(!Support::REAL_LINE.contains(f64::INFINITY));
        assert!(Support::binary().contains(1.0));
        assert!(!Support::binary().contains(0.5));
        let closed = Support::Interval {
            lo: Bound::Closed(0.0),
            hi: Bound::Closed(1.0),
        };
        assert!(closed.contains(0.0) && closed.contains(1.0));
    }

    #[test]
    fn domain_error_names_value() {
        let err = Support::UNIT_OPEN.check("theta", 1.5).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("theta") && msg.contains("1.5"), "{msg}");
        assert_eq!(Support::UNIT_OPEN.to_string(), "(0, 1)");
        assert_eq!(Support::binary().to_string(), "{0, 1}");
    }

    #[test]
    fn prefix_of_dataset() {
        let d: Dataset = (0..5).map(|i| ObsPair::new(i as f64, 0.0)).collect();
        assert_eq!(d.prefix(3).unwrap().pairs(), &d.pairs()[..3]);
        assert_eq!(d.prefix(0).unwrap().len(), 0);
        assert!(d.prefix(6).is_none());
    }
}
