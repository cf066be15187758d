//! Nadaraya–Watson kernel regression with a Gaussian kernel.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Dataset;

/// Smallest kernel-weight sum accepted before reporting [`Error::NoKernelMass`].
pub const MIN_KERNEL_MASS: f64 = 1e-300;
/// Bandwidth used by the rule of thumb when the predictors have zero spread.
pub const MIN_AUTO_BANDWIDTH: f64 = 1e-6;
/// Bandwidth for binary predictors: kernel weights collapse onto exact matches.
pub const DISCRETE_BANDWIDTH: f64 = 1e-4;

/// Kernel bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bandwidth {
    /// `1.06 · sd(x1) · n^(-1/5)`, floored at [`MIN_AUTO_BANDWIDTH`].
    #[default]
    Auto,
    Fixed(f64),
}

impl Bandwidth {
    pub fn fixed(h: f64) -> Result<Self> {
        if h > 0.0 && h.is_finite() {
            Ok(Bandwidth::Fixed(h))
        } else {
            Err(Error::Domain {
                what: "bandwidth",
                value: h,
                support: "(0, inf)".into(),
            })
        }
    }

    /// Bandwidth in effect for `data`.
    pub fn resolve(&self, data: &Dataset) -> f64 {
        match *self {
            Bandwidth::Fixed(h) => h,
            Bandwidth::Auto => {
                let n = data.len() as f64;
                let xs = data.pairs().iter().map(|p| p.x1);
                let mean = xs.clone().sum::<f64>() / n;
                let sd = if data.len() > 1 {
                    (xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
                } else {
                    0.0
                };
                (1.06 * sd * n.powf(-0.2)).max(MIN_AUTO_BANDWIDTH)
            }
        }
    }
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bandwidth::Auto => f.write_str("auto"),
            Bandwidth::Fixed(h) => write!(f, "{h}"),
        }
    }
}

impl FromStr for Bandwidth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Bandwidth::Auto);
        }
        let h: f64 = s
            .parse()
            .map_err(|_| Error::Usage(format!("bandwidth must be \"auto\" or a positive number, got {s:?}")))?;
        Bandwidth::fixed(h)
    }
}

/// Nadaraya–Watson configuration. Only the Gaussian kernel is provided.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NwConfig {
    pub bandwidth: Bandwidth,
}

/// `Σ K((x1 - x1_i)/h) x2_i / Σ K((x1 - x1_i)/h)` with `K(u) = exp(-u²/2)`.
pub fn nadaraya_watson(data: &Dataset, x1: f64, config: &NwConfig) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Usage("Nadaraya-Watson needs at least one observation".into()));
    }
    let h = config.bandwidth.resolve(data);
    let (mut num, mut den) = (0.0, 0.0);
    for p in data.pairs() {
        let u = (x1 - p.x1) / h;
        let k = (-0.5 * u * u).exp();
        num += k * p.x2;
        den += k;
    }
    if den.is_nan() || den < MIN_KERNEL_MASS {
        return Err(Error::NoKernelMass { x1, sum: den });
    }
    Ok(num / den)
}
