//! CSV rendering of experiment results.
//!
//! Headers are fixed:
//!
//! | command       | header                                                                          |
//! |---------------|---------------------------------------------------------------------------------|
//! | `estimate`    | `x1,estimator,value`                                                            |
//! | `risk`        | `n,loss_k,estimator,estimate,mc_se,replications,trimmed`                        |
//! | `consistency` | `replication,n,x1,abs_deviation`                                                |
//! | `compare`     | `n,loss_k,estimator,estimate,mc_se,replications,trimmed,paired_diff,paired_se` |
//!
//! Reals use Rust's shortest round-trip formatting, lines end with `\n`.

use std::fmt::Write;

use crate::risk::{Comparison, EstimatorId, PathReport, RiskCurve, RiskRow};

pub const ESTIMATE_HEADER: &str = "x1,estimator,value";
pub const RISK_HEADER: &str = "n,loss_k,estimator,estimate,mc_se,replications,trimmed";
pub const CONSISTENCY_HEADER: &str = "replication,n,x1,abs_deviation";
pub const COMPARE_HEADER: &str =
    "n,loss_k,estimator,estimate,mc_se,replications,trimmed,paired_diff,paired_se";

/// One evaluated point of an estimated curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x1: f64,
    pub estimator: EstimatorId,
    pub value: f64,
}

pub fn estimate_csv(points: &[CurvePoint]) -> String {
    let mut out = format!("{ESTIMATE_HEADER}\n");
    for p in points {
        writeln!(out, "{},{},{}", p.x1, p.estimator, p.value).unwrap();
    }
    out
}

fn risk_fields(r: &RiskRow) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        r.n, r.loss_k, r.estimator, r.estimate, r.mc_se, r.replications, r.trimmed
    )
}

pub fn risk_csv(curve: &RiskCurve) -> String {
    let mut out = format!("{RISK_HEADER}\n");
    for r in &curve.rows {
        writeln!(out, "{}", risk_fields(r)).unwrap();
    }
    out
}

pub fn compare_csv(cmp: &Comparison) -> String {
    let mut out = format!("{COMPARE_HEADER}\n");
    for r in &cmp.rows {
        writeln!(out, "{},{},{}", risk_fields(&r.risk), r.paired_diff, r.paired_se).unwrap();
    }
    out
}

pub fn consistency_csv(report: &PathReport) -> String {
    let mut out = format!("{CONSISTENCY_HEADER}\n");
    for (rep, path) in report.replications.iter().enumerate() {
        for (i, n) in report.n_schedule.iter().enumerate() {
            for (k, x1) in report.x1_eval.iter().enumerate() {
                writeln!(out, "{rep},{n},{x1},{}", path.deviations[i][k]).unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugate::FormulaVariant;

    #[test]
    fn estimate_rows() {
        let csv = estimate_csv(&[CurvePoint {
            x1: 1.0,
            estimator: EstimatorId::BayesClosed(FormulaVariant::Posterior),
            value: 10.0 / 3.0,
        }]);
        assert_eq!(csv, "x1,estimator,value\n1,bayes-closed,3.3333333333333335\n");
    }

    #[test]
    fn risk_rows() {
        let curve = RiskCurve {
            rows: vec![RiskRow {
                n: 5,
                loss_k: 2,
                estimator: EstimatorId::NadarayaWatson,
                estimate: 0.25,
                mc_se: 0.01,
                replications: 100,
                trimmed: true,
                fallbacks: 0,
            }],
        };
        assert_eq!(
            risk_csv(&curve),
            "n,loss_k,estimator,estimate,mc_se,replications,trimmed\n5,2,nadaraya-watson,0.25,0.01,100,true\n"
        );
    }
}
