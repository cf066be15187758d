use bayes_regress::conjugate::{FormulaVariant, HyperParams};
use bayes_regress::report::{risk_csv, RISK_HEADER};
use bayes_regress::risk::{bayes_risk, compare_estimators, EstimatorId, Experiment, LossExponent};
use bayes_regress::Seed;

const CLOSED: EstimatorId = EstimatorId::BayesClosed(FormulaVariant::Posterior);
const PAPER: EstimatorId = EstimatorId::BayesClosed(FormulaVariant::Paper);

#[test]
fn printed_coin_formula_has_larger_risk() {
    let exp = Experiment::new(HyperParams::Example2, vec![CLOSED, PAPER], vec![5], 2000, Seed(11));
    let cmp = compare_estimators(&exp, LossExponent::Squared).unwrap();
    let paper = cmp.row(5, PAPER).unwrap();
    assert!(paper.paired_diff > 2.0 * paper.paired_se, "{paper:?}");
}

#[test]
fn squared_risk_falls_for_normal_model() {
    let hyper = HyperParams::example3(1.0, 2.0, 1.5, -0.3).unwrap();
    let exp = Experiment::new(hyper, vec![CLOSED], vec![2, 8, 32], 800, Seed(12));
    let curve = bayes_risk(&exp, LossExponent::Squared).unwrap();
    let r: Vec<f64> = curve.rows.iter().map(|r| r.estimate).collect();
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
}

#[test]
fn exponential_rows_carry_trim_flag() {
    let exp = Experiment::new(HyperParams::example1(2.0).unwrap(), vec![CLOSED], vec![4], 50, Seed(13));
    let curve = bayes_risk(&exp, LossExponent::Abs).unwrap();
    assert!(curve.rows.iter().all(|r| r.trimmed));
    let csv = risk_csv(&curve);
    assert!(csv.starts_with(RISK_HEADER));
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn invalid_experiments_are_rejected() {
    let mut exp = Experiment::new(HyperParams::Example2, vec![CLOSED], vec![], 10, Seed(1));
    assert!(bayes_risk(&exp, LossExponent::Abs).is_err());
    exp.n_schedule = vec![3];
    exp.replications = 0;
    assert!(bayes_risk(&exp, LossExponent::Abs).is_err());
}
