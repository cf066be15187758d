//! Acceptance suite. Each test checks one criterion and prints a PASS/FAIL line.

use std::time::{Duration, Instant};

use bayes_regress::bundled::{BivariateNormal, ExponentialChain, TwoCoinToss, UnitUniformPrior};
use bayes_regress::conjugate::{
    closed_form_regression, FormulaVariant, HyperParams, SufficientStats,
};
use bayes_regress::grid::{build_grid, PosteriorGrid, ORACLE_GRID_SIZE};
use bayes_regress::model::{grow_dataset, Dataset, Model, ObsPair, Prior, Theta};
use bayes_regress::report::{compare_csv, consistency_csv, risk_csv};
use bayes_regress::risk::{
    bayes_risk, compare_estimators, consistency_paths, EstimatorId, Experiment, LossExponent,
    PathReport, RiskCurve,
};
use bayes_regress::{Error, Seed};

const CLOSED: EstimatorId = EstimatorId::BayesClosed(FormulaVariant::Posterior);

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id}: {name} ({detail})");
}

fn ex1() -> HyperParams {
    HyperParams::example1(1.0).unwrap()
}

fn ex3() -> HyperParams {
    HyperParams::example3(0.0, 1.0, 1.0, 0.5).unwrap()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn seeded_dataset(hyper: &HyperParams, n: usize, index: u64) -> (Theta, Dataset) {
    let mut rng = Seed(2024).rng("acceptance-oracle", index);
    let theta = hyper.prior().sample(&mut rng);
    (theta, grow_dataset(&hyper.model(), theta, n, &mut rng, Dataset::new()).unwrap())
}

#[test]
fn criterion_1_oracle_agreement() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut violations = Vec::new();
    let cases = [
        (ex1(), [0.25, 0.5, 1.0, 2.0, 4.0]),
        (ex3(), [-2.0, -0.75, 0.3, 1.0, 2.5]),
    ];
    for (hyper, points) in &cases {
        for &n in &[0usize, 1, 5, 50] {
            for rep in 0..20u64 {
                let (theta, data) = seeded_dataset(hyper, n, rep * 100 + n as u64);
                let stats = SufficientStats::from_dataset(hyper, &data).unwrap();
                let grid = build_grid(&hyper.model(), &hyper.prior(), &data, ORACLE_GRID_SIZE).unwrap();
                for &x1 in points {
                    let closed = closed_form_regression(hyper, &stats, x1, FormulaVariant::Posterior).unwrap();
                    let numeric = grid.predictive_regression(&hyper.model(), x1).unwrap();
                    let e = rel_err(closed, numeric);
                    checked += 1;
                    worst = worst.max(e);
                    if e > 1e-3 {
                        violations.push(format!(
                            "{} n={n} rep={rep} theta={:.3} x1={x1}: closed {closed:.6} grid {numeric:.6}",
                            hyper.example(),
                            theta.0
                        ));
                    }
                }
            }
        }
    }
    for v in &violations {
        println!("  violation: {v}");
    }
    let elapsed = start.elapsed();
    let pass = violations.is_empty() && elapsed < Duration::from_secs(30);
    report(
        1,
        "closed form vs grid oracle, examples 1 and 3",
        pass,
        &format!(
            "{} of {checked} checks beyond 1e-3 relative, max rel err {worst:.2e}, {:.1}s < 30s",
            violations.len(),
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_2_example2_discrepancy() {
    let h = HyperParams::Example2;
    let empty = h.empty_stats();
    let grid = build_grid(&TwoCoinToss, &UnitUniformPrior, &Dataset::new(), ORACLE_GRID_SIZE).unwrap();
    let mut pass = true;
    for k in [0.0, 1.0] {
        let post = closed_form_regression(&h, &empty, k, FormulaVariant::Posterior).unwrap();
        let oracle = grid.predictive_regression(&TwoCoinToss, k).unwrap();
        pass &= (post - 2.0 / 3.0).abs() < 1e-15 && (post - oracle).abs() <= 1e-4;
    }
    let paper1 = closed_form_regression(&h, &empty, 1.0, FormulaVariant::Paper).unwrap();
    let paper0 = closed_form_regression(&h, &empty, 0.0, FormulaVariant::Paper).unwrap();
    pass &= (paper1 - 0.25).abs() < 1e-15 && (paper0 - 1.0 / 3.0).abs() < 1e-15;

    let readme = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md"))
        .unwrap_or_default();
    let documented = readme.contains("2/3") && readme.contains("1/4") && readme.contains("1/3");
    pass &= documented;
    report(
        2,
        "example 2 published vs integral-consistent closed form",
        pass,
        &format!("posterior 2/3, 2/3; paper {paper1}, {paper0}; README documents it: {documented}"),
    );
    assert!(pass);
}

#[test]
fn criterion_3_trivial_closed_form() {
    let mut pass = true;
    for lambda in [0.5, 1.0] {
        let h = HyperParams::example1(lambda).unwrap();
        for x1 in [0.5, 1.0, 2.0] {
            let v = closed_form_regression(&h, &h.empty_stats(), x1, FormulaVariant::Posterior).unwrap();
            pass &= v == (lambda + x1) / x1;
        }
    }
    report(3, "example 1 at n = 0 equals (λ + x1)/x1", pass, "exact equality, 6 cases");
    assert!(pass);
}

fn median_decreasing(report: &PathReport, series: impl Fn(usize) -> f64) -> bool {
    (1..report.n_schedule.len()).all(|i| series(i) < series(i - 1))
}

#[test]
fn criterion_4_strong_consistency() {
    let start = Instant::now();
    let schedule = vec![10, 100, 1000];

    let coin = Experiment::new(HyperParams::Example2, vec![CLOSED], schedule.clone(), 200, Seed(41));
    let coin_paths = consistency_paths(&coin, &[0.0, 1.0]).unwrap();
    let medians: Vec<f64> = coin_paths.summary.iter().map(|s| s.max_deviation.median).collect();
    let decreasing = median_decreasing(&coin_paths, |i| medians[i]);
    let final_median = medians[2];
    let within = coin_paths.fraction_within(2, 0.1);
    let coin_pass = decreasing && final_median <= 0.05 && within >= 0.9;
    report(
        4,
        "example 2 consistency paths",
        coin_pass,
        &format!("median max-deviation {medians:?}, {:.1}% within 0.1 at n=1000", 100.0 * within),
    );

    let chain = Experiment::new(ex1(), vec![CLOSED], schedule.clone(), 200, Seed(42));
    let chain_paths = consistency_paths(&chain, &[0.5, 1.0, 2.0]).unwrap();
    let chain_pass = (0..3).all(|k| median_decreasing(&chain_paths, |i| chain_paths.summary[i].pointwise[k].median));
    let chain_medians: Vec<Vec<f64>> = chain_paths
        .summary
        .iter()
        .map(|s| s.pointwise.iter().map(|q| q.median).collect())
        .collect();
    report(4, "example 1 pointwise consistency", chain_pass, &format!("medians per n {chain_medians:.4?}"));

    let normal = Experiment::new(ex3(), vec![CLOSED], schedule, 200, Seed(43));
    let normal_paths = consistency_paths(&normal, &[-1.0, 0.0, 1.5]).unwrap();
    let normal_medians: Vec<f64> = normal_paths.summary.iter().map(|s| s.max_deviation.median).collect();
    let normal_pass = median_decreasing(&normal_paths, |i| normal_medians[i])
        && (0..3).all(|k| median_decreasing(&normal_paths, |i| normal_paths.summary[i].pointwise[k].median));
    report(4, "example 3 consistency paths", normal_pass, &format!("median max-deviation {normal_medians:.4?}"));

    let elapsed = start.elapsed();
    let time_pass = elapsed < Duration::from_secs(60);
    report(4, "consistency runtime", time_pass, &format!("{:.1}s < 60s", elapsed.as_secs_f64()));
    assert!(coin_pass && chain_pass && normal_pass && time_pass);
}

/// Nonincreasing up to two combined standard errors between consecutive sizes.
fn nonincreasing(curve: &RiskCurve, schedule: &[usize]) -> bool {
    schedule.windows(2).all(|w| {
        let a = curve.row(w[0], CLOSED).unwrap();
        let b = curve.row(w[1], CLOSED).unwrap();
        b.estimate - a.estimate <= 2.0 * (a.mc_se * a.mc_se + b.mc_se * b.mc_se).sqrt()
    })
}

#[test]
fn criterion_5_bayes_risk_vanishes() {
    let schedule = vec![5, 20, 80];
    let mut all = true;
    for (name, hyper, seed) in [("example 3", ex3(), 51), ("example 2", HyperParams::Example2, 52)] {
        let start = Instant::now();
        let exp = Experiment::new(hyper, vec![CLOSED], schedule.clone(), 1000, Seed(seed));
        let l1 = bayes_risk(&exp, LossExponent::Abs).unwrap();
        let l2 = bayes_risk(&exp, LossExponent::Squared).unwrap();
        let r = |c: &RiskCurve, n| c.row(n, CLOSED).unwrap().estimate;
        let shrink = r(&l2, 80) < r(&l2, 5) / 3.0;
        let jensen = schedule.iter().all(|&n| {
            let a = l1.row(n, CLOSED).unwrap();
            r(&l1, n) <= r(&l2, n).sqrt() + a.mc_se
        });
        let elapsed = start.elapsed();
        let pass = nonincreasing(&l1, &schedule)
            && nonincreasing(&l2, &schedule)
            && shrink
            && jensen
            && elapsed < Duration::from_secs(120);
        report(
            5,
            &format!("{name} Bayes risk decreases"),
            pass,
            &format!(
                "k=1 {:?}, k=2 {:?}, risk2(80)/risk2(5) = {:.3} < 1/3, Jensen {jensen}, {:.1}s < 120s",
                schedule.iter().map(|&n| r(&l1, n)).collect::<Vec<_>>(),
                schedule.iter().map(|&n| r(&l2, n)).collect::<Vec<_>>(),
                r(&l2, 80) / r(&l2, 5),
                elapsed.as_secs_f64()
            ),
        );
        all &= pass;
    }
    assert!(all);
}

#[test]
fn criterion_6_optimality() {
    let mut all = true;
    for (name, hyper, seed) in [("example 3", ex3(), 61), ("example 2 (h = 1e-4)", HyperParams::Example2, 62)] {
        let exp = Experiment::new(hyper, vec![CLOSED, EstimatorId::NadarayaWatson], vec![40], 1000, Seed(seed));
        let cmp = compare_estimators(&exp, LossExponent::Squared).unwrap();
        let bayes = cmp.row(40, CLOSED).unwrap();
        let nw = cmp.row(40, EstimatorId::NadarayaWatson).unwrap();
        let pass = bayes.risk.estimate <= nw.risk.estimate + 2.0 * nw.paired_se && !nw.violation;
        report(
            6,
            &format!("{name}: Bayes risk <= Nadaraya-Watson risk"),
            pass,
            &format!(
                "bayes {:.5}, NW {:.5}, paired diff {:.5} ± {:.5}, NW fallbacks {}",
                bayes.risk.estimate, nw.risk.estimate, nw.paired_diff, nw.paired_se, nw.risk.fallbacks
            ),
        );
        all &= pass;
    }
    assert!(all);
}

#[test]
fn criterion_7_internal_coherence() {
    let exp = Experiment::new(ex3(), vec![CLOSED, EstimatorId::BayesGrid], vec![20], 500, Seed(71));
    let curve = bayes_risk(&exp, LossExponent::Squared).unwrap();
    let a = curve.row(20, CLOSED).unwrap();
    let b = curve.row(20, EstimatorId::BayesGrid).unwrap();
    let bound = (a.mc_se * a.mc_se + b.mc_se * b.mc_se).sqrt() + 1e-3;
    let coherent = (a.estimate - b.estimate).abs() <= bound;
    report(
        7,
        "bayes-closed and bayes-grid risks agree",
        coherent,
        &format!("{:.6} vs {:.6}, |diff| <= {bound:.6}", a.estimate, b.estimate),
    );

    let mut zero = true;
    for hyper in [ex1(), HyperParams::Example2, ex3()] {
        let exp = Experiment::new(hyper, vec![EstimatorId::Truth], vec![0, 10, 100], 100, Seed(72));
        for loss in [LossExponent::Abs, LossExponent::Squared] {
            zero &= bayes_risk(&exp, loss).unwrap().rows.iter().all(|r| r.estimate == 0.0);
        }
    }
    report(7, "truth estimator has zero risk", zero, "all models, n in {0, 10, 100}, k in {1, 2}");
    assert!(coherent && zero);
}

#[test]
fn criterion_8_determinism() {
    let mut base = Experiment::new(
        ex1(),
        vec![CLOSED, EstimatorId::BayesGrid, EstimatorId::NadarayaWatson],
        vec![5, 25],
        64,
        Seed(81),
    );
    let run = |threads: usize, exp: &mut Experiment| {
        exp.threads = Some(threads);
        let risk = risk_csv(&bayes_risk(exp, LossExponent::Squared).unwrap());
        let cmp = compare_csv(&compare_estimators(exp, LossExponent::Abs).unwrap());
        let mut single = exp.clone();
        single.estimators = vec![EstimatorId::BayesGrid];
        let paths = consistency_csv(&consistency_paths(&single, &[0.5, 2.0]).unwrap());
        (risk, cmp, paths)
    };
    let one = run(1, &mut base);
    let eight = run(8, &mut base);
    let again = run(8, &mut base);
    let pass = one == eight && eight == again;
    report(
        8,
        "byte-identical CSV under 1 and 8 workers",
        pass,
        &format!("{} + {} + {} bytes", one.0.len(), one.1.len(), one.2.len()),
    );
    assert!(pass);
}

fn check_grid(grid: &PosteriorGrid) -> bool {
    let total: f64 = grid.weights().iter().sum();
    (total - 1.0).abs() <= 1e-12 && grid.weights().iter().all(|w| w.is_finite())
}

#[test]
fn criterion_9_numeric_hygiene() {
    let mut grids = 0;
    let mut normalized = true;
    for (i, hyper) in [ex1(), HyperParams::Example2, ex3()].iter().enumerate() {
        let model = hyper.model();
        for &j in &[2usize, 512, ORACLE_GRID_SIZE] {
            for rep in 0..10u64 {
                let mut rng = Seed(91).rng("hygiene", rep + 100 * i as u64);
                let theta = hyper.prior().sample(&mut rng);
                let mut grid = PosteriorGrid::prior(&hyper.prior(), j).unwrap();
                normalized &= check_grid(&grid);
                let mut data = Dataset::new();
                for &n in &[1usize, 10, 100, 1000] {
                    let before = data.len();
                    data = grow_dataset(&model, theta, n, &mut rng, data).unwrap();
                    match grid.observe(&model, &data.pairs()[before..]) {
                        Ok(()) => {
                            normalized &= check_grid(&grid);
                            grids += 1;
                        }
                        // Degenerate cases must surface as errors, never NaN weights.
                        Err(Error::DegeneratePosterior { .. }) => break,
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }

    // Degenerate inputs error instead of producing NaN.
    let one_node = PosteriorGrid::from_parts(vec![Theta(1.0)], vec![0.0], 0).unwrap();
    let errors_not_nans = matches!(
        one_node.predictive_regression(&TwoCoinToss, 0.0),
        Err(Error::NoPredictiveMass { .. })
    ) && {
        let mut g = PosteriorGrid::from_parts(vec![Theta(0.0), Theta(1.0)], vec![0.0, 0.0], 0).unwrap();
        matches!(
            g.observe(&TwoCoinToss, &[ObsPair::new(1.0, 0.0)]),
            Err(Error::DegeneratePosterior { .. })
        )
    };

    // Reports from every experiment kind hold only finite numbers.
    let mut finite = true;
    for hyper in [ex1(), HyperParams::Example2, ex3()] {
        let exp = Experiment::new(
            hyper,
            vec![CLOSED, EstimatorId::BayesGrid, EstimatorId::NadarayaWatson],
            vec![3, 30, 300],
            100,
            Seed(92),
        );
        for loss in [LossExponent::Abs, LossExponent::Squared] {
            let cmp = match compare_estimators(&exp, loss) {
                Ok(c) => c,
                Err(Error::ExperimentFailure { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            finite &= cmp.rows.iter().all(|r| {
                [r.risk.estimate, r.risk.mc_se, r.paired_diff, r.paired_se]
                    .iter()
                    .all(|v| v.is_finite())
            });
        }
        let mut single = exp.clone();
        single.estimators = vec![EstimatorId::BayesGrid];
        let x1: &[f64] = match hyper {
            HyperParams::Example1 { .. } => &[0.1, 1.0, 10.0],
            HyperParams::Example2 => &[0.0, 1.0],
            HyperParams::Example3 { .. } => &[-5.0, 0.0, 5.0],
        };
        let paths = consistency_paths(&single, x1).unwrap();
        finite &= paths.replications.iter().all(|r| r.deviations.iter().flatten().all(|v| v.is_finite()));
        finite &= paths.summary.iter().all(|s| s.max_deviation.median.is_finite());
    }

    let pass = normalized && errors_not_nans && finite;
    report(
        9,
        "grid normalization and finite reports",
        pass,
        &format!("{grids} grids within 1e-12, degenerate cases error: {errors_not_nans}, reports finite: {finite}"),
    );
    assert!(pass);
}

// Model sanity the suite relies on: the bundled kernels are the ones the closed forms assume.
#[test]
fn bundled_models_match_closed_form_assumptions() {
    assert_eq!(ExponentialChain.regression(Theta(2.0), 0.5), 1.0);
    let bn = BivariateNormal { sigma: 1.0, rho: 0.5 };
    assert_eq!(bn.regression(Theta(1.0), 3.0), 2.0);
    assert!((TwoCoinToss.regression(Theta(0.3), 0.0) - 0.7).abs() < 1e-15);
}
