//! Paired Monte Carlo checks of the sequential estimators.

use sigcount::simulation::{preset, Scale};
use sigcount::{run_sweep, Method, ScenarioSpec, SweepAxis};

fn sweep(axis: SweepAxis, lambda: Vec<f64>, trials: usize, seed: u64, methods: Vec<Method>) -> sigcount::SweepResult {
    let mut spec = ScenarioSpec::new(axis, lambda);
    spec.trials = trials;
    spec.base_seed = seed;
    spec.methods = methods;
    run_sweep(&spec).unwrap()
}

#[test]
fn rmt_controls_overestimation_on_noise() {
    let r = sweep(SweepAxis::Point { p: 100, n: 200 }, vec![], 3000, 501, vec![Method::Rmt]);
    let row = r.row(100, Method::Rmt).unwrap();
    assert!(row.p_over() <= 0.02, "Pr(q > 0) = {}", row.p_over());
}

#[test]
fn signal_search_detects_weak_signals_more_often() {
    // sqrt(gamma) = 0.707; lambda = 1 sits just above the detection limit
    let r = sweep(SweepAxis::Point { p: 100, n: 200 }, vec![1.0], 2000, 502, vec![Method::Rmt, Method::SignalSearch]);
    let detect = |m| 1.0 - r.row(100, m).unwrap().p_under();
    let (rmt, srmt) = (detect(Method::Rmt), detect(Method::SignalSearch));
    assert!(srmt > rmt, "detection srmt {srmt} rmt {rmt}");
}

#[test]
fn sns_beats_rmt_on_small_weak_system() {
    let lambda = vec![12.0, 10.0, 8.0, 6.0, 6.0, 5.0, 4.0, 4.0];
    let r = sweep(SweepAxis::Point { p: 40, n: 80 }, lambda, 2000, 503, vec![Method::Rmt, Method::Sns]);
    let (rmt, sns) = (r.row(40, Method::Rmt).unwrap().p_e(), r.row(40, Method::Sns).unwrap().p_e());
    assert!(sns < rmt, "P_e sns {sns} rmt {rmt}");
}

#[test]
fn sns_matches_rmt_overestimation_on_noise() {
    for name in ["fig1", "fig5", "fig8"] {
        let mut spec = preset(name, Scale::Desk).unwrap();
        spec.trials = 2000;
        spec.methods = vec![Method::Rmt, Method::Sns];
        let r = run_sweep(&spec).unwrap();
        for point in spec.points() {
            let rmt = r.row(point.sweep_value, Method::Rmt).unwrap().p_over();
            let sns = r.row(point.sweep_value, Method::Sns).unwrap().p_over();
            assert!((sns - rmt).abs() <= 0.02, "{name} {point:?}: sns {sns} rmt {rmt}");
        }
    }
}

#[test]
fn sns_is_not_worse_on_weak_sweeps() {
    for name in ["fig4", "fig7", "fig11"] {
        let mut spec = preset(name, Scale::Desk).unwrap();
        spec.methods = vec![Method::Rmt, Method::Sns];
        let r = run_sweep(&spec).unwrap();
        for point in spec.points() {
            let rmt = r.row(point.sweep_value, Method::Rmt).unwrap().p_e();
            let sns = r.row(point.sweep_value, Method::Sns).unwrap().p_e();
            assert!(sns <= rmt + 0.02, "{name} {point:?}: sns {sns} rmt {rmt}");
        }
    }
}
