use sigcount::simulation::{preset, preset_names, Scale, SweepPoint};
use sigcount::{generate_snapshots, run_sweep, PopulationModel, run_trial, Error, Method, ScenarioSpec, SweepAxis};

fn small_spec() -> ScenarioSpec {
    let mut spec = ScenarioSpec::new(SweepAxis::FixedRatio { gamma: 0.5, p_values: vec![10, 20] }, vec![4.0]);
    spec.trials = 40;
    spec.base_seed = 11;
    spec
}

#[test]
fn sweeps_are_reproducible() {
    let spec = small_spec();
    let a = run_sweep(&spec).unwrap();
    let b = run_sweep(&spec).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());

    let model = PopulationModel::new(vec![4.0], 1.0, 10).unwrap();
    let x = generate_snapshots(&model, 20, 11, 0).unwrap();
    assert_eq!(x, generate_snapshots(&model, 20, 11, 0).unwrap());
    assert_ne!(x, generate_snapshots(&model, 20, 12, 0).unwrap());
    assert_ne!(x, generate_snapshots(&model, 20, 11, 1).unwrap());
}

#[test]
fn rates_decompose() {
    let result = run_sweep(&small_spec()).unwrap();
    assert_eq!(result.rows.len(), 2 * Method::ALL.len());
    for r in &result.rows {
        assert!((r.p_e() - (r.p_under() + r.p_over())).abs() < 1e-15);
        assert!(r.count_under + r.count_over + r.count_failed <= r.trials);
        assert_eq!(r.n, r.p * 2);
    }
    let csv = result.to_csv();
    assert_eq!(csv.lines().next().unwrap(), sigcount::SweepResult::CSV_HEADER);
    assert_eq!(csv.lines().count(), 1 + result.rows.len());
}

#[test]
fn trial_outcomes_do_not_depend_on_order() {
    let spec = small_spec();
    let point = SweepPoint { sweep_value: 20, p: 20, n: 40 };
    let forward: Vec<_> = (0..8).map(|t| run_trial(&spec, point, t).unwrap()).collect();
    let mut backward: Vec<_> = (0..8).rev().map(|t| run_trial(&spec, point, t).unwrap()).collect();
    backward.reverse();
    for (f, b) in forward.iter().zip(&backward) {
        let f: Vec<_> = f.iter().map(|r| r.as_ref().ok().copied()).collect();
        let b: Vec<_> = b.iter().map(|r| r.as_ref().ok().copied()).collect();
        assert_eq!(f, b);
    }
}

#[test]
fn single_trial_is_all_or_nothing() {
    let mut spec = small_spec();
    spec.trials = 1;
    for r in run_sweep(&spec).unwrap().rows {
        assert!(r.p_e() == 0.0 || r.p_e() == 1.0);
    }
}

#[test]
fn noise_only_scenario() {
    let mut spec = ScenarioSpec::new(SweepAxis::Point { p: 20, n: 200 }, vec![]);
    spec.trials = 10;
    spec.methods = vec![Method::Mdl];
    let result = run_sweep(&spec).unwrap();
    assert_eq!(result.rows.len(), 1);
    assert_eq!(result.rows[0].count_over, 0);
    assert_eq!(result.rows[0].count_under, 0);
}

#[test]
fn scenario_text_round_trip() {
    let text = "# two spikes\np_list = 20, 40\ngamma = 0.5\nlambda = 10, 5\ntrials = 25\nseed = 3\nmethods = mdl, sns\n";
    let spec = ScenarioSpec::parse(text).unwrap();
    assert_eq!(spec.axis, SweepAxis::FixedRatio { gamma: 0.5, p_values: vec![20, 40] });
    assert_eq!(spec.signal_strengths, vec![10.0, 5.0]);
    assert_eq!((spec.trials, spec.base_seed), (25, 3));
    assert_eq!(spec.methods, vec![Method::Mdl, Method::Sns]);

    let fixed = ScenarioSpec::parse("p = 60\nn = 30, 60, 90\nlambda = 5\n").unwrap();
    assert_eq!(fixed.axis, SweepAxis::FixedDimension { p: 60, n_values: vec![30, 60, 90] });
}

#[test]
fn scenario_errors() {
    assert!(matches!(ScenarioSpec::parse("p = 10\nn = 20\nwidth = 3\n"), Err(Error::UnknownKey(k)) if k == "width"));
    assert!(matches!(ScenarioSpec::parse("p = 10\np = 20\nn = 5\n"), Err(Error::Parse { line: 2, .. })));
    assert!(matches!(ScenarioSpec::parse("p = 10\nn = 20\ngamma = 0.5\n"), Err(Error::Parse { .. })));
    assert!(matches!(ScenarioSpec::parse("p 10\n"), Err(Error::Parse { line: 1, .. })));
    assert!(matches!(ScenarioSpec::parse("p = ten\nn = 20\n"), Err(Error::Parse { line: 1, .. })));
    assert!(ScenarioSpec::parse("lambda = 3\n").is_err());
    assert!(ScenarioSpec::parse("p = 10\nn = 20\ntrials = 0\n").is_err());
}

#[test]
fn presets_load_and_can_be_overridden() {
    for name in preset_names() {
        let desk = preset(name, Scale::Desk).unwrap();
        let full = preset(name, Scale::Full).unwrap();
        assert_eq!(desk.points().len(), 3, "{name}");
        assert!(full.points().len() >= desk.points().len());
        assert_eq!((desk.trials, full.trials), (1000, 3000));
    }
    let spec = ScenarioSpec::parse("preset = fig1\ntrials = 5\n").unwrap();
    assert_eq!(spec.trials, 5);
    assert_eq!(spec.axis, preset("fig1", Scale::Desk).unwrap().axis);
    assert!(preset("fig99", Scale::Desk).is_err());
}
