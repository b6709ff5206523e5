use std::fs;

use burgers3d_runner::reanalysis::reanalyze;
use burgers3d_runner::{resolve_spec, run_experiment, ExperimentRegistry, RunOptions, RunnerError};

const SMALL_MOMENTUM: &str = r#"
experiment = "momentum"
seed = 3

[run]
t_end = 0.05

[params]
runs = 2
"#;

#[test]
fn artifacts_and_reanalysis() {
    let registry = ExperimentRegistry::builtin();
    let spec = resolve_spec(SMALL_MOMENTUM, &registry).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let outcome = run_experiment(&spec, dir.path(), &registry, RunOptions::default()).unwrap();
    assert_eq!(outcome.exit_code(), 0, "{:?}", outcome.failures);

    for f in ["manifest.toml", "momentum.csv", "reports.json", "reports.txt", "summary.txt"] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
    for m in ["run_00", "run_01"] {
        let member = dir.path().join(m);
        assert!(member.join("diagnostics.csv").is_file());
        assert!(member.join("run.toml").is_file());
        assert!(member.join("snapshots").is_dir());
    }

    // The manifest is itself a spec that resolves to the same run.
    let manifest = fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
    let again = resolve_spec(&manifest, &registry).unwrap();
    assert_eq!(again.run, spec.run);
    assert_eq!(again.params, spec.params);
    assert_eq!(again.seed, 3);

    let reports = reanalyze(dir.path()).unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| !r.report.is_failure()));
    assert!(dir.path().join("reanalysis").is_dir());
}

#[test]
fn strict_violation_sets_exit_code() {
    let registry = ExperimentRegistry::builtin();
    let text = "experiment = \"scaling\"\n[params]\nfactor = 1e-3\n";
    let spec = resolve_spec(text, &registry).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let outcome = run_experiment(&spec, dir.path(), &registry, RunOptions::default()).unwrap();
    assert_eq!(outcome.exit_code(), 1);
    assert!(fs::read_to_string(dir.path().join("summary.txt")).unwrap().contains("scaling"));
}

#[test]
fn bad_specs_list_every_problem() {
    let registry = ExperimentRegistry::builtin();
    let text = "experiment = \"momentum\"\n[run]\nnu = -1.0\ndt = 0.0\nseed = 4\n[params]\nruns = 0\n";
    match resolve_spec(text, &registry) {
        Err(RunnerError::Config(msgs)) => assert!(msgs.len() >= 4, "{msgs:?}"),
        other => panic!("expected a config error, got {other:?}"),
    }
    match resolve_spec("experiment = \"nope\"\n", &registry) {
        Err(RunnerError::UnknownExperiment { .. }) | Err(RunnerError::Config(_)) => {}
        other => panic!("expected rejection, got {other:?}"),
    }
}
