//! End-to-end: JSON config in, report files out.

use oqhlab_core::harness::{run_experiment, ExperimentConfig};
use oqhlab_core::{LabError, Signal};

#[test]
fn config_file_to_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bessel.json");
    std::fs::write(
        &cfg,
        r#"{"schema_version": 1, "name": "bessel", "seed": 5, "alphas": ["1/2", "golden-1"],
            "s_range": [1, 2], "ensemble": {"kind": "gaussian", "count": 2}}"#,
    )
    .unwrap();
    let c = ExperimentConfig::load(&cfg).unwrap();
    let r = run_experiment(&c).unwrap();
    assert!(r.passed());
    let files = r.write(dir.path()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("bessel.csv")).unwrap();
    assert!(csv.starts_with("s,alpha,trial,L,components,windows_disjoint,energy,norm_sq,ratio\n"));
    // 2 levels x 2 alphas x 2 trials
    assert_eq!(csv.lines().count(), 1 + 8);
    assert!(files.iter().any(|p| p.ends_with("bessel.json")));
}

#[test]
fn same_seed_same_bytes_different_seed_different_bytes() {
    let run = |seed| {
        let mut c = ExperimentConfig::new("sparse-ratio", seed);
        c.lengths = Some(vec![32, 64]);
        c.alphas = Some(vec!["1/3".parse().unwrap()]);
        c.ensemble = Some(oqhlab_core::harness::EnsembleSpec {
            kind: oqhlab_core::sparse::Ensemble::Gaussian,
            count: 5,
        });
        let r = run_experiment(&c).unwrap();
        r.tables[1].to_csv().unwrap()
    };
    assert_eq!(run(3), run(3));
    assert_ne!(run(3), run(4));
}

#[test]
fn caps_and_unknown_fields_are_config_errors() {
    for bad in [
        r#"{"schema_version": 1, "name": "minor-arc-decay", "seed": 1, "j_range": [8, 30]}"#,
        r#"{"schema_version": 1, "name": "bessel", "seed": 1, "s_range": [1, 9]}"#,
        r#"{"schema_version": 1, "name": "bessel", "seed": 1, "colour": "red"}"#,
        r#"{"schema_version": 2, "name": "bessel", "seed": 1}"#,
    ] {
        assert!(
            matches!(ExperimentConfig::from_json(bad), Err(LabError::Config(_))),
            "{bad}"
        );
    }
}

#[test]
fn signal_json_format() {
    let s: Signal = serde_json::from_str(r#"{"offset": -2, "re": [1.0, 0.0, 2.0], "im": [0.0, 1.0, 0.0]}"#).unwrap();
    assert_eq!(s.offset(), -2);
    assert_eq!(s.get(-1).im, 1.0);
    let back: Signal = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(back, s);
}
