//! End-to-end runs of the verification chain and schema conformance of its output.

use std::path::PathBuf;

use serde_json::Value;
use twistlab_core::complete_intersections::Family;
use twistlab_core::pipeline::{
    run_verify_family, to_json, FamilySource, PipelineConfig, StageName, StageStatus, Verdict,
};

fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schema")
}

fn load(name: &str) -> Value {
    let text = std::fs::read_to_string(schema_dir().join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn report_validator() -> jsonschema::Validator {
    let config = load("config.schema.json");
    let id = config["$id"].as_str().unwrap().to_string();
    let registry = jsonschema::Registry::new().add(id, config).unwrap().prepare().unwrap();
    jsonschema::options().with_registry(&registry).build(&load("report.schema.json")).unwrap()
}

fn assert_valid(validator: &jsonschema::Validator, doc: &Value) {
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}

fn quick(family: Family) -> PipelineConfig {
    PipelineConfig { n_samples: 300, ..PipelineConfig::for_family(family) }
}

fn custom(text: &str, dims: Vec<usize>) -> PipelineConfig {
    quick(Family::Custom { factor_dims: dims, text: text.into() })
}

fn status(report: &twistlab_core::pipeline::VerificationReport, stage: StageName) -> StageStatus {
    report.stage(stage).unwrap().status
}

#[test]
fn reports_conform_to_schema() {
    let validator = report_validator();
    for config in [
        quick(Family::Xd { d: 4, n: 3 }),
        quick(Family::Xd { d: 2, n: 4 }),
        custom("z0^2 + z1^2 + z2^2", vec![3]),
        custom("z0*z1 + z2^2", vec![3]),
    ] {
        let report = run_verify_family(&config);
        let doc: Value = serde_json::from_str(&to_json(&report).unwrap()).unwrap();
        assert_valid(&validator, &doc);
        assert_eq!(report.stages.len(), 11);
    }
}

#[test]
fn configs_conform_to_schema_and_round_trip() {
    let validator = jsonschema::validator_for(&load("config.schema.json")).unwrap();
    let configs = [
        PipelineConfig::default(),
        quick(Family::X2mn { m: 2, n: 2 }),
        quick(Family::QA { d: vec![2, 3], n: 4 }),
        custom("z0^2 + z1*z3", vec![3]),
        PipelineConfig {
            family: FamilySource::File { polynomial_file: "k3.poly".into(), factor_dims: vec![3] },
            ..PipelineConfig::default()
        },
    ];
    for config in configs {
        let doc = serde_json::to_value(&config).unwrap();
        assert_valid(&validator, &doc);
        let back = PipelineConfig::from_json(&doc.to_string()).unwrap();
        assert_eq!(back, config);
    }
    assert!(!validator.is_valid(&serde_json::json!({ "n_samples": 10, "bogus": 1 })));
    assert!(PipelineConfig::from_json(r#"{"n_samples": 10, "bogus": 1}"#).is_err());
}

#[test]
fn first_failure_skips_the_rest() {
    // Symmetric, but a cone over a conic: singular at [0:0:0:1].
    let report = run_verify_family(&custom("z0^2 + z1^2 + z2^2", vec![3]));
    assert_eq!(report.verdict, Verdict::Fail);
    assert_eq!(report.exit_code, 1);
    assert_eq!(status(&report, StageName::Invariance), StageStatus::Pass);
    assert_eq!(status(&report, StageName::Smoothness), StageStatus::Fail);
    let after: Vec<_> = report.stages.iter().skip_while(|s| s.stage != StageName::Smoothness).skip(1).collect();
    assert_eq!(after.len(), 7);
    assert!(after.iter().all(|s| s.status == StageStatus::Skipped));
    assert!(report.summary.nu.is_none() && report.summary.spin_sign.is_none());
}

#[test]
fn asymmetric_system_fails_at_symmetry() {
    let report = run_verify_family(&custom("z0*z1 + z2^2", vec![3]));
    assert_eq!(status(&report, StageName::Symmetry), StageStatus::Fail);
    assert_eq!(report.verdict, Verdict::Fail);
}

#[test]
fn invalid_config_is_an_error() {
    let report = run_verify_family(&quick(Family::Xd { d: 0, n: 3 }));
    assert_eq!(status(&report, StageName::FamilyCatalog), StageStatus::Error);
    assert_eq!(report.verdict, Verdict::Error);
    assert_eq!(report.exit_code, 2);
}

#[test]
fn odd_complex_dimension_skips_orientation_stages() {
    let report = run_verify_family(&quick(Family::Xd { d: 2, n: 4 }));
    assert_eq!(report.summary.complex_dimension, Some(3));
    assert_eq!(report.summary.det_dc, Some(-1.0));
    assert_eq!(status(&report, StageName::Synth), StageStatus::Skipped);
    assert_eq!(status(&report, StageName::SpinObstruction), StageStatus::Skipped);
    assert_eq!(status(&report, StageName::CollarClass), StageStatus::Pass);
    assert_eq!(report.verdict, Verdict::Pass);
    assert!(report.unverified_hypotheses.len() >= 3);
}

#[test]
fn several_even_dimensional_members_pass() {
    for family in [Family::Xd { d: 4, n: 3 }, Family::Xd { d: 4, n: 5 }, Family::Xd { d: 2, n: 3 }] {
        let report = run_verify_family(&quick(family.clone()));
        assert_eq!(report.verdict, Verdict::Pass, "{family:?}: {:#?}", report.stages);
        assert_eq!(report.summary.nu, Some(1));
        assert_eq!(report.summary.spin_sign, Some(-1));
        assert_eq!(report.summary.collar_class, Some(-1));
    }
}

#[test]
fn polynomial_file_source() {
    let dir = std::env::temp_dir().join(format!("twistlab-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("k3.poly");
    std::fs::write(&path, "# quartic\nz0^4 + z1^4 + z2^4 + z2*z3^3\n").unwrap();
    let config = PipelineConfig {
        family: FamilySource::File { polynomial_file: path.clone(), factor_dims: vec![3] },
        n_samples: 300,
        ..PipelineConfig::default()
    };
    let from_file = run_verify_family(&config);
    let from_catalog = run_verify_family(&quick(Family::Xd { d: 4, n: 3 }));
    assert_eq!(from_file.verdict, Verdict::Pass);
    assert_eq!(from_file.summary.system, from_catalog.summary.system);
    assert_eq!(from_file.summary.min_singular_value, from_catalog.summary.min_singular_value);
    std::fs::remove_dir_all(dir).ok();
}
