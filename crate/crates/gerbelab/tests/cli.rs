//! Manifest front-end tests: fixture round-trips, strict parsing, broken-data
//! failure semantics, and deterministic reports.

use gerbelab::cech_deligne::cech::{Cover, U1Function};
use gerbelab::cli::manifest::{serialize_manifest, LoopShape, SurfaceShape};
use gerbelab::cli::{
    emit_report, parse_manifest, run, CliError, Command, Format, Manifest, ObjectSpec, Params,
    Status, TaskSpec,
};
use gerbelab::exterior::{Poly, PolyForm, Scalar};
use gerbelab::gerbe::prequantum_rho;
use gerbelab::twovect::MatForm;
use std::collections::BTreeMap;
use std::path::PathBuf;

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/r3-prequantum.json")
}

fn single_patch_cover() -> Cover {
    Cover::build(3, vec!["u0".into()], vec![]).unwrap()
}

fn task(command: Command, objects: &[&str]) -> TaskSpec {
    TaskSpec {
        command,
        objects: objects.iter().map(|s| s.to_string()).collect(),
        params: Params::default(),
    }
}

/// The bundled ℝ³ prequantization manifest, built programmatically.
fn fixture_manifest() -> Manifest {
    let vol = PolyForm::term(3, vec![0, 1, 2], Poly::one(3));
    let mut objects = BTreeMap::new();
    objects.insert(
        "vol".into(),
        ObjectSpec::Plectic { omega: vol },
    );
    objects.insert(
        "rho".into(),
        ObjectSpec::Form {
            value: prequantum_rho(),
        },
    );
    objects.insert(
        "alpha".into(),
        ObjectSpec::Form {
            value: PolyForm::term(3, vec![0], Poly::var(3, 2)),
        },
    );
    objects.insert(
        "beta".into(),
        ObjectSpec::Form {
            value: PolyForm::term(3, vec![1], Poly::var(3, 0)),
        },
    );
    objects.insert(
        "circle".into(),
        ObjectSpec::Loop {
            shape: LoopShape::Circle { samples: 256 },
        },
    );
    objects.insert(
        "sphere-coarse".into(),
        ObjectSpec::Surface {
            shape: SurfaceShape::Icosphere { subdivisions: 3 },
        },
    );
    objects.insert(
        "sphere-fine".into(),
        ObjectSpec::Surface {
            shape: SurfaceShape::Icosphere { subdivisions: 4 },
        },
    );
    objects.insert(
        "prequantum-gerbe".into(),
        ObjectSpec::Gerbe {
            cover: single_patch_cover(),
            g: vec![],
            a: vec![],
            b: vec![(vec![0], prequantum_rho())],
        },
    );
    objects.insert(
        "line-section".into(),
        ObjectSpec::Matform {
            value: MatForm::zero(1, 1, 3, 1),
        },
    );
    let tasks = vec![
        task(Command::Validate, &["prequantum-gerbe"]),
        task(Command::Curvature, &["prequantum-gerbe"]),
        task(Command::Dd, &["prequantum-gerbe"]),
        task(Command::HolLine, &["alpha", "circle"]),
        task(Command::HolSurface, &["rho", "sphere-coarse", "sphere-fine"]),
        task(Command::Transgress, &["alpha", "circle"]),
        task(Command::Homspace, &["line-section", "line-section"]),
        task(Command::KsCheck, &["vol", "rho", "alpha", "beta", "circle"]),
        task(Command::Suite, &[]),
    ];
    Manifest {
        version: "1".into(),
        objects,
        tasks,
    }
}

#[test]
fn fixture_file_up_to_date() {
    let canonical = serialize_manifest(&fixture_manifest());
    if std::env::var("GERBELAB_REGEN").is_ok() {
        std::fs::write(fixture_path(), &canonical).unwrap();
    }
    let on_disk = std::fs::read_to_string(fixture_path()).unwrap();
    assert_eq!(on_disk, canonical, "fixture file is stale");
}

#[test]
fn fixture_round_trips_bit_identically() {
    let text = std::fs::read_to_string(fixture_path()).unwrap();
    let parsed = parse_manifest(&text).unwrap();
    assert_eq!(serialize_manifest(&parsed), text);
}

#[test]
fn fixture_runs_all_pass() {
    let text = std::fs::read_to_string(fixture_path()).unwrap();
    let manifest = parse_manifest(&text).unwrap();
    let report = run(&manifest);
    let rendered = emit_report(&report, Format::Text);
    assert!(report.all_passed(), "fixture report:\n{rendered}");
    // json mode is re-parseable
    let json = emit_report(&report, Format::Json);
    let back: gerbelab::cli::Report = serde_json::from_str(&json).unwrap();
    assert_eq!(back.tasks.len(), report.tasks.len());
}

#[test]
fn unknown_field_is_rejected() {
    let err = parse_manifest(r#"{"version":"1","bogus":3}"#).unwrap_err();
    match err {
        CliError::UnknownField { field, .. } => assert_eq!(field, "bogus"),
        other => panic!("expected UnknownField, got {other}"),
    }
    let err = parse_manifest(
        r#"{"version":"1","tasks":[{"command":"suite","extra":1}]}"#,
    )
    .unwrap_err();
    assert!(matches!(err, CliError::UnknownField { .. }), "{err}");
}

#[test]
fn bad_reference_is_rejected() {
    let err = parse_manifest(
        r#"{"version":"1","tasks":[{"command":"curvature","objects":["nope"]}]}"#,
    )
    .unwrap_err();
    match err {
        CliError::BadReference { name, .. } => assert_eq!(name, "nope"),
        other => panic!("expected BadReference, got {other}"),
    }
}

#[test]
fn bad_parameters_are_rejected() {
    let err = parse_manifest(
        r#"{"version":"1","tasks":[{"command":"suite","params":{"tol":-1.0}}]}"#,
    )
    .unwrap_err();
    assert!(matches!(err, CliError::InvalidParameter { .. }), "{err}");
}

#[test]
fn broken_cocycle_fails_but_does_not_abort() {
    // connection incompatible with trivial g on the triple overlap
    let cover = Cover::build(
        3,
        vec!["a".into(), "b".into(), "c".into()],
        vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]],
    )
    .unwrap();
    let g = vec![(vec![0, 1, 2], U1Function::from_exponent(Poly::zero(3)))];
    let a = vec![
        (vec![0, 1], PolyForm::term(3, vec![0], Poly::one(3))),
        (vec![0, 2], PolyForm::zero(3, 1)),
        (vec![1, 2], PolyForm::zero(3, 1)),
    ];
    let b = (0..3).map(|p| (vec![p], PolyForm::zero(3, 2))).collect();
    let mut objects = BTreeMap::new();
    objects.insert("broken".into(), ObjectSpec::Gerbe { cover, g, a, b });
    objects.insert(
        "rho".into(),
        ObjectSpec::Form {
            value: prequantum_rho().scale(&Scalar::zero()),
        },
    );
    objects.insert(
        "circle".into(),
        ObjectSpec::Loop {
            shape: LoopShape::Circle { samples: 64 },
        },
    );
    let manifest = Manifest {
        version: "1".into(),
        objects,
        tasks: vec![
            task(Command::Validate, &["broken"]),
            task(Command::HolLine, &["rho", "circle"]),
        ],
    };
    let report = run(&manifest);
    assert_eq!(report.tasks[0].status, Status::Fail);
    assert!(
        report.tasks[0].detail.contains("[0, 1, 2]") || report.tasks[0].detail.contains("overlap"),
        "failure should name the offending overlap: {}",
        report.tasks[0].detail
    );
    // the hol-line task errors (rho has degree 2) but still runs and reports
    assert_eq!(report.tasks[1].status, Status::Error);
    assert!(!report.all_passed());
}

#[test]
fn empty_task_list_is_an_empty_pass_report() {
    let manifest = parse_manifest(r#"{"version":"1"}"#).unwrap();
    let report = run(&manifest);
    assert!(report.tasks.is_empty());
    assert!(report.all_passed());
    assert_eq!(
        emit_report(&report, Format::Text),
        "report version 1 — 0 task(s)\n"
    );
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let text = std::fs::read_to_string(fixture_path()).unwrap();
    let mut manifest = parse_manifest(&text).unwrap();
    // drop the (slow) suite task; its determinism is covered by its own check
    manifest.tasks.retain(|t| t.command != Command::Suite);
    let first = emit_report(&run(&manifest), Format::Json);
    let second = emit_report(&run(&manifest), Format::Json);
    assert_eq!(first, second);
}
