use std::fs;
use std::path::Path;

use mql_core::{GameMatrix, Rational, Scalar};
use mql_harness::config::RawConfig;
use mql_harness::emit::{emit_curves, emit_results};
use mql_harness::experiment::{run_experiment, ExperimentResult, Summary};
use mql_harness::io::{read_transcript, write_matrix};

fn pennies_file(dir: &Path) -> String {
    let m = GameMatrix::<Rational>::from_ints(&[&[1, -1], &[-1, 1]]).unwrap();
    let path = dir.join("pennies.json");
    write_matrix(&path, &m).unwrap();
    path.display().to_string()
}

fn run(pairs: &[&str]) -> ExperimentResult {
    let mut raw = RawConfig::default();
    for p in pairs {
        raw.set_pair(p).unwrap();
    }
    run_experiment(&raw.build().unwrap()).unwrap()
}

fn gap(s: &str) -> Rational {
    Rational::parse_canonical(s).unwrap()
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in walk(dir) {
        let rel = entry.strip_prefix(dir).unwrap().display().to_string();
        out.push((rel, fs::read(&entry).unwrap()));
    }
    out.sort();
    out
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut files = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            files.extend(walk(&p));
        } else {
            files.push(p);
        }
    }
    files
}

#[test]
fn pennies_omwu_meets_certificate() {
    let tmp = tempfile::tempdir().unwrap();
    let m = pennies_file(tmp.path());
    let result = run(&[
        "oracle.kind=fixed",
        &format!("oracle.matrix={m}"),
        "learner.kind=optimistic_mwu",
        "learner.T=256",
        "mode=exact",
    ]);
    let r = &result.runs[0];
    assert_eq!(r.queries_used, 256);
    assert_eq!(r.certificate_holds, Some(true));
    let cert = gap(r.certificate.as_ref().unwrap());
    assert!(gap(&r.gap) * Rational::from_int(256) <= cert);
}

#[test]
fn exact_adversary_survives_truncated_basis() {
    let result = run(&[
        "oracle.kind=exact_adversary",
        "k=16",
        "learner.kind=truncated_basis",
        "learner.T=7",
    ]);
    let r = &result.runs[0];
    assert_eq!(r.queries_used, 7);
    assert!(gap(&r.gap) > Rational::from_int(0));
    assert_eq!(result.runs[0].adversary_trace.len(), 7);
}

#[test]
fn approx_adversary_gap_above_floor() {
    // 2 eps_lb(8, 2) / 4 = 2^-65
    let floor = Rational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(2), 65));
    for learner in ["random_query", "optimistic_mwu", "two_query"] {
        let result = run(&[
            "oracle.kind=approx_adversary",
            "oracle.T=2",
            "k=8",
            &format!("learner.kind={learner}"),
            "learner.seed=3",
        ]);
        assert!(gap(&result.runs[0].gap) >= floor, "{learner}");
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let configs: [&[&str]; 3] = [
        &[
            "oracle.kind=random",
            "k=5",
            "learner.kind=fictitious_play",
            "learner.T=32",
            "repetitions=3",
            "learner.seed=11",
        ],
        &[
            "oracle.kind=random",
            "k=4",
            "learner.kind=optimistic_mwu",
            "learner.T=16",
            "mode=exact",
            "repetitions=2",
        ],
        &[
            "oracle.kind=approx_adversary",
            "oracle.T=2",
            "k=8",
            "learner.kind=random_query",
            "repetitions=2",
        ],
    ];
    for (i, cfg) in configs.iter().enumerate() {
        let a = tmp.path().join(format!("a{i}"));
        let b = tmp.path().join(format!("b{i}"));
        emit_results(&a, &run(cfg)).unwrap();
        emit_results(&b, &run(cfg)).unwrap();
        let (ca, cb) = (dir_contents(&a), dir_contents(&b));
        assert!(!ca.is_empty());
        assert_eq!(ca, cb, "config {i}");
    }
}

#[test]
fn emitted_files_have_expected_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let result = run(&[
        "oracle.kind=approx_adversary",
        "oracle.T=2",
        "k=8",
        "learner.kind=two_query",
        "repetitions=2",
    ]);
    emit_results(tmp.path(), &result).unwrap();
    let runs = fs::read_to_string(tmp.path().join("runs.csv")).unwrap();
    let mut lines = runs.lines();
    let header = lines.next().unwrap();
    assert!(header
        .starts_with("repetition,seed,oracle,learner,k,mode,horizon,queries_used,gap,gap_exact"));
    assert_eq!(lines.count(), 2);
    let trace = fs::read_to_string(tmp.path().join("adversary_trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + 2 * 2);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["runs"], 2);
    let text = fs::read_to_string(tmp.path().join("transcripts/rep_001.jsonl")).unwrap();
    let loaded = read_transcript::<Rational, _>(text.as_bytes()).unwrap();
    assert_eq!(loaded.transcript.len(), 2);
    assert!(loaded.transcript.recommendation.is_some());
}

#[test]
fn empty_results_are_rejected() {
    let empty = ExperimentResult {
        runs: Vec::new(),
        summary: Summary {
            runs: 0,
            oracle: "fixed".into(),
            learner: "uniform".into(),
            mode: "exact".into(),
            mean_gap: 0.0,
            max_gap: 0.0,
            min_gap: 0.0,
            total_queries: 0,
            certificates_hold: true,
        },
    };
    let tmp = tempfile::tempdir().unwrap();
    assert!(emit_curves(&tmp.path().join("c.csv"), &empty).is_err());
    assert!(emit_results(tmp.path(), &empty).is_err());
}

#[test]
fn float_adversary_is_a_config_error() {
    let mut raw = RawConfig::default();
    for p in ["oracle.kind=exact_adversary", "k=4", "mode=float"] {
        raw.set_pair(p).unwrap();
    }
    assert!(raw.build().is_err());
}
