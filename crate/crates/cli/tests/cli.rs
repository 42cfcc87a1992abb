use std::path::PathBuf;
use std::process::Command;

use mwo_cli::{render_taxonomy, run, ExitCode};
use mwo_core::kb::{build_seed_kb, PROVENANCE_TSV, SEED_MWO};

fn sample(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("samples")
        .join(name)
        .display()
        .to_string()
}

fn mw(args: &[&str]) -> (ExitCode, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mw").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn classify_mom_sample() {
    let (code, out, err) = mw(&["classify", &sample("mom_service.mwo")]);
    assert_eq!(code, ExitCode::Success, "{err}");
    assert_eq!(
        out,
        "Classified: MOM (score 1.00)\n  1. MOM  1.00  (5 comparable)\n  2. OOM  0.40  (5 comparable)\n  3. DBM  0.30  (5 comparable)\n"
    );
}

#[test]
fn classify_top_and_json() {
    let (_, out, _) = mw(&["classify", &sample("mom_service.mwo"), "--top", "7"]);
    assert!(out.contains("  5. ABM  0.27  (5 comparable)"));
    assert!(out.contains("  7. WBM  0.00  (0 comparable)"));

    let (code, out, _) = mw(&["classify", &sample("agent_or_queue.mwo"), "--json"]);
    assert_eq!(code, ExitCode::Success);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"]["kind"], "Ambiguous");
    assert_eq!(v["verdict"]["types"], serde_json::json!(["ABM", "MOM"]));
    assert_eq!(v["ranking"].as_array().unwrap().len(), 3);
    assert_eq!(v["ranking"][0]["score_num"], 1);
}

#[test]
fn classify_explain_lists_contributions() {
    let (_, out, _) = mw(&["classify", &sample("mom_service.mwo"), "--explain"]);
    assert!(out.contains("service OrderQueue: Classified: MOM (score 1.00)"));
    assert!(out.contains("ABM  score 4/15 (0.27), 5 comparable"));
}

#[test]
fn classify_against_custom_kb() {
    let (code, out, _) = mw(&[
        "classify",
        &sample("agent_or_queue.mwo"),
        "--kb",
        &sample("small_taxonomy.mwo"),
    ]);
    assert_eq!(code, ExitCode::Success);
    assert_eq!(out, "Classified: MOM (score 1.00)\n  1. MOM  1.00  (1 comparable)\n");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.display().to_string()
    };

    let (code, _, err) = mw(&["validate", &sample("broken.mwo")]);
    assert_eq!(code, ExitCode::Parse);
    assert!(err.ends_with("broken.mwo:3:3: expected \";\", found scalability\n"), "{err}");

    let cyclic = write("cyclic.mwo", "class A subclassOf B ;\nclass B subclassOf A ;\n");
    let (code, _, err) = mw(&["validate", &cyclic]);
    assert_eq!(code, ExitCode::Validation);
    assert!(err.contains("CycleDetected"), "{err}");

    let bad_value = write("v.mwo", "service S { scalability = enormous ; }\n");
    assert_eq!(mw(&["classify", &bad_value]).0, ExitCode::Validation);
    assert_eq!(mw(&["validate", &bad_value]).0, ExitCode::Validation);

    let empty = write("e.mwo", "service S { }\n");
    assert_eq!(mw(&["validate", &empty]).0, ExitCode::Success);
    assert_eq!(mw(&["classify", &empty]).0, ExitCode::Validation);

    let medium = write("m.mwo", "service S { scalability = medium ; }\n");
    let (code, out, _) = mw(&["classify", &medium]);
    assert_eq!(code, ExitCode::NoResult);
    assert!(out.starts_with("Unclassified (top score 0.00)\n"));

    assert_eq!(mw(&["classify"]).0, ExitCode::Usage);
    assert_eq!(mw(&["frobnicate"]).0, ExitCode::Usage);
    assert_eq!(mw(&["validate", "/no/such/file.mwo"]).0, ExitCode::Usage);
    assert_eq!(mw(&["--help"]).0, ExitCode::Success);
    assert_eq!(
        mw(&["export", "--out", "/no/such/dir/seed.mwo"]).0,
        ExitCode::Internal
    );
}

#[test]
fn query_individuals() {
    let (code, out, _) = mw(&[
        "query",
        "--require",
        "asynchronous_connection=true",
        "--require",
        "make_storage=true",
        "--target",
        "individuals",
    ]);
    assert_eq!(code, ExitCode::Success);
    assert_eq!(out, "MOM  1.00\n");

    let (_, out, _) = mw(&[
        "query",
        "--target",
        "individuals",
        "--require",
        "os_independent=true",
        "--prefer",
        "make_storage=true:3",
        "--prefer",
        "language_independent=true:1/2",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["target"], "individuals");
    assert_eq!(v["matches"][0]["entity"], "MOM");
    assert_eq!(v["matches"].as_array().unwrap().len(), 6);
}

#[test]
fn query_errors() {
    let (code, _, err) = mw(&["query", "--require", "scalability=medium"]);
    assert_eq!(code, ExitCode::NoResult);
    assert!(err.contains("no types satisfy"));
    let (code, _, _) = mw(&["query", "--require", "nope=1"]);
    assert_eq!(code, ExitCode::Usage);
    let (code, _, _) = mw(&["query", "--prefer", "scalability=high:0"]);
    assert_eq!(code, ExitCode::Usage);
    let (code, _, _) = mw(&[
        "query",
        "--require",
        "scalability=high",
        "--target",
        "individuals",
    ]);
    assert_eq!(code, ExitCode::Usage);
}

#[test]
fn taxonomy_tree() {
    let (code, out, _) = mw(&["taxonomy"]);
    assert_eq!(code, ExitCode::Success);
    assert_eq!(Some(out.clone()), render_taxonomy(build_seed_kb().ontology(), "Middleware"));
    assert!(out.starts_with("Middleware\n"));
    assert!(out.contains("\n  Middleware_Type\n    ABM\n"), "{out}");
    assert_eq!(mw(&["taxonomy", "--root", "Nope"]).0, ExitCode::Usage);
}

#[test]
fn export_matches_shipped_files() {
    assert_eq!(mw(&["export"]).1, SEED_MWO);
    assert_eq!(mw(&["export", "--provenance"]).1, PROVENANCE_TSV);
}

#[test]
fn binary_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("seed.mwo");
    let bin = env!("CARGO_BIN_EXE_mw");
    let status = Command::new(bin)
        .args(["export", "--out"])
        .arg(&seed)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(bin).arg("validate").arg(&seed).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, b"OK\n");
    let out = Command::new(bin)
        .args(["classify", &sample("broken.mwo")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
