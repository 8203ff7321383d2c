use std::path::Path;
use std::process::{Command, Output};

use biplane::fixtures;
use biplane::stats::StatsDocument;

fn biplane(args: &[&str], catalog: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biplane"))
        .args(args)
        .env("BIPLANE_CATALOG", catalog)
        .output()
        .expect("binary runs")
}

fn doc(out: &Output) -> StatsDocument {
    StatsDocument::from_json(std::str::from_utf8(&out.stdout).unwrap()).expect("stats document")
}

#[test]
fn header_orders() {
    let dir = tempfile::tempdir().unwrap();
    let out = biplane(&["header", "--order", "1"], dir.path());
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "order=1\n1110\n1101\n1011\n");

    let out = biplane(&["header", "--order", "4"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let b4c = fixtures::b4c().to_text();
    let expected: Vec<&str> = b4c.lines().take(7).collect();
    assert_eq!(text.lines().collect::<Vec<_>>(), expected);

    let out = biplane(&["header", "--order", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(biplane(&["twospace"], dir.path()).status.code(), Some(2));
    assert_eq!(
        biplane(&["construct", "--order", "4", "--invariant", "Z"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        biplane(&["construct", "--order", "7", "--invariant", "A"], dir.path()).status.code(),
        Some(2)
    );
}

#[test]
fn twospace_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = biplane(&["twospace", "--order", "4"], dir.path());
    assert!(out.status.success());
    assert_eq!(doc(&out).results["q"], 1);
    let out = biplane(&["twospace", "--order", "7", "--count-only"], dir.path());
    let d = doc(&out);
    assert_eq!(d.results["q"], 70);
    assert_eq!(d.results["per_subset"].as_object().unwrap().len(), 28);
}

#[test]
fn construct_fills_catalog_idempotently() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("cat");
    let cat_s = cat.to_str().unwrap();
    let args = ["construct", "--order", "4", "--invariant", "A", "--catalog", cat_s];
    let first = biplane(&args, dir.path());
    assert!(first.status.success());
    let d = doc(&first);
    assert_eq!(d.results["aut_orders"], serde_json::json!([11520]));
    assert_eq!(d.results["catalog_inserted"], 1);
    let again = doc(&biplane(&args, dir.path()));
    assert_eq!(again.results["catalog_inserted"], 0);

    let list = doc(&biplane(&["catalog", "list", "--catalog", cat_s], dir.path()));
    assert_eq!(list.results.as_array().unwrap().len(), 1);
    let check = biplane(&["catalog", "check", "--catalog", cat_s], dir.path());
    assert!(check.status.success());
    assert_eq!(doc(&check).results["checked"], 1);
}

#[test]
fn catalog_path_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("envcat");
    let out = biplane(&["construct", "--order", "1", "--seedless"], &cat);
    assert!(out.status.success());
    assert!(cat.join("index.json").is_file());
}

#[test]
fn node_budget_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = biplane(
        &["construct", "--order", "4", "--seedless", "--no-trace-restriction", "--node-budget", "2", "--no-catalog"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(doc(&out).results["exhaustive"], false);
}

#[test]
fn verify_and_aut() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("b4c.txt");
    std::fs::write(&good, fixtures::b4c().to_text()).unwrap();
    let out = biplane(&["verify", good.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    let d = doc(&out);
    assert_eq!(d.results["ok"], true);
    assert_eq!(d.results["trace"], 16);
    assert_eq!(d.results["symmetric"], true);

    let out = biplane(&["aut", good.to_str().unwrap()], dir.path());
    assert_eq!(doc(&out).results["aut_order"], 11520);

    let mut text = fixtures::b4c().to_text().into_bytes();
    let pos = text.iter().rposition(|&b| b == b'1').unwrap();
    text[pos] = b'0';
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, text).unwrap();
    let out = biplane(&["verify", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(doc(&out).results["ok"], false);
}

#[test]
fn iso_accepts_dual() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    std::fs::write(&a, fixtures::b4c().to_text()).unwrap();
    std::fs::write(&b, fixtures::b4c().dual().to_text()).unwrap();
    let out = biplane(&["iso", "--allow-dual", a.to_str().unwrap(), b.to_str().unwrap()], dir.path());
    assert_eq!(doc(&out).results["isomorphic"], true);
}

#[test]
fn levelsets_order_seven() {
    let dir = tempfile::tempdir().unwrap();
    let profiles = dir.path().join("profiles.json");
    let out = biplane(
        &["levelsets", "--order", "7", "--profiles", profiles.to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success());
    let r = doc(&out).results;
    assert_eq!(r["q_alpha"], 30);
    assert_eq!(r["q_beta"], 24);
    assert_eq!(r["alpha_per_subset"], 10);
    assert_eq!(r["beta_per_subset"], 60);
    assert!(profiles.is_file());
}

#[test]
fn stats_out_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stats.json");
    let out = biplane(
        &["twospace", "--order", "3", "--stats-out", path.to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success());
    let saved = StatsDocument::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(saved, doc(&out));
    assert_eq!(saved.results["q"], 0);
}
