//! Command-level behavior: exit codes, run directories, and aggregation.

use std::fs;
use std::path::{Path, PathBuf};

use hklab_cli::commands::{cmd_report, cmd_scan, Options, RunSummary};
use hklab_cli::error::exit;
use hklab_cli::run_args;

fn bundled() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/normalized_cycle.json")
}

/// A smaller copy of the bundled scenario with `edit` applied.
fn variant(dir: &Path, name: &str, edit: impl FnOnce(&mut serde_json::Value)) -> PathBuf {
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(bundled()).unwrap()).unwrap();
    v["centers"] = serde_json::json!({ "sample": 3 });
    v["times"] = serde_json::json!("logspace:14112:1411200:4");
    edit(&mut v);
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

fn args<'a>(parts: &'a [&'a str]) -> Vec<&'a str> {
    std::iter::once("hklab").chain(parts.iter().copied()).collect()
}

fn summary(dir: &Path) -> RunSummary {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn verify_on_bundled_scenario_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("verify");
    let code = run_args(args(&["verify", "--scenario", bundled().to_str().unwrap(), "--out", out.to_str().unwrap()]));
    assert_eq!(code, exit::PASS);
    let s = summary(&out);
    assert_eq!(s.totals.fail, 0);
    assert_eq!(s.totals.uncertified, 0);
    assert_eq!(s.groups.len(), hklab_lab::statements::ALL.len());
    assert!(fs::read_to_string(out.join("reports.csv")).unwrap().starts_with("# hklab "));
}

#[test]
fn scan_with_empty_time_grid_is_invalid_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("scan");
    let code = run_args(args(&["scan", "--scenario", bundled().to_str().unwrap(), "--times", "", "--out", out.to_str().unwrap()]));
    assert_eq!(code, exit::INVALID_CONFIG);
    assert!(!out.join("bounds.csv").exists());
}

#[test]
fn invalid_parameters_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = variant(tmp.path(), "bad", |v| v["params"]["n"] = 2.0.into());
    let err = cmd_scan(&bad, &Options::default()).unwrap_err();
    assert_eq!(err.exit_code(), exit::INVALID_CONFIG);
    assert!(err.to_string().contains("params.n"), "{err}");
    let missing = variant(tmp.path(), "missing", |v| v["graph"] = serde_json::json!({ "file": "nowhere.json" }));
    let err = cmd_scan(&missing, &Options::default()).unwrap_err();
    assert!(err.to_string().contains("graph.file"), "{err}");
}

#[test]
fn missed_sobolev_target_exits_uncertified() {
    let tmp = tempfile::tempdir().unwrap();
    let path = variant(tmp.path(), "tight", |v| v["targets"] = serde_json::json!({ "c_s": 0.5 }));
    let out = tmp.path().join("scan");
    let code = run_args(args(&["scan", "--scenario", path.to_str().unwrap(), "--out", out.to_str().unwrap()]));
    assert_eq!(code, exit::UNCERTIFIED);
    assert_eq!(summary(&out).uncertified, vec![hklab_lab::statements::GAUSSIAN_BOUND.to_string()]);
}

#[test]
fn report_over_mixed_runs_lists_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let runs = tmp.path().join("runs");
    let good = variant(tmp.path(), "good", |_| {});
    let broken = variant(tmp.path(), "broken", |v| v["ln_adjust"] = (-1e4).into());
    let good_opts = Options { out: Some(runs.join("good")), ..Options::default() };
    assert_eq!(cmd_scan(&good, &good_opts).unwrap().exit, exit::PASS);
    let bad_opts = Options { out: Some(runs.join("broken")), ..Options::default() };
    assert_eq!(cmd_scan(&broken, &bad_opts).unwrap().exit, exit::FAILURES);

    let (outcome, table) = cmd_report(&runs, &Options { out: Some(tmp.path().join("report")), ..Options::default() }).unwrap();
    assert_ne!(outcome.exit, exit::PASS);
    assert!(table.contains("failures ("), "{table}");
    assert!(table.lines().any(|l| l.trim_start().starts_with("broken:")), "{table}");
    assert_eq!(outcome.summary.totals.fail, 6 * 4);
    assert!(outcome.dir.join("summary.json").exists());

    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(cmd_report(&empty, &Options::default()).unwrap_err().exit_code(), exit::INVALID_CONFIG);
}

#[test]
fn runs_land_in_fresh_directories_and_leave_inputs_alone() {
    let tmp = tempfile::tempdir().unwrap();
    let base = tmp.path().join("out");
    let path = variant(tmp.path(), "small", |v| v["output"] = serde_json::json!(base.to_str().unwrap()));
    let before = fs::read(&path).unwrap();
    let a = cmd_scan(&path, &Options::default()).unwrap();
    let b = cmd_scan(&path, &Options::default()).unwrap();
    assert_ne!(a.dir, b.dir);
    for dir in [&a.dir, &b.dir] {
        assert!(dir.starts_with(&base));
        assert!(dir.file_name().unwrap().to_str().unwrap().starts_with("scan-"));
        for f in ["bounds.csv", "summary.json", "margins.svg"] {
            assert!(dir.join(f).exists(), "{f}");
        }
    }
    assert_eq!(fs::read(&path).unwrap(), before);
    let svg = fs::read_to_string(a.dir.join("margins.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn generate_inspect_certify_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let gen = tmp.path().join("gen");
    assert_eq!(run_args(args(&["generate", "--scenario", bundled().to_str().unwrap(), "--out", gen.to_str().unwrap()])), exit::PASS);
    let graph = gen.join("graph.json");
    assert!(graph.exists());

    let insp = tmp.path().join("inspect");
    assert_eq!(run_args(args(&["inspect", "--graph", graph.to_str().unwrap(), "--out", insp.to_str().unwrap()])), exit::PASS);
    let s = summary(&insp);
    assert_eq!(s.extra["vertices"], 300);
    assert_eq!(s.extra["normalizing"], true);
    let profile = fs::read_to_string(insp.join("profile_0.csv")).unwrap();
    assert_eq!(hklab_cli::output::csv_body(&profile).lines().next().unwrap(), "R,volume,D_p,M_p,mu,theta,kappa,Gamma");

    let small = variant(tmp.path(), "small", |_| {});
    let cert = tmp.path().join("certify");
    assert_eq!(run_args(args(&["certify", "--scenario", small.to_str().unwrap(), "--out", cert.to_str().unwrap()])), exit::PASS);
    assert_eq!(fs::read_dir(&cert).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("sv_")).count(), 3);
}

#[test]
fn json_format_and_time_override() {
    let tmp = tempfile::tempdir().unwrap();
    let small = variant(tmp.path(), "small", |_| {});
    let out = tmp.path().join("scan");
    let code = run_args(args(&[
        "scan",
        "--scenario",
        small.to_str().unwrap(),
        "--times",
        "20000,40000",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, exit::PASS);
    let rows: Vec<serde_json::Value> = serde_json::from_str(&fs::read_to_string(out.join("bounds.json")).unwrap()).unwrap();
    assert_eq!(rows.len(), 6 * 2);
    assert!(rows[0]["breakdown"]["gaussian"].is_number());
}
