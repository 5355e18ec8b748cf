use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn graphlim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphlim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json_stdout(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn k2_fixture(dir: &Path) {
    write(dir, "k2.json", r#"{"vertex_weights":[1,1],"edges":[[0,1,1]]}"#);
    write(dir, "model.json", r#"{"J":[[0,1],[1,0]],"a":[0.5,0.5],"eps":0.5}"#);
}

#[test]
fn identical_graphs_are_at_distance_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = graphlim(&["generate", "--family", "er", "--n", "25", "--p", "0.3", "--seed", "4", "--out", "g.json"], dir.path());
    assert!(o.status.success());
    let o = graphlim(&["distance", "--input", "g.json", "--input2", "g.json"], dir.path());
    let r = json_stdout(&o);
    assert_eq!(r["result"]["lower"], 0.0);
    assert_eq!(r["result"]["upper"], 0.0);
    assert_eq!(r["subcommand"], "distance");
    assert_eq!(r["config"]["distance"]["input"], "g.json");
}

#[test]
fn k2_energies() {
    let dir = tempfile::tempdir().unwrap();
    k2_fixture(dir.path());
    let r = json_stdout(&graphlim(&["energy", "--input", "k2.json", "--model", "model.json", "--exact"], dir.path()));
    let res = &r["result"];
    assert_eq!(res["gse"]["value"], -1.0);
    assert_eq!(res["gse"]["exact_flag"], true);
    let f = res["free_energy"]["value"].as_f64().unwrap();
    let oracle = -0.5 * (2.0 * std::f64::consts::E.powi(2) + 2.0).ln();
    assert!((f - oracle).abs() < 1e-11);
    assert_eq!(r["seed"], 0);
}

#[test]
fn exit_codes_separate_budget_from_validation() {
    let dir = tempfile::tempdir().unwrap();
    k2_fixture(dir.path());
    let o = graphlim(&["energy", "--input", "k2.json", "--model", "model.json", "--exact", "--budget", "2"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "budget");

    write(dir.path(), "bad.json", r#"{"J":[[0,1]],"a":[0.5,0.5]}"#);
    let o = graphlim(&["energy", "--input", "k2.json", "--model", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    let o = graphlim(&["energy", "--input", "missing.json", "--model", "model.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    // three equal vertices cannot meet a = (1/2, 1/2) within 0.1
    write(dir.path(), "k3.json", r#"{"vertex_weights":[1,1,1],"edges":[[0,1,1],[1,2,1]]}"#);
    write(dir.path(), "tight.json", r#"{"J":[[0,1],[1,0]],"a":[0.5,0.5],"eps":0.1}"#);
    let o = graphlim(&["energy", "--input", "k3.json", "--model", "tight.json", "--exact"], dir.path());
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn generate_is_reproducible_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["generate", "--family", "sbm", "--n", "30", "--blocks", "1.6,0.4;0.4,1.6", "--rho", "0.3", "--seed", "9"];
    let a = graphlim(&args, dir.path());
    let b = graphlim(&args, dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let g: graphlim::io::GraphFile = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(g.vertex_weights.len(), 30);

    write(dir.path(), "gen.json", r#"{"family":"sbm","n":30,"b":[[1.6,0.4],[0.4,1.6]],"rho":0.3,"seed":9}"#);
    let c = graphlim(&["generate", "--model", "gen.json"], dir.path());
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn csv_output_for_ld_rows() {
    let dir = tempfile::tempdir().unwrap();
    k2_fixture(dir.path());
    write(dir.path(), "target.json", r#"{"alpha":[0.5,0.5],"beta":[[0,0.5],[0.5,0]]}"#);
    let o = graphlim(
        &["ld", "--input", "k2.json", "k2.json", "--target", "target.json", "--eps", "0.01", "--format", "csv"],
        dir.path(),
    );
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# graphlim-report v1");
    assert_eq!(lines[1], "n,eps,probability,rate,stderr,method");
    // two of the four maps split K2
    assert_eq!(lines[2], "2,0.01,0.5,0.34657359028,,exact_enumeration");
    assert_eq!(lines.len(), 4);

    let o = graphlim(&["regularity", "--input", "k2.json", "--check", "weak", "--eps", "0.3", "--format", "csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn quotient_sets_reload_for_hausdorff() {
    let dir = tempfile::tempdir().unwrap();
    k2_fixture(dir.path());
    let o = graphlim(&["quotients", "--input", "k2.json", "--q", "2", "--out", "set.json"], dir.path());
    assert!(o.status.success());
    let r = json_stdout(&graphlim(&["quotients", "--input", "set.json", "--input2", "k2.json", "--q", "2"], dir.path()));
    assert_eq!(r["result"]["hausdorff"], 0.0);
    assert_eq!(r["result"]["upper"], 0.0);
}

#[test]
fn regularity_reports_carry_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let o = graphlim(&["generate", "--family", "clique", "--n", "100", "--c", "10", "--out", "g.json"], dir.path());
    assert!(o.status.success());
    let r = json_stdout(&graphlim(
        &["regularity", "--input", "g.json", "--check", "lp", "--c", "1", "--eta", "0.1", "--p", "2"],
        dir.path(),
    ));
    assert_eq!(r["result"]["verdict"]["status"], "fail");
    assert_eq!(r["result"]["witness"]["type"], "partition");
    assert_eq!(r["result"]["witness"]["assignment"].as_array().unwrap().len(), 100);
}

#[test]
fn convergence_report_writes_versioned_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let o = graphlim(
        &[
            "convergence-report", "--family", "er", "--p", "0.2", "--sizes", "40,80", "--samples", "200",
            "--sweeps", "50", "--restarts", "5", "--out", "rep",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["distance.csv", "quotients.csv", "energy.csv", "ld.csv"] {
        let text = std::fs::read_to_string(dir.path().join("rep").join(name)).unwrap();
        assert!(text.starts_with("# graphlim-report v1\n"));
        assert_eq!(text.lines().count(), 4, "{name}");
    }
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("rep/report.json")).unwrap()).unwrap();
    assert_eq!(report["result"]["reference"], "family_limit");
    assert_eq!(report["config"]["convergence-report"]["sizes"], "40,80");
}
