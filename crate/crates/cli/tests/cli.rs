use std::path::Path;
use std::process::{Command, Output};

const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]\n";
const FIG8: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]\n";

fn qalink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qalink"))
        .args(args)
        .env_remove("QACERT_DATA")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn det_all_engines_agree() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "trefoil.pd", TREFOIL);
    let o = qalink(&["det", &f, "--engine", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let values: Vec<&str> = out.lines().filter_map(|l| l.split_whitespace().nth(1)).collect();
    assert_eq!(values, ["3", "3", "3"]);
    assert_eq!(out.lines().last(), Some("AGREE"));

    let o = qalink(&["det", &f, "--engine", "goeritz"]);
    assert_eq!(stdout(&o), "goeritz  3\n");
}

#[test]
fn jones_of_trefoil() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "trefoil.pd", TREFOIL);
    let o = qalink(&["jones", &f]);
    assert_eq!(stdout(&o).trim(), "-t^(-4)+t^(-3)+t^(-1)");
}

#[test]
fn certify_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "trefoil.pd", TREFOIL);
    let cert = dir.path().join("cert.json");
    let cert = cert.to_str().unwrap();
    let o = qalink(&["qa", "certify", &f, "-o", cert]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(cert).unwrap()).unwrap();
    assert_eq!(json["kind"], "Branch");
    assert_eq!(json["det"], 3);

    let o = qalink(&["qa", "verify", cert, &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "OK");

    // the same certificate does not describe the figure eight
    let g = write(dir.path(), "fig8.pd", FIG8);
    let o = qalink(&["qa", "verify", cert, &g]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn certify_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // P(1,-1) is a two-crossing unlink diagram, det 0
    let f = write(dir.path(), "unlink.pd", &stdout(&qalink(&["pretzel", "diagram", "1,-1"])));
    let o = qalink(&["qa", "certify", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("NotQA"));
}

#[test]
fn pretzel_subcommands() {
    let o = qalink(&["pretzel", "classify", "2,2,-2,-2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "NotQA (Theorem 3.2(2)); adequate; Turaev genus 1");
    assert_eq!(stdout(&qalink(&["pretzel", "det", "2,3,-7"])).trim(), "29");
    assert_eq!(stdout(&qalink(&["pretzel", "det", "P(3,3,-3)"])).trim(), "9");
    let pd = stdout(&qalink(&["pretzel", "diagram", "-2,3,3"]));
    assert_eq!(pd.matches('X').count(), 8);
}

#[test]
fn twist_replaces_a_crossing() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "trefoil.pd", TREFOIL);
    // this trefoil's crossings have sign -1, so C(-2) extends them
    let o = qalink(&["twist", &f, "--crossing", "0", "--tangle", "-2"]);
    assert_eq!(o.status.code(), Some(0));
    let g = write(dir.path(), "twisted.pd", &stdout(&o));
    assert_eq!(stdout(&qalink(&["det", &g, "--engine", "goeritz"])), "goeritz  5\n");
    let o = qalink(&["twist", &f, "--crossing", "0", "--tangle", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = qalink(&["twist", &f, "--crossing", "7", "--tangle", "-2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn adequacy_and_turaev_genus() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fig8.pd", FIG8);
    let out = stdout(&qalink(&["adequacy", &f]));
    assert_eq!(out.lines().last(), Some("adequate"));
    assert_eq!(stdout(&qalink(&["turaev-genus", &f])).trim(), "0");
    let g = write(dir.path(), "p.pd", &stdout(&qalink(&["pretzel", "diagram", "2,2,-2,-2"])));
    assert_eq!(stdout(&qalink(&["turaev-genus", &g])).trim(), "1");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qalink(&[]).status.code(), Some(2));
    assert_eq!(qalink(&["bogus"]).status.code(), Some(2));
    assert_eq!(qalink(&["det"]).status.code(), Some(2));
    assert_eq!(qalink(&["det", "x.pd", "--engine", "abacus"]).status.code(), Some(2));
}

#[test]
fn bad_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.pd", "X[1,2,3]\n");
    let o = qalink(&["det", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    assert_eq!(qalink(&["jones", "/nonexistent.pd"]).status.code(), Some(1));
}

#[test]
fn table_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let certs = dir.path().join("certs");
    let o = qalink(&["table", "verify", "--certs", certs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("10_129") && out.contains("10_160"));
    assert_eq!(out.lines().last(), Some("15/15 passed"));
    // each written certificate verifies on its own
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/table");
    let cert = certs.join("10_160_reduced.json");
    let pd = data.join("10_160_reduced.pd");
    let o = qalink(&["qa", "verify", cert.to_str().unwrap(), pd.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn table_verify_missing_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = qalink(&["table", "verify", "--data", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing data file"));
    // the environment variable is honored when --data is absent
    let o = Command::new(env!("CARGO_BIN_EXE_qalink"))
        .args(["table", "verify"])
        .env("QACERT_DATA", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
