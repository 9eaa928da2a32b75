use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cuntzq::mtx;
use serde_json::Value;

fn cuntzq(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cuntzq"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn lemma_example_passes_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuntzq(&["--mode", "verify-lemma", "--f", "q1", "--g", "p1", "--n", "1", "--N", "50"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    for c in checks {
        assert_eq!(c["pass"], true);
        assert_eq!(c["exact"], true);
        assert_eq!(c["max_abs_deviation"], 0.0);
        assert_eq!(c["N"], 50);
    }
    assert_eq!(checks[3]["identity"], "Leibnitzf_1.R-multiplicativity");
}

#[test]
fn quantize_one_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuntzq(&["--mode", "quantize", "--h", "1", "--N", "10"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = mtx::read(&fs::read_to_string(dir.path().join("R.mtx")).unwrap()).unwrap();
    assert_eq!(r.entries.len(), 10);
    assert!(r.entries.iter().all(|(i, j, v)| i == j && v.re == 1.0 && v.im == 0.0));
    let q = mtx::read(&fs::read_to_string(dir.path().join("Q.mtx")).unwrap()).unwrap();
    assert!(q.entries.is_empty());
    assert_eq!(report(dir.path())["artifacts"].as_array().unwrap().len(), 3);
}

#[test]
fn cuntz_check_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuntzq(&["--mode", "cuntz-check", "--M", "10000", "--d", "64"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(dir.path())["summary"]["failed"], 0);
}

#[test]
fn parse_errors_exit_one_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuntzq(&["--mode", "verify-lemma", "--f", "q1 + * p1", "--g", "p1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 1, column 6"), "{err}");
    assert_eq!(report(dir.path())["status"], "input-error");

    let o = cuntzq(&["--mode", "quantize", "--h", "q2", "--n", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = cuntzq(&["--mode", "quantize", "--h", "q1", "--n", "0"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = cuntzq(&["--mode", "quantize"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn truncation_errors_name_the_minimum() {
    let dir = tempfile::tempdir().unwrap();
    // the inputs do not fit: an input error
    let o = cuntzq(&["--mode", "verify-lemma", "--f", "q1^3", "--g", "p1", "--N", "3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least 10"));
    // the inputs fit but f g does not: empty window
    let o = cuntzq(&["--mode", "verify-lemma", "--f", "q1^3", "--g", "p1", "--N", "10"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least 15"));
    assert_eq!(report(dir.path())["status"], "empty-window");
    let o = cuntzq(&["--mode", "verify-lemma", "--f", "q1^3", "--g", "p1", "--N", "15"], dir.path());
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn failed_assertions_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuntzq(&["--mode", "verify-theorem", "--f", "q1^2", "--g", "p1"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let r = report(dir.path());
    let failed: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["asserted"] == true && c["pass"] == false)
        .map(|c| c["identity"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["LieBracketProp", "CCRAnalogueProp[q1,p1]", "CCRAnalogueProp[p1,q1]"]);
}

#[test]
fn reports_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for mode in ["verify-lemma", "bound-check", "wn-bracket"] {
        let args = ["--mode", mode, "--seed", "11"];
        assert_eq!(cuntzq(&args, a.path()).status.code(), Some(0));
        assert_eq!(cuntzq(&args, b.path()).status.code(), Some(0));
        let ra = fs::read(a.path().join("report.json")).unwrap();
        let rb = fs::read(b.path().join("report.json")).unwrap();
        assert_eq!(ra, rb, "{mode}");
    }
    let c = tempfile::tempdir().unwrap();
    cuntzq(&["--mode", "verify-lemma", "--seed", "12"], c.path());
    cuntzq(&["--mode", "verify-lemma", "--seed", "11"], a.path());
    assert_ne!(fs::read(a.path().join("report.json")).unwrap(), fs::read(c.path().join("report.json")).unwrap());
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "mode = \"verify-lemma\"\nn = 2\nf = \"q1 q2\"\ng = \"p2\"\nN = 5\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    // N = 5 is too small for f; the flag overrides it
    let o = cuntzq(&["--config", cfg_s], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = cuntzq(&["--config", cfg_s, "--N", "35"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    assert_eq!(r["parameters"]["n"], 2);
    assert_eq!(r["parameters"]["N"], 35);

    fs::write(&cfg, "mode = \"quantize\"\nh = 1\n").unwrap();
    let o = cuntzq(&["--config", cfg_s], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn other_modes_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuntzq(&["--mode", "ccr", "--n", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let o = cuntzq(&["--mode", "wn-bracket", "--K", "2", "--C", "2", "--f", ":q1 p1:", "--g", "q1", "--lambda", "1/2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    // {:q1 p1:, q1} = -lambda_1 q1
    assert_eq!(report(dir.path())["details"]["bracket"], "-1/2 * :q1:");
    let o = cuntzq(&["--mode", "wn-bracket", "--K", "2", "--C", "1", "--f", ":q1 p1:", "--g", "q1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = cuntzq(&["--mode", "wn-quantize", "--K", "2", "--C", "2", "--h", "q1 + 1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("Qhat.mtx").exists());
    let o = cuntzq(&["--mode", "export", "--h", "q1", "--M", "2000", "--d", "16"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let lifted = mtx::read(&fs::read_to_string(dir.path().join("Qhat_lifted.mtx")).unwrap()).unwrap();
    assert_eq!(lifted.rows, 2000);
    assert!(!lifted.entries.is_empty());
    let o = cuntzq(&["--mode", "export", "--h", "q1", "--M", "10", "--d", "16"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("M >= 16"));
}
