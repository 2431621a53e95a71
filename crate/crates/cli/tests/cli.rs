use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn benflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_benflow"))
        .args(args)
        .env_remove("BENFLOW_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn generate(dir: &Path, name: &str, extra: &[&str]) -> String {
    let path = dir.join(name).display().to_string();
    let mut args = vec!["generate", "--seed", "42", "--normal", "20000", "--decades", "1:7", "-o", &path];
    args.extend_from_slice(extra);
    let out = benflow(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    path
}

#[test]
fn generate_counts_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = generate(dir.path(), "a.csv", &["--burst", "const:1500:20000:5000"]);
    let b = generate(dir.path(), "b.csv", &["--burst", "const:1500:20000:5000"]);
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 25_001);
    assert_eq!(text.lines().skip(1).filter(|l| l.ends_with(",1")).count(), 5000);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(format!("{a}.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "generate");
    assert_eq!(manifest["output"]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["config"]["generator"]["seed"], 42);
}

#[test]
fn overlapping_bursts_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("x.csv").display().to_string();
    let out = benflow(&["generate", "--burst", "const:10:100:50", "--burst", "const:10:120:50", "-o", &out_path]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stderr(&out).contains("overlap"));
}

#[test]
fn score_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let input = generate(dir.path(), "in.csv", &["--burst", "const:1500:5000:3000"]);
    let output = dir.path().join("scores.csv").display().to_string();
    let out = benflow(&[
        "score", "--format", "csv", "--metric", "chi2", "--window", "2500", "--step", "1250", "--threshold", "0.4", &input, "-o", &output,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&output).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "window_index,start_flow,end_flow,score,decision,truth,valid");
    assert_eq!(lines.count(), 17);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(format!("{output}.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["detector"]["threshold_t"], 0.4);
    assert_eq!(manifest["input"]["sha256"].as_str().unwrap().len(), 64);
    assert!(String::from_utf8_lossy(&out.stdout).contains("average"));
}

#[test]
fn score_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv").display().to_string();
    assert_eq!(code(&benflow(&["score", &missing])), 2);

    let input = generate(dir.path(), "in.csv", &[]);
    assert_eq!(code(&benflow(&["score", "--window", "0", &input])), 3);
    assert_eq!(code(&benflow(&["score", "--metric", "nope", &input])), 3);
    assert_eq!(code(&benflow(&["score", "--format", "tshark", &input])), 2);
}

#[test]
fn evaluate_grid_and_roc() {
    let dir = tempfile::tempdir().unwrap();
    let input = generate(dir.path(), "in.csv", &["--burst", "const:1500:8000:4000"]);
    let grid = dir.path().join("grid.csv").display().to_string();
    let out = benflow(&["evaluate", "--metrics", "chi2,mkld", "--windows", "500,1000", "--tl", "0.1..0.3", &input, "-o", &grid]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&grid).unwrap();
    assert_eq!(text.lines().next().unwrap(), "w,labeling,metric,auc");
    // 2 sizes x 7 labelings x 2 metrics
    assert_eq!(text.lines().count(), 1 + 28);
    assert!(String::from_utf8_lossy(&out.stdout).contains("best AUC"));

    let roc = dir.path().join("roc.csv").display().to_string();
    let out = benflow(&["evaluate", "--roc", "--window", "1000", "--labeling-abs", "70", &input, "-o", &roc]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&roc).unwrap();
    assert!(text.starts_with("threshold,fpr,tpr\ninf,0,0\n"));
    assert!(text.trim_end().lines().last().unwrap().starts_with("# auc="));
}

#[test]
fn evaluate_rejects_single_class_and_unlabeled() {
    let dir = tempfile::tempdir().unwrap();
    let normal = generate(dir.path(), "normal.csv", &[]);
    let out = benflow(&["evaluate", "--windows", "1000", &normal]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("degenerate labels"));

    let unlabeled = dir.path().join("u.csv");
    fs::write(
        &unlabeled,
        "src_ip,src_port,dst_ip,dst_port,packets_total,bytes_total,rel_start_s,duration_s\n10.0.0.1,1,10.0.0.2,80,1,100,0,0\n",
    )
    .unwrap();
    let out = benflow(&["evaluate", unlabeled.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("not labeled"));
}

#[test]
fn sweep_and_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let input = generate(dir.path(), "in.csv", &[]);
    let sweep = dir.path().join("sweep.csv").display().to_string();
    let out = benflow(&["sweep", "--windows", "500..2000:500", &input, "-o", &sweep]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&sweep).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("w,mean_score\n500,"));

    let copy = dir.path().join("copy.csv").display().to_string();
    let out = benflow(&["ingest", &input, "-o", &copy]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(fs::read(&input).unwrap(), fs::read(&copy).unwrap());
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = generate(dir.path(), "in.csv", &["--burst", "const:900:100:500"]);
    let run = |threads: &str, name: &str| {
        let path = dir.path().join(name).display().to_string();
        let out = Command::new(env!("CARGO_BIN_EXE_benflow"))
            .args(["score", "--window", "200", &input, "-o", &path])
            .env("BENFLOW_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        fs::read(&path).unwrap()
    };
    assert_eq!(run("1", "one.csv"), run("4", "four.csv"));
}
