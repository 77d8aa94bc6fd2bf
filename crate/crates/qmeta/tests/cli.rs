use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qmeta(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmeta"))
        .current_dir(dir)
        .args(args)
        .env("QMETA_WORKERS", "2")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = qmeta(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(String::from).collect()
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(qmeta(d, &["--help"]).status.code(), Some(0));
    assert_eq!(qmeta(d, &["bogus"]).status.code(), Some(2));
    assert_eq!(qmeta(d, &["eval", "--checkpoints", "missing.json", "--data", "x.jsonl"]).status.code(), Some(2));
    fs::write(d.join("bad.json"), "{\"command\":\"dataset\",\"nope\":1}").unwrap();
    assert_eq!(qmeta(d, &["dataset", "--config", "bad.json"]).status.code(), Some(2));
    assert_eq!(qmeta(d, &["dataset", "--n-min", "9", "--n-max", "6", "--out", "x.jsonl"]).status.code(), Some(2));
}

#[test]
fn train_then_eval_with_short_horizon() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["dataset", "--n-min", "5", "--n-max", "6", "--count", "6", "--seed", "1", "--out", "train.jsonl"]);
    ok(d, &["dataset", "--n-min", "7", "--n-max", "7", "--count", "3", "--seed", "2", "--out", "test.jsonl"]);
    assert_eq!(lines(&d.join("train.jsonl")).len(), 6);

    let out = ok(d, &["train", "--model", "qfwp", "--data", "train.jsonl", "--epochs", "1", "--batch", "3", "--out", "m"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("total=31"));
    let log = lines(&d.join("m/train_log.csv"));
    assert_eq!(log[0], "epoch,mean_meta_loss,seconds");
    assert_eq!(log.len(), 2);

    ok(d, &["eval", "--checkpoints", "m/checkpoint.json", "--data", "test.jsonl", "--iterations", "50", "--out", "e"]);
    let curve = lines(&d.join("e/curves_qfwp_7.csv"));
    assert_eq!(curve[0], "iteration,mean_rel_err,ci_halfwidth,phase");
    assert_eq!(curve.len(), 51);
    assert!(curve[10].ends_with(",model") && curve[11].ends_with(",sgd"));
    assert_eq!(lines(&d.join("e/curves_random_7.csv")).len(), 51);
    let t2 = lines(&d.join("e/table2.csv"));
    assert_eq!(t2[0], "n,model,convergence_iteration");
    assert_eq!(t2.len(), 3);
}

#[test]
fn landscape_grid_and_paths() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["landscape", "--n", "6", "--k", "3", "--resolution", "2", "--steps", "3", "--out", "l"]);
    let grid = lines(&d.join("l/landscape.csv"));
    assert_eq!(grid[0], "gamma,beta,cost");
    assert_eq!(grid.len(), 5);
    let path = lines(&d.join("l/trajectory_qaoa.csv"));
    assert_eq!(path[0], "step,gamma,beta,cost");
    assert_eq!(path.len(), 5);
}

#[test]
fn recorded_config_replays_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["dataset", "--n-min", "5", "--n-max", "5", "--count", "4", "--seed", "3", "--out", "a.jsonl"]);
    let first = fs::read(d.join("a.jsonl")).unwrap();
    ok(d, &["dataset", "--config", "a.run.json"]);
    assert_eq!(fs::read(d.join("a.jsonl")).unwrap(), first);
    ok(d, &["dataset", "--config", "a.run.json", "--out", "b.jsonl"]);
    assert_eq!(fs::read(d.join("b.jsonl")).unwrap(), first);
}
