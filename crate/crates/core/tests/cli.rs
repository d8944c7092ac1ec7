use std::process::{Command, Output};

fn cutlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cutlab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn parity_regimes() {
    let o = cutlab(&["jeroslow", "--n", "7", "--scan"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("below u=5399993/7000000,1/5 tree_size=1 "));
    assert!(text.contains("status=ok"));

    let o = cutlab(&["jeroslow", "--n", "3", "--u", "3/4,1/5"]);
    assert!(stdout(&o).contains("tree_size=1 "));
    let o = cutlab(&["jeroslow", "--n", "3", "--u", "0,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("tree_size=11 "));
}

#[test]
fn input_errors_exit_3() {
    assert_eq!(cutlab(&["jeroslow", "--n", "4", "--scan"]).status.code(), Some(3));
    assert_eq!(cutlab(&["jeroslow", "--n", "5"]).status.code(), Some(3));
    assert_eq!(cutlab(&["jeroslow", "--n", "5", "--u", "1/0,1"]).status.code(), Some(3));
    assert_eq!(cutlab(&["--kappa", "2", "jeroslow", "--n", "7", "--scan"]).status.code(), Some(3));
    assert_eq!(cutlab(&["sweep"]).status.code(), Some(3), "seed is mandatory for generated instances");
    assert_eq!(cutlab(&["--config", "/nonexistent.toml"]).status.code(), Some(3));
    assert_eq!(cutlab(&["--seed", "1", "regions", "--layout", "cubes"]).status.code(), Some(3));
}

#[test]
fn budget_errors_exit_4() {
    let o = cutlab(&["--seed", "1", "regions", "--samples", "10", "--resolution", "1000"]);
    assert_eq!(o.status.code(), Some(4));
    let o = cutlab(&["--seed", "1", "rademacher", "--count", "30", "--candidate-count", "1", "--exhaustive", "--family", "u"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn instance_files_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("p.txt");
    std::fs::write(&inst, cutlab::jeroslow(3).unwrap().to_text()).unwrap();
    let csv = dir.path().join("sweep.csv");
    let svg = dir.path().join("sweep.svg");
    let o = cutlab(&[
        "--out", csv.to_str().unwrap(),
        "sweep", "--mode", "u", "--instance", inst.to_str().unwrap(),
        "--from", "1/2,0", "--to", "1,0", "--points", "11", "--svg", svg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("param_value,tree_size,hit_cap,signature_hash,chosen_cut_index\n"));
    // u = (1/2 + t/2, 0): the closing regime covers t < 1/3
    let sizes: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(sizes[0], "1");
    assert_eq!(sizes[3], "1");
    assert_ne!(sizes[4], "1");
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

#[test]
fn config_file_reproduces_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let args = ["--seed", "4", "learn", "--count", "6", "--candidate-count", "3"];
    let first = cutlab(&[&args[..], &["--save-config", cfg.to_str().unwrap()]].concat());
    assert_eq!(first.status.code(), Some(0));
    let text = std::fs::read_to_string(&cfg).unwrap();
    assert!(text.contains("seed = 4"));
    let replay = cutlab(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(first.stdout, replay.stdout);
    let other = cutlab(&["--config", cfg.to_str().unwrap(), "--seed", "5"]);
    assert_ne!(first.stdout, other.stdout);
}
