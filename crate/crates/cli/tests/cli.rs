use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_styleqgan"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn stderr_line(out: &Output) -> String {
    let s = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(s.trim_end().lines().count(), 1, "diagnostic spans lines: {s}");
    s
}

const TINY_CONFIG: &str = "[ansatz]\nbase_qubits = 3\nlayers = 1\nlatent_dim = 5\n\n[train]\nbatch_size = 64\nn_epochs = 2\nseed = 11\n";

/// synth-data, train, generate; returns the checkpoint path.
fn pipeline(dir: &Path) -> String {
    let data = p(dir, "data.csv");
    let cfg = p(dir, "run.toml");
    let cp = p(dir, "model.json");
    fs::write(&cfg, TINY_CONFIG).unwrap();
    ok(&["synth-data", "--k", "512", "--seed", "5", "--out", &data]);
    ok(&["train", "--data", &data, "--config", &cfg, "--out", &cp]);
    cp
}

#[test]
fn estimate_runtime_reports_circuit_counts() {
    let out = ok(&["estimate-runtime", "--device", "ibm_torino", "--replicas", "16", "--shots", "4000", "--samples", "100000"]);
    assert!(out.contains("circuits_needed   6250"), "{out}");
    let out = ok(&["estimate-runtime", "--device", "aria_1", "--replicas", "8", "--shots", "512", "--samples", "100000"]);
    assert!(out.contains("circuits_needed   12500"), "{out}");
    assert!(out.contains("qubits            24"), "{out}");
}

#[test]
fn usage_errors_exit_one() {
    let out = run(&["generate", "--checkpoint", "x.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_line(&out).contains("--samples"));
    assert_eq!(run(&["transmogrify"]).status.code(), Some(1));
    let out = run(&["estimate-runtime", "--device", "aria_1", "--replicas", "0", "--shots", "1", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(run(&["--help"]).status.success());
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["train", "--data", &p(dir.path(), "missing.csv"), "--out", &p(dir.path(), "m.json")]);
    assert_eq!(out.status.code(), Some(2));
    stderr_line(&out);

    let bad = p(dir.path(), "bad.csv");
    fs::write(&bad, "s,t,y\n1,2,3\n4,oops,6\n").unwrap();
    let out = run(&["train", "--data", &bad, "--out", &p(dir.path(), "m.json")]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["estimate-runtime", "--device", "aria_1", "--replicas", "9", "--shots", "1", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).contains("capacity"));

    let out = run(&["estimate-runtime", "--device", "nowhere", "--replicas", "1", "--shots", "1", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let data = p(dir.path(), "data.csv");
    let cfg = p(dir.path(), "run.toml");
    ok(&["synth-data", "--k", "128", "--out", &data]);
    fs::write(&cfg, "[train]\nbatch_size = 32\nn_epochs = 1\nlearning_rate_g = 1e308\nlearning_rate_d = 1e308\n").unwrap();
    let out = run(&["train", "--data", &data, "--config", &cfg, "--out", &p(dir.path(), "m.json")]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_line(&out).contains("non-finite"));
}

#[test]
fn evaluate_identical_files_gives_zero_kl() {
    let dir = tempfile::tempdir().unwrap();
    let data = p(dir.path(), "data.csv");
    ok(&["synth-data", "--k", "1000", "--out", &data]);
    let out_dir = p(dir.path(), "eval");
    let stdout = ok(&["evaluate", "--generated", &data, "--reference", &data, "--out", &out_dir]);
    for line in stdout.lines() {
        let kl: f64 = line.split('\t').nth(1).unwrap().parse().unwrap();
        assert_eq!(kl, 0.0, "{line}");
    }
    for f in ["kl.csv", "hist_s_reference.csv", "corr_s_t_generated.csv", "ratio_t_y.csv", "manifest.json"] {
        assert!(dir.path().join("eval").join(f).exists(), "{f}");
    }
}

#[test]
fn generate_rejects_inconsistent_modes() {
    let dir = tempfile::tempdir().unwrap();
    let cp = pipeline(dir.path());
    let out_csv = p(dir.path(), "g.csv");
    let out = run(&["generate", "--checkpoint", &cp, "--samples", "10", "--device", "aria_1", "--out", &out_csv]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["generate", "--checkpoint", &cp, "--samples", "10", "--mode", "shots", "--out", &out_csv]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "generate", "--checkpoint", &cp, "--samples", "10", "--replicas", "9", "--mode", "shots", "--shots", "8",
        "--device", "aria_1", "--out", &out_csv,
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seeded_workflows_are_bit_identical() {
    let outputs: Vec<Vec<Vec<u8>>> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let d = dir.path();
            let cp = pipeline(d);
            let gen = p(d, "gen.csv");
            ok(&[
                "generate", "--checkpoint", &cp, "--samples", "300", "--replicas", "8", "--mode", "shots", "--shots",
                "256", "--device", "aria_1", "--seed", "21", "--out", &gen,
            ]);
            ok(&["evaluate", "--generated", &gen, "--reference", &p(d, "data.csv"), "--out", &p(d, "eval")]);
            let sim = p(d, "sim.csv");
            ok(&[
                "noise-sim", "--checkpoint", &cp, "--device", "aria_1", "--shots", "128,256", "--samples", "200",
                "--seed", "2", "--out", &sim,
            ]);
            [
                "data.csv",
                "model.json",
                "model.json.loss.csv",
                "gen.csv",
                "eval/kl.csv",
                "eval/ratio_s_t.csv",
                "sim.csv",
            ]
            .iter()
            .map(|f| fs::read(d.join(f)).unwrap())
            .collect()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    let gen = String::from_utf8(outputs[0][3].clone()).unwrap();
    assert_eq!(gen.lines().count(), 301);
    let sim = String::from_utf8(outputs[0][6].clone()).unwrap();
    assert!(sim.starts_with("shots,dimension,nominal,plus,minus,dropped"));
    assert_eq!(sim.lines().count(), 7);
}

#[test]
fn manifests_record_profile_checksum() {
    let dir = tempfile::tempdir().unwrap();
    let cp = pipeline(dir.path());
    let gen = p(dir.path(), "gen.csv");
    ok(&[
        "generate", "--checkpoint", &cp, "--samples", "16", "--replicas", "2", "--mode", "shots", "--shots", "64",
        "--device", "ibm_torino", "--out", &gen,
    ]);
    let m = fs::read_to_string(format!("{gen}.manifest.json")).unwrap();
    assert!(m.contains("\"ibm_torino\""));
    assert!(m.contains("\"checksum\""));
    let train_m = fs::read_to_string(format!("{cp}.manifest.json")).unwrap();
    assert!(train_m.contains("\"n_epochs\": 2"));
}
