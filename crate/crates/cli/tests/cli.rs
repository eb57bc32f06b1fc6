use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fourier-qml"));
    c.env_remove("FOURIER_QML_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Writes `doc` as `name` in `dir` and runs `command` on it.
fn run_config(dir: &Path, command: &str, name: &str, doc: &Value) -> Output {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(doc).unwrap()).unwrap();
    run(&[command, p.to_str().unwrap()])
}

fn read_json(p: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))).unwrap()
}

fn fig3_quantum(out: &str) -> Value {
    json!({
        "version": "train-v1",
        "seed": 7,
        "output_dir": out,
        "model": {"family": "quantum", "ansatz": {
            "variables": 1, "qubits": 4, "layers": 1, "topology": "parallel",
            "encoding": [[1, 3, 9, 27]]
        }},
        "target": {"kind": "random_fourier", "kappa": 81, "split": 64, "r": 0.05, "seed": 3},
        "points": 200,
        "training": {"optimizer": {"kind": "adam", "lr": 0.03}, "steps": 500}
    })
}

#[test]
fn spectrum_flags() {
    let o = run(&["spectrum", "--exp", "3"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["d_F"], 13);
    assert_eq!(v["support"].as_array().unwrap().len(), 27);
    assert_eq!(v["nondegenerate"], true);
    assert_eq!(v["dense"], true);

    let o = run(&["spectrum", "--weights", "1,1,1"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["support"].as_array().unwrap().len(), 7);
    assert_eq!(v["multiplicity"], json!([1, 3, 6, 7, 6, 3, 1]));

    assert_eq!(code(&run(&["spectrum", "--weights", "0,1"])), 2);
    assert_eq!(code(&run(&["spectrum", "--weights", "1.5"])), 2);
    assert_eq!(code(&run(&["spectrum"])), 2);
    assert_eq!(code(&run(&["spectrum", "--weights", "1", "--exp", "2"])), 2);
}

#[test]
fn spectrum_config_writes_archive() {
    let dir = TempDir::new().unwrap();
    let doc = json!({"version": "spectrum-v1", "seed": 0, "output_dir": "out", "exponential": 2});
    let p = dir.path().join("s.json");
    fs::write(&p, doc.to_string()).unwrap();
    let o = run(&["spectrum", "--config", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(dir.path().join("out/spectrum.json"));
    assert_eq!(v["d_F"], 4);
    assert_eq!(fs::read_to_string(dir.path().join("out/config.json")).unwrap(), doc.to_string());
}

#[test]
fn train_fig3_quantum_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = run_config(dir.path(), "train", "a.json", &fig3_quantum("a"));
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let trace = fs::read_to_string(dir.path().join("a/trace.csv")).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines[0], "step,train_loss,test_loss");
    assert_eq!(lines.len(), 501);
    let first: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    let last: f64 = lines[500].split(',').nth(1).unwrap().parse().unwrap();
    assert!(last < first);

    let b = run_config(dir.path(), "train", "b.json", &fig3_quantum("b"));
    assert_eq!(code(&b), 0);
    for f in ["trace.csv", "result.json"] {
        assert_eq!(
            fs::read(dir.path().join("a").join(f)).unwrap(),
            fs::read(dir.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
    let result = read_json(dir.path().join("a/result.json"));
    assert_eq!(result["status"]["kind"], "completed");
    assert_eq!(result["final_params"].as_array().unwrap().len(), 16);
    assert!(result.get("wall_ms").is_none());
    let timing = read_json(dir.path().join("a/timing.json"));
    assert!(timing["wall_ms"].is_u64());
    assert!(dir.path().join("a/config.json").is_file());
}

#[test]
fn train_config_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let mut doc = fig3_quantum("o");
    doc.as_object_mut().unwrap().remove("target");
    assert_eq!(code(&run_config(dir.path(), "train", "missing.json", &doc)), 2);

    let mut doc = fig3_quantum("o");
    doc["extra"] = json!(1);
    assert_eq!(code(&run_config(dir.path(), "train", "extra.json", &doc)), 2);

    let mut doc = fig3_quantum("o");
    doc["version"] = json!("train-v0");
    assert_eq!(code(&run_config(dir.path(), "train", "version.json", &doc)), 2);

    let mut doc = fig3_quantum("o");
    doc["training"]["seed"] = json!(1);
    assert_eq!(code(&run_config(dir.path(), "train", "seed.json", &doc)), 2);

    let mut doc = fig3_quantum("o");
    doc["training"]["steps"] = json!(0);
    assert_eq!(code(&run_config(dir.path(), "train", "steps.json", &doc)), 2);

    assert_eq!(code(&run(&["train", dir.path().join("absent.json").to_str().unwrap()])), 2);
    assert!(!dir.path().join("o").exists());
}

#[test]
fn divergence_exits_three_with_partial_trace() {
    let dir = TempDir::new().unwrap();
    let doc = json!({
        "version": "train-v1",
        "seed": 1,
        "output_dir": "div",
        "model": {"family": "classical", "degrees": [3]},
        "target": {"kind": "step"},
        "points": 16,
        "training": {"optimizer": {"kind": "gradient_descent", "lr": 50.0}, "steps": 200}
    });
    let o = run_config(dir.path(), "train", "div.json", &doc);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let result = read_json(dir.path().join("div/result.json"));
    let step = result["status"]["step"].as_u64().unwrap() as usize;
    let rows = fs::read_to_string(dir.path().join("div/trace.csv")).unwrap().lines().count();
    assert_eq!(rows, step + 2);
    assert!(step < 200);
}

#[test]
fn capacity_exits_four() {
    let dir = TempDir::new().unwrap();
    let mut doc = fig3_quantum("cap");
    doc["model"]["ansatz"]["qubits"] = json!(30);
    doc["model"]["ansatz"]["encoding"] = json!([vec![1; 30]]);
    assert_eq!(code(&run_config(dir.path(), "train", "cap.json", &doc)), 4);
}

#[test]
fn compare_writes_traces_and_summary() {
    let dir = TempDir::new().unwrap();
    let doc = json!({"version": "compare-v1", "seed": 0, "output_dir": "cmp", "steps": 30});
    let o = run_config(dir.path(), "compare", "cmp.json", &doc);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let traces = fs::read_dir(dir.path().join("cmp/traces")).unwrap().count();
    assert_eq!(traces, 2 * 3 * 5);
    let combined = fs::read_to_string(dir.path().join("cmp/compare.csv")).unwrap();
    assert_eq!(combined.lines().next().unwrap(), "r,model,run,step,loss");
    assert_eq!(combined.lines().count(), 1 + 2 * 3 * 5 * 30);
    let summary = read_json(dir.path().join("cmp/summary.json"));
    let rows = summary["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["r"], 0.05);
    assert!(rows[0]["classical_saturated_mean"].as_f64().unwrap() > 0.0);
    assert_eq!(summary["classical_params"], 64);
    assert_eq!(summary["quantum_params"], 16);

    let zero = json!({"version": "compare-v1", "seed": 0, "output_dir": "zero", "runs": 0});
    assert_eq!(code(&run_config(dir.path(), "compare", "zero.json", &zero)), 2);
}

#[test]
fn plateau_haar_matches_prediction() {
    let dir = TempDir::new().unwrap();
    let doc = json!({
        "version": "plateau-v1", "seed": 4, "output_dir": "pl",
        "variables": 1, "qubits": 2, "trials": 10000, "mode": {"kind": "haar"}
    });
    let o = run_config(dir.path(), "plateau", "pl.json", &doc);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("pl/plateau.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "d,trials,mean_f,se_mean_f,var_f,predicted,zscore");
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cols[0], "4");
    assert_eq!(cols[5].parse::<f64>().unwrap(), 0.2);
    assert!(cols[6].parse::<f64>().unwrap().abs() < 4.0);

    let sweep = json!({
        "version": "plateau-v1", "seed": 4, "output_dir": "sw",
        "variables": 1, "qubits": 1, "trials": 2000, "mode": {"kind": "haar"},
        "case": "II", "qubit_sweep": [1, 2, 3]
    });
    assert_eq!(code(&run_config(dir.path(), "plateau", "sw.json", &sweep)), 0);
    let report = read_json(dir.path().join("sw/report.json"));
    assert_eq!(report["reports"].as_array().unwrap().len(), 3);
    let alpha = report["decay_fit"]["alpha"].as_f64().unwrap();
    assert!(alpha > 1.3 && alpha < 2.5, "{alpha}");

    let bad = json!({
        "version": "plateau-v1", "seed": 4, "output_dir": "bad",
        "variables": 1, "qubits": 2, "trials": 10, "mode": {"kind": "haar"}
    });
    assert_eq!(code(&run_config(dir.path(), "plateau", "bad.json", &bad)), 2);
}

#[test]
fn resources_crossing_table() {
    let dir = TempDir::new().unwrap();
    let doc = json!({
        "version": "resources-v1", "seed": 0, "output_dir": "res",
        "k": 81, "m": 1, "epsilon": 0.5, "n_gt": [1, 2, 4, 5, 8, 16]
    });
    let o = run_config(dir.path(), "resources", "res.json", &doc);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("res/resources.csv")).unwrap();
    let adv: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(5).unwrap()).collect();
    // ε √K = 4.5.
    assert_eq!(adv, ["true", "true", "true", "false", "false", "false"]);
    let report = read_json(dir.path().join("res/resources.json"));
    assert!((report["crossing_n_gt"].as_f64().unwrap() - 4.5).abs() < 1e-12);
    assert_eq!(report["resrc_c"], "244");
}

#[test]
fn bicone_agreement_summary() {
    let dir = TempDir::new().unwrap();
    let doc = json!({
        "version": "bicone-v1", "seed": 2, "output_dir": "bc",
        "samples": 100000, "grid": 256, "band": 0.01
    });
    let o = run_config(dir.path(), "bicone", "bc.json", &doc);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = read_json(dir.path().join("bc/summary.json"));
    assert!(s["agreement_rate"].as_f64().unwrap() >= 0.99);
    assert_eq!(s["disagreements_outside_band"], 0);
}

#[test]
fn thread_variable_is_validated() {
    let o = bin().env("FOURIER_QML_THREADS", "0").args(["spectrum", "--exp", "2"]).output().unwrap();
    assert_eq!(code(&o), 2);
    let o = bin().env("FOURIER_QML_THREADS", "2").args(["spectrum", "--exp", "2"]).output().unwrap();
    assert_eq!(code(&o), 0);
}
