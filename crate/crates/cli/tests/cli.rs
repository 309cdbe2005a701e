use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn dopgolay(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dopgolay"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn generate(dir: &Path, scheme: &str, order: &str, name: &str) -> String {
    let o = dopgolay(
        dir,
        &[
            "generate", "--scheme", scheme, "--M", order, "--seed", "builtin8", "--output", name,
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    dir.join(name).display().to_string()
}

#[test]
fn generate_ptm_train() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "ptm", "3", "ptm.json");
    let doc = json(Path::new(&path));
    assert_eq!(doc["scheme"], "ptm");
    assert_eq!(doc["M"], 3);
    assert_eq!(doc["L"], 8);
    let pulses = doc["pulses"].as_array().unwrap();
    assert_eq!(pulses.len(), 16);
    assert_eq!(pulses[0], "++-++++-");
    assert_eq!(pulses[1], "--+-+++-");
    assert_eq!(pulses[2], "+---+-++");

    let manifest = json(&dir.path().join("generate.manifest.json"));
    assert_eq!(manifest["command"], "generate");
    assert_eq!(manifest["timestamp"], "2023-11-14T22:13:20Z");
    assert_eq!(manifest["outputs"][0]["path"], "ptm.json");
    let bytes = fs::read(&path).unwrap();
    assert_eq!(
        manifest["outputs"][0]["sha256"],
        dopgolay_cli::manifest::sha256_hex(&bytes)
    );
}

#[test]
fn generate_variants() {
    let dir = TempDir::new().unwrap();
    let conv = json(Path::new(&generate(dir.path(), "conventional", "3", "c.json")));
    let pulses = conv["pulses"].as_array().unwrap();
    assert!(pulses.iter().step_by(2).all(|p| p == "++-++++-"));
    assert!(pulses.iter().skip(1).step_by(2).all(|p| p == "--+-+++-"));

    let tiny = json(Path::new(&generate(dir.path(), "ptm", "0", "t.json")));
    assert_eq!(tiny["pulses"].as_array().unwrap().len(), 2);

    let wm = json(Path::new(&generate(dir.path(), "alamouti-ptm", "3", "w.json")));
    assert_eq!(wm["scheme"], "alamouti-ptm");
    let blocks: Vec<&str> = wm["blocks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b.as_str().unwrap())
        .collect();
    assert_eq!(blocks, ["X0", "X1", "X1", "X0", "X1", "X0", "X0", "X1"]);

    let o = dopgolay(
        dir.path(),
        &["generate", "--scheme", "ptm", "--M", "1", "--length", "32"],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(json(&dir.path().join("train.json"))["L"], 32);
}

#[test]
fn generate_rejects_bad_seed() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"a": "++++", "b": "++++"}"#).unwrap();
    let o = dopgolay(
        dir.path(),
        &[
            "generate",
            "--scheme",
            "ptm",
            "--M",
            "2",
            "--seed-pair",
            bad.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("not complementary"), "{}", stderr(&o));
    let o = dopgolay(
        dir.path(),
        &["generate", "--scheme", "ptm", "--M", "2", "--seed", "nonexistent"],
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&dopgolay(dir.path(), &["generate", "--scheme", "bogus", "--M", "1"])),
        2
    );
    assert_eq!(code(&dopgolay(dir.path(), &["frobnicate"])), 2);
}

#[test]
fn verify_reports() {
    let dir = TempDir::new().unwrap();
    let ptm = generate(dir.path(), "ptm", "3", "ptm.json");
    let o = dopgolay(dir.path(), &["verify", &ptm]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS  C3-vanishes"));

    let wm = generate(dir.path(), "alamouti-ptm", "3", "wm.json");
    let o = dopgolay(dir.path(), &["--format", "json", "verify", &wm]);
    assert_eq!(code(&o), 0);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"block-cross-signs") && names.contains(&"B3-vanishes"));

    let conv = generate(dir.path(), "conventional", "3", "conv.json");
    let o = dopgolay(dir.path(), &["verify", &conv]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL  C1-vanishes"), "{}", stdout(&o));

    let broken = dir.path().join("broken.json");
    fs::write(&broken, r#"{"scheme": "ptm", "M": 3, "L": 8, "pulses": ["++-"#).unwrap();
    let o = dopgolay(dir.path(), &["verify", broken.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("cannot parse"), "{}", stderr(&o));
}

#[test]
fn ambiguity_grid_and_slices() {
    let dir = TempDir::new().unwrap();
    let ptm = generate(dir.path(), "ptm", "3", "ptm.json");
    let o = dopgolay(
        dir.path(),
        &[
            "ambiguity",
            &ptm,
            "--theta-min",
            "0",
            "--theta-max",
            "0.1",
            "--steps",
            "201",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("ambiguity.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "lag,theta,magnitude");
    assert_eq!(lines.len(), 1 + 201 * 15);
    assert_eq!(lines[8], "0,0,128");

    let o = dopgolay(
        dir.path(),
        &[
            "ambiguity",
            &ptm,
            "--thetas",
            "0.025,0.05,0.075",
            "--output",
            "slice.csv",
        ],
    );
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("slice.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "lag,0.025,0.05,0.075");
    assert_eq!(text.lines().count(), 16);

    let wm = generate(dir.path(), "alamouti-ptm", "3", "wm.json");
    let o = dopgolay(
        dir.path(),
        &[
            "--format",
            "json",
            "ambiguity",
            &wm,
            "--channel",
            "offdiag",
            "--steps",
            "3",
        ],
    );
    assert_eq!(code(&o), 0);
    let g = json(&dir.path().join("ambiguity.json"));
    assert_eq!(g["channel"], "offdiag");
    assert_eq!(g["values"].as_array().unwrap().len(), 3);

    assert_eq!(code(&dopgolay(dir.path(), &["ambiguity", &ptm, "--steps", "0"])), 2);
    assert_eq!(
        code(&dopgolay(
            dir.path(),
            &["ambiguity", &ptm, "--theta-min", "0.2", "--theta-max", "0.1"]
        )),
        2
    );
    assert_eq!(
        code(&dopgolay(dir.path(), &["ambiguity", &ptm, "--channel", "offdiag"])),
        2
    );
}

#[test]
fn compare_floors() {
    let dir = TempDir::new().unwrap();
    let ptm = generate(dir.path(), "ptm", "3", "ptm.json");
    let conv = generate(dir.path(), "conventional", "3", "conv.json");
    let o = dopgolay(dir.path(), &["compare", &ptm, &conv]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));

    let wp = generate(dir.path(), "alamouti-ptm", "3", "wp.json");
    let wc = generate(dir.path(), "alamouti-conventional", "3", "wc.json");
    let o = dopgolay(dir.path(), &["--format", "json", "compare", &wp, &wc]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let rows = json(&dir.path().join("compare.json"));
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let off: Vec<f64> = rows
        .iter()
        .filter(|r| r["channel"] == "offdiag")
        .map(|r| r["floor_db"].as_f64().unwrap())
        .collect();
    assert_eq!(off, [24.0, 12.0, 5.0]);

    let o = dopgolay(dir.path(), &["compare", &conv, &conv]);
    assert_eq!(code(&o), 1);
    let text = fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(4) == Some("0")));
}

fn scenario(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn simulate_noiseless_peak() {
    let dir = TempDir::new().unwrap();
    let sc = scenario(
        dir.path(),
        "s.json",
        r#"{"scheme": "ptm", "M": 3, "seed_pair": "builtin8",
            "target": {"d0": 0, "theta": 0, "h": [1, 0]},
            "noise": {"sigma_w": 0, "seed": 1}, "trials": 1}"#,
    );
    let o = dopgolay(dir.path(), &["simulate", &sc]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("matched_filter.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lag,re,im,magnitude"));
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let mag: f64 = f[3].parse().unwrap();
        if f[0] == "0" {
            assert_eq!(mag, 128.0);
        } else {
            assert_eq!(mag, 0.0, "{line}");
        }
    }

    let sc = scenario(
        dir.path(),
        "p.json",
        r#"{"scheme": "alamouti-ptm", "M": 3,
            "target": {"d0": 0, "theta": 0, "H": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]},
            "noise": {"sigma_w": 0, "seed": 1}, "trials": 1}"#,
    );
    let o = dopgolay(dir.path(), &["simulate", &sc]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("alamouti.csv")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("0,0,0,128,0,128")));
    assert!(text.lines().any(|l| l.starts_with("0,1,1,128,0,128")));
}

#[test]
fn simulate_h0_variance() {
    let dir = TempDir::new().unwrap();
    let sc = scenario(
        dir.path(),
        "h0.json",
        r#"{"scheme": "ptm", "M": 3, "target": null,
            "noise": {"sigma_w": 1, "seed": 11}, "trials": 100000}"#,
    );
    let o = dopgolay(dir.path(), &["--format", "json", "simulate", &sc]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let stats = json(&dir.path().join("stats.json"));
    assert_eq!(stats["hypothesis"], "H0");
    assert_eq!(stats["expected_variance"], 256.0);
    assert!(stats["relative_error"].as_f64().unwrap() < 0.03);
}

#[test]
fn simulate_input_errors() {
    let dir = TempDir::new().unwrap();
    let sc = scenario(
        dir.path(),
        "m.json",
        r#"{"scheme": "ptm", "M": 3, "target": null, "trials": 1}"#,
    );
    let o = dopgolay(dir.path(), &["simulate", &sc]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("missing field `noise`"), "{}", stderr(&o));

    let sc = scenario(
        dir.path(),
        "z.json",
        r#"{"scheme": "ptm", "M": 1, "target": null, "noise": {"sigma_w": 1, "seed": 1}, "trials": 0}"#,
    );
    assert_eq!(code(&dopgolay(dir.path(), &["simulate", &sc])), 2);
    let ok = scenario(
        dir.path(),
        "ok.json",
        r#"{"scheme": "ptm", "M": 1, "target": null, "noise": {"sigma_w": 1, "seed": 1}, "trials": 1}"#,
    );
    assert_eq!(
        code(&dopgolay(dir.path(), &["--seed", "not-a-number", "simulate", &ok])),
        2
    );
}

#[test]
fn outputs_are_reproducible() {
    let run = || {
        let dir = TempDir::new().unwrap();
        let ptm = generate(dir.path(), "ptm", "2", "ptm.json");
        let sc = scenario(
            dir.path(),
            "n.json",
            r#"{"scheme": "ptm", "M": 2, "target": {"d0": 1, "theta": 0.05, "h": [1, 0]},
                "noise": {"sigma_w": 0.5, "seed": 3}, "trials": 1}"#,
        );
        assert_eq!(code(&dopgolay(dir.path(), &["ambiguity", &ptm, "--steps", "11"])), 0);
        assert_eq!(code(&dopgolay(dir.path(), &["simulate", &sc])), 0);
        [
            "ptm.json",
            "ambiguity.csv",
            "matched_filter.csv",
            "simulate.manifest.json",
        ]
        .map(|f| fs::read(dir.path().join(f)).unwrap())
    };
    let (a, b) = (run(), run());
    assert_eq!(a[..3], b[..3]);
    let strip = |m: &[u8]| {
        let mut v: Value = serde_json::from_slice(m).unwrap();
        v["inputs"] = Value::Null;
        v
    };
    assert_eq!(strip(&a[3]), strip(&b[3]));
}

#[test]
fn accept_negative_control() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"a": "++-++++-", "b": "++-++++-"}"#).unwrap();
    let o = dopgolay(
        dir.path(),
        &["accept", "--seed-pair", bad.to_str().unwrap(), "--trials", "1000"],
    );
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("[FAIL]  1 Golay identity"), "{}", stdout(&o));
    let report = json(&dir.path().join("acceptance.json"));
    assert_eq!(report["all_passed"], false);
    assert_eq!(report["criteria"].as_array().unwrap().len(), 11);
}

#[test]
fn accept_full_run() {
    let dir = TempDir::new().unwrap();
    let o = dopgolay(dir.path(), &["accept"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("[PASS]")).count(), 11);
    assert!(out.contains("θ=0.025: 78.02 dB (expected ≥ 24 dB)"), "{out}");
    let report = json(&dir.path().join("acceptance.json"));
    assert_eq!(report["all_passed"], true);
}
