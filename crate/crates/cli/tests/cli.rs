use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gaplab::kernels::{cosine_sum_closed, UnitPoint};
use tempfile::TempDir;

fn gaplab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaplab"))
        .current_dir(dir)
        .env_remove("GAPLAB_MAX_ELEMENTS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>, bool) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let mut truncated = false;
    let mut rows = Vec::new();
    for l in lines {
        if l.starts_with('#') {
            truncated = true;
        } else {
            rows.push(l.split(',').map(String::from).collect());
        }
    }
    (header, rows, truncated)
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn solve_examples() {
    let t = TempDir::new().unwrap();
    let lil = ok(&gaplab(t.path(), &["solve", "--lil", "1.0"]));
    assert_eq!(field(&lil, "lambda"), "3");
    let p: f64 = field(&lil, "p").parse().unwrap();
    assert!((p - (17.0 - 73f64.sqrt()) / 36.0).abs() < 1e-15);
    let disc = ok(&gaplab(t.path(), &["solve", "--disc", "0.5"]));
    assert_eq!((field(&disc, "lambda"), field(&disc, "p")), (field(&lil, "lambda"), field(&lil, "p")));

    let zero = gaplab(t.path(), &["solve", "--lil", "0"]);
    assert_eq!(zero.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&zero.stderr).contains("n_k = k"));
    assert_eq!(gaplab(t.path(), &["solve", "--lil", "-1"]).status.code(), Some(2));
    assert_eq!(gaplab(t.path(), &["solve"]).status.code(), Some(2));

    let json: serde_json::Value = serde_json::from_str(&ok(&gaplab(t.path(), &["solve", "--lil", "1", "--format", "json"]))).unwrap();
    assert_eq!(json["lambda"], 3);
}

#[test]
fn generate_examples() {
    let t = TempDir::new().unwrap();
    assert_eq!(ok(&gaplab(t.path(), &["generate", "--p", "0", "--limit", "9"])), "1\n3\n5\n7\n9\n");
    assert_eq!(ok(&gaplab(t.path(), &["generate", "--p", "1", "--lambda", "1", "--limit", "4"])), "1\n2\n3\n4\n");
    let out = gaplab(t.path(), &["generate", "--lil", "2", "--limit", "100000", "--seed", "5"]);
    let values: Vec<u64> = ok(&out).lines().map(|l| l.parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| matches!(w[1] - w[0], 1 | 2)));
    let hist = String::from_utf8(out.stderr).unwrap();
    let gaps: Vec<&str> = hist.trim().trim_start_matches("gap histogram ").split(' ').collect();
    assert_eq!(gaps.len(), 2);
    assert!(gaps[0].starts_with("1:") && gaps[1].starts_with("2:"));
}

#[test]
fn binary_and_json_formats() {
    let t = TempDir::new().unwrap();
    let text = ok(&gaplab(t.path(), &["generate", "--lambda", "2", "--p", "0.4", "--limit", "500", "--seed", "9"]));
    ok(&gaplab(t.path(), &["generate", "--lambda", "2", "--p", "0.4", "--limit", "500", "--seed", "9", "--format", "bin", "--out", "v.bin"]));
    let bytes = fs::read(t.path().join("v.bin")).unwrap();
    let from_bin: Vec<u64> = bytes.chunks(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
    let from_text: Vec<u64> = text.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(from_bin, from_text);
    let json = ok(&gaplab(t.path(), &["generate", "--lambda", "2", "--p", "0.4", "--limit", "500", "--seed", "9", "--format", "json"]));
    assert_eq!(serde_json::from_str::<Vec<u64>>(&json).unwrap(), from_text);

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(t.path().join("generate_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outputs"][0]["bytes"], 8 * from_text.len() as u64);
    assert_eq!(manifest["config"]["seed"], 9);
}

#[test]
fn signs_mark_membership() {
    let t = TempDir::new().unwrap();
    let seq: Vec<u64> = ok(&gaplab(t.path(), &["generate", "--lambda", "3", "--p", "0.3", "--limit", "300", "--seed", "2"]))
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    let signs: Vec<i8> = ok(&gaplab(t.path(), &["signs", "--lambda", "3", "--p", "0.3", "--limit", "300", "--seed", "2"]))
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(signs.len(), 300);
    for (k, &a) in (1..=300u64).zip(&signs) {
        assert_eq!(a == 1, seq.contains(&k));
    }
}

#[test]
fn trace_on_odds_matches_closed_form() {
    let t = TempDir::new().unwrap();
    let bits = "4f1bbcdcbfa53e0aa5c7f4b2d6e3b7a1";
    write(
        t.path(),
        "odds.json",
        &format!(r#"{{"target":{{"lambda":2,"p":0}},"functions":[{{"cos":1}}],"limit":2000000,"x_bits":"{bits}"}}"#),
    );
    ok(&gaplab(t.path(), &["trace", "--config", "odds.json", "--out-dir", "out"]));
    let (header, rows, truncated) = csv_rows(&t.path().join("out/trace_f0.csv"));
    assert_eq!(header, ["N", "S_N", "ratio", "running_sup", "theoretical"]);
    assert!(!truncated);
    let last = rows.last().unwrap();
    assert_eq!(last[0], "1000000");
    let s: f64 = last[1].parse().unwrap();
    // odd multiples: sum_{k <= 2M} cos(2 pi k x) - sum_{k <= M} cos(2 pi k 2x)
    let x = UnitPoint::from_bits(u128::from_str_radix(bits, 16).unwrap());
    let oracle = cosine_sum_closed(2_000_000, x).value - cosine_sum_closed(1_000_000, x.times(2)).value;
    assert!((s - oracle).abs() < 1e-6, "{s} vs {oracle}");
}

#[test]
fn disc_on_centered_grid() {
    let t = TempDir::new().unwrap();
    let grid: String = (1..=64).map(|i| format!("{}\n", (2 * i - 1) as f64 / 128.0)).collect();
    write(t.path(), "grid.txt", &grid);
    ok(&gaplab(t.path(), &["disc", "--points", "grid.txt"]));
    let (header, rows, _) = csv_rows(&t.path().join("disc.csv"));
    assert_eq!(header, ["N", "d_star", "d_ext", "scaled", "theoretical"]);
    assert_eq!(rows[0][0], "64");
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 1.0 / 128.0);
    assert_eq!(rows[0][4], "");

    write(t.path(), "bad.txt", "0.5\n1.5\n");
    assert_eq!(gaplab(t.path(), &["disc", "--points", "bad.txt"]).status.code(), Some(2));
}

#[test]
fn disc_from_config() {
    let t = TempDir::new().unwrap();
    write(t.path(), "d.json", r#"{"target":{"disc":0.5},"limit":50000,"master_seed":3}"#);
    ok(&gaplab(t.path(), &["disc", "--config", "d.json"]));
    let (_, rows, truncated) = csv_rows(&t.path().join("disc.csv"));
    assert!(!truncated);
    for r in &rows {
        let (d_star, d_ext): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!(d_star <= d_ext && d_ext <= 2.0 * d_star);
        assert!((r[4].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn single_trajectory_ensemble_has_flat_quantiles() {
    let t = TempDir::new().unwrap();
    write(t.path(), "one.json", r#"{"target":{"lil":1},"functions":[{"cos":1},{"sin":2}],"limit":100000,"master_seed":8}"#);
    ok(&gaplab(t.path(), &["mc", "--config", "one.json"]));
    let (header, rows, _) = csv_rows(&t.path().join("mc_quantiles_f1.csv"));
    assert_eq!(header, ["N", "q05", "q25", "q50", "q75", "q95", "samples", "theoretical"]);
    for r in rows {
        assert!(r[1..6].iter().all(|q| q == &r[1]));
        assert_eq!(r[6], "1");
    }
}

const ENSEMBLE: &str = r#"{"target":{"lil":1.0},"functions":[{"cos":1},{"indicator":[0,0.5]},{"trig":{"cos":[0.5],"sin":[0,0.25]}}],
  "limit":300000,"checkpoints":{"geometric":1.3},"num_x":3,"num_seeds":2,"master_seed":42}"#;

fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| !p.to_string_lossy().ends_with("manifest.json"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_byte_identical() {
    let t = TempDir::new().unwrap();
    write(t.path(), "mc.json", ENSEMBLE);
    ok(&gaplab(t.path(), &["mc", "--config", "mc.json", "--out-dir", "a", "--threads", "1"]));
    ok(&gaplab(t.path(), &["mc", "--config", "mc.json", "--out-dir", "b", "--threads", "4"]));
    ok(&gaplab(t.path(), &["mc", "--config", "a/mc_manifest.json", "--out-dir", "c", "--threads", "2"]));
    let a = outputs(&t.path().join("a"));
    assert_eq!(a.len(), 4);
    assert_eq!(a, outputs(&t.path().join("b")));
    assert_eq!(a, outputs(&t.path().join("c")));

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(t.path().join("a/mc_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["target"]["lambda"], 3);
    assert_eq!(manifest["resolved"]["x_bits"].as_array().unwrap().len(), 3);
    for entry in manifest["outputs"].as_array().unwrap() {
        let name = entry["path"].as_str().unwrap();
        let bytes = &a.iter().find(|(n, _)| n == name).unwrap().1;
        assert_eq!(entry["bytes"], bytes.len() as u64);
    }

    ok(&gaplab(t.path(), &["mc", "--config", "mc.json", "--out-dir", "s", "--seed", "43"]));
    assert_ne!(a, outputs(&t.path().join("s")));
}

#[test]
fn numeric_columns_are_finite() {
    let t = TempDir::new().unwrap();
    write(t.path(), "mc.json", ENSEMBLE);
    ok(&gaplab(t.path(), &["mc", "--config", "mc.json"]));
    ok(&gaplab(t.path(), &["trace", "--config", "mc.json"]));
    ok(&gaplab(t.path(), &["disc", "--config", "mc.json"]));
    let mut checked = 0;
    for entry in fs::read_dir(t.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "csv") {
            let (header, rows, _) = csv_rows(&path);
            for r in rows {
                for (h, v) in header.iter().zip(&r) {
                    if h != "x_bits" && !v.is_empty() {
                        assert!(v.parse::<f64>().unwrap().is_finite(), "{}: {h} = {v}", path.display());
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn truncation_is_marked() {
    let t = TempDir::new().unwrap();
    write(t.path(), "short.json", r#"{"target":{"lambda":1,"p":0},"functions":[{"cos":1}],"limit":100,"checkpoints":[10,40,90]}"#);
    ok(&gaplab(t.path(), &["trace", "--config", "short.json"]));
    let (_, rows, truncated) = csv_rows(&t.path().join("trace_f0.csv"));
    assert!(truncated);
    assert_eq!(rows.len(), 2);
}

#[test]
fn error_exit_codes() {
    let t = TempDir::new().unwrap();
    write(t.path(), "bad.json", r#"{"target":{"lil":1},"functions":[{"cos":1},{"tan":1}],"limit":10}"#);
    let out = gaplab(t.path(), &["trace", "--config", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("functions[1]"));
    assert_eq!(gaplab(t.path(), &["trace", "--config", "missing.json"]).status.code(), Some(3));
    assert_eq!(gaplab(t.path(), &["generate", "--p", "2", "--limit", "10"]).status.code(), Some(2));
    assert_eq!(gaplab(t.path(), &["generate", "--p", "0.5", "--limit", "10", "--out", "no/such/dir/x"]).status.code(), Some(3));
    assert_eq!(gaplab(t.path(), &["trace", "--config", "bad.json", "--format", "bin"]).status.code(), Some(2));

    write(t.path(), "mc.json", ENSEMBLE);
    let capped = Command::new(env!("CARGO_BIN_EXE_gaplab"))
        .current_dir(t.path())
        .env("GAPLAB_MAX_ELEMENTS", "1000")
        .args(["mc", "--config", "mc.json"])
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("1800000"));
}
