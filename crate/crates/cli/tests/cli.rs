//! End-to-end checks of the CLI surface: subcommands, exit codes, file
//! formats and cross-run determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_strichartz"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("strichartz_cli_{tag}_{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

/// CSV rows with the walltime column dropped (the one field allowed to
/// differ between identical runs).
fn stable_rows(path: &Path) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .map(|l| {
            let mut cols: Vec<&str> = l.split(',').collect();
            cols.pop(); // walltime_s is last
            cols.join(",")
        })
        .collect()
}

#[test]
fn e5_reruns_are_byte_identical_modulo_walltime() {
    let (a, b) = (tmp_dir("e5a"), tmp_dir("e5b"));
    for out in [&a, &b] {
        let status = bin()
            .args(["--seed", "7", "--out", out.to_str().unwrap(), "e5-sobolev"])
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(
        stable_rows(&a.join("e5_records.csv")),
        stable_rows(&b.join("e5_records.csv"))
    );
    assert_eq!(
        fs::read_to_string(a.join("e5_summary.csv")).unwrap(),
        fs::read_to_string(b.join("e5_summary.csv")).unwrap()
    );
}

#[test]
fn e4_slope_table_contains_the_quarter_entry() {
    let out = tmp_dir("e4");
    let status = bin()
        .args(["--seed", "42", "--out", out.to_str().unwrap(), "e4-optimality"])
        .status()
        .unwrap();
    assert!(status.success());
    let summary = fs::read_to_string(out.join("e4_summary.csv")).unwrap();
    let row = summary
        .lines()
        .find(|l| l.starts_with("e4_p4_q4_s0,"))
        .expect("series e4_p4_q4_s0 missing from the summary");
    let slope: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!(
        (slope - 0.25).abs() <= 0.03,
        "sharpness slope {slope} is off 0.25"
    );
}

#[test]
fn csv_and_json_emissions_carry_identical_values() {
    let (a, b) = (tmp_dir("fmt_csv"), tmp_dir("fmt_json"));
    let status = bin()
        .args(["--seed", "9", "--out", a.to_str().unwrap(), "--format", "csv", "e5-sobolev"])
        .status()
        .unwrap();
    assert!(status.success());
    let status = bin()
        .args(["--seed", "9", "--out", b.to_str().unwrap(), "--format", "json", "e5-sobolev"])
        .status()
        .unwrap();
    assert!(status.success());

    let csv_text = fs::read_to_string(a.join("e5_records.csv")).unwrap();
    let mut csv_values: Vec<(String, f64)> = csv_text
        .lines()
        .skip(1)
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            // (q, s, lambda) key and the measured value
            (
                format!("{}|{}|{}", cols[2], cols[3], cols[5]),
                cols[8].parse().unwrap(),
            )
        })
        .collect();
    let json_text = fs::read_to_string(b.join("e5_records.json")).unwrap();
    let rows: serde_json::Value = serde_json::from_str(&json_text).unwrap();
    let mut json_values: Vec<(String, f64)> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            (
                format!(
                    "{}|{}|{}",
                    r["q"].as_f64().unwrap(),
                    r["s"].as_f64().unwrap(),
                    r["lambda"].as_f64().unwrap()
                ),
                r["value"].as_f64().unwrap(),
            )
        })
        .collect();
    csv_values.sort_by(|x, y| x.0.cmp(&y.0));
    json_values.sort_by(|x, y| x.0.cmp(&y.0));
    assert_eq!(csv_values.len(), json_values.len());
    for ((ka, va), (kb, vb)) in csv_values.iter().zip(&json_values) {
        assert_eq!(ka, kb);
        assert_eq!(va.to_bits(), vb.to_bits(), "value mismatch at {ka}");
    }
}

#[test]
fn unknown_flag_exits_one_with_usage() {
    let out = bin().arg("--nonsense").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("Usage") || text.contains("usage"), "{text}");
}

#[test]
fn unknown_subcommand_exits_one() {
    let out = bin().arg("e9-made-up").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_three_without_partial_files() {
    // a path under a regular file can never become a directory
    let blocker = std::env::temp_dir().join(format!("strichartz_blocker_{}", std::process::id()));
    fs::write(&blocker, b"").unwrap();
    let out_path = blocker.join("results");
    let out = bin()
        .args(["--out", out_path.to_str().unwrap(), "e5-sobolev"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(!out_path.exists(), "partial output directory was created");
    let _ = fs::remove_file(&blocker);
}

#[test]
fn bad_config_exits_one() {
    let dir = tmp_dir("badcfg");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.toml");
    fs::write(&cfg, "draws = \"many\"\n").unwrap();
    let out = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.join("o").to_str().unwrap(),
            "e5-sobolev",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn non_admissible_pair_is_rejected_with_the_violated_condition() {
    let dir = tmp_dir("pairgate");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("pair.toml");
    // 1/4 + 1/5 ≠ 1/2
    fs::write(
        &cfg,
        "pairs = [[4.0, 5.0]]\nn_list = [4]\ns_values = [0.25]\ndraws = 2\nrestarts = 1\nmax_iter = 5\n",
    )
    .unwrap();
    let out = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.join("o").to_str().unwrap(),
            "e1-strichartz",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("1/p + 1/q"), "stderr: {text}");
}

#[test]
fn thread_count_does_not_change_values() {
    let dir = tmp_dir("threads");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("tiny.toml");
    fs::write(
        &cfg,
        "n_list = [6]\ns_values = [0.25]\ndraws = 6\nrestarts = 2\nmax_iter = 40\n",
    )
    .unwrap();
    let run = |threads: &str, tag: &str| -> Vec<String> {
        let out = dir.join(tag);
        let status = bin()
            .args([
                "--config",
                cfg.to_str().unwrap(),
                "--seed",
                "11",
                "--threads",
                threads,
                "--out",
                out.to_str().unwrap(),
                "e1-strichartz",
            ])
            .status()
            .unwrap();
        assert!(status.success());
        stable_rows(&out.join("e1_records.csv"))
    };
    assert_eq!(run("1", "t1"), run("2", "t2"));
}

#[test]
fn evolve_and_kernel_dumps_parse() {
    let dir = tmp_dir("dumps");
    let status = bin()
        .args([
            "--out",
            dir.to_str().unwrap(),
            "--seed",
            "3",
            "evolve",
            "--n",
            "4",
            "--t",
            "0.25",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(dir.join("evolve.csv")).unwrap();
    assert!(text.starts_with("m,n,re_in,im_in,re_out,im_out"));
    assert_eq!(text.lines().count(), 1 + 9 * 9);
    // unitarity visible in the dump: |out| == |in| per mode
    for line in text.lines().skip(1) {
        let c: Vec<f64> = line.split(',').skip(2).map(|v| v.parse().unwrap()).collect();
        let (rin, rout) = ((c[0].powi(2) + c[1].powi(2)), (c[2].powi(2) + c[3].powi(2)));
        assert!((rin - rout).abs() <= 1e-12 * rin.max(1e-30));
    }

    let status = bin()
        .args([
            "--out",
            dir.to_str().unwrap(),
            "kernel",
            "--h",
            "0.25",
            "--t",
            "0.1",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(dir.join("kernel.csv")).unwrap();
    assert!(text.starts_with("z,re,im,abs"));
    assert!(text.lines().count() > 10);
}
