use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn aisdw(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aisdw"))
        .current_dir(dir)
        .args(["--config", "aisdw.toml"])
        .args(args)
        .output()
        .expect("spawn aisdw")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = aisdw(dir, args);
    assert!(
        out.status.success(),
        "aisdw {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn workspace(points: usize) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("aisdw.toml"),
        format!("output_dir = \"out\"\n\n[input]\npaths = [\"data/fleet.csv\"]\n\n[fleet]\npoints = {points}\n"),
    )
    .unwrap();
    dir
}

fn files(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(
                    p.strip_prefix(root).unwrap().to_path_buf(),
                    fs::read(&p).unwrap(),
                );
            }
        }
    }
    out
}

#[test]
fn full_pipeline_on_a_small_fleet() {
    let dir = workspace(10_000);
    let d = dir.path();
    let gen = ok(d, &["generate", "--seed", "3", "--dirty", "37"]);
    assert!(gen.contains("wrote 10037 rows (37 corrupted)"), "{gen}");
    let csv = fs::read_to_string(d.join("data/fleet.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10_038);

    let ingest = ok(d, &["ingest"]);
    assert!(
        ingest.contains("ingested 10037 rows: 10000 accepted, 37 rejected"),
        "{ingest}"
    );
    let rejections = fs::read_to_string(d.join("out/ingest/rejections.csv")).unwrap();
    assert_eq!(rejections.lines().count(), 38);

    let run = ok(d, &["run"]);
    assert!(run.contains("divisions (Kd, budget 400)"), "{run}");
    assert!(run.contains("scale-up"), "{run}");

    let query = ok(
        d,
        &[
            "query",
            "--area",
            "-20000,-20000,20000,20000",
            "--resolution",
            "200",
        ],
    );
    let png = d.join(query.lines().next().unwrap());
    assert!(png.is_file(), "{query}");
    assert!(png.with_extension("asc").is_file());
    assert!(query.contains("size: 200 x 200 pixels"), "{query}");

    let out = d.join("out");
    for rel in [
        "effective-config.toml",
        "ingest/records.bin",
        "trajectories/trajectories.jsonl",
        "trajectories/simplified.jsonl",
        "cells/cell_facts_50.csv",
        "cells/cell_facts_5000.csv",
        "partition/divisions.csv",
        "partition/balance.json",
        "heatmaps/manifest.json",
        "heatmaps/tiles_t1_r50.bin",
        "heatmaps/tiles_t5_r5000.bin",
        "heatmaps/overview_t1_r1000.png",
        "bench/sweep.csv",
    ] {
        assert!(out.join(rel).is_file(), "missing {rel}");
    }
    let sweep = fs::read_to_string(out.join("bench/sweep.csv")).unwrap();
    // header + 3 areas x 3 spans x 4 resolutions
    assert_eq!(sweep.lines().count(), 37);
}

#[test]
fn rerunning_is_byte_identical_in_either_mode() {
    let dir = workspace(3_000);
    let d = dir.path();
    ok(d, &["generate", "--seed", "11", "--dirty", "5"]);
    ok(d, &["ingest"]);
    ok(d, &["run", "--workers", "4"]);
    let first = files(&d.join("out"));
    ok(d, &["--sequential", "ingest"]);
    ok(d, &["--sequential", "run", "--workers", "4"]);
    let second = files(&d.join("out"));
    assert_eq!(
        first.keys().collect::<Vec<_>>(),
        second.keys().collect::<Vec<_>>()
    );
    for (path, bytes) in &first {
        if path.ends_with("effective-config.toml") {
            // records the execution mode
            continue;
        }
        assert!(
            bytes == &second[path],
            "{} differs between runs",
            path.display()
        );
    }
}

#[test]
fn query_outside_the_domain_fails() {
    let dir = workspace(2_000);
    let d = dir.path();
    ok(d, &["generate"]);
    ok(d, &["ingest"]);
    ok(d, &["run"]);
    let out = aisdw(d, &["query", "--area", "500000,500000,600000,600000"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("outside the spatial domain"), "{err}");

    let out = aisdw(d, &["query", "--type", "42"]);
    assert!(!out.status.success());
    let out = aisdw(d, &["query", "--resolution", "300"]);
    assert!(!out.status.success());
}

#[test]
fn budget_of_one_keeps_the_whole_domain() {
    let dir = workspace(2_000);
    let d = dir.path();
    ok(d, &["generate"]);
    ok(d, &["ingest"]);
    ok(d, &["trajectories"]);
    ok(d, &["rollup"]);
    let s = ok(d, &["partition", "--budget", "1"]);
    assert!(s.starts_with("1 divisions"), "{s}");
    let text = fs::read_to_string(d.join("out/partition/divisions.csv")).unwrap();
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert_eq!(rows.len(), 1, "{text}");
    assert!(
        rows[0].starts_with("1,-100000,-100000,100000,100000,"),
        "{text}"
    );
}

#[test]
fn missing_inputs_name_the_stage_to_run() {
    let dir = workspace(1_000);
    let d = dir.path();
    let out = aisdw(d, &["partition"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("aisdw rollup"), "{err}");

    let out = aisdw(d, &["ingest"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("fleet.csv"), "{err}");
}

#[test]
fn printed_config_round_trips() {
    let dir = workspace(1_000);
    let d = dir.path();
    let printed = ok(d, &["config"]);
    assert!(printed.contains("points = 1000"), "{printed}");
    fs::write(d.join("aisdw.toml"), &printed).unwrap();
    assert_eq!(ok(d, &["config"]), printed);
}

#[test]
fn invalid_config_lists_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("aisdw.toml"),
        "domain = { x_min = 0.0, y_min = 0.0, x_max = 12345.0, y_max = 10000.0 }\ngranularities = [50, 75]\n",
    )
    .unwrap();
    let out = aisdw(d, &["config"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("12345"), "{err}");
    assert!(err.contains("75"), "{err}");
}
