use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wbe"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn wbe(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr_json(out: &Output) -> Value {
    assert!(!out.status.success());
    let text = String::from_utf8_lossy(&out.stderr);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1, "stderr: {text}");
    serde_json::from_str(lines[0]).expect("stderr is one JSON object")
}

#[test]
fn run_writes_outputs_and_returns_home() {
    let dir = tempfile::tempdir().unwrap();
    let out = wbe(&[
        "run",
        s(&scenario("three_uav.json")),
        "--out-dir",
        s(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("trajectories.csv")).unwrap();
    let mut rows = csv.lines();
    assert_eq!(rows.next(), Some("t,agent_kind,agent_id,x,y,z,mode"));
    let last_t = csv
        .lines()
        .last()
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .to_string();
    let finals: Vec<Vec<&str>> = csv
        .lines()
        .filter(|l| l.starts_with(&format!("{last_t},uav,")))
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(finals.len(), 3);
    let starts = [("0", "0"), ("0", "19"), ("19", "19")];
    for (row, start) in finals.iter().zip(starts) {
        assert_eq!((row[3], row[4]), start);
        assert_eq!(row[6], "done");
    }
    let events = fs::read_to_string(dir.path().join("events.jsonl")).unwrap();
    for line in events.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert!(v["type"].is_string() && v["t"].is_number());
    }
    let result: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("result.json")).unwrap()).unwrap();
    assert_eq!(result["completed"], true);
    assert!(result.get("planning_time_s").is_none());
}

#[test]
fn timing_flag_adds_wall_clock() {
    let dir = tempfile::tempdir().unwrap();
    let out = wbe(&[
        "run",
        s(&scenario("three_uav.json")),
        "--out-dir",
        s(dir.path()),
        "--timing",
    ]);
    assert!(out.status.success());
    let result: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("result.json")).unwrap()).unwrap();
    assert_eq!(result["planning_time_s"].as_array().unwrap().len(), 3);
}

#[test]
fn malformed_json_reports_offset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\n  \"environment\": {\"width_m\": 20,,}\n}").unwrap();
    let err = stderr_json(&wbe(&["run", s(&path), "--out-dir", s(dir.path())]));
    assert_eq!(err["error"], "parse");
    // the second comma
    assert_eq!(err["offset"], 34);
    assert_eq!(err["line"], 2);
    assert!(err.get("key").is_none());
    assert!(err["file"].as_str().unwrap().ends_with("bad.json"));
}

#[test]
fn unknown_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("typo.json");
    let text = fs::read_to_string(scenario("three_uav.json"))
        .unwrap()
        .replacen("\"speed_mps\"", "\"sped_mps\"", 1);
    fs::write(&path, text).unwrap();
    let err = stderr_json(&wbe(&["run", s(&path)]));
    assert_eq!(err["error"], "parse");
    assert!(err["key"].as_str().unwrap().ends_with("sped_mps"), "{err}");
}

#[test]
fn validation_error_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("far.json");
    let mut cfg: Value =
        serde_json::from_str(&fs::read_to_string(scenario("three_uav.json")).unwrap()).unwrap();
    cfg["uavs"][1]["start"] = serde_json::json!([50.0, 1.0]);
    fs::write(&path, cfg.to_string()).unwrap();
    let err = stderr_json(&wbe(&["inspect", s(&path)]));
    assert_eq!(err["error"], "validation");
    assert_eq!(err["key"], "uavs[1].start");
}

#[test]
fn usage_errors_are_json() {
    let err = stderr_json(&wbe(&["frobnicate"]));
    assert_eq!(err["error"], "usage");
    let err = stderr_json(&wbe(&["run", "x.json", "--strategy", "greedy"]));
    assert_eq!(err["error"], "usage");
    let err = stderr_json(&wbe(&["run", "/nonexistent/x.json"]));
    assert_eq!(err["error"], "io");
}

fn write_batch(dir: &Path, n_runs: usize) -> PathBuf {
    let path = dir.join("batch.json");
    let text = serde_json::json!({
        "base_scenario_path": s(&scenario("desk_montecarlo.json")),
        "n_runs": n_runs,
        "master_seed": 5,
        "randomize": {"survivor_position": true, "survivor_heading": true, "observer_positions": true},
    });
    fs::write(&path, text.to_string()).unwrap();
    path
}

#[test]
fn batch_writes_one_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let batch = write_batch(dir.path(), 2);
    let out_dir = dir.path().join("out");
    let out = wbe(&["batch", s(&batch), "--out-dir", s(&out_dir)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let runs = fs::read_to_string(out_dir.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 3);
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["n_runs"], 2);
    assert!(!out_dir.join("comparison.json").exists());
}

#[test]
fn paired_batch_reports_ratio_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let batch = write_batch(dir.path(), 6);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let r = wbe(&["batch", s(&batch), "--paired", "--out-dir", s(out)]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    let cmp: Value =
        serde_json::from_str(&fs::read_to_string(a.join("comparison.json")).unwrap()).unwrap();
    assert!(cmp.get("ratio_of_medians").is_some());
    assert_eq!(cmp["pairs"].as_array().unwrap().len(), 6);
    for f in [
        "runs.csv",
        "summary.json",
        "comparison.json",
        "comparison.txt",
    ] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let runs = fs::read_to_string(a.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 13);
}

#[test]
fn batch_with_inline_scenario_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let base: Value =
        serde_json::from_str(&fs::read_to_string(scenario("three_uav.json")).unwrap()).unwrap();
    let path = dir.path().join("inline.json");
    fs::write(
        &path,
        serde_json::json!({"base_scenario": base, "n_runs": 1, "strategy": "lawnmower"})
            .to_string(),
    )
    .unwrap();
    let out = wbe(&[
        "batch",
        s(&path),
        "--seed",
        "77",
        "--out-dir",
        s(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["master_seed"], 77);
    assert_eq!(summary["strategy"], "lawnmower");

    fs::write(&path, serde_json::json!({"n_runs": 1}).to_string()).unwrap();
    let err = stderr_json(&wbe(&["batch", s(&path)]));
    assert_eq!(err["key"], "base_scenario");
}

fn three_by_three(dir: &Path) -> PathBuf {
    let path = dir.join("tiny.json");
    fs::write(
        &path,
        r#"{
            "environment": {"width_m": 3, "height_m": 3, "cell_size_m": 1},
            "uavs": [{"start": [0, 0]}],
            "survivors": [{"position": [1.5, 1.5], "heading": "E"}]
        }"#,
    )
    .unwrap();
    path
}

fn fill_of_cells(svg: &str) -> Vec<(String, String)> {
    svg.lines()
        .filter(|l| l.contains("class=\"cell\""))
        .map(|l| {
            let fill = l
                .split("fill=\"")
                .nth(1)
                .unwrap()
                .split('"')
                .next()
                .unwrap();
            let title = l
                .split("<title>")
                .nth(1)
                .unwrap_or("")
                .split('<')
                .next()
                .unwrap();
            (fill.to_string(), title.to_string())
        })
        .collect()
}

#[test]
fn weights_dump_and_heatmap() {
    let dir = tempfile::tempdir().unwrap();
    let tiny = three_by_three(dir.path());
    let out = wbe(&["weights-dump", s(&tiny)]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "2,2,4\n1,5,4\n3,3,4\n"
    );

    let csv = dir.path().join("w.csv");
    assert!(wbe(&["weights-dump", s(&tiny), "--output", s(&csv)])
        .status
        .success());
    let svg_path = dir.path().join("w.svg");
    let out = wbe(&[
        "plot",
        "weight_heatmap",
        "--input",
        s(&csv),
        "--output",
        s(&svg_path),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let svg = fs::read_to_string(&svg_path).unwrap();
    let cells = fill_of_cells(&svg);
    assert_eq!(cells.len(), 9);
    // darkest = lowest channel sum
    let darkness = |hex: &str| {
        let v = u32::from_str_radix(&hex[1..], 16).unwrap();
        (v >> 16) + ((v >> 8) & 0xff) + (v & 0xff)
    };
    let darkest = cells.iter().min_by_key(|(f, _)| darkness(f)).unwrap();
    assert_eq!(darkest.1, "(1, 1): 5");
    assert!(!svg.contains("href"));
}

#[test]
fn weights_dump_at_explicit_report() {
    let out = wbe(&[
        "weights-dump",
        s(&scenario("three_uav.json")),
        "--at",
        "9.5,9.5",
        "--heading",
        "E",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 20);
    assert_eq!(
        text.lines().nth(9).unwrap().split(',').nth(9),
        Some("11111")
    );
}

#[test]
fn partition_dump_and_map_have_five_regions() {
    let dir = tempfile::tempdir().unwrap();
    let five = scenario("five_uav.json");
    let csv = dir.path().join("p.csv");
    assert!(wbe(&["partition-dump", s(&five), "--output", s(&csv)])
        .status
        .success());
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 20);
    let svg_path = dir.path().join("p.svg");
    let out = wbe(&[
        "plot",
        "partition_map",
        "--input",
        s(&csv),
        "--scenario",
        s(&five),
        "--output",
        s(&svg_path),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let svg = fs::read_to_string(&svg_path).unwrap();
    let fills: std::collections::BTreeSet<String> =
        fill_of_cells(&svg).into_iter().map(|(f, _)| f).collect();
    assert_eq!(fills.len(), 5);
    assert_eq!(svg.matches("class=\"seed\"").count(), 5);
}

#[test]
fn trajectory_plots() {
    let dir = tempfile::tempdir().unwrap();
    assert!(wbe(&[
        "run",
        s(&scenario("three_uav.json")),
        "--out-dir",
        s(dir.path())
    ])
    .status
    .success());
    let csv = dir.path().join("trajectories.csv");
    for kind in ["trajectory3d", "trajectory_xy", "position_vs_time"] {
        let svg_path = dir.path().join(format!("{kind}.svg"));
        let out = wbe(&[
            "plot",
            kind,
            "--input",
            s(&csv),
            "--output",
            s(&svg_path),
            "--width",
            "640",
            "--height",
            "480",
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let svg = fs::read_to_string(&svg_path).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("width=\"640\""));
        assert!(svg.matches("class=\"track\"").count() >= 6);
    }
}

#[test]
fn plot_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let out_svg = dir.path().join("x.svg");
    let err = stderr_json(&wbe(&[
        "plot",
        "trajectory_xy",
        "--input",
        s(&empty),
        "--output",
        s(&out_svg),
    ]));
    assert_eq!(err["error"], "input");
    assert!(!out_svg.exists());

    let partial = dir.path().join("partial.csv");
    fs::write(
        &partial,
        "t,agent_kind,agent_id,x,y,mode\n0,uav,0,1,1,lawnmower\n",
    )
    .unwrap();
    let err = stderr_json(&wbe(&[
        "plot",
        "trajectory3d",
        "--input",
        s(&partial),
        "--output",
        s(&out_svg),
    ]));
    assert_eq!(err["key"], "z");
    assert!(err["message"].as_str().unwrap().contains("`z`"));
}

#[test]
fn inspect_reports_derived_quantities() {
    let out = wbe(&["inspect", s(&scenario("five_uav.json"))]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let sizes = text
        .lines()
        .find(|l| l.starts_with("partition sizes:"))
        .unwrap();
    assert!(sizes.ends_with("(total 400)"), "{sizes}");
    assert!(text.contains("footprint side 4.0 m"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("center.json");
    fs::write(
        &path,
        r#"{
            "environment": {"width_m": 20, "height_m": 20, "cell_size_m": 1},
            "uavs": [{"start": [0, 0]}],
            "survivors": [{"position": [9.5, 9.5], "heading": "N"}]
        }"#,
    )
    .unwrap();
    let text = String::from_utf8(wbe(&["inspect", s(&path)]).stdout).unwrap();
    assert!(
        text.contains("horizon n=10, weights w1=1111 w2=111 w3=11 w4=1 w5=11111"),
        "{text}"
    );
}
