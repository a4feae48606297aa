//! End-to-end runs of the binary: subcommand contracts, exit codes,
//! and the pinned output schema.

use std::process::{Command, Output};

fn meandim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meandim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn fixtures_lists_the_catalogue() {
    let out = meandim(&["fixtures"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["example33", "phi_a:<a>", "binary_power_shift", "cat_power:<trace>"] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn unknown_fixture_exits_2() {
    let out = meandim(&["estimate", "no_such_thing"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_violation_exits_3() {
    // example33 runs in floats; four blocks certify six iterates.
    let out = meandim(&["estimate", "example33", "--horizons", "2..9"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn estimate_constant_reports_zero() {
    let out = meandim(&["estimate", "constant"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["report"]["slope"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["report"]["infinite"].as_bool().unwrap(), false);
}

#[test]
fn estimate_json_schema_is_pinned() {
    // Golden field names: the consuming side diffs on these.
    let out = meandim(&["estimate", "constant"]);
    let doc = stdout_json(&out);
    let top: Vec<&str> = {
        let mut keys: Vec<&str> = doc.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        keys.sort_unstable();
        keys
    };
    assert_eq!(top, vec!["curve", "fixture_id", "manifest", "report", "table"]);
    let manifest: Vec<&str> = {
        let mut keys: Vec<&str> =
            doc["manifest"].as_object().unwrap().keys().map(|s| s.as_str()).collect();
        keys.sort_unstable();
        keys
    };
    assert_eq!(
        manifest,
        vec![
            "command",
            "fixtures",
            "grid_factor",
            "horizons",
            "ladder",
            "output_digests",
            "per_block_cap",
            "schema_version",
            "seed",
            "tool_version",
            "wall_ms",
            "window",
        ]
    );
    for key in ["lower", "upper", "infinite", "slope", "ratio_smallest_eps", "residual_rms", "notes"] {
        assert!(doc["report"].get(key).is_some(), "report lacks {key}");
    }
    // Counts are decimal strings.
    assert!(doc["table"]["cells"][0]["count"].is_string());
}

#[test]
fn estimate_csv_has_the_pinned_header() {
    let out = meandim(&["estimate", "constant", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("kind,n,eps,count,provenance\n"), "{text}");
    assert!(text.lines().nth(1).unwrap().starts_with("separated,"));
}

#[test]
fn estimate_writes_report_and_table_files() {
    let dir = std::env::temp_dir().join(format!("meandim-cli-test-{}", std::process::id()));
    let out = meandim(&["estimate", "constant", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let report = std::fs::read_to_string(dir.join("report.json")).unwrap();
    assert!(report.contains("\"manifest\""));
    let csv = std::fs::read_to_string(dir.join("counts.csv")).unwrap();
    assert!(csv.starts_with("# manifest "));
    assert!(csv.contains("kind,n,eps,count,provenance"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reruns_produce_identical_data_sections() {
    let a = meandim(&["estimate", "constant", "--format", "csv"]);
    let b = meandim(&["estimate", "constant", "--format", "csv"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn estimate_divergent_fixture_sets_the_flag() {
    let out = meandim(&["estimate", "binary_power_shift", "--ladder", "2^-2..2^-8"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["report"]["infinite"].as_bool().unwrap(), true);
}

#[test]
fn oracle_toral_fix_count() {
    let out = meandim(&["oracle", "cat_power:3", "fix", "--n", "2"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc[0]["value"].as_str().unwrap(), "5");
}

#[test]
fn oracle_block_cover_lower_bound() {
    let out = meandim(&["oracle", "phi_a:0.5", "cov", "--n", "2", "--k", "3"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc[0]["kind"].as_str().unwrap(), "lower");
    assert_eq!(doc[0]["value"].as_str().unwrap(), "729");
}

#[test]
fn oracle_shift_separated_count() {
    let out = meandim(&["oracle", "shift:interval", "sep", "--eps", "0.25", "--n", "3"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc[0]["value"].as_str().unwrap(), "125");
}

#[test]
fn check_box_bound_example33_passes() {
    let out = meandim(&["check", "box_bound", "example33"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["verdict"].as_str().unwrap(), "pass");
}

#[test]
fn check_nonwandering_damped_passes() {
    let out = meandim(&["check", "nonwandering", "damped:phi_a_0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn check_unknown_relation_exits_2() {
    let out = meandim(&["check", "no_relation", "constant"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_empty_grid_is_header_only() {
    let out = meandim(&["sweep", "phi_a", "--param", "a", "--values", ""]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# manifest "));
    assert_eq!(lines.next().unwrap(), "parameter,estimate");
    assert_eq!(lines.next(), None);
}

#[test]
fn estimate_block_family_recovers_the_parameter() {
    let out = meandim(&[
        "estimate",
        "phi_a:0.5",
        "--blocks",
        "5",
        "--horizons",
        "1..6",
        "--cap",
        "120000",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    let slope = doc["report"]["slope"].as_f64().unwrap();
    assert!((0.35..=0.65).contains(&slope), "slope {slope}");
}

#[test]
fn check_power_inequality_passes() {
    let out = meandim(&[
        "check",
        "power_inequality",
        "phi_a:0.5",
        "--p",
        "2",
        "--blocks",
        "4",
        "--cap",
        "60000",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_over_the_block_parameter() {
    let out = meandim(&["sweep", "phi_a", "--param", "a", "--values", "0.25,0.5,0.75", "--cap", "120000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(2)
        .map(|l| {
            let mut it = l.split(',');
            (it.next().unwrap().parse().unwrap(), it.next().unwrap().parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 3);
    // Estimates track the parameter and increase with it. The
    // separated-count estimator's fold losses grow with the parameter
    // (the analytic ladder flattens as 3^{1/a} shrinks), so the spread
    // widens at the top; the values below are deterministic.
    assert!((rows[0].1 - 0.25).abs() <= 0.15, "a=0.25 gave {}", rows[0].1);
    assert!((rows[1].1 - 0.5).abs() <= 0.15, "a=0.5 gave {}", rows[1].1);
    assert!(rows[2].1 > rows[1].1 && rows[1].1 > rows[0].1, "not increasing: {rows:?}");
    assert!((0.3..=0.6).contains(&rows[2].1), "a=0.75 gave {}", rows[2].1);
}

#[test]
fn sweep_ladder_depth_converges_to_half() {
    let out = meandim(&["sweep", "shift:kakeya_A", "--param", "ladder_depth", "--values", "3,4,5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let estimates: Vec<f64> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(estimates.len(), 3);
    for e in &estimates {
        assert!((e - 0.5).abs() < 0.05, "estimate {e}");
    }
    // Deeper ladders move toward 1/2.
    assert!((estimates[2] - 0.5).abs() <= (estimates[0] - 0.5).abs());
}
