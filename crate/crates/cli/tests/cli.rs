use assert_cmd::Command;
use std::fs;

use veronese_syzygy::harness::{cache_key, Cache, CacheEntry, Timings};
use veronese_syzygy::koszul::BettiTable;

fn veronese() -> Command {
    let mut cmd = Command::cargo_bin("veronese").unwrap();
    cmd.env_remove("VERONESE_CACHE_DIR");
    cmd
}

fn stdout_of(args: &[&str]) -> String {
    let out = veronese()
        .args(args)
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    String::from_utf8(out).unwrap()
}

/// Rows of a LaTeX tabular, or of rendered output, reduced to whitespace-separated tokens.
fn normalize(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| {
            l.replace("\\\\", " ")
                .replace('&', " ")
                .split_whitespace()
                .collect::<Vec<_>>()
                .join(" ")
        })
        .filter(|l| !l.is_empty())
        .collect()
}

const P112_D5_TEX: &str = r"
         & 0 & 1 & 2 & 3 & 4 & 5 & 6 & 7 & 8 & 9 & 10  \\
        0 & 1 & - & - & - & - & - & -& - & -& - & - \\
        1 & - & 43 & 222 & 558 & 840 & 798 & 468 & 147 & 8 & - & -  \\
        2 & - & 10 & 88 & 342 & 768 & 1092 & 1008 & 588 & 201 & 20 & 1 \\
        3 & - & - & - & - & - & -& -& -& -& 9 & 2
";

const P2_D3_TEX: &str = r"
         & 0 & 1 & 2 & 3 & 4 & 5 & 6 & 7  \\
        0 & 1 & - & - & - & - & - & -& - \\
        1 & - & 27 & 105 & 189 & 189 & 105 & 27 & -   \\
        2 & - & - & - & - & - & - & - & 1  \\
";

/// Row 5, column 4 reads 35 here; the reference layout prints 25, which
/// contradicts the Hilbert series (see the core golden tests).
const P113_D5_TEX: &str = r"
         & 0 & 1 & 2 & 3 & 4 & 5 & 6 & 7 & 8 & 9   \\
        0 & 1 & - & - & - & - & - & -& - & -& -  \\
        1 & - & 21 & 70 & 105 & 84 & 35 & 6 & - & - & -  \\
        2 & - & 14 & 84 & 210 & 280 & 210 & 84 & 14 & - & - \\
        3 & - & 9 & 63 & 189 & 315 & 315 & 189 & 63 & 9 & - \\
        4 & - & - & 14 & 84 & 210 & 280 & 210 & 84 & 14  & - \\
        5 & - & - & - & 6 & 35 & 84 & 105 & 70 & 21 & - \\
        6 & - & - & - & - & - & -& -& -& -& 1
";

#[test]
fn betti_m2_matches_reference_tables() {
    assert_eq!(
        normalize(&stdout_of(&["betti", "--weights", "1,1,2", "--d", "5"])),
        normalize(P112_D5_TEX)
    );
    assert_eq!(
        normalize(&stdout_of(&["betti", "--weights", "1,1,1", "--d", "3"])),
        normalize(P2_D3_TEX)
    );
    assert_eq!(
        normalize(&stdout_of(&["betti", "--weights", "1,1,3", "--d", "5"])),
        normalize(P113_D5_TEX)
    );
}

#[test]
fn betti_defaults_to_p112() {
    assert_eq!(
        stdout_of(&["betti", "--d", "5"]),
        stdout_of(&[
            "betti",
            "--weights",
            "1,1,2",
            "--d",
            "5",
            "--prime",
            "32003"
        ])
    );
}

#[test]
fn betti_output_is_identical_across_thread_counts() {
    for fmt in ["m2", "json", "csv"] {
        let one = stdout_of(&["betti", "--d", "6", "--format", fmt, "--threads", "1"]);
        let four = stdout_of(&["betti", "--d", "6", "--format", fmt, "--threads", "4"]);
        assert_eq!(one, four, "{fmt}");
    }
}

#[test]
fn betti_csv_lists_nonzero_entries() {
    let csv = stdout_of(&["betti", "--weights", "1,1,1", "--d", "3", "--format", "csv"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "i,t,q,beta");
    assert_eq!(lines[1], "0,0,0,1");
    assert!(lines.contains(&"1,2,1,27"));
    assert!(lines.contains(&"7,9,2,1"));
    assert_eq!(lines.len(), 9);
}

#[test]
fn betti_json_round_trips_through_the_cache_schema() {
    let text = stdout_of(&["betti", "--d", "5", "--format", "json"]);
    let table: BettiTable = serde_json::from_str(&text).unwrap();
    assert_eq!(table.get(9, 12), 9);
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path()).unwrap();
    cache
        .store(CacheEntry::new(&table, 1, Vec::new(), Timings::default()))
        .unwrap();
    let loaded = cache
        .load(&cache_key(&[1, 1, 2], 5, 32003))
        .unwrap()
        .unwrap();
    assert_eq!(loaded.table(), table);
}

#[test]
fn betti_over_the_cap_is_a_resource_error() {
    stderr_has(
        veronese()
            .args(["betti", "--d", "6", "--max-cell", "100"])
            .assert()
            .code(3),
        "strand at (i=",
    );
}

fn stderr_has(a: assert_cmd::assert::Assert, needle: &str) {
    let err = String::from_utf8_lossy(&a.get_output().stderr).into_owned();
    assert!(err.contains(needle), "{err}");
}

#[test]
fn betti_uses_cache_dir_from_env() {
    let dir = tempfile::tempdir().unwrap();
    let first = veronese()
        .env("VERONESE_CACHE_DIR", dir.path())
        .args(["betti", "--d", "4"])
        .assert()
        .success();
    let first = first.get_output().stdout.clone();
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    let second = veronese()
        .env("VERONESE_CACHE_DIR", dir.path())
        .args(["betti", "--d", "4"])
        .assert()
        .success();
    assert_eq!(second.get_output().stdout, first);
}

#[test]
fn predict_p112_d5() {
    let out = stdout_of(&["predict", "--n", "2", "--d", "5", "--format", "csv"]);
    assert_eq!(out, "q,f,b,warning\n1,1,8,true\n2,1,10,true\n3,9,10,true\n");
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&[
        "predict", "--n", "2", "--d", "5", "--format", "json",
    ]))
    .unwrap();
    assert_eq!(json["rows"][2]["f"], 9);
    assert_eq!(json["big_n"], 12);
}

#[test]
fn predict_small_d_warns() {
    stderr_has(
        veronese()
            .args(["predict", "--n", "2", "--d", "3"])
            .assert()
            .success(),
        "warning",
    );
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&[
        "predict", "--n", "2", "--d", "3", "--format", "json",
    ]))
    .unwrap();
    assert!(json["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["warning"] == true));
}

#[test]
fn predict_rejects_n_one() {
    veronese()
        .args(["predict", "--n", "1", "--d", "5"])
        .assert()
        .code(2);
    veronese()
        .args(["predict", "--n", "2", "--d", "0"])
        .assert()
        .code(2);
    veronese().args(["predict", "--n", "2"]).assert().code(2);
}

#[test]
fn certify_invalid_example() {
    let out = stdout_of(&["certify", "--n", "2", "--d", "3", "--monomial", "0,1,1"]);
    assert!(out.contains("{z6 = x1*y}"), "{out}");
    assert!(out.contains("{z4 = x0*x1^2}"), "{out}");
    assert!(out.contains("invalid"));
}

#[test]
fn certify_valid_block() {
    let out = stdout_of(&["certify", "--n", "2", "--d", "5", "--monomial", "2,0,4"]);
    assert!(out.contains("certifies row 2 columns [1, 8]"), "{out}");
}

#[test]
fn certify_row_prints_front_and_back() {
    let out = stdout_of(&["certify", "--n", "2", "--d", "5", "--row", "3"]);
    assert!(out.contains("front: m = "));
    assert!(out.contains("back: m = "));
    assert_eq!(out.matches("certifies row 3 columns [9, 10]").count(), 2);
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&[
        "certify", "--n", "2", "--d", "5", "--row", "1", "--json",
    ]))
    .unwrap();
    assert_eq!(json[0]["label"], "front");
    assert_eq!(json[1]["a_size"], 8);
}

#[test]
fn certify_errors() {
    veronese()
        .args(["certify", "--n", "2", "--d", "5", "--monomial", "1,0,0"])
        .assert()
        .code(2);
    veronese()
        .args(["certify", "--n", "2", "--d", "5", "--monomial", "1,x"])
        .assert()
        .code(2);
    veronese()
        .args(["certify", "--n", "2", "--d", "5", "--row", "9"])
        .assert()
        .code(2);
    veronese()
        .args(["certify", "--n", "2", "--d", "5"])
        .assert()
        .code(2);
}

#[test]
fn validate_p112_d5_passes() {
    let out = stdout_of(&["validate", "--d", "5"]);
    let r: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["hard_failures"].as_array().unwrap().len(), 0);
    for q in 1..=3 {
        assert_eq!(r["rows"][q]["sharp_left"], true);
        assert_eq!(r["rows"][q]["sharp_right"], true);
    }
}

#[test]
fn validate_p2_is_oracle_only() {
    let r: serde_json::Value =
        serde_json::from_str(&stdout_of(&["validate", "--weights", "1,1,1", "--d", "3"])).unwrap();
    assert_eq!(r["observed_pdim"], 7);
    assert!(r["n"].is_null());
}

#[test]
fn sweep_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{\"instances\": 3}").unwrap();
    veronese()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .assert()
        .code(2);
    veronese()
        .args(["sweep", "--config"])
        .arg(dir.path().join("missing.json"))
        .assert()
        .code(2);
}

#[test]
fn empty_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.json");
    fs::write(&cfg, "{\"instances\": []}").unwrap();
    let out = veronese()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let r: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(r["outcomes"].as_array().unwrap().len(), 0);
    assert_eq!(r["summary"]["instances"], 0);
}

#[test]
fn warm_sweep_is_identical_and_corruption_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cfg = dir.path().join("grid.json");
    fs::write(
        &cfg,
        r#"{"instances": [{"weights": [1,1,2], "d": 4}, {"weights": [1,1,2], "d": 5}], "primes": [32003, 101]}"#,
    )
    .unwrap();
    let run = || {
        veronese()
            .args(["sweep", "--config"])
            .arg(&cfg)
            .arg("--cache-dir")
            .arg(&cache)
            .assert()
            .success()
    };
    let cold = run().get_output().clone();
    let warm = run().get_output().clone();
    assert_eq!(cold.stdout, warm.stdout);
    assert!(String::from_utf8_lossy(&cold.stderr).contains("4 oracle runs, 0 cache hits"));
    assert!(String::from_utf8_lossy(&warm.stderr).contains("0 oracle runs, 4 cache hits"));

    let file = Cache::new(&cache)
        .unwrap()
        .path(&cache_key(&[1, 1, 2], 5, 101));
    let text = fs::read_to_string(&file).unwrap();
    fs::write(&file, text.replacen("\"pdim\": 10", "\"pdim\": 11", 1)).unwrap();
    stderr_has(
        veronese()
            .args(["sweep", "--config"])
            .arg(&cfg)
            .arg("--cache-dir")
            .arg(&cache)
            .assert()
            .code(3),
        "cache integrity",
    );
    veronese()
        .args(["betti", "--d", "5", "--prime", "101", "--cache-dir"])
        .arg(&cache)
        .assert()
        .code(3);
}

#[test]
fn default_sweep_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = veronese()
        .args(["sweep", "--cache-dir"])
        .arg(dir.path())
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let r: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(r["summary"]["instances"], 8);
    assert_eq!(r["summary"]["errors"], 0);
    assert_eq!(r["summary"]["hard_failures"], 0);
    assert_eq!(r["summary"]["unverified_cells"], 0);
    let start = std::time::Instant::now();
    let again = veronese()
        .args(["sweep", "--cache-dir"])
        .arg(dir.path())
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert_eq!(again, out);
}
