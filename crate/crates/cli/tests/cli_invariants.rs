//! Round trips and exit-code behavior of the command-line surface, driven
//! in-process through the library entry point.

use linmonad::engine::CohTable;
use linmonad_cli::run;
use std::io::Write as _;

fn tmpfile(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f
}

#[test]
fn json_output_is_rerun_identical() {
    let args = [
        "linmonad", "--format", "json", "analyze", "--a", "2", "--b", "7", "--c", "1",
        "--variety", "Pn:4",
    ];
    let first = run(args);
    let second = run(args);
    assert_eq!(first.code, 0);
    assert_eq!(first.stdout, second.stdout);
    let v: serde_json::Value = serde_json::from_str(&first.stdout).unwrap();
    assert_eq!(v["rank"], 4);
    assert_eq!(v["c1"], 1);
}

#[test]
fn sampled_monad_feeds_the_section_count() {
    let sample = run([
        "linmonad", "lab", "sample", "--n", "3", "--a", "1", "--b", "4", "--c", "1",
        "--seed", "11",
    ]);
    assert_eq!(sample.code, 0, "stderr: {}", sample.stderr);
    let f = tmpfile(&sample.stdout);
    let path = f.path().to_str().unwrap().to_string();
    for (k, expect) in [("-1", 0i64), ("-2", 0)] {
        let out = run(["linmonad", "--format", "json", "lab", "h0", "--monad", &path, "--k", k]);
        assert_eq!(out.code, 0, "stderr: {}", out.stderr);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["h0"].as_i64().unwrap(), expect, "k={k}");
    }
}

#[test]
fn sampled_prime_field_monad_scans() {
    let sample = run([
        "linmonad", "lab", "sample", "--n", "3", "--a", "1", "--b", "4", "--c", "1",
        "--seed", "5", "--field", "fp:101",
    ]);
    assert_eq!(sample.code, 0, "stderr: {}", sample.stderr);
    let f = tmpfile(&sample.stdout);
    let path = f.path().to_str().unwrap().to_string();
    let scan = run([
        "linmonad", "--format", "json", "lab", "scan", "--monad", &path, "--q", "101",
        "--dims", "0,1",
    ]);
    assert_eq!(scan.code, 0, "stderr: {}", scan.stderr);
    let v: serde_json::Value = serde_json::from_str(&scan.stdout).unwrap();
    assert_eq!(v["p"].as_u64().unwrap(), 101);

    // A prime mismatch between the stored monad and --q is a user error.
    let out = run(["linmonad", "lab", "scan", "--monad", &path, "--q", "103"]);
    assert_eq!(out.code, 2);
}

#[test]
fn table_csv_round_trips() {
    let out = run([
        "linmonad", "--format", "csv", "table", "--a", "1", "--b", "4", "--c", "1",
        "--variety", "Pn:3", "--locally-free",
    ]);
    assert_eq!(out.code, 0, "stderr: {}", out.stderr);
    let parsed = CohTable::from_csv("E", 3, &out.stdout).unwrap();
    assert_eq!(parsed.to_csv(), out.stdout);
    assert!(parsed.get(1, -1).unwrap().is_exact());
}

#[test]
fn table_json_round_trips() {
    let out = run([
        "linmonad", "--format", "json", "table", "--a", "1", "--b", "5, ", "--c", "1",
        "--variety", "Pn:3",
    ]);
    assert_eq!(out.code, 2, "malformed numeric argument is a usage error");
    let out = run([
        "linmonad", "--format", "json", "table", "--a", "1", "--b", "5", "--c", "1",
        "--variety", "Pn:3",
    ]);
    assert_eq!(out.code, 0);
    let parsed = CohTable::from_json(&out.stdout).unwrap();
    assert_eq!(parsed.to_json(), out.stdout.trim_end());
}

#[test]
fn help_and_version_exit_clean() {
    for args in [vec!["linmonad", "--help"], vec!["linmonad", "--version"]] {
        let out = run(args);
        assert_eq!(out.code, 0);
        assert!(!out.stdout.is_empty());
    }
    let out = run(["linmonad", "--no-such-flag"]);
    assert_eq!(out.code, 2);
    let out = run(["linmonad", "table", "--a", "1", "--b", "4", "--c", "1",
        "--variety", "Pn:3", "--window", "4:-4"]);
    assert_eq!(out.code, 2, "inverted window is a usage error");
}

#[test]
fn empty_example_range_is_not_an_error() {
    let out = run(["linmonad", "paper-examples", "--min-n", "5", "--max-n", "4"]);
    assert_eq!(out.code, 0);
    let out = run(["linmonad", "paper-examples", "--min-n", "1", "--max-n", "3"]);
    assert_eq!(out.code, 2, "thresholds below the surface case are rejected");
}

#[test]
fn descriptor_file_matches_inline_flags() {
    let f = tmpfile(
        r#"{"shape": "M1", "a": 2, "b": 7, "c": 1,
            "variety": {"type": "Pn", "n": 4}, "locally_free": true}"#,
    );
    let path = f.path().to_str().unwrap().to_string();
    let from_file = run(["linmonad", "--format", "json", "stability", "--monad", &path]);
    let inline = run([
        "linmonad", "--format", "json", "stability", "--a", "2", "--b", "7", "--c", "1",
        "--variety", "Pn:4", "--locally-free",
    ]);
    assert_eq!(from_file.code, 0, "stderr: {}", from_file.stderr);
    assert_eq!(from_file.stdout, inline.stdout);
    let v: serde_json::Value = serde_json::from_str(&from_file.stdout).unwrap();
    assert_eq!(v["status"], "Stable");
}

#[test]
fn twisted_shape_undetermined_without_declared_degree() {
    let f = tmpfile(
        r#"{"shape": "M2.1", "a": 1, "b": 8, "c": 1,
            "variety": {"type": "Qn", "n": 3}, "locally_free": true}"#,
    );
    let path = f.path().to_str().unwrap().to_string();
    let bare = run(["linmonad", "--format", "json", "stability", "--monad", &path]);
    assert_eq!(bare.code, 0);
    let v: serde_json::Value = serde_json::from_str(&bare.stdout).unwrap();
    assert_eq!(v["status"], "Undetermined");
    let declared = run([
        "linmonad", "--format", "json", "stability", "--monad", &path, "--declared-c1", "0",
    ]);
    let v: serde_json::Value = serde_json::from_str(&declared.stdout).unwrap();
    assert_eq!(v["status"], "Semistable");
    assert!(v["assumptions"]
        .as_array()
        .unwrap()
        .iter()
        .any(|a| a.as_str().unwrap().contains("taken on trust")));
}

#[test]
fn dual_cokernel_command_reports_the_sample_bound() {
    let sample = run([
        "linmonad", "lab", "sample", "--n", "2", "--a", "4", "--b", "11", "--c", "0",
        "--seed", "3", "--field", "fp:10007",
    ]);
    assert_eq!(sample.code, 0, "stderr: {}", sample.stderr);
    let f = tmpfile(&sample.stdout);
    let path = f.path().to_str().unwrap().to_string();
    let out = run(["linmonad", "--format", "json", "lab", "dualcoker", "--monad", &path]);
    assert_eq!(out.code, 0, "stderr: {}", out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["h1_dual"].as_i64().unwrap(), 1, "generic value 4*3 - 11");
}
