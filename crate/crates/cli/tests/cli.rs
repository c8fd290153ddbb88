//! End-to-end checks of the binary: exit codes, config validation and the
//! byte-level determinism of `case run-all`.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_campanato"))
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    entries.sort();
    entries
}

#[test]
fn unknown_case_exits_2() {
    let out = bin()
        .args(["case", "run", "no-such-case"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_exits_2_and_names_the_key() {
    let dir = std::env::temp_dir().join("campanato-cli-badcfg");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.json");
    fs::write(
        &cfg,
        r#"{"metric": {"dimension": 2, "gamma": 0.5}, "surprise": 1}"#,
    )
    .unwrap();
    let out = bin()
        .args(["seminorm", "estimate", "-c"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("surprise"), "stderr: {stderr}");
}

#[test]
fn missing_section_exits_2() {
    let dir = std::env::temp_dir().join("campanato-cli-missing");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("nodomain.json");
    fs::write(&cfg, r#"{"metric": {"dimension": 2, "gamma": 0.5}}"#).unwrap();
    let out = bin()
        .args(["domain", "check-a", "-c"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("domain"), "stderr: {stderr}");
}

#[test]
fn run_all_twice_is_byte_identical() {
    let base = std::env::temp_dir().join("campanato-cli-determinism");
    let _ = fs::remove_dir_all(&base);
    let out_a = base.join("a");
    let out_b = base.join("b");
    for out in [&out_a, &out_b] {
        let status = bin()
            .args(["case", "run-all", "--seed", "42", "--out"])
            .arg(out)
            .env("CAMPANATO_THREADS", "2")
            .status()
            .unwrap();
        assert!(status.success(), "run-all failed");
    }
    let a = read_dir_sorted(&out_a);
    let b = read_dir_sorted(&out_b);
    assert_eq!(a.len(), b.len());
    for ((name_a, bytes_a), (name_b, bytes_b)) in a.iter().zip(b.iter()) {
        assert_eq!(name_a, name_b);
        assert_eq!(bytes_a, bytes_b, "file {name_a} differs between runs");
    }
    // The summary merges into a CSV.
    let status = bin()
        .args(["report", "merge"])
        .arg(&out_a)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out_a.join("summary.csv")).unwrap();
    assert!(csv.starts_with("caseId,verdict,metric,value\n"));
    assert!(csv.contains("seminorm-sandwich"));
}

#[test]
fn mcshane_subcommand_profiles() {
    let dir = std::env::temp_dir().join("campanato-cli-mcshane");
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("mcshane.json");
    fs::write(
        &cfg,
        r#"{
            "metric": {"dimension": 2, "gamma": 0.5},
            "mcshane": {
                "phi": {"name": "power_cusp", "coeff": 1.0, "exponent": 0.5},
                "window": [[-1.0, 1.0]],
                "gamma": 0.5,
                "lip": 1.0
            }
        }"#,
    )
    .unwrap();
    let out_dir = dir.join("out");
    let out = bin()
        .args(["extend", "mcshane", "-c"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("mcshane.json").exists());
    assert!(out_dir.join("mcshane.profile.csv").exists());
}
