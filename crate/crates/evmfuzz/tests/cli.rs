//! The command-line surface: subcommands, exit codes, and report files.
//! Exit codes: 0 = ran clean, 1 = verdicts found, 2 = usage/config error.

use std::fs;
use std::path::Path;
use std::process::Command;

fn evmfuzz() -> Command {
    Command::new(env!("CARGO_BIN_EXE_evmfuzz"))
}

fn write_fixture_corpus(dir: &Path) {
    let status = evmfuzz()
        .args(["fixtures", "--out"])
        .arg(dir)
        .status()
        .expect("run fixtures subcommand");
    assert!(status.success());
}

#[test]
fn fuzz_on_vulnerable_corpus_exits_1_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture_corpus(dir.path());
    let report_path = dir.path().join("report.json");

    let output = evmfuzz()
        .args(["fuzz", "--seed", "42", "--max-calls", "120", "--corpus"])
        .arg(dir.path())
        .arg("--out")
        .arg(&report_path)
        .output()
        .expect("run fuzz");
    assert_eq!(output.status.code(), Some(1), "verdicts found must exit 1");

    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("reentrancy"), "summary table lists oracle rows");

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["campaign"]["seed"], 42);
    assert!(report["totals"]["reentrancy"].as_u64().unwrap() >= 1);
}

#[test]
fn fuzz_on_benign_corpus_exits_0() {
    let full = tempfile::tempdir().unwrap();
    write_fixture_corpus(full.path());
    // Keep only benign entries.
    let benign = tempfile::tempdir().unwrap();
    for name in ["token", "pure_math", "benign_bank"] {
        let src = full.path().join(name);
        let dst = benign.path().join(name);
        fs::create_dir_all(&dst).unwrap();
        for file in ["contract.bin", "contract.abi"] {
            fs::copy(src.join(file), dst.join(file)).unwrap();
        }
    }

    let status = evmfuzz()
        .args(["fuzz", "--corpus"])
        .arg(benign.path())
        .status()
        .expect("run fuzz");
    assert_eq!(status.code(), Some(0));
}

#[test]
fn unknown_oracle_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let status = evmfuzz()
        .args(["fuzz", "--oracles", "bogus", "--corpus"])
        .arg(dir.path())
        .status()
        .expect("run fuzz");
    assert_eq!(status.code(), Some(2));
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let status = evmfuzz().status().expect("run bare");
    assert_eq!(status.code(), Some(2));
}

#[test]
fn asm_subcommand_assembles_files() {
    let dir = tempfile::tempdir().unwrap();
    let source = dir.path().join("prog.asm");
    let out = dir.path().join("prog.bin");
    fs::write(&source, "PUSH1 1\nPUSH1 2\nADD\nSTOP\n").unwrap();

    let status = evmfuzz().arg("asm").arg(&source).arg("-o").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap(), "600160020100");

    // Bad source is a usage/config error.
    fs::write(&source, "BOGUS\n").unwrap();
    let status = evmfuzz().arg("asm").arg(&source).arg("-o").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn asm_wrap_produces_deployable_creation_code() {
    let dir = tempfile::tempdir().unwrap();
    let source = dir.path().join("prog.asm");
    let out = dir.path().join("prog.bin");
    fs::write(&source, "STOP\n").unwrap();
    let status =
        evmfuzz().arg("asm").arg(&source).arg("-o").arg(&out).arg("--wrap").status().unwrap();
    assert_eq!(status.code(), Some(0));
    let hex_text = fs::read_to_string(&out).unwrap();
    assert!(hex_text.ends_with("00"));
    assert!(hex_text.len() > 2, "wrapped code carries the creation stub");
}

#[test]
fn analyze_writes_selector_report() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture_corpus(dir.path());
    let out = dir.path().join("analysis.json");

    let status = evmfuzz()
        .args(["analyze", "--corpus"])
        .arg(dir.path())
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let analysis: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(analysis["schema"], 1);
    assert!(analysis["selector_index"].get("0xa9059cbb").is_some());
}

#[test]
fn identical_invocations_write_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture_corpus(dir.path());
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    for out in [&out_a, &out_b] {
        let status = evmfuzz()
            .args(["fuzz", "--seed", "7", "--max-calls", "60", "--corpus"])
            .arg(dir.path())
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(1));
    }
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
}

#[test]
fn config_file_overrides_gas_schedule() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture_corpus(dir.path());
    let config_path = dir.path().join("config.json");
    fs::write(
        &config_path,
        r#"{"gas": {"sload": 300}, "reentry_limit": 3, "gas_budget": 2000000,
            "value_divisor": 8, "attack_modes": ["reentrant", "expensive-fallback"]}"#,
    )
    .unwrap();

    let status = evmfuzz()
        .args(["fuzz", "--max-calls", "40", "--corpus"])
        .arg(dir.path())
        .arg("--config")
        .arg(&config_path)
        .status()
        .unwrap();
    // Still finds verdicts with the overridden schedule.
    assert_eq!(status.code(), Some(1));
}
