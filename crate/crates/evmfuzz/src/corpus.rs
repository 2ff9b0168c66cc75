//! Corpus loading: one contract per subdirectory, carrying creation code,
//! ABI, optional constructor arguments, and an optional deploy endowment.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::abi::{parse_abi, ContractAbi};
use crate::word::{decode_hex, Wei, Word};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("no loadable contracts under {0}")]
    NoCorpus(PathBuf),
    #[error("cannot read corpus directory {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Everything needed to deploy and fuzz one contract.
#[derive(Debug, Clone)]
pub struct ContractArtifact {
    pub name: String,
    pub creation_code: Vec<u8>,
    pub abi: ContractAbi,
    pub constructor_args: Vec<u8>,
    pub endowment: Wei,
}

/// Loads every well-formed entry under `dir`. An entry is a subdirectory
/// with `contract.bin` (hex creation code) and `contract.abi` (JSON), plus
/// optional `contract.args` (hex) and `contract.meta` (decimal endowment in
/// wei). Malformed entries are skipped with a warning. Results are sorted
/// by name so downstream work is deterministic.
pub fn load_corpus(dir: &Path) -> Result<Vec<ContractArtifact>, CorpusError> {
    let entries = fs::read_dir(dir).map_err(|source| CorpusError::Io { path: dir.to_path_buf(), source })?;
    let mut artifacts = Vec::new();
    let mut subdirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    subdirs.sort();

    for subdir in subdirs {
        let name = subdir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        match load_entry(&subdir, &name) {
            Ok(artifact) => artifacts.push(artifact),
            Err(reason) => eprintln!("warning: skipping corpus entry `{name}`: {reason}"),
        }
    }

    if artifacts.is_empty() {
        return Err(CorpusError::NoCorpus(dir.to_path_buf()));
    }
    artifacts.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(artifacts)
}

fn load_entry(dir: &Path, name: &str) -> Result<ContractArtifact, String> {
    let bin_text = fs::read_to_string(dir.join("contract.bin"))
        .map_err(|e| format!("contract.bin: {e}"))?;
    let creation_code = decode_hex(&bin_text).map_err(|e| format!("contract.bin: {e}"))?;
    if creation_code.is_empty() {
        return Err("contract.bin: empty creation code".to_string());
    }

    let abi_text = fs::read_to_string(dir.join("contract.abi"))
        .map_err(|e| format!("contract.abi: {e}"))?;
    let abi = parse_abi(&abi_text).map_err(|e| format!("contract.abi: {e}"))?;

    let constructor_args = match fs::read_to_string(dir.join("contract.args")) {
        Ok(text) => decode_hex(&text).map_err(|e| format!("contract.args: {e}"))?,
        Err(_) => Vec::new(),
    };
    check_constructor_args(&abi, &constructor_args)?;

    let endowment = match fs::read_to_string(dir.join("contract.meta")) {
        Ok(text) => {
            let trimmed = text.trim();
            let wei: u128 = trimmed.parse().map_err(|e| format!("contract.meta: {e}"))?;
            Word::from(wei)
        }
        Err(_) => Word::zero(),
    };

    Ok(ContractArtifact {
        name: name.to_string(),
        creation_code,
        abi,
        constructor_args,
        endowment,
    })
}

/// Cheap consistency check: when the constructor takes only static types,
/// the encoded args must be exactly one word per head slot.
fn check_constructor_args(abi: &ContractAbi, args: &[u8]) -> Result<(), String> {
    if abi.constructor_inputs.is_empty() || args.is_empty() {
        return Ok(());
    }
    if abi.constructor_inputs.iter().any(|t| t.is_dynamic()) {
        return Ok(());
    }
    let expected = abi.constructor_inputs.len() * 32;
    if args.len() != expected {
        return Err(format!(
            "contract.args: expected {expected} bytes for {} static constructor inputs, got {}",
            abi.constructor_inputs.len(),
            args.len()
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_entry(dir: &Path, name: &str, bin: &str, abi: &str) {
        let sub = dir.join(name);
        fs::create_dir_all(&sub).unwrap();
        fs::write(sub.join("contract.bin"), bin).unwrap();
        fs::write(sub.join("contract.abi"), abi).unwrap();
    }

    #[test]
    fn loads_well_formed_entries() {
        let dir = tempfile::tempdir().unwrap();
        write_entry(dir.path(), "a", "0x600060005260206000f3", "[]");
        write_entry(dir.path(), "b", "00", "[]");
        write_entry(dir.path(), "c", "0X6000", "[]");
        let artifacts = load_corpus(dir.path()).unwrap();
        assert_eq!(artifacts.len(), 3);
        assert_eq!(artifacts[0].name, "a");
        assert_eq!(artifacts[1].creation_code, vec![0x00]);
    }

    #[test]
    fn skips_entry_missing_abi() {
        let dir = tempfile::tempdir().unwrap();
        write_entry(dir.path(), "good", "00", "[]");
        let bad = dir.path().join("bad");
        fs::create_dir_all(&bad).unwrap();
        fs::write(bad.join("contract.bin"), "00").unwrap();
        let artifacts = load_corpus(dir.path()).unwrap();
        assert_eq!(artifacts.len(), 1);
        assert_eq!(artifacts[0].name, "good");
    }

    #[test]
    fn hex_normalization() {
        let dir = tempfile::tempdir().unwrap();
        write_entry(dir.path(), "mixed", "  0xAbCd01  ", "[]");
        write_entry(dir.path(), "plain", "abcd01", "[]");
        let artifacts = load_corpus(dir.path()).unwrap();
        assert_eq!(artifacts[0].creation_code, artifacts[1].creation_code);
    }

    #[test]
    fn empty_directory_is_no_corpus() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_corpus(dir.path()), Err(CorpusError::NoCorpus(_))));
    }

    #[test]
    fn meta_and_args_parsed() {
        let dir = tempfile::tempdir().unwrap();
        write_entry(
            dir.path(),
            "rich",
            "00",
            r#"[{"type":"constructor","inputs":[{"type":"uint256"}]}]"#,
        );
        let sub = dir.path().join("rich");
        fs::write(sub.join("contract.meta"), "1000000000000\n").unwrap();
        fs::write(sub.join("contract.args"), format!("0x{}", "00".repeat(32))).unwrap();
        let artifacts = load_corpus(dir.path()).unwrap();
        assert_eq!(artifacts[0].endowment, Word::from(1_000_000_000_000u64));
        assert_eq!(artifacts[0].constructor_args.len(), 32);
    }

    #[test]
    fn bad_args_length_skips_entry() {
        let dir = tempfile::tempdir().unwrap();
        write_entry(
            dir.path(),
            "short",
            "00",
            r#"[{"type":"constructor","inputs":[{"type":"uint256"}]}]"#,
        );
        fs::write(dir.path().join("short").join("contract.args"), "0xabcd").unwrap();
        write_entry(dir.path(), "fine", "00", "[]");
        let artifacts = load_corpus(dir.path()).unwrap();
        assert_eq!(artifacts.len(), 1);
        assert_eq!(artifacts[0].name, "fine");
    }
}
