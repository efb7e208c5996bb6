//! Report envelopes and atomic output directories.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct Envelope<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub verb: &'a str,
    pub input_hash: String,
    pub config: &'a Value,
    pub result: Value,
}

/// SHA-256 over the canonical resolved config followed by the bytes of every
/// referenced input file.
pub fn input_hash(config: &Value, files: &[PathBuf]) -> Result<String, CliError> {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(config).expect("json values serialize"));
    for f in files {
        let bytes = fs::read(f).map_err(|e| CliError::Config(format!("cannot read {}: {e}", f.display())))?;
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    Ok(format!("sha256:{}", hex::encode(h.finalize())))
}

/// Files produced by one verb, in write order.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }
}

pub fn pretty(v: &impl Serialize) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("reports serialize");
    out.push(b'\n');
    out
}

fn out_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Output(format!("{}: {e}", path.display()))
}

/// Writes everything into a sibling temp directory and renames it into place.
/// An existing target is replaced only if it holds a previous report.
pub fn write_atomic(dir: &Path, artifacts: &Artifacts) -> Result<(), CliError> {
    if dir.exists() && !dir.join("report.json").is_file() && !is_empty_dir(dir) {
        return Err(CliError::Output(format!(
            "{} exists and does not look like a previous output directory",
            dir.display()
        )));
    }
    let parent = match dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(|e| out_err(&parent, e))?;
    let name = dir
        .file_name()
        .ok_or_else(|| CliError::Output(format!("{} has no directory name", dir.display())))?
        .to_string_lossy()
        .into_owned();
    let tmp = parent.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        if tmp.exists() {
            fs::remove_dir_all(&tmp).map_err(|e| out_err(&tmp, e))?;
        }
        fs::create_dir(&tmp).map_err(|e| out_err(&tmp, e))?;
        for (file, bytes) in &artifacts.files {
            let p = tmp.join(file);
            if let Some(sub) = p.parent() {
                fs::create_dir_all(sub).map_err(|e| out_err(sub, e))?;
            }
            fs::write(&p, bytes).map_err(|e| out_err(&p, e))?;
        }
        if dir.exists() {
            let old = parent.join(format!(".{name}.old-{}", std::process::id()));
            fs::rename(dir, &old).map_err(|e| out_err(dir, e))?;
            fs::rename(&tmp, dir).map_err(|e| out_err(dir, e))?;
            fs::remove_dir_all(&old).map_err(|e| out_err(&old, e))?;
        } else {
            fs::rename(&tmp, dir).map_err(|e| out_err(dir, e))?;
        }
        Ok(())
    })();
    if result.is_err() && tmp.exists() {
        let _ = fs::remove_dir_all(&tmp);
    }
    result
}

fn is_empty_dir(dir: &Path) -> bool {
    fs::read_dir(dir).map(|mut d| d.next().is_none()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_on_config_and_files() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("x.bin");
        fs::write(&f, b"abc").unwrap();
        let a = input_hash(&serde_json::json!({"p": 2.0}), &[]).unwrap();
        let b = input_hash(&serde_json::json!({"p": 3.0}), &[]).unwrap();
        let c = input_hash(&serde_json::json!({"p": 2.0}), &[f.clone()]).unwrap();
        assert!(a.starts_with("sha256:") && a.len() == 7 + 64);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, input_hash(&serde_json::json!({"p": 2.0}), &[]).unwrap());
    }

    #[test]
    fn atomic_replace() {
        let root = tempfile::tempdir().unwrap();
        let out = root.path().join("run");
        let mut a = Artifacts::default();
        a.add("report.json", b"1".to_vec());
        a.add("extra.csv", b"x".to_vec());
        write_atomic(&out, &a).unwrap();
        let mut b = Artifacts::default();
        b.add("report.json", b"2".to_vec());
        write_atomic(&out, &b).unwrap();
        assert_eq!(fs::read(out.join("report.json")).unwrap(), b"2");
        assert!(!out.join("extra.csv").exists());
        assert_eq!(fs::read_dir(root.path()).unwrap().count(), 1);

        let foreign = root.path().join("mine");
        fs::create_dir(&foreign).unwrap();
        fs::write(foreign.join("notes.txt"), b"keep").unwrap();
        assert!(write_atomic(&foreign, &b).is_err());
        assert!(foreign.join("notes.txt").exists());
    }
}
