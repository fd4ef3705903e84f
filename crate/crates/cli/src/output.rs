//! Atomic output files and their run manifests.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to reproduce one output file.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub cmd: String,
    pub flags: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub version: &'static str,
}

impl Manifest {
    pub fn new(
        cmd: &str,
        flags: &impl Serialize,
        seed: Option<u64>,
        inputs: &[&Path],
    ) -> Result<Self, CliError> {
        Ok(Self {
            cmd: cmd.to_string(),
            flags: serde_json::to_value(flags)?,
            seed,
            inputs: inputs.iter().map(|p| digest(p)).collect::<Result<_, _>>()?,
            version: env!("CARGO_PKG_VERSION"),
        })
    }
}

fn digest(path: &Path) -> Result<InputDigest, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Writes `bytes` to a temporary file beside `path`, then renames it into
/// place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let wrap = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(wrap)?;
    tmp.write_all(bytes).map_err(wrap)?;
    tmp.as_file().sync_all().map_err(wrap)?;
    tmp.persist(path).map_err(|e| wrap(e.error))?;
    Ok(())
}

pub fn to_json(value: &impl Serialize) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// A rendered output and the manifest that goes with it.
pub struct Artifact {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
    pub manifest: Vec<u8>,
}

impl Artifact {
    pub fn new(path: PathBuf, bytes: Vec<u8>, manifest: &Manifest) -> Result<Self, CliError> {
        Ok(Self {
            path,
            bytes,
            manifest: to_json(manifest)?,
        })
    }
}

/// Writes every artifact. Callers render all of them first, so a failed
/// computation never leaves files behind.
pub fn commit(artifacts: &[Artifact]) -> Result<(), CliError> {
    for a in artifacts {
        write_atomic(&a.path, &a.bytes)?;
        write_atomic(&manifest_path(&a.path), &a.manifest)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_sits_beside_output() {
        assert_eq!(
            manifest_path(Path::new("out/trace.csv")),
            PathBuf::from("out/trace.csv.manifest.json")
        );
        assert_eq!(
            manifest_path(Path::new("a.json")),
            PathBuf::from("a.json.manifest.json")
        );
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn digest_is_sha256() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("in.txt");
        std::fs::write(&p, b"abc").unwrap();
        assert_eq!(
            digest(&p).unwrap().sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
