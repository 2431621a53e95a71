use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct FileRef {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileRef {
    pub fn new(path: &Path, bytes: &[u8]) -> Self {
        FileRef {
            path: path.to_path_buf(),
            sha256: fingerprint(bytes),
        }
    }
}

/// Everything needed to reproduce one output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: Option<FileRef>,
    pub output: FileRef,
    /// Resolved configuration of the command.
    pub config: serde_json::Value,
}

pub fn fingerprint(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_os_string();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `bytes` to `output` plus its manifest, or to stdout when no path
/// is given.
pub fn emit(
    output: Option<&Path>,
    bytes: &[u8],
    command: &'static str,
    input: Option<FileRef>,
    config: serde_json::Value,
) -> Result<(), CliError> {
    let Some(path) = output else {
        std::io::stdout().write_all(bytes).map_err(|e| CliError::io("<stdout>", e))?;
        return Ok(());
    };
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))?;
    let manifest = RunManifest {
        tool: "benflow",
        version: env!("CARGO_PKG_VERSION"),
        command,
        input,
        output: FileRef::new(path, bytes),
        config,
    };
    let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    let mpath = manifest_path(path);
    fs::write(&mpath, json).map_err(|e| CliError::io(&mpath, e))?;
    log::info!("wrote {} and {}", path.display(), mpath.display());
    Ok(())
}
