use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::commands::Command;
use crate::error::{param, CliError};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Platform {
    pub os: String,
    pub arch: String,
    pub family: String,
    pub pointer_width: u32,
    pub endian: String,
    pub parallel: bool,
}

impl Platform {
    pub fn current() -> Self {
        Self {
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            family: std::env::consts::FAMILY.into(),
            pointer_width: usize::BITS,
            endian: if cfg!(target_endian = "little") {
                "little"
            } else {
                "big"
            }
            .into(),
            parallel: cfg!(feature = "parallel"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

/// Everything needed to rerun a subcommand and check that the rerun saw
/// the same inputs.
///
/// The digest covers the tool, platform, subcommand, parameters and input
/// hashes. It leaves out where the outputs went, so a replay into another
/// directory writes identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub platform: Platform,
    pub subcommand: String,
    pub params: Value,
    pub inputs: Vec<InputFile>,
    /// Run directory as requested, relative to the output root.
    pub run_dir: PathBuf,
    pub outputs: Vec<String>,
    pub digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn hash_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path.display(), e))?;
    Ok(sha256_hex(&bytes))
}

impl RunManifest {
    pub fn new(command: &Command, run_dir: PathBuf) -> Result<Self, CliError> {
        let (subcommand, params) = command.to_parts();
        let inputs = command
            .inputs()
            .into_iter()
            .map(|path| {
                Ok(InputFile {
                    sha256: hash_file(&path)?,
                    path,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let mut m = Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            platform: Platform::current(),
            subcommand,
            params,
            inputs,
            run_dir,
            outputs: Vec::new(),
            digest: String::new(),
        };
        m.digest = m.compute_digest();
        Ok(m)
    }

    pub fn compute_digest(&self) -> String {
        let covered = json!({
            "tool": self.tool,
            "version": self.version,
            "platform": self.platform,
            "subcommand": self.subcommand,
            "params": self.params,
            "inputs": self.inputs,
        });
        sha256_hex(&serde_json::to_vec(&covered).expect("manifest values serialize"))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
        let m: Self = serde_json::from_str(&text).map_err(|e| param(format!("{}: {e}", path.display())))?;
        if m.compute_digest() != m.digest {
            return Err(param(format!("{}: digest does not match contents", path.display())));
        }
        Ok(m)
    }

    /// Rebuilds the command and checks it still resolves to this manifest
    /// on the current build and with the current input files.
    pub fn replay_command(&self) -> Result<Command, CliError> {
        let command = Command::from_parts(&self.subcommand, self.params.clone())?;
        let fresh = Self::new(&command, self.run_dir.clone())?;
        if fresh.platform != self.platform || fresh.version != self.version {
            log::warn!(
                "manifest was written by {} {} on {:?}; outputs may differ",
                self.tool,
                self.version,
                self.platform
            );
        }
        for (old, new) in self.inputs.iter().zip(&fresh.inputs) {
            if old.sha256 != new.sha256 {
                return Err(param(format!(
                    "input {} changed since the manifest was written",
                    old.path.display()
                )));
            }
        }
        Ok(command)
    }
}
