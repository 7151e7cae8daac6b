use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Kind;
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Relative to the output directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub kind: Kind,
    /// Hash of the canonical config echo, so formatting of the input does not matter.
    pub config_sha256: String,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<OutputFile>,
    pub warnings: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub(crate) fn inventory(dir: &Path, names: &[String]) -> Result<Vec<OutputFile>, CliError> {
    names
        .iter()
        .map(|n| {
            let p = dir.join(n);
            let data = std::fs::read(&p).map_err(|e| CliError::io(&p, e))?;
            Ok(OutputFile {
                path: n.clone(),
                bytes: data.len() as u64,
                sha256: sha256_hex(&data),
            })
        })
        .collect()
}
