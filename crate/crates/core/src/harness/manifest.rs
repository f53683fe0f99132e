use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::commands::{execute, Command};
use super::{Check, CommandReport, RunOptions};
use crate::error::{ArcError, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputChecksum {
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Command,
    pub options: RunOptions,
    pub precision_bits: u32,
    pub seeds: Vec<u64>,
    pub tool_version: String,
    /// Unix seconds; excluded from the hash.
    pub timestamp: u64,
    /// Hash of command, options and tool version.
    pub hash: String,
    pub outputs: Vec<OutputChecksum>,
    pub checks: Vec<Check>,
    pub summary: serde_json::Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of everything that determines the outputs.
pub fn parameter_hash(command: &Command, options: &RunOptions) -> Result<String> {
    let key = serde_json::json!({
        "command": command,
        "options": options,
        "tool_version": TOOL_VERSION,
    });
    Ok(sha256_hex(serde_json::to_string(&key)?.as_bytes()))
}

fn prefix(command: &Command, hash: &str) -> String {
    format!("{}-{}", command.name(), &hash[..12])
}

/// Renders every output with the manifest hash in its header.
pub fn render(command: &Command, options: &RunOptions, report: &CommandReport) -> Result<Vec<(String, String)>> {
    let hash = parameter_hash(command, options)?;
    let p = prefix(command, &hash);
    Ok(report
        .files
        .iter()
        .map(|f| (format!("{p}-{}", f.name), f.body.replace("{manifest}", &hash)))
        .collect())
}

/// Writes the outputs and their manifest into `out_dir`.
pub fn write_run(
    out_dir: &Path,
    command: &Command,
    options: &RunOptions,
    report: &CommandReport,
) -> Result<(RunManifest, PathBuf)> {
    fs::create_dir_all(out_dir)?;
    let hash = parameter_hash(command, options)?;
    let mut outputs = Vec::new();
    for (name, body) in render(command, options, report)? {
        fs::write(out_dir.join(&name), &body)?;
        outputs.push(OutputChecksum {
            file: name,
            sha256: sha256_hex(body.as_bytes()),
        });
    }
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let manifest = RunManifest {
        command: command.clone(),
        options: options.clone(),
        precision_bits: options.precision_bits,
        seeds: command.seeds(options),
        tool_version: TOOL_VERSION.to_string(),
        timestamp,
        hash: hash.clone(),
        outputs,
        checks: report.checks.clone(),
        summary: report.summary.clone(),
    };
    let path = out_dir.join(format!("{}.manifest.json", prefix(command, &hash)));
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok((manifest, path))
}

/// Re-executes a manifest and reports which outputs differ byte-wise.
pub fn replay(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path)?;
    let manifest: RunManifest = serde_json::from_str(&text)?;
    if manifest.tool_version != TOOL_VERSION {
        return Err(ArcError::InvalidParameter(format!(
            "manifest written by version {}, running {TOOL_VERSION}",
            manifest.tool_version
        )));
    }
    let report = execute(&manifest.command, &manifest.options)?;
    let fresh = render(&manifest.command, &manifest.options, &report)?;
    let mut mismatched = Vec::new();
    for out in &manifest.outputs {
        let again = fresh.iter().find(|(n, _)| *n == out.file);
        match again {
            Some((_, body)) if sha256_hex(body.as_bytes()) == out.sha256 => {}
            _ => mismatched.push(out.file.clone()),
        }
    }
    Ok(mismatched)
}
