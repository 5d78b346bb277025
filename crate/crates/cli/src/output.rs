//! Output files and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// Files produced by one command, buffered until the command succeeds or
/// fails so that the manifest can list them.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
    /// Lines echoed to stdout.
    pub summary: Vec<String>,
}

impl Outputs {
    pub fn add(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.into(), bytes.into()));
    }

    /// Adds `name` when the config asks for `format`.
    pub fn add_if(&mut self, cfg: &RunConfig, format: Format, name: impl Into<String>, bytes: impl FnOnce() -> String) {
        if cfg.wants(format) {
            self.add(name, bytes());
        }
    }

    pub fn json(&mut self, cfg: &RunConfig, name: impl Into<String>, v: &Value) {
        self.add_if(cfg, Format::Json, name, || pretty(v));
    }

    pub fn say(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }

    pub fn names(&self) -> Vec<&str> {
        self.files.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        for (name, bytes) in &self.files {
            fs::write(dir.join(name), bytes)?;
        }
        Ok(())
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Writes `manifest.json`: the resolved config, the outcome and the list of
/// produced files. The timestamp is the only field that varies between
/// identical runs.
pub fn write_manifest(
    dir: &Path,
    command: &str,
    config: &Value,
    outputs: &[&str],
    outcome: &Result<(), CliError>,
) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let (status, code, message) = match outcome {
        Ok(()) => ("ok", 0, Value::Null),
        Err(e) => (e.status(), e.exit_code(), Value::String(e.to_string())),
    };
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = json!({
        "tool": "weylwalk",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "outputs": outputs,
        "status": status,
        "exit_code": code,
        "message": message,
        "timestamp": timestamp,
    });
    let path = dir.join("manifest.json");
    fs::write(&path, pretty(&manifest))?;
    Ok(path)
}
