use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::Settings;

pub const TOOL: &str = "tractlab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Outcome of a run; decides the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Nothing was checked.
    Report,
    Pass,
    Fail,
}

impl Status {
    pub fn from_check(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Report | Status::Pass => 0,
            Status::Fail => 2,
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a Settings,
    status: Status,
    result: &'a T,
}

/// Extra file produced by a command.
pub enum Artifact {
    Text { suffix: &'static str, body: String },
    Binary { suffix: &'static str, body: Vec<u8> },
}

/// Everything a command hands back for printing and saving.
pub struct Outcome {
    pub status: Status,
    pub json: String,
    pub artifacts: Vec<Artifact>,
}

pub struct Run<'a> {
    pub command: &'a str,
    pub settings: Settings,
}

impl<'a> Run<'a> {
    /// Header comment for CSV files and rasters: tool, version and resolved config.
    pub fn provenance(&self) -> String {
        let config = serde_json::to_string(&self.settings).unwrap_or_default();
        format!("{TOOL} {VERSION} {}\nconfig {config}", self.command)
    }

    pub fn finish<T: Serialize>(&self, status: Status, result: &T, artifacts: Vec<Artifact>) -> Result<Outcome> {
        let envelope = Envelope {
            tool: TOOL,
            version: VERSION,
            command: self.command,
            config: &self.settings,
            status,
            result,
        };
        let json = tractlab::io::to_json(&envelope)?;
        Ok(Outcome { status, json, artifacts })
    }
}

/// Write `<command>.json` and every artifact into `dir`.
pub fn save(dir: &Path, command: &str, outcome: &Outcome) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    let mut put = |suffix: &str, bytes: &[u8]| -> Result<()> {
        let path = dir.join(format!("{command}{suffix}"));
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
        Ok(())
    };
    put(".json", outcome.json.as_bytes())?;
    for a in &outcome.artifacts {
        match a {
            Artifact::Text { suffix, body } => put(suffix, body.as_bytes())?,
            Artifact::Binary { suffix, body } => put(suffix, body)?,
        }
    }
    Ok(written)
}
