//! Artifact directories with checksummed, reproducible contents.
//!
//! Every command writes its outputs through an [`ArtifactDir`], which records
//! a SHA-256 digest per file and closes with a `manifest.json` naming the
//! tool version, the command, the master seed, and every file digest. Two
//! runs with the same inputs produce byte-identical directories, so the
//! manifest digests double as a reproducibility check.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Environment variable naming the default artifact root (fallback:
/// `./artifacts`). `--out` overrides both.
pub const OUT_ROOT_ENV: &str = "RFCLT_OUT_ROOT";

/// Serialization format for tabular artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Comma-separated values with a header row.
    Csv,
    /// A JSON object `{"columns": [...], "rows": [[...], ...]}`.
    Json,
}

impl Format {
    /// File extension (without the dot) for tabular files in this format.
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Resolves the output directory for `command`: explicit `--out` wins,
/// otherwise `<root>/<command>` where the root comes from `RFCLT_OUT_ROOT`
/// or defaults to `./artifacts`.
pub fn resolve_out(out: Option<&Path>, command: &str) -> PathBuf {
    match out {
        Some(p) => p.to_path_buf(),
        None => {
            let root = std::env::var_os(OUT_ROOT_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("artifacts"));
            root.join(command)
        }
    }
}

/// An output directory that tracks a SHA-256 digest for every file written.
pub struct ArtifactDir {
    path: PathBuf,
    checksums: BTreeMap<String, String>,
}

impl ArtifactDir {
    /// Creates the directory (and parents). Existing files are overwritten
    /// as they are re-written, keeping repeated runs idempotent.
    pub fn create(path: PathBuf) -> Result<Self, CliError> {
        std::fs::create_dir_all(&path)
            .map_err(|e| CliError::Io(format!("creating {}: {e}", path.display())))?;
        Ok(Self {
            path,
            checksums: BTreeMap::new(),
        })
    }

    /// Writes one file and records its digest.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let target = self.path.join(name);
        std::fs::write(&target, bytes)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", target.display())))?;
        let digest = Sha256::digest(bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.checksums.insert(name.to_string(), hex);
        Ok(())
    }

    /// Writes `value` as pretty-printed JSON with a trailing newline.
    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Io(format!("serializing {name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes `manifest.json` and returns the directory path. The manifest
    /// carries no timestamps, so identical contents yield identical bytes.
    pub fn finish(self, command: &str, master_seed: u64) -> Result<PathBuf, CliError> {
        let manifest = serde_json::json!({
            "tool": "rfclt",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "master_seed": master_seed,
            "files": self.checksums,
        });
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Io(format!("serializing manifest: {e}")))?;
        text.push('\n');
        let target = self.path.join("manifest.json");
        std::fs::write(&target, text)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", target.display())))?;
        Ok(self.path)
    }
}

/// A small column-oriented table rendered to CSV or JSON per `--format`.
pub struct Table {
    name: &'static str,
    columns: Vec<String>,
    rows: Vec<Vec<serde_json::Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(name: &'static str, columns: Vec<S>) -> Self {
        Self {
            name,
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends one row; length must match the column count.
    pub fn push(&mut self, row: Vec<serde_json::Value>) {
        debug_assert_eq!(row.len(), self.columns.len(), "table row width mismatch");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Renders the table into `dir` as `<name>.csv` or `<name>.json`.
    pub fn write(&self, dir: &mut ArtifactDir, format: Format) -> Result<(), CliError> {
        let name = format!("{}.{}", self.name, format.ext());
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)
                    .map_err(|e| CliError::Io(format!("writing {name}: {e}")))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(cell_to_string).collect();
                    w.write_record(&cells)
                        .map_err(|e| CliError::Io(format!("writing {name}: {e}")))?;
                }
                let bytes = w
                    .into_inner()
                    .map_err(|e| CliError::Io(format!("writing {name}: {e}")))?;
                dir.write(&name, &bytes)
            }
            Format::Json => {
                let value = serde_json::json!({
                    "columns": self.columns,
                    "rows": self.rows,
                });
                dir.write_json(&name, &value)
            }
        }
    }
}

/// CSV cell rendering: strings stay raw (the csv writer quotes as needed),
/// nulls become empty cells, everything else uses its JSON representation.
fn cell_to_string(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Null => String::new(),
        other => other.to_string(),
    }
}
