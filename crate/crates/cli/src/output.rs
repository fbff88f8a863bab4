//! Output plumbing: provenance headers, CSV/JSON sinks.
//!
//! Every emission starts with `#`-prefixed metadata lines carrying the tool
//! version, the fully resolved configuration, and its hash, so a run can be
//! reproduced from its output alone.

use crate::config::fnv1a64;
use crate::CliError;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// The resolved parameter list of one command invocation, in emission order.
#[derive(Debug, Clone, Default)]
pub struct Provenance {
    command: String,
    params: Vec<(String, String)>,
}

impl Provenance {
    pub fn new(command: &str) -> Provenance {
        Provenance {
            command: command.to_string(),
            params: Vec::new(),
        }
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.params.push((key.to_string(), value.to_string()));
    }

    pub fn config_line(&self) -> String {
        let mut parts: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        parts.sort();
        parts.join(" ")
    }

    pub fn hash(&self) -> u64 {
        fnv1a64(&format!("{} {}", self.command, self.config_line()))
    }

    pub fn header_lines(&self) -> Vec<String> {
        vec![
            format!("# onebit {VERSION}"),
            format!("# command: {}", self.command),
            format!("# config: {}", self.config_line()),
            format!("# config_hash: {:016x}", self.hash()),
        ]
    }

    /// JSON metadata object mirroring the CSV header.
    pub fn json_meta(&self) -> serde_json::Value {
        serde_json::json!({
            "version": VERSION,
            "command": self.command,
            "config": self.config_line(),
            "config_hash": format!("{:016x}", self.hash()),
        })
    }
}

/// Where emitted text goes: stdout by default, a file with `--out`.
pub fn open_sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match out {
        None => Ok(Box::new(std::io::stdout())),
        Some(path) => {
            let f = std::fs::File::create(path).map_err(|e| {
                CliError::usage(format!("cannot create {}: {e}", path.display()))
            })?;
            Ok(Box::new(std::io::BufWriter::new(f)))
        }
    }
}

pub fn write_csv(
    out: Option<&Path>,
    prov: &Provenance,
    columns: &str,
    rows: impl IntoIterator<Item = String>,
) -> Result<(), CliError> {
    let mut sink = open_sink(out)?;
    emit_csv_to(&mut sink, prov, columns, rows)
}

pub fn emit_csv_to(
    sink: &mut dyn Write,
    prov: &Provenance,
    columns: &str,
    rows: impl IntoIterator<Item = String>,
) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::numeric(format!("write failed: {e}"));
    for line in prov.header_lines() {
        writeln!(sink, "{line}").map_err(io)?;
    }
    writeln!(sink, "{columns}").map_err(io)?;
    for row in rows {
        writeln!(sink, "{row}").map_err(io)?;
    }
    sink.flush().map_err(io)
}

pub fn write_json(
    out: Option<&Path>,
    prov: &Provenance,
    mut body: serde_json::Value,
) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::numeric(format!("write failed: {e}"));
    if let serde_json::Value::Object(map) = &mut body {
        map.insert("meta".into(), prov.json_meta());
    }
    let mut sink = open_sink(out)?;
    writeln!(sink, "{}", serde_json::to_string_pretty(&body).expect("serializable"))
        .map_err(io)?;
    sink.flush().map_err(io)
}

/// Derive a sibling output path for commands that write two files.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let ext = path
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    path.with_file_name(format!("{stem}_{suffix}.{ext}"))
}
