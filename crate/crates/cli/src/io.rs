use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        file: path.display().to_string(),
        source,
    })
}

/// Typed parse that reports the offending field path together with line and column.
pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let msg = if field == "." {
            e.inner().to_string()
        } else {
            format!("field `{field}`: {}", e.inner())
        };
        CliError::Schema {
            file: path.display().to_string(),
            msg,
        }
    })
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    parse_json(path, &read_text(path)?)
}

/// Re-labels a core schema error with the file it came from.
pub fn in_file<T>(path: &Path, r: cbifree::Result<T>) -> CliResult<T> {
    r.map_err(|e| match e {
        cbifree::Error::Schema(msg) => CliError::Schema {
            file: path.display().to_string(),
            msg,
        },
        other => CliError::Core(other),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// A command result: the JSON report, an optional flat table, and whether its checks passed.
pub struct Report {
    pub json: Value,
    pub table: Option<Table>,
    pub ok: bool,
}

impl Report {
    pub fn new(json: Value) -> Self {
        Report { json, table: None, ok: true }
    }
}

fn render(report: &Report, format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("reports serialize");
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => {
            let table = report
                .table
                .as_ref()
                .ok_or_else(|| CliError::Usage("csv output is not available for this subcommand".into()))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
            w.write_record(&table.header).map_err(io)?;
            for r in &table.rows {
                w.write_record(r).map_err(io)?;
            }
            w.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))
        }
    }
}

pub fn emit(report: &Report, format: Format, out: Option<&PathBuf>) -> CliResult<()> {
    let bytes = render(report, format)?;
    match out {
        Some(p) => fs::write(p, bytes).map_err(|source| CliError::Io {
            file: p.display().to_string(),
            source,
        }),
        None => std::io::stdout().write_all(&bytes).map_err(|source| CliError::Io {
            file: "stdout".into(),
            source,
        }),
    }
}
