//! The one output shape every subcommand produces: a column-named table,
//! rendered as CSV with a config header or as a JSON envelope, written
//! atomically when a path is given.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;

pub const VERSION_LINE: &str = concat!("fracprop ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render_csv(&self) -> String {
        match self {
            // Debug float formatting is shortest-roundtrip and deterministic
            Cell::Float(v) => format!("{v:?}"),
            Cell::Int(v) => format!("{v}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, config: &RunConfig) -> String {
        match config.format {
            OutputFormat::Csv => self.render_csv(config),
            OutputFormat::Json => self.render_json(config),
        }
    }

    fn render_csv(&self, config: &RunConfig) -> String {
        let mut out = String::new();
        out.push_str("# ");
        out.push_str(VERSION_LINE);
        out.push('\n');
        out.push_str("# config: ");
        out.push_str(&config.to_header_json());
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let rendered: Vec<String> = row.iter().map(Cell::render_csv).collect();
            out.push_str(&rendered.join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self, config: &RunConfig) -> String {
        #[derive(Serialize)]
        struct Envelope<'a> {
            version: &'static str,
            config: &'a RunConfig,
            columns: &'a [&'static str],
            rows: &'a [Vec<Cell>],
        }
        let env = Envelope {
            version: VERSION_LINE,
            config,
            columns: &self.columns,
            rows: &self.rows,
        };
        let mut s = serde_json::to_string(&env).expect("table serialization cannot fail");
        s.push('\n');
        s
    }
}

/// Write to stdout, or atomically (temp file + rename) to `out`.
pub fn emit(rendered: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        None => {
            print!("{rendered}");
            Ok(())
        }
        Some(path) => {
            let parent = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(parent)
                .map_err(|e| CliError::io(format!("cannot create temp file in {parent:?}: {e}")))?;
            tmp.write_all(rendered.as_bytes())
                .map_err(|e| CliError::io(format!("cannot write output: {e}")))?;
            tmp.persist(path)
                .map_err(|e| CliError::io(format!("cannot move output into place: {e}")))?;
            Ok(())
        }
    }
}
