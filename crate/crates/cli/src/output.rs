use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Rows rendered both ways up front; the sink picks one.
pub struct Table {
    json: serde_json::Value,
    csv: String,
}

impl Table {
    pub fn from_rows<T: Serialize>(rows: &[T]) -> Result<Table, CliError> {
        let json = serde_json::to_value(rows).map_err(|e| CliError::Input(e.to_string()))?;
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row).map_err(|e| CliError::Input(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
        Ok(Table {
            json,
            csv: String::from_utf8(bytes).expect("csv writer emits utf-8"),
        })
    }
}

/// Buffers the command output and writes it once the command has succeeded.
pub struct Sink {
    format: Format,
    out: Option<PathBuf>,
    buf: String,
}

impl Sink {
    pub fn new(format: Format, out: Option<PathBuf>) -> Self {
        Sink {
            format,
            out,
            buf: String::new(),
        }
    }

    /// JSON-only output.
    pub fn json<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        if self.format == Format::Csv {
            return Err(CliError::Input("csv output is not available for this command".into()));
        }
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Input(e.to_string()))?;
        self.text(&text)
    }

    pub fn text(&mut self, text: &str) -> Result<(), CliError> {
        self.buf.push_str(text);
        if !text.ends_with('\n') {
            self.buf.push('\n');
        }
        Ok(())
    }

    pub fn table(&mut self, table: &Table) -> Result<(), CliError> {
        match self.format {
            Format::Json => self.json(&table.json),
            Format::Csv => self.text(&table.csv),
        }
    }

    pub fn finish(self) -> std::io::Result<()> {
        match &self.out {
            Some(path) => fs::write(path, &self.buf),
            None => std::io::stdout().write_all(self.buf.as_bytes()),
        }
    }
}
