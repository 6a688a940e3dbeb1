//! CSV artifacts with a provenance header.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

use crate::config::Resolved;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `# srrw <version> config_hash=<sha256> seed=<seed>`.
pub fn header_line(resolved: &Resolved) -> String {
    format!("# srrw {VERSION} config_hash={} seed={}", resolved.hash(), resolved.get("seed").unwrap_or("none"))
}

/// A CSV table. Reals are written with `Display`, which round-trips `f64`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, resolved: &Resolved) -> Result<String> {
        let mut buf = Vec::new();
        writeln!(buf, "{}", header_line(resolved))?;
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.columns)?;
            for row in &self.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        Ok(String::from_utf8(buf)?)
    }

    /// Reads back a table written by [`Table::to_csv`], skipping `#` lines.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<_, _>>()?;
        Ok(Self { columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }
}

/// Writes to `out`, or stdout when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}
