//! CSV and experiment-record writers.
//!
//! Numbers are written with 17 significant digits so that every `f64`
//! reloads bit-exactly and reruns produce byte-identical files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIters,
    Diverged,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIters => "max-iters",
            Status::Diverged => "diverged",
        }
    }

    /// Diverged dominates, then max-iters.
    pub fn combine(statuses: impl IntoIterator<Item = Status>) -> Status {
        statuses.into_iter().fold(Status::Converged, |acc, s| match (acc, s) {
            (Status::Diverged, _) | (_, Status::Diverged) => Status::Diverged,
            (Status::MaxIters, _) | (_, Status::MaxIters) => Status::MaxIters,
            _ => Status::Converged,
        })
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Buffers CSV rows in memory and writes them out in one go.
pub struct CsvOut {
    writer: csv::Writer<Vec<u8>>,
    rows: usize,
}

impl CsvOut {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Result<Self> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(header.iter().map(|h| h.as_ref()))?;
        Ok(CsvOut { writer, rows: 0 })
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) -> Result<()> {
        self.writer.write_record(fields.iter().map(|f| f.as_ref()))?;
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn write_to(self, path: &Path) -> Result<usize> {
        let rows = self.rows;
        let bytes = self.writer.into_inner().context("flushing CSV buffer")?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
        Ok(rows)
    }
}

/// Config snapshot and outcome of one command, stored next to its CSV as
/// `<stem>.meta` in `key=value` lines.
#[derive(Debug, Clone)]
pub struct ExperimentRecord {
    pub command: String,
    pub config: Vec<(String, String)>,
    pub status: Status,
    pub extra: Vec<(String, String)>,
    pub duration: Duration,
}

pub fn version() -> String {
    format!(
        "{} {} ({})",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION"),
        env!("RUD_GIT_DESCRIBE")
    )
}

pub fn meta_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta")
}

impl ExperimentRecord {
    pub fn new(command: &str) -> Self {
        ExperimentRecord {
            command: command.to_string(),
            config: Vec::new(),
            status: Status::Converged,
            extra: Vec::new(),
            duration: Duration::ZERO,
        }
    }

    pub fn config(mut self, key: &str, value: impl ToString) -> Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        let mut out = format!("command={}\nversion={}\n", self.command, version());
        for (k, v) in &self.config {
            out.push_str(&format!("{k}={v}\n"));
        }
        for (k, v) in &self.extra {
            out.push_str(&format!("{k}={v}\n"));
        }
        out.push_str(&format!("duration_ms={}\n", self.duration.as_millis()));
        out.push_str(&format!("status={}\n", self.status));
        out
    }

    pub fn write_next_to(&self, csv_path: &Path) -> Result<PathBuf> {
        let path = meta_path(csv_path);
        fs::write(&path, self.render()).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

/// Parses a `.meta` file back into ordered key/value pairs.
pub fn read_meta(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect())
}
