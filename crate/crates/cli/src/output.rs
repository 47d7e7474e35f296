//! CSV tables with a provenance header.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// First line of every output: what produced the file.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub command: String,
    pub model: String,
    pub params: Vec<(&'static str, f64)>,
    /// Integration step, or a rule such as `tau/100` when it varies.
    pub step: Option<String>,
    pub t_end: Option<f64>,
}

impl Provenance {
    pub fn new(command: &str, model: &str, params: Vec<(&'static str, f64)>) -> Self {
        Provenance { command: command.into(), model: model.into(), params, step: None, t_end: None }
    }

    pub fn integration(mut self, step: impl Into<String>, t_end: f64) -> Self {
        self.step = Some(step.into());
        self.t_end = Some(t_end);
        self
    }

    pub fn line(&self) -> String {
        let mut s = format!("# madde {} command={} model={}", madde_core::VERSION, self.command, self.model);
        for (k, v) in &self.params {
            let _ = write!(s, " {k}={v}");
        }
        let _ = write!(s, " step={}", self.step.as_deref().unwrap_or("none"));
        match self.t_end {
            Some(t) => {
                let _ = write!(s, " t_end={t}");
            }
            None => s.push_str(" t_end=none"),
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub provenance: Provenance,
    /// Extra `#` lines written after the provenance line.
    pub notes: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(provenance: Provenance, columns: &[&str]) -> Self {
        Table {
            provenance,
            notes: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = self.provenance.line();
        s.push('\n');
        for n in &self.notes {
            let _ = writeln!(s, "# {n}");
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn write(&self, path: Option<&Path>) -> CliResult<()> {
        let text = self.render();
        match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
                }
                std::fs::write(p, text).map_err(|e| io_error(p, e))
            }
            None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| io_error(Path::new("<stdout>"), e)),
        }
    }
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.display().to_string(), source }
}

/// Shortest round-trip form, in exponent notation outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Text cell with commas replaced so the row stays one record.
pub fn text(s: &str) -> String {
    s.replace(',', ";")
}

/// `dir/stem_suffix.csv` for a sibling of `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}_{suffix}.csv"))
}
