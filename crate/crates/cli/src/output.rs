//! Deterministic CSV and manifest writing.
//!
//! Data files carry no timestamps and use a pinned numeric format (12
//! significant digits, scientific), so identical configurations produce
//! byte-identical CSVs. The manifest carries the run metadata, including
//! the timestamp, and is the one file allowed to differ between runs.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

/// How a CSV column is treated at the reporting layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    /// Written as computed (times, rates).
    Raw,
    /// Clamped into [0, 1]; the pre-clamp deviation is recorded and, for
    /// strict columns, counted against the run tolerance.
    Probability { strict: bool },
}

/// Fixed scientific notation with 12 significant digits.
pub fn sci12(x: f64) -> String {
    format!("{:.11e}", x)
}

/// Greatest distance of any probability entry from the [0, 1] interval,
/// split into (strict, lenient) columns.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClampReport {
    pub strict: f64,
    pub lenient: f64,
}

impl ClampReport {
    pub fn absorb(&mut self, other: &ClampReport) {
        self.strict = self.strict.max(other.strict);
        self.lenient = self.lenient.max(other.lenient);
    }
}

/// Write one CSV (header row, comma separators, LF endings). Returns the
/// clamp report for the probability columns.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    kinds: &[ColumnKind],
    rows: impl Iterator<Item = Vec<f64>>,
) -> io::Result<ClampReport> {
    assert_eq!(header.len(), kinds.len());
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    w.write_all(header.join(",").as_bytes())?;
    w.write_all(b"\n")?;

    let mut report = ClampReport::default();
    for row in rows {
        assert_eq!(row.len(), kinds.len(), "row width mismatch");
        let mut first = true;
        for (value, kind) in row.iter().zip(kinds) {
            if !first {
                w.write_all(b",")?;
            }
            first = false;
            let out = match kind {
                ColumnKind::Raw => *value,
                ColumnKind::Probability { strict } => {
                    let clamped = value.clamp(0.0, 1.0);
                    let deviation = (value - clamped).abs();
                    if *strict {
                        report.strict = report.strict.max(deviation);
                    } else {
                        report.lenient = report.lenient.max(deviation);
                    }
                    clamped
                }
            };
            w.write_all(sci12(out).as_bytes())?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(report)
}

/// Run metadata written next to the data files.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub scenario: String,
    pub status_ok: bool,
    pub failures: Vec<String>,
    pub duration_s: f64,
    pub timestamp_unix_s: u64,
    /// Numerical metrics (name, value).
    pub metrics: Vec<(String, String)>,
    /// Resolved configuration echo (key, value).
    pub config_echo: Vec<(String, String)>,
    /// Data files produced by the run.
    pub outputs: Vec<PathBuf>,
}

impl Manifest {
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            status_ok: true,
            failures: Vec::new(),
            duration_s: 0.0,
            timestamp_unix_s: 0,
            metrics: Vec::new(),
            config_echo: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.push((name.to_string(), sci12(value)));
    }

    /// Record a metric and fail the run if it exceeds its tolerance.
    pub fn checked_metric(&mut self, name: &str, value: f64, within: impl Fn(f64) -> bool) {
        self.metric(name, value);
        if !within(value) {
            self.status_ok = false;
            self.failures.push(name.to_string());
        }
    }

    pub fn echo(&mut self, key: &str, value: impl ToString) {
        self.config_echo.push((key.to_string(), value.to_string()));
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let file = File::create(path)?;
        let mut w = BufWriter::new(file);
        writeln!(w, "[manifest]")?;
        writeln!(w, "scenario = {}", self.scenario)?;
        writeln!(
            w,
            "status = {}",
            if self.status_ok {
                "ok"
            } else {
                "tolerance-failure"
            }
        )?;
        if !self.failures.is_empty() {
            writeln!(w, "failed_checks = {}", self.failures.join(", "))?;
        }
        writeln!(w, "version = {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(w, "timestamp_unix_s = {}", self.timestamp_unix_s)?;
        writeln!(w, "duration_s = {:.3}", self.duration_s)?;
        writeln!(w, "\n[metrics]")?;
        for (k, v) in &self.metrics {
            writeln!(w, "{k} = {v}")?;
        }
        writeln!(w, "\n[config]")?;
        for (k, v) in &self.config_echo {
            writeln!(w, "{k} = {v}")?;
        }
        writeln!(w, "\n[outputs]")?;
        for (i, p) in self.outputs.iter().enumerate() {
            writeln!(w, "file_{i} = {}", p.display())?;
        }
        w.flush()
    }
}

/// Deterministic rate tag for filenames: `{:e}` formatting (`0e0`, `1e3`,
/// `5e-2`, ...).
pub fn rate_tag(v: f64) -> String {
    format!("{:e}", v)
}
