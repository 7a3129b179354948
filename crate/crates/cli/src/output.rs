//! CSV tables and the JSON sidecar.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value as Json};
use toa_core::ToaSeries;

use crate::error::{CliError, CliResult};

pub const CSV_HEADER: &str = "# toa-sim csv v1";
pub const JSON_FORMAT: &str = "toa-sim json v1";

/// Columns of equal length, written with shortest round-trip formatting so
/// the bytes depend only on the values.
pub struct Table {
    names: Vec<String>,
    columns: Vec<Column>,
}

enum Column {
    Real(Vec<f64>),
    Index(Vec<usize>),
}

impl Column {
    fn len(&self) -> usize {
        match self {
            Column::Real(v) => v.len(),
            Column::Index(v) => v.len(),
        }
    }
}

impl Table {
    pub fn new() -> Self {
        Table {
            names: Vec::new(),
            columns: Vec::new(),
        }
    }

    fn push(mut self, name: &str, column: Column) -> Self {
        if let Some(first) = self.columns.first() {
            assert_eq!(
                first.len(),
                column.len(),
                "column {name} has the wrong length"
            );
        }
        self.names.push(name.to_owned());
        self.columns.push(column);
        self
    }

    pub fn column(self, name: &str, values: Vec<f64>) -> Self {
        self.push(name, Column::Real(values))
    }

    pub fn index_column(self, name: &str, values: Vec<usize>) -> Self {
        self.push(name, Column::Index(values))
    }

    /// t, pi_raw, pi_clipped, cumulative.
    pub fn toa(s: &ToaSeries) -> Self {
        Table::new()
            .column("t", s.times.clone())
            .column("pi_raw", s.pi_values.clone())
            .column("pi_clipped", s.clipped())
            .column("cumulative", s.cumulative.clone())
    }

    pub fn render(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n{}\n", self.names.join(","));
        let rows = self.columns.first().map_or(0, Column::len);
        for i in 0..rows {
            for (j, c) in self.columns.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = match c {
                    Column::Real(v) => write!(out, "{:e}", v[i]),
                    Column::Index(v) => write!(out, "{}", v[i]),
                };
            }
            out.push('\n');
        }
        out
    }
}

/// Reads columns `t` and `pi_raw` from a toa CSV.
pub fn read_toa_csv(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io("read", path, e))?;
    let bad = |msg: String| CliError::config(format!("{}: {msg}", path.display()));
    let mut lines = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| bad("no header row".into()))?
        .split(',')
        .map(str::trim)
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| bad(format!("no `{name}` column")))
    };
    let (it, ip) = (col("t")?, col("pi_raw")?);
    let (mut t, mut pi) = (Vec::new(), Vec::new());
    for (n, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let cell = |i: usize| -> CliResult<f64> {
            cells
                .get(i)
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| bad(format!("row {}: bad value", n + 1)))
        };
        t.push(cell(it)?);
        pi.push(cell(ip)?);
    }
    Ok((t, pi))
}

/// Writes files into the output directory and collects the sidecar.
pub struct Output {
    dir: PathBuf,
    command: &'static str,
    files: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path, command: &'static str) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io("create directory", dir, e))?;
        Ok(Output {
            dir: dir.to_owned(),
            command,
            files: Vec::new(),
        })
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> CliResult<()> {
        let file = format!("{name}.csv");
        let path = self.dir.join(&file);
        fs::write(&path, table.render()).map_err(|e| CliError::io("write", path, e))?;
        self.files.push(file);
        Ok(())
    }

    /// `<command>.json` with the resolved config, version and diagnostics.
    pub fn finish(
        self,
        preset: Option<&str>,
        config: Json,
        diagnostics: Json,
    ) -> CliResult<PathBuf> {
        let doc = json!({
            "format": JSON_FORMAT,
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "preset": preset,
            "config": config,
            "diagnostics": diagnostics,
            "outputs": self.files,
        });
        let path = self.dir.join(format!("{}.json", self.command));
        let text = serde_json::to_string_pretty(&doc).expect("sidecar serializes") + "\n";
        fs::write(&path, text).map_err(|e| CliError::io("write", &path, e))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_through_the_reader() {
        let s = ToaSeries::new(vec![0.0, 0.5, 1.0], vec![0.1, -1e-300, 0.3], "x");
        let dir = std::env::temp_dir().join(format!("toa-sim-out-{}", std::process::id()));
        let mut out = Output::new(&dir, "toa").unwrap();
        out.csv("toa", &Table::toa(&s)).unwrap();
        let text = fs::read_to_string(dir.join("toa.csv")).unwrap();
        assert!(text.starts_with("# toa-sim csv v1\nt,pi_raw,pi_clipped,cumulative\n"));
        let (t, pi) = read_toa_csv(&dir.join("toa.csv")).unwrap();
        assert_eq!((t, pi), (s.times, s.pi_values));
        fs::remove_dir_all(dir).unwrap();
    }
}
