use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use crate::args::{Format, OutputArgs};
use crate::chart::{self, LineChart};
use crate::error::CliError;

/// Writes artifacts of the requested formats under one directory.
pub struct Sink {
    dir: PathBuf,
    formats: Vec<Format>,
    written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(args: &OutputArgs) -> Result<Self, CliError> {
        std::fs::create_dir_all(&args.output).map_err(|e| CliError::file(&args.output, e))?;
        Ok(Self { dir: args.output.clone(), formats: args.format.clone(), written: Vec::new() })
    }

    fn write(&mut self, name: &str, content: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, content).map_err(|e| CliError::file(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        if self.formats.contains(&Format::Csv) {
            self.write(name, &table.render())?;
        }
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        if self.formats.contains(&Format::Json) {
            let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::file(self.dir.join(name), e))?;
            text.push('\n');
            self.write(name, &text)?;
        }
        Ok(())
    }

    pub fn svg(&mut self, name: &str, chart: &LineChart) -> Result<(), CliError> {
        if self.formats.contains(&Format::Svg) {
            let text = chart::to_svg(chart)?;
            self.write(name, &text)?;
        }
        Ok(())
    }

    /// Lists written files on stdout. A closed pipe is not an error.
    pub fn finish(self) {
        use std::io::Write as _;
        let mut out = std::io::stdout().lock();
        for p in &self.written {
            if writeln!(out, "{}", p.display()).is_err() {
                break;
            }
        }
    }
}

/// A CSV table with a fixed header.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: ToString>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row<S: ToString>(&mut self, cells: impl IntoIterator<Item = S>) {
        let row: Vec<String> = cells.into_iter().map(|c| c.to_string()).collect();
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }
}

/// Round-tripping text for a float; exponent form for very small or very
/// large magnitudes.
pub fn num(v: impl std::borrow::Borrow<f64>) -> String {
    let v = *v.borrow();
    let a = v.abs();
    if a != 0.0 && (a < 1e-4 || a >= 1e15) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}
