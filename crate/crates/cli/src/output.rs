// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use crate::Format;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table with a fixed header.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Where results go: `--out` or standard output, in the chosen format.
pub struct Sink {
    path: Option<PathBuf>,
    pub format: Format,
}

impl Sink {
    pub fn new(path: Option<PathBuf>, format: Format) -> Self {
        Sink { path, format }
    }

    fn open(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    pub fn write_table(&self, table: &Table) -> io::Result<()> {
        let mut w = self.open()?;
        table.write(&mut w)?;
        w.flush()
    }

    pub fn write_json(&self, value: &serde_json::Value) -> io::Result<()> {
        let mut w = self.open()?;
        write_json_to(&mut w, value)?;
        w.flush()
    }

    /// `region.csv` → `region.<suffix>`; `None` when writing to stdout.
    pub fn sidecar(&self, suffix: &str) -> Option<PathBuf> {
        self.path.as_ref().map(|p| p.with_extension(suffix))
    }
}

pub fn write_json_to(w: &mut dyn Write, value: &serde_json::Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)
}

pub fn write_json_file(path: &PathBuf, value: &serde_json::Value) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_json_to(&mut w, value)?;
    w.flush()
}
