//! Coefficient-table ingestion and full-precision JSON/CSV output.
//!
//! Floats are written with 17 significant digits in scientific notation, which
//! round-trips every `f64` and does not depend on locale. Non-finite values
//! become `null` in JSON.

use std::io::{self, Read, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::coefficients::TableRow;
use crate::error::{Error, Result};
use crate::spectrum::DiscreteMeasure;

/// Reads rows from CSV with header `n,alpha,gamma`.
pub fn read_table<R: Read>(reader: R) -> Result<Vec<TableRow>> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = csv.headers().map_err(|e| Error::Table(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["n", "alpha", "gamma"] {
        return Err(Error::Table(format!(
            "expected header `n,alpha,gamma`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    csv.deserialize()
        .map(|row| row.map_err(|e| Error::Table(e.to_string())))
        .collect()
}

pub fn read_table_file(path: &Path) -> Result<Vec<TableRow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
    read_table(file)
}

/// `v` with 17 significant digits.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Pretty JSON formatter writing floats via [`format_float`].
struct FullPrecision<'a>(PrettyFormatter<'a>);

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Pretty-printed JSON with full-precision floats and a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// A CSV cell: integer index or float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Index(usize),
    Float(f64),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Index(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

/// CSV text with the given header and rows.
pub fn to_csv_string(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Index(i) => i.to_string(),
                Cell::Float(v) => format_float(*v),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// `k,xi,mass` rows of a measure, `k` 1-based.
pub fn support_csv(measure: &DiscreteMeasure) -> String {
    let rows: Vec<Vec<Cell>> = measure
        .support
        .iter()
        .zip(&measure.masses)
        .enumerate()
        .map(|(i, (x, m))| vec![Cell::Index(i + 1), Cell::Float(*x), Cell::Float(*m)])
        .collect();
    to_csv_string(&["k", "xi", "mass"], &rows)
}

/// Two-column `n,<name>` CSV of a sequence indexed by `n`.
pub fn sequence_csv(value_name: &str, values: &[(usize, f64)]) -> String {
    let rows: Vec<Vec<Cell>> = values
        .iter()
        .map(|(n, v)| vec![Cell::Index(*n), Cell::Float(*v)])
        .collect();
    to_csv_string(&["n", value_name], &rows)
}
