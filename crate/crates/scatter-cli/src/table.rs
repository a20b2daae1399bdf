//! CSV tables with a one-line `#` header carrying the scenario hash and the
//! unit of every column.

use crate::error::CliError;
use std::fs;
use std::path::Path;

/// Units in the scaling of `u_t − 6uu_x + u_xxx = 0`: `x` is a length, `λ`
/// an inverse length, `u` an inverse length squared.
pub const LENGTH: &str = "length";
pub const WAVENUMBER: &str = "1/length";
pub const POTENTIAL: &str = "1/length^2";
pub const NONE: &str = "1";
pub const TEXT: &str = "label";

pub fn header_line(hash: &str, cols: &[(&str, &str)]) -> String {
    let units: Vec<String> = cols.iter().map(|(c, u)| format!("{c}={u}")).collect();
    format!("# scenario {hash}; units {}\n", units.join(", "))
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write(path: &Path, hash: &str, cols: &[(&str, &str)], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(header_line(hash, cols).into_bytes());
    let fail = |e: csv::Error| CliError::Malformed { path: path.to_path_buf(), msg: e.to_string() };
    w.write_record(cols.iter().map(|c| c.0)).map_err(fail)?;
    for r in rows {
        debug_assert_eq!(r.len(), cols.len());
        w.write_record(r).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Malformed { path: path.to_path_buf(), msg: e.to_string() })?;
    fs::write(path, bytes).map_err(CliError::io(path))
}

/// A table read back from disk.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        if !path.exists() {
            return Err(CliError::Missing(path.to_path_buf()));
        }
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        let malformed = |msg: String| CliError::Malformed { path: path.to_path_buf(), msg };
        let (header, body) = text.split_once('\n').ok_or_else(|| malformed("empty file".into()))?;
        if !header.starts_with("# scenario ") {
            return Err(malformed("first line is not a scenario header".into()));
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let columns = r.headers().map_err(|e| malformed(e.to_string()))?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
            .collect::<Result<Vec<Vec<String>>, _>>()
            .map_err(|e| malformed(e.to_string()))?;
        Ok(Self { header: header.to_string(), columns, rows })
    }

    pub fn col(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// The hash written in the header line.
    pub fn hash(&self) -> &str {
        self.header.trim_start_matches("# scenario ").split(';').next().unwrap_or("")
    }
}
