use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// `k x N` table of finite samples with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl RawDataset {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::Configuration("dataset needs at least one column".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(Error::Configuration(format!(
                    "row {i} has {} values for {} columns",
                    row.len(),
                    columns.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("row {i} holds non-finite value {v}")));
            }
        }
        Ok(Self { columns, rows })
    }

    pub fn from_columns(columns: Vec<String>, data: &[Vec<f64>]) -> Result<Self> {
        let k = data.first().map_or(0, Vec::len);
        if data.iter().any(|c| c.len() != k) {
            return Err(Error::Configuration("columns differ in length".into()));
        }
        let rows = (0..k).map(|i| data.iter().map(|c| c[i]).collect()).collect();
        Self::new(columns, rows)
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let columns: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("data row {}: {e}", i + 1)))?;
            rows.push(row);
        }
        Self::new(columns, rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Parse(format!("cannot open {}: {e}", path.display())))?;
        Self::read_csv(file)
    }

    /// Writes a header line and one row per sample in shortest round-trip
    /// decimal form.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:?}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}
