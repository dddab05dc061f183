use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::numerics::format_f64;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(v) => Some(v as f64),
            Cell::Real(v) => Some(v),
            Cell::Text(_) => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) if v.is_nan() => "NaN".to_string(),
            Cell::Real(v) => format_f64(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// A rectangular table with named columns and a provenance block.
#[derive(Clone, Debug)]
pub struct ResultTable {
    pub name: String,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
    provenance: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        let mut seen = std::collections::HashSet::new();
        for c in columns {
            assert!(seen.insert(*c), "duplicate column `{c}`");
        }
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            provenance: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn provenance(&self) -> &[(String, String)] {
        &self.provenance
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::invalid(format!(
                "row has {} cells, table `{}` has {} columns",
                row.len(),
                self.name,
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn set_provenance(&mut self, entries: Vec<(String, String)>) {
        self.provenance = entries;
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column (text cells are skipped).
    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .column_index(name)
            .ok_or_else(|| Error::invalid(format!("table `{}` has no column `{name}`", self.name)))?;
        Ok(self.rows.iter().filter_map(|r| r[idx].as_f64()).collect())
    }

    /// Rows whose column `key` equals `value` (numerically or textually).
    pub fn filter(&self, key: &str, value: impl Into<Cell>) -> Vec<&[Cell]> {
        let value = value.into();
        let Some(idx) = self.column_index(key) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter(|r| match (&r[idx], &value) {
                (Cell::Text(a), Cell::Text(b)) => a == b,
                (a, b) => a.as_f64().zip(b.as_f64()).is_some_and(|(x, y)| x == y),
            })
            .map(|r| r.as_slice())
            .collect()
    }

    /// Value at `(row, column)` as a number.
    pub fn get(&self, row: &[Cell], column: &str) -> Option<f64> {
        self.column_index(column).and_then(|i| row[i].as_f64())
    }

    /// Provenance lines prefixed `#`, a header row, then comma-separated rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.provenance {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Writes `<dir>/<name>.csv`, creating `dir` if needed.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<PathBuf> {
        std::fs::create_dir_all(dir.as_ref())?;
        let path = dir.as_ref().join(format!("{}.csv", self.name));
        std::fs::write(&path, self.to_csv())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = ResultTable::new("demo", &["a", "b", "c"]);
        t.set_provenance(vec![("seed".into(), "3".into())]);
        t.push_row(vec![1usize.into(), 0.5.into(), "x".into()]).unwrap();
        t.push_row(vec![2usize.into(), f64::NAN.into(), "y".into()]).unwrap();
        assert_eq!(
            t.to_csv(),
            "# seed=3\na,b,c\n1,5.0000000000000000e-1,x\n2,NaN,y\n"
        );
    }

    #[test]
    fn rejects_ragged_rows() {
        let mut t = ResultTable::new("demo", &["a", "b"]);
        assert!(t.push_row(vec![1usize.into()]).is_err());
    }

    #[test]
    #[should_panic(expected = "duplicate column")]
    fn rejects_duplicate_columns() {
        ResultTable::new("demo", &["a", "a"]);
    }

    #[test]
    fn filter_and_lookup() {
        let mut t = ResultTable::new("demo", &["d", "err"]);
        t.push_row(vec![10usize.into(), 0.1.into()]).unwrap();
        t.push_row(vec![20usize.into(), 0.2.into()]).unwrap();
        let rows = t.filter("d", 20usize);
        assert_eq!(rows.len(), 1);
        assert_eq!(t.get(rows[0], "err"), Some(0.2));
        assert_eq!(t.numeric_column("err").unwrap(), vec![0.1, 0.2]);
    }
}
