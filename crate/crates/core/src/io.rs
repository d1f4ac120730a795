//! CSV readers and writers for series, tables and reports.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::TimeSeries;

/// Numeric columns read from a CSV file with an optional header line.
#[derive(Debug, Clone)]
pub struct NumericTable {
    pub headers: Option<Vec<String>>,
    pub columns: Vec<Vec<f64>>,
}

/// Formats a float with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Reads a comma-separated numeric table. The first line is treated as a
/// header when any of its fields does not parse as a number.
pub fn read_numeric_table(path: &Path) -> Result<NumericTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(path)?;
    let mut headers = None;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<Option<f64>> = record.iter().map(|f| f.parse::<f64>().ok()).collect();
        if line == 0 && parsed.iter().any(Option::is_none) {
            headers = Some(record.iter().map(str::to_owned).collect());
            continue;
        }
        if columns.is_empty() {
            columns = vec![Vec::new(); parsed.len()];
        }
        for (col, value) in parsed.into_iter().enumerate() {
            let value = value.ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "non-numeric field at line {}, column {}",
                    line + 1,
                    col + 1
                ))
            })?;
            columns[col].push(value);
        }
    }
    Ok(NumericTable { headers, columns })
}

/// Reads a series from CSV: the named column (requires a header) or the first one.
pub fn read_series(path: &Path, column: Option<&str>) -> Result<TimeSeries> {
    let table = read_numeric_table(path)?;
    let index = match column {
        None => 0,
        Some(name) => table
            .headers
            .as_ref()
            .and_then(|h| h.iter().position(|c| c == name))
            .ok_or_else(|| Error::InvalidParameter(format!("no column named {name:?}")))?,
    };
    let values = table
        .columns
        .into_iter()
        .nth(index)
        .ok_or_else(|| Error::InvalidParameter("input contains no data rows".into()))?;
    TimeSeries::new(values)
}

/// Writes a series as a single unnamed CSV column, one value per line.
pub fn write_series(path: &Path, x: &TimeSeries) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for v in x.values() {
        writeln!(out, "{}", fmt17(*v))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_detection_and_column_selection() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        std::fs::write(&p, "a,b\n1,2\n3,4\n5,6\n").unwrap();
        let s = read_series(&p, Some("b")).unwrap();
        assert_eq!(s.values(), &[2.0, 4.0, 6.0]);
        let s = read_series(&p, None).unwrap();
        assert_eq!(s.values(), &[1.0, 3.0, 5.0]);
        assert!(read_series(&p, Some("zz")).is_err());

        let q = dir.path().join("u.csv");
        std::fs::write(&q, "1.5\n-2\n3e-1\n").unwrap();
        let s = read_series(&q, None).unwrap();
        assert_eq!(s.values(), &[1.5, -2.0, 0.3]);
    }

    #[test]
    fn series_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        let x = TimeSeries::new(vec![0.1, -1.0 / 3.0, 1e-300, 12345.678]).unwrap();
        write_series(&p, &x).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(read_series(&p, None).unwrap(), x);
    }
}
