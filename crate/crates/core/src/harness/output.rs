use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::run::{EnsembleResult, Table};
use crate::error::{Error, Result};

/// Renders a float with 15 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.14e}")
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

fn write_rows(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `dir/stem.suffix.csv` next to the main file.
pub fn companion_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("result");
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

/// Path of the metadata sidecar for `path`.
pub fn meta_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".meta");
    path.with_file_name(name)
}

/// Column names of the main CSV: the axis, then each series followed by its
/// `_stderr` column when it has one.
pub fn header(result: &EnsembleResult) -> Vec<String> {
    let mut h = vec![result.axis_name.clone()];
    for s in &result.series {
        h.push(s.name.clone());
        if s.stderr.is_some() {
            h.push(format!("{}_stderr", s.name));
        }
    }
    h
}

/// Writes the main CSV, one CSV per side table, a scalar CSV and a TOML
/// metadata sidecar. Returns every path written.
pub fn write_csv(result: &EnsembleResult, path: &Path) -> Result<Vec<PathBuf>> {
    let header = header(result);
    // a request without traces yields a header-only file
    let rows: Vec<Vec<String>> = if result.series.is_empty() {
        Vec::new()
    } else {
        (0..result.axis.len())
            .map(|i| {
                let mut row = vec![format_float(result.axis[i])];
                for s in &result.series {
                    row.push(format_float(s.mean[i]));
                    if let Some(e) = &s.stderr {
                        row.push(format_float(e[i]));
                    }
                }
                row
            })
            .collect()
    };
    write_rows(path, &header, rows.into_iter())?;
    let mut written = vec![path.to_path_buf()];

    for table in &result.tables {
        let p = companion_path(path, &table.name);
        write_table(table, &p)?;
        written.push(p);
    }

    if !result.scalars.is_empty() {
        let p = companion_path(path, "scalars");
        let head = ["name", "mean", "stderr"].map(String::from);
        write_rows(
            &p,
            &head,
            result
                .scalars
                .iter()
                .map(|(k, v)| vec![k.clone(), format_float(v.mean), format_float(v.stderr)]),
        )?;
        written.push(p);
    }

    let p = meta_path(path);
    let mut f = File::create(&p).map_err(|e| Error::io(&p, e))?;
    let m = &result.metadata;
    let mut text = String::new();
    text.push_str(&format!("version = \"{}\"\n", m.version));
    if let Some(name) = &m.preset {
        text.push_str(&format!("preset = \"{name}\"\n"));
    }
    text.push_str(&format!("master_seed = {}\n", m.config.seed));
    text.push_str(&format!("axis = \"{}\"\n", result.axis_name));
    text.push_str("\n# full configuration\n");
    text.push_str(&m.config.to_toml_string());
    f.write_all(text.as_bytes()).map_err(|e| Error::io(&p, e))?;
    written.push(p);
    Ok(written)
}

fn write_table(table: &Table, path: &Path) -> Result<()> {
    write_rows(
        path,
        &table.columns,
        table
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| format_float(x)).collect()),
    )
}

/// A parsed numeric CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvData {
    pub header: Vec<String>,
    /// Row-major values.
    pub rows: Vec<Vec<f64>>,
}

impl CsvData {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

fn parse_float(s: &str) -> Option<f64> {
    match s {
        "NaN" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

/// Reads a numeric CSV written by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<CsvData> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = r
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let row = rec
            .iter()
            .map(|f| {
                parse_float(f).ok_or_else(|| {
                    Error::io(
                        path,
                        std::io::Error::new(std::io::ErrorKind::InvalidData, format!("bad number `{f}`")),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(CsvData { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(format_float(1.0), "1.00000000000000e0");
        assert_eq!(format_float(-0.000123456789012345678), "-1.23456789012346e-4");
        assert_eq!(format_float(f64::NAN), "NaN");
        for &x in &[std::f64::consts::PI, 1e-300, -7.25e12, 0.1] {
            let back: f64 = format_float(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 5e-15);
            // re-rendering a parsed value is byte-stable
            assert_eq!(format_float(back), format_float(x));
        }
    }

    #[test]
    fn companion_names() {
        let p = Path::new("/tmp/out/fig1.csv");
        assert_eq!(companion_path(p, "sf"), Path::new("/tmp/out/fig1.sf.csv"));
        assert_eq!(meta_path(p), Path::new("/tmp/out/fig1.csv.meta"));
    }
}
