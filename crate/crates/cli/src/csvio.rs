//! CSV reading and writing for channel matrices and feature tables.
//!
//! Pinned format: UTF-8, comma delimiter, period decimal separator, LF line
//! endings. Values are written with 17 significant digits so every f64
//! round-trips bitwise. NaN cells are written as `NaN` and accepted as
//! `NaN`, `nan` or an empty field.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Formats one value round-trip exactly.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Parses one cell; empty cells and NaN tokens become NaN.
pub fn parse_value(raw: &str) -> Result<f64> {
    let trimmed = raw.trim();
    if trimmed.is_empty() || trimmed.eq_ignore_ascii_case("nan") {
        return Ok(f64::NAN);
    }
    trimmed
        .parse::<f64>()
        .with_context(|| format!("`{trimmed}` is not a number"))
}

/// Reads a numeric matrix: one row per record, `k_count` comma-separated
/// values per row. `skip_header` drops the first line unparsed.
pub fn read_matrix(path: &Path, k_count: usize, skip_header: bool) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read `{}`", path.display()))?;
    let mut rows = Vec::new();
    let mut lines = text.lines().enumerate();
    if skip_header {
        lines.next();
    }
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != k_count {
            bail!(
                "`{}` row {}: expected {} columns, found {}",
                path.display(),
                line_no + 1,
                k_count,
                cells.len()
            );
        }
        let mut row = Vec::with_capacity(k_count);
        for (col, cell) in cells.iter().enumerate() {
            row.push(parse_value(cell).with_context(|| {
                format!("`{}` row {} column {}", path.display(), line_no + 1, col + 1)
            })?);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("`{}` holds no data rows", path.display());
    }
    Ok(rows)
}

/// Writes a numeric matrix without a header, one record per line.
pub fn write_matrix(path: &Path, rows: impl Iterator<Item = impl AsRef<[f64]>>) -> Result<()> {
    let mut text = String::new();
    for row in rows {
        let mut first = true;
        for &v in row.as_ref() {
            if !first {
                text.push(',');
            }
            let _ = write!(text, "{}", format_value(v));
            first = false;
        }
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("cannot write `{}`", path.display()))
}

/// Writes a feature table: header row of names, then one row per record.
/// Names containing the delimiter are quoted.
pub fn write_feature_table(
    path: &Path,
    names: &[String],
    columns: &[&[f64]],
    n_records: usize,
) -> Result<()> {
    if names.is_empty() {
        // No columns: the header row is empty, so the file carries no data.
        return std::fs::write(path, "")
            .with_context(|| format!("cannot write `{}`", path.display()));
    }
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .with_context(|| format!("cannot write `{}`", path.display()))?;
    writer
        .write_record(names)
        .context("writing feature header")?;
    for r in 0..n_records {
        let row: Vec<String> = columns.iter().map(|c| format_value(c[r])).collect();
        writer.write_record(&row).context("writing feature row")?;
    }
    writer.flush().context("flushing feature table")?;
    Ok(())
}

/// Reads a feature table written by [`write_feature_table`]; returns
/// `(names, columns)`.
pub fn read_feature_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .with_context(|| format!("cannot read `{}`", path.display()))?;
    let names: Vec<String> = reader
        .headers()
        .context("reading feature header")?
        .iter()
        .map(|s| s.to_string())
        .collect();
    if names.is_empty() || names == [""] {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut columns = vec![Vec::new(); names.len()];
    for (row_no, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("feature row {}", row_no + 1))?;
        if record.len() != names.len() {
            bail!(
                "`{}` row {}: expected {} columns, found {}",
                path.display(),
                row_no + 1,
                names.len(),
                record.len()
            );
        }
        for (col, cell) in record.iter().enumerate() {
            columns[col].push(parse_value(cell).with_context(|| {
                format!("`{}` row {} column {}", path.display(), row_no + 1, col + 1)
            })?);
        }
    }
    Ok((names, columns))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_round_trip_bitwise() {
        let cases = [
            0.0,
            -0.0,
            1.0,
            -1.5,
            std::f64::consts::PI,
            1e-300,
            -2.2250738585072014e-308,
            f64::MAX,
            f64::MIN_POSITIVE,
            0.1 + 0.2,
        ];
        for v in cases {
            let back = parse_value(&format_value(v)).unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v}");
        }
        assert!(parse_value(&format_value(f64::NAN)).unwrap().is_nan());
    }

    #[test]
    fn nan_tokens_accepted() {
        assert!(parse_value("").unwrap().is_nan());
        assert!(parse_value("  ").unwrap().is_nan());
        assert!(parse_value("NaN").unwrap().is_nan());
        assert!(parse_value("nan").unwrap().is_nan());
        assert!(parse_value("abc").is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let rows = vec![vec![1.0, f64::NAN, 0.25], vec![-1.0, 1e-17, 3.0]];
        write_matrix(&path, rows.iter()).unwrap();
        let back = read_matrix(&path, 3, false).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in rows.iter().flatten().zip(back.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn matrix_shape_errors_name_file_and_row() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "1,2,3\n4,5\n").unwrap();
        let err = read_matrix(&path, 3, false).unwrap_err().to_string();
        assert!(err.contains("bad.csv"), "{err}");
        assert!(err.contains("row 2"), "{err}");
    }

    #[test]
    fn header_skipping() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.csv");
        std::fs::write(&path, "1,2,3\n7,8,9\n").unwrap();
        let with_header = read_matrix(&path, 3, true).unwrap();
        assert_eq!(with_header, vec![vec![7.0, 8.0, 9.0]]);
    }

    #[test]
    fn feature_table_quotes_names_with_commas() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let names = vec!["MEAN(x)".to_string(), "DIFF(x,y) max".to_string()];
        let a = vec![1.5, f64::NAN];
        let b = vec![-2.0, 0.5];
        write_feature_table(&path, &names, &[&a, &b], 2).unwrap();
        let (back_names, back_cols) = read_feature_table(&path).unwrap();
        assert_eq!(back_names, names);
        assert_eq!(back_cols[0][0].to_bits(), a[0].to_bits());
        assert!(back_cols[0][1].is_nan());
        assert_eq!(back_cols[1], b);
        // Pinned layout: LF endings, comma delimiter.
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(!text.contains('\r'));
        assert!(text.lines().next().unwrap().contains("\"DIFF(x,y) max\""));
    }
}
