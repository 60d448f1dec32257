//! Headerless numeric CSV payloads.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use augdual_core::DenseMatrix;

use crate::error::{CliError, CliResult};

/// 17 significant digits in scientific notation; parsing it back yields
/// the same `f64` bit pattern.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_lines(path: &Path, lines: impl Iterator<Item = String>) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for line in lines {
        writeln!(w, "{line}").map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_matrix(path: &Path, m: &DenseMatrix<f64>) -> CliResult<()> {
    write_lines(
        path,
        (0..m.rows()).map(|i| m.row(i).iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(",")),
    )
}

pub fn write_vector(path: &Path, v: &[f64]) -> CliResult<()> {
    write_lines(path, v.iter().map(|&x| fmt_f64(x)))
}

/// `row,col,value` per sample.
pub fn write_triplets(path: &Path, idx: &[(usize, usize)], values: &[f64]) -> CliResult<()> {
    write_lines(
        path,
        idx.iter()
            .zip(values)
            .map(|(&(i, j), &v)| format!("{i},{j},{}", fmt_f64(v))),
    )
}

fn read_rows(path: &Path) -> CliResult<Vec<(usize, Vec<String>)>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| (n + 1, l.split(',').map(|f| f.trim().to_string()).collect()))
        .collect())
}

fn parse_f64(path: &Path, line: usize, field: &str) -> CliResult<f64> {
    field
        .parse::<f64>()
        .map_err(|e| CliError::format(path, format!("line {line}: {field:?}: {e}")))
}

pub fn read_matrix(path: &Path, expect: Option<(usize, usize)>) -> CliResult<DenseMatrix<f64>> {
    let rows = read_rows(path)?;
    let cols = rows.first().map_or(0, |r| r.1.len());
    let mut data = Vec::with_capacity(rows.len() * cols);
    for (line, fields) in &rows {
        if fields.len() != cols {
            return Err(CliError::format(
                path,
                format!("line {line}: {} fields, expected {cols}", fields.len()),
            ));
        }
        for f in fields {
            data.push(parse_f64(path, *line, f)?);
        }
    }
    if let Some((r, c)) = expect {
        if (rows.len(), cols) != (r, c) {
            return Err(CliError::format(
                path,
                format!("matrix is {}x{cols}, expected {r}x{c}", rows.len()),
            ));
        }
    }
    DenseMatrix::new(rows.len(), cols, data).map_err(CliError::from)
}

pub fn read_vector(path: &Path, expect: Option<usize>) -> CliResult<Vec<f64>> {
    let m = read_matrix(path, None)?;
    if m.rows() > 0 && m.cols() != 1 {
        return Err(CliError::format(path, "expected one value per line"));
    }
    if let Some(n) = expect {
        if m.rows() != n {
            return Err(CliError::format(path, format!("{} entries, expected {n}", m.rows())));
        }
    }
    Ok(m.into_data())
}

/// Sample indices and their values.
pub type Triplets = (Vec<(usize, usize)>, Vec<f64>);

pub fn read_triplets(path: &Path, rows: usize, cols: usize) -> CliResult<Triplets> {
    let mut idx = Vec::new();
    let mut values = Vec::new();
    for (line, fields) in read_rows(path)? {
        let [i, j, v] = fields.as_slice() else {
            return Err(CliError::format(path, format!("line {line}: expected row,col,value")));
        };
        let parse_idx = |s: &str, bound: usize| -> CliResult<usize> {
            match s.parse::<usize>() {
                Ok(k) if k < bound => Ok(k),
                _ => Err(CliError::format(
                    path,
                    format!("line {line}: bad index {s:?} (bound {bound})"),
                )),
            }
        };
        idx.push((parse_idx(i, rows)?, parse_idx(j, cols)?));
        values.push(parse_f64(path, line, v)?);
    }
    Ok((idx, values))
}
