//! Flat CSV encoding of complex datasets.
//!
//! Header `x_re_0,..,x_re_{d-1},x_im_0,..,x_im_{d-1},y_re,y_im`, one sample per
//! row. Target columns are optional for prediction inputs. Lines starting
//! with `#` are comments.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use wrkhs_core::{Complex64, ComplexDataset, Matrix};

use crate::error::{CliError, Result};

/// Inputs and, when the file has them, targets.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub inputs: Matrix<Complex64>,
    pub targets: Option<Vec<Complex64>>,
}

impl Table {
    pub fn into_dataset(self) -> Result<ComplexDataset> {
        let targets = self
            .targets
            .ok_or_else(|| CliError::input("dataset has no y_re,y_im columns"))?;
        Ok(ComplexDataset::new(self.inputs, targets)?)
    }
}

pub fn header(dim: usize, with_targets: bool) -> Vec<String> {
    let mut h: Vec<String> = (0..dim)
        .map(|i| format!("x_re_{i}"))
        .chain((0..dim).map(|i| format!("x_im_{i}")))
        .collect();
    if with_targets {
        h.push("y_re".into());
        h.push("y_im".into());
    }
    h
}

/// Shortest text that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(r)
}

fn layout(names: &csv::StringRecord) -> Result<(usize, bool)> {
    let dim = names.iter().take_while(|h| h.starts_with("x_re_")).count();
    if dim == 0 {
        return Err(CliError::input("header must start with x_re_0"));
    }
    let with_targets = match names.len() {
        n if n == 2 * dim => false,
        n if n == 2 * dim + 2 => true,
        n => {
            return Err(CliError::input(format!(
                "header has {n} columns; expected {} or {} for dimension {dim}",
                2 * dim,
                2 * dim + 2
            )))
        }
    };
    let want = header(dim, with_targets);
    if let Some((got, want)) = names.iter().zip(&want).find(|(g, w)| g != w) {
        return Err(CliError::input(format!("unexpected header column `{got}`, expected `{want}`")));
    }
    Ok((dim, with_targets))
}

pub fn parse_table<R: Read>(r: R) -> Result<Table> {
    let mut rdr = reader(r);
    let names = rdr
        .headers()
        .map_err(|e| CliError::input(format!("bad header: {e}")))?
        .clone();
    let (dim, with_targets) = layout(&names)?;
    let mut values = Vec::new();
    let mut targets = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::input(format!("line {line}: {e}"))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let nums = rec
            .iter()
            .enumerate()
            .map(|(i, f)| {
                f.parse::<f64>()
                    .map_err(|_| CliError::input(format!("line {line}, column {}: cannot parse `{f}`", &names[i])))
            })
            .collect::<Result<Vec<f64>>>()?;
        if nums.iter().any(|v| !v.is_finite()) {
            return Err(CliError::input(format!("line {line}: non-finite value")));
        }
        values.extend((0..dim).map(|k| Complex64::new(nums[k], nums[dim + k])));
        if with_targets {
            targets.push(Complex64::new(nums[2 * dim], nums[2 * dim + 1]));
        }
    }
    if values.is_empty() {
        return Err(CliError::input("dataset has no rows"));
    }
    let n = values.len() / dim;
    Ok(Table {
        inputs: Matrix::from_row_major(n, dim, values)?,
        targets: with_targets.then_some(targets),
    })
}

pub fn read_table(path: &Path) -> Result<Table> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_table(f).map_err(|e| match e {
        CliError::Input(m) => CliError::input(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn read_dataset(path: &Path) -> Result<ComplexDataset> {
    read_table(path)?.into_dataset()
}

pub fn write_dataset<W: Write>(w: W, data: &ComplexDataset) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let d = data.dim();
    let io = |e: csv::Error| CliError::input(format!("csv write failed: {e}"));
    wtr.write_record(header(d, true)).map_err(io)?;
    for (x, y) in data.iter() {
        let row = x
            .iter()
            .map(|v| v.re)
            .chain(x.iter().map(|v| v.im))
            .chain([y.re, y.im])
            .map(fmt_f64);
        wtr.write_record(row).map_err(io)?;
    }
    wtr.flush().map_err(|e| CliError::input(format!("csv write failed: {e}")))
}
