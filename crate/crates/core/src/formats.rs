//! CSV layouts shared with the command-line tool.
//!
//! * prices: header `date,close`, ISO-8601 dates in ascending order.
//! * wide paths / ensembles: header `t,path_0,…,path_{P−1}`, one row per
//!   grid time.
//! * correlation trace: header `N,cor_n,cum_mean`.
//!
//! Floats are written with 17 significant digits so they read back exactly.

use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::Deserialize;

use crate::calibrate::PriceSeries;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::montecarlo::{CorrelationTrace, ProjectionEnsemble};
use crate::sde::PricePath;

/// 17 significant digits, scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Deserialize)]
struct PriceRow {
    date: NaiveDate,
    close: f64,
}

pub fn read_prices(reader: impl Read, origin: &Path) -> Result<PriceSeries> {
    let malformed = |reason: String| Error::Malformed {
        path: origin.to_path_buf(),
        reason,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["date", "close"] {
        return Err(malformed(format!(
            "expected header `date,close`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.deserialize::<PriceRow>().enumerate() {
        let rec = rec.map_err(|e| malformed(format!("row {}: {e}", i + 1)))?;
        rows.push((rec.date, rec.close));
    }
    PriceSeries::new(rows)
}

pub fn read_prices_file(path: &Path) -> Result<PriceSeries> {
    read_prices(std::fs::File::open(path)?, path)
}

pub fn write_prices(mut w: impl Write, series: &PriceSeries) -> Result<()> {
    writeln!(w, "date,close")?;
    for (d, c) in series.observations() {
        writeln!(w, "{},{}", d.format("%Y-%m-%d"), fmt_f64(*c))?;
    }
    Ok(())
}

/// Writes columns of values sampled on `grid` in the wide `t,path_i` layout.
pub fn write_wide<'a, I>(mut w: impl Write, grid: &TimeGrid, columns: I) -> Result<()>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let columns: Vec<&[f64]> = columns.into_iter().collect();
    if let Some(c) = columns.iter().find(|c| c.len() != grid.len()) {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: c.len(),
        });
    }
    if columns
        .iter()
        .flat_map(|c| c.iter())
        .any(|x| !x.is_finite())
    {
        return Err(Error::Numerical(
            "refusing to write non-finite values".into(),
        ));
    }
    let mut line = String::from("t");
    for i in 0..columns.len() {
        line.push_str(&format!(",path_{i}"));
    }
    writeln!(w, "{line}")?;
    for (k, t) in grid.times().iter().enumerate() {
        line.clear();
        line.push_str(&fmt_f64(*t));
        for c in &columns {
            line.push(',');
            line.push_str(&fmt_f64(c[k]));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_ensemble(w: impl Write, ensemble: &ProjectionEnsemble) -> Result<()> {
    write_wide(
        w,
        ensemble.grid(),
        ensemble.paths().iter().map(|p| p.prices()),
    )
}

/// Reads the wide layout back as `(grid, columns)`.
pub fn read_wide(reader: impl Read, origin: &Path) -> Result<(TimeGrid, Vec<Vec<f64>>)> {
    let malformed = |reason: String| Error::Malformed {
        path: origin.to_path_buf(),
        reason,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let n_cols = headers.len().saturating_sub(1);
    let well_formed = headers.get(0) == Some("t")
        && n_cols > 0
        && headers
            .iter()
            .skip(1)
            .enumerate()
            .all(|(i, h)| h == format!("path_{i}"));
    if !well_formed {
        return Err(malformed(
            "expected header `t,path_0,...,path_{P-1}`".into(),
        ));
    }
    let mut times = Vec::new();
    let mut columns = vec![Vec::new(); n_cols];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |j: usize| -> Result<f64> {
            rec[j]
                .parse::<f64>()
                .map_err(|e| malformed(format!("row {}, column {j}: {e}", row + 1)))
        };
        times.push(parse(0)?);
        for (j, col) in columns.iter_mut().enumerate() {
            col.push(parse(j + 1)?);
        }
    }
    let grid = TimeGrid::new(times).map_err(|e| malformed(e.to_string()))?;
    Ok((grid, columns))
}

pub fn read_ensemble(reader: impl Read, origin: &Path) -> Result<ProjectionEnsemble> {
    let (grid, columns) = read_wide(reader, origin)?;
    let paths = columns
        .into_iter()
        .map(|c| PricePath::new(grid.clone(), c))
        .collect::<Result<Vec<_>>>()?;
    ProjectionEnsemble::new(grid, paths, None, None)
}

pub fn read_ensemble_file(path: &Path) -> Result<ProjectionEnsemble> {
    read_ensemble(std::fs::File::open(path)?, path)
}

pub fn write_trace(mut w: impl Write, trace: &CorrelationTrace) -> Result<()> {
    if trace
        .per_path
        .iter()
        .chain(&trace.cumulative)
        .any(|x| !x.is_finite())
    {
        return Err(Error::Numerical(
            "refusing to write non-finite correlations".into(),
        ));
    }
    writeln!(w, "N,cor_n,cum_mean")?;
    for (i, (c, m)) in trace.per_path.iter().zip(&trace.cumulative).enumerate() {
        writeln!(w, "{},{},{}", i + 1, fmt_f64(*c), fmt_f64(*m))?;
    }
    Ok(())
}
