//! Table builders and CSV writers shared by `run` and `diagnose`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use abcpt::diagnostics::{autocorrelation, histogram, kde, linear_grid, silverman_bandwidth, thin, Density, Histogram};
use abcpt::tb::{tb_derived_params, DerivedParams, TbParams};
use abcpt::ParameterVector;
use serde::Serialize;

use crate::error::{CliError, Result};

/// Lags and thinning factors of the default autocorrelation table.
pub const DEFAULT_LAGS: [usize; 3] = [1, 10, 20];
pub const DEFAULT_THINNINGS: [usize; 3] = [1, 10, 50];
pub const DEFAULT_GRID_POINTS: usize = 512;

/// Creates `dir/name`, hands a buffered writer to `body` and records the
/// file name in `written`.
pub fn write_file(
    dir: &Path,
    name: &str,
    written: &mut Vec<String>,
    body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))?;
    written.push(name.to_string());
    Ok(path)
}

pub fn write_samples_csv<W: Write>(names: &[String], samples: &[ParameterVector], mut w: W) -> io::Result<()> {
    writeln!(w, "{}", names.join(","))?;
    for s in samples {
        let cells: Vec<String> = s.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Parameter columns, optionally after the tuberculosis transform to
/// transmission rate, doubling time and reproductive value.
pub fn columns(samples: &[ParameterVector], names: &[String], derived: bool) -> Vec<(String, Vec<f64>)> {
    if derived {
        let rows: Vec<Vec<f64>> = samples.iter().map(|s| tb_transform(s)).collect();
        DerivedParams::NAMES
            .iter()
            .enumerate()
            .map(|(k, n)| (n.to_string(), rows.iter().map(|r| r[k]).collect()))
            .collect()
    } else {
        names
            .iter()
            .enumerate()
            .map(|(k, n)| (n.clone(), samples.iter().map(|s| s[k]).collect()))
            .collect()
    }
}

pub fn tb_transform(theta: &[f64]) -> Vec<f64> {
    tb_derived_params(&TbParams::from_slice(theta)).to_vec()
}

pub fn derived_names() -> Vec<String> {
    DerivedParams::NAMES.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcfRow {
    pub parameter: String,
    pub thinning: usize,
    /// One entry per lag; `None` when the thinned series is too short.
    pub values: Vec<Option<f64>>,
}

/// Autocorrelation of each column at every lag, after each thinning.
pub fn acf_table(columns: &[(String, Vec<f64>)], lags: &[usize], thinnings: &[usize]) -> Result<Vec<AcfRow>> {
    let mut rows = Vec::new();
    for (name, series) in columns {
        for &t in thinnings {
            if t == 0 {
                return Err(CliError::Usage("thinning factors must be at least 1".into()));
            }
            let thinned = thin(series, t);
            let values = lags
                .iter()
                .map(|&lag| autocorrelation(&thinned, lag).ok().filter(|v| v.is_finite()))
                .collect();
            rows.push(AcfRow {
                parameter: name.clone(),
                thinning: t,
                values,
            });
        }
    }
    Ok(rows)
}

pub fn write_acf_csv<W: Write>(rows: &[AcfRow], lags: &[usize], mut w: W) -> io::Result<()> {
    let header: Vec<String> = lags.iter().map(|l| format!("lag_{l}")).collect();
    writeln!(w, "parameter,thinning,{}", header.join(","))?;
    for r in rows {
        let cells: Vec<String> = r.values.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()).collect();
        writeln!(w, "{},{},{}", r.parameter, r.thinning, cells.join(","))?;
    }
    Ok(())
}

fn finite(values: &[f64]) -> Vec<f64> {
    values.iter().copied().filter(|v| v.is_finite()).collect()
}

/// Gaussian KDE over the sample range padded by three bandwidths.
/// Non-finite values (derived-parameter sentinels) are dropped.
pub fn density(values: &[f64], points: usize, bandwidth: Option<f64>) -> Result<Density> {
    let v = finite(values);
    let h = match bandwidth {
        Some(h) => h,
        None => silverman_bandwidth(&v)?,
    };
    let (lo, hi) = range(&v);
    let grid = linear_grid(lo - 3.0 * h, hi + 3.0 * h, points);
    Ok(kde(&v, &grid, h)?)
}

pub fn histogram_of(values: &[f64], bins: usize) -> Result<Histogram> {
    let v = finite(values);
    let (lo, hi) = range(&v);
    let hi = if hi > lo { hi } else { lo + 1.0 };
    Ok(histogram(&v, lo, hi, bins)?)
}

fn range(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
}

/// Keeps file names portable.
pub fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' }).collect()
}
