//! `abcpt diagnose`: tables from a stored trace.

use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use abcpt::diagnostics::{
    acceptance_table, exchange_matrix, posterior_summary, write_acceptance_csv, write_density_csv,
    write_histogram_csv, write_matrix_csv, write_summary_csv, ExchangeMode,
};
use abcpt::Trace;

use crate::error::{CliError, Result};
use crate::run::REPORT_FILE;
use crate::tables::{
    acf_table, columns, density, derived_names, file_stem, histogram_of, tb_transform, write_acf_csv, write_file,
    DEFAULT_GRID_POINTS, DEFAULT_LAGS, DEFAULT_THINNINGS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Request {
    Acceptance,
    ExchangeMatrix,
    Acf,
    Summary,
    Density,
    Histogram,
    /// Export the trace itself as `states.csv` and `exchanges.csv`.
    TraceCsv,
}

impl Request {
    pub const KEYWORDS: [&'static str; 7] =
        ["acceptance", "exchange-matrix", "acf", "summary", "density", "histogram", "trace-csv"];
}

impl FromStr for Request {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "acceptance" => Self::Acceptance,
            "exchange-matrix" => Self::ExchangeMatrix,
            "acf" => Self::Acf,
            "summary" => Self::Summary,
            "density" => Self::Density,
            "histogram" => Self::Histogram,
            "trace-csv" => Self::TraceCsv,
            _ => {
                return Err(CliError::Usage(format!(
                    "unknown request `{s}` (expected one of {})",
                    Request::KEYWORDS.join(", ")
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    /// Tuberculosis derived parameters.
    Tb,
}

impl FromStr for Transform {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tb" => Ok(Self::Tb),
            _ => Err(CliError::Usage(format!("unknown transform `{s}` (expected tb)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DiagnoseOptions {
    pub trace: PathBuf,
    pub requests: Vec<Request>,
    /// One-based chain index.
    pub chain: usize,
    /// Defaults to the value in a `report.json` beside the trace, else 0.
    pub burn_in: Option<usize>,
    pub thin: Option<usize>,
    pub lags: Vec<usize>,
    pub thinnings: Vec<usize>,
    pub exchange_mode: ExchangeMode,
    pub transform: Option<Transform>,
    pub grid_points: usize,
    pub bandwidth: Option<f64>,
    pub bins: usize,
    /// Defaults to the trace's directory.
    pub out: Option<PathBuf>,
}

impl DiagnoseOptions {
    pub fn new(trace: impl Into<PathBuf>, requests: Vec<Request>) -> Self {
        Self {
            trace: trace.into(),
            requests,
            chain: 1,
            burn_in: None,
            thin: None,
            lags: DEFAULT_LAGS.to_vec(),
            thinnings: DEFAULT_THINNINGS.to_vec(),
            exchange_mode: ExchangeMode::PerIteration,
            transform: None,
            grid_points: DEFAULT_GRID_POINTS,
            bandwidth: None,
            bins: 50,
            out: None,
        }
    }
}

pub fn read_trace(path: &Path) -> Result<Trace> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(Trace::read_binary(BufReader::new(file))?)
}

/// Burn-in and thinning recorded by `run` next to the trace, if any.
fn recorded_window(trace_path: &Path) -> Option<(usize, usize)> {
    let report = trace_path.parent()?.join(REPORT_FILE);
    let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).ok()?).ok()?;
    let field = |k: &str| value.get(k)?.as_u64().map(|v| v as usize);
    Some((field("burn_in")?, field("thin")?))
}

/// Writes every requested table and returns the file names.
pub fn cmd_diagnose(opts: &DiagnoseOptions, log: &mut dyn Write) -> Result<Vec<String>> {
    if opts.requests.is_empty() {
        return Err(CliError::Usage(format!(
            "nothing requested (choose from {})",
            Request::KEYWORDS.join(", ")
        )));
    }
    let trace = read_trace(&opts.trace)?;
    let n = trace.n_chains();
    if opts.chain == 0 || opts.chain > n {
        return Err(CliError::Usage(format!("chain {} does not exist (the trace has {n})", opts.chain)));
    }
    let recorded = recorded_window(&opts.trace);
    let burn_in = opts.burn_in.or(recorded.map(|r| r.0)).unwrap_or(0);
    let thin = opts.thin.or(recorded.map(|r| r.1)).unwrap_or(1);
    if thin == 0 {
        return Err(CliError::Usage("--thin must be at least 1".into()));
    }
    if burn_in >= trace.iterations() {
        return Err(CliError::Usage(format!(
            "burn-in {burn_in} leaves no samples from {} iterations",
            trace.iterations()
        )));
    }
    let derived = match opts.transform {
        Some(Transform::Tb) if trace.dim() != 3 => {
            return Err(CliError::Usage(format!(
                "the tb transform needs three parameters, the trace has {}",
                trace.dim()
            )))
        }
        Some(Transform::Tb) => true,
        None => false,
    };
    let dir = match &opts.out {
        Some(d) => d.clone(),
        None => opts.trace.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;

    let samples = trace.samples(opts.chain - 1, burn_in, thin);
    let names = trace.parameter_names().to_vec();
    let cols = columns(&samples, &names, derived);
    let suffix = if opts.chain == 1 { String::new() } else { format!("_chain{}", opts.chain) };
    let mut written = Vec::new();
    for request in &opts.requests {
        match request {
            Request::Acceptance => {
                let t = acceptance_table(&trace)?;
                write_file(&dir, "acceptance.csv", &mut written, |w| write_acceptance_csv(&t, w))?;
            }
            Request::ExchangeMatrix => {
                let m = exchange_matrix(&trace, opts.exchange_mode)?;
                let name = match opts.exchange_mode {
                    ExchangeMode::PerIteration => "exchange_matrix.csv",
                    ExchangeMode::PerProposal => "exchange_matrix_per_proposal.csv",
                };
                write_file(&dir, name, &mut written, |w| write_matrix_csv(&m, w))?;
            }
            Request::Acf => {
                let rows = acf_table(&cols, &opts.lags, &opts.thinnings)?;
                let name = format!("acf{suffix}.csv");
                write_file(&dir, &name, &mut written, |w| write_acf_csv(&rows, &opts.lags, w))?;
            }
            Request::Summary => {
                let s = if derived {
                    let f: &dyn Fn(&[f64]) -> Vec<f64> = &tb_transform;
                    posterior_summary(&samples, &derived_names(), Some(f))?
                } else {
                    posterior_summary(&samples, &names, None)?
                };
                let name = if derived { format!("summary_derived{suffix}.csv") } else { format!("summary{suffix}.csv") };
                write_file(&dir, &name, &mut written, |w| write_summary_csv(&s, w))?;
            }
            Request::Density => {
                for (name, values) in &cols {
                    let d = density(values, opts.grid_points, opts.bandwidth)?;
                    let file = format!("density_{}{suffix}.csv", file_stem(name));
                    write_file(&dir, &file, &mut written, |w| write_density_csv(&d, w))?;
                }
            }
            Request::Histogram => {
                for (name, values) in &cols {
                    let h = histogram_of(values, opts.bins)?;
                    let file = format!("histogram_{}{suffix}.csv", file_stem(name));
                    write_file(&dir, &file, &mut written, |w| write_histogram_csv(&h, w))?;
                }
            }
            Request::TraceCsv => {
                write_file(&dir, "states.csv", &mut written, |w| trace.write_states_csv(w))?;
                write_file(&dir, "exchanges.csv", &mut written, |w| trace.write_exchanges_csv(w))?;
            }
        }
    }
    for name in &written {
        let _ = writeln!(log, "{}", dir.join(name).display());
    }
    Ok(written)
}
