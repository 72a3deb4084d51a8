//! `abcpt run`: execute one configured experiment and write its artifacts.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use abcpt::diagnostics::{
    acceptance_table, exchange_matrix, posterior_summary, write_acceptance_csv, write_density_csv,
    write_matrix_csv, write_summary_csv, AcceptanceTable, ExchangeMode, PosteriorSummary,
};
use abcpt::tb::TbModel;
use abcpt::toy::ToyModel;
use abcpt::{
    abc_mcmc_run, abc_rejection_budget, rejection_state, run_abc_pt_with_workers, stream, Model, ParameterVector,
    RingPartition, Trace,
};
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, Export, ModelSpec, RunSpec, TraceFormat};
use crate::error::{CliError, Result};
use crate::tables::{
    acf_table, columns, density, derived_names, file_stem, tb_transform, write_acf_csv, write_file,
    write_samples_csv, DEFAULT_GRID_POINTS, DEFAULT_LAGS, DEFAULT_THINNINGS,
};

pub const REPORT_FILE: &str = "report.json";
pub const TRACE_FILE: &str = "trace.bin";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingReport {
    pub count: usize,
    pub boundaries: Vec<f64>,
    pub group_sizes: Vec<usize>,
}

impl From<&RingPartition> for RingReport {
    fn from(r: &RingPartition) -> Self {
        Self {
            count: r.len(),
            boundaries: r.boundaries().to_vec(),
            group_sizes: r.group_sizes().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeReport {
    pub proposals_per_iteration: usize,
    pub accepted: u64,
    pub accepted_per_iteration: f64,
    /// Proposals that found no eligible pair (rings only).
    pub skipped: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionReport {
    pub proposals: u64,
    pub accepted: usize,
    pub rate: f64,
}

/// Wall-clock facts. Everything outside this block depends only on the
/// configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Execution {
    pub started_unix: u64,
    pub wall_seconds: f64,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub model: String,
    pub algorithm: Algorithm,
    /// `independent-chains`, `uniform-exchange` or `rings` for ABC-PT;
    /// the algorithm name otherwise.
    pub mode: String,
    pub config: RunSpec,
    pub parameter_names: Vec<String>,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub rings: Option<RingReport>,
    pub init_proposals: Option<Vec<u64>>,
    pub acceptance: Option<AcceptanceTable>,
    pub exchanges: Option<ExchangeReport>,
    pub rejection: Option<RejectionReport>,
    /// Chain 1 after burn-in and thinning.
    pub summary: Option<PosteriorSummary>,
    /// Tuberculosis runs: transmission rate, doubling time and
    /// reproductive value.
    pub derived_summary: Option<PosteriorSummary>,
    pub artifacts: Vec<String>,
    pub execution: Execution,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub report: Report,
}

struct Products {
    trace: Option<Trace>,
    samples: Vec<ParameterVector>,
    names: Vec<String>,
    init_proposals: Option<Vec<u64>>,
    rings: Option<RingPartition>,
    rejection: Option<RejectionReport>,
}

/// Runs `spec`, writes the trace, diagnostics and `report.json` into the
/// output directory, and logs the seed and configuration hash to `log`.
pub fn cmd_run(spec: &RunSpec, log: &mut dyn Write) -> Result<RunOutcome> {
    let hash = spec.config_hash();
    let output = spec.output();
    let workers = spec
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let _ = writeln!(log, "seed {}", spec.seed);
    let _ = writeln!(log, "config {hash}");

    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let products = match &spec.model {
        ModelSpec::Toy(t) => {
            let model = ToyModel::new()
                .with_weights(t.weights)?
                .with_kernel_sd(t.kernel_sd)?
                .with_observation(t.observation)?;
            execute(spec, &model, workers)?
        }
        ModelSpec::Tb(t) => {
            let temps = match spec.algorithm {
                Algorithm::Pt => spec.pt.temperatures.clone(),
                Algorithm::Mcmc => vec![spec.mcmc.temperature],
                Algorithm::Rejection => Vec::new(),
            };
            let model = TbModel::with_options(t.observed()?, t.stop_size, t.max_events, t.kernel_power)?
                .prepare_temperatures(&temps)?;
            execute(spec, &model, workers)?
        }
    };
    let wall_seconds = clock.elapsed().as_secs_f64();

    let dir = output.dir.clone();
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut written = Vec::new();
    let is_tb = matches!(spec.model, ModelSpec::Tb(_));

    if let Some(trace) = &products.trace {
        if matches!(output.trace, TraceFormat::Binary | TraceFormat::Both) {
            write_file(&dir, TRACE_FILE, &mut written, |w| trace.write_binary(w))?;
        }
        if matches!(output.trace, TraceFormat::Csv | TraceFormat::Both) {
            write_file(&dir, "states.csv", &mut written, |w| trace.write_states_csv(w))?;
            write_file(&dir, "exchanges.csv", &mut written, |w| trace.write_exchanges_csv(w))?;
        }
    }
    if products.rejection.is_some() {
        write_file(&dir, "samples.csv", &mut written, |w| {
            write_samples_csv(&products.names, &products.samples, w)
        })?;
    }

    let acceptance = products.trace.as_ref().map(acceptance_table).transpose()?;
    let (iterations, burn_in, thin) = match spec.algorithm {
        Algorithm::Pt => (spec.pt.iterations, spec.pt.burn_in, spec.pt.thin),
        Algorithm::Mcmc => (spec.mcmc.iterations, spec.mcmc.burn_in, spec.mcmc.thin),
        Algorithm::Rejection => (spec.rejection.proposals as usize, 0, 1),
    };
    let exchanges = match (&products.trace, spec.algorithm) {
        (Some(trace), Algorithm::Pt) => {
            let accepted = trace.exchanges().iter().filter(|e| e.accepted).count() as u64;
            Some(ExchangeReport {
                proposals_per_iteration: spec.pt.exchanges.unwrap_or(spec.pt.tolerances.len()),
                accepted,
                accepted_per_iteration: accepted as f64 / trace.iterations() as f64,
                skipped: trace.skipped_exchanges(),
            })
        }
        _ => None,
    };

    let mut summary = None;
    let mut derived_summary = None;
    for export in &output.exports {
        match export {
            Export::Acceptance => {
                if let Some(table) = &acceptance {
                    write_file(&dir, "acceptance.csv", &mut written, |w| write_acceptance_csv(table, w))?;
                }
            }
            Export::ExchangeMatrix => {
                if let (Some(trace), Algorithm::Pt) = (&products.trace, spec.algorithm) {
                    let m = exchange_matrix(trace, ExchangeMode::PerIteration)?;
                    write_file(&dir, "exchange_matrix.csv", &mut written, |w| write_matrix_csv(&m, w))?;
                }
            }
            Export::Summary => {
                let s = posterior_summary(&products.samples, &products.names, None)?;
                write_file(&dir, "summary.csv", &mut written, |w| write_summary_csv(&s, w))?;
                summary = Some(s);
                if is_tb {
                    let f: &dyn Fn(&[f64]) -> Vec<f64> = &tb_transform;
                    let d = posterior_summary(&products.samples, &derived_names(), Some(f))?;
                    write_file(&dir, "summary_derived.csv", &mut written, |w| write_summary_csv(&d, w))?;
                    derived_summary = Some(d);
                }
            }
            Export::Density => {
                let mut cols = columns(&products.samples, &products.names, false);
                if is_tb {
                    cols.extend(columns(&products.samples, &products.names, true));
                }
                for (name, values) in &cols {
                    let d = density(values, DEFAULT_GRID_POINTS, None)?;
                    let file = format!("density_{}.csv", file_stem(name));
                    write_file(&dir, &file, &mut written, |w| write_density_csv(&d, w))?;
                }
            }
            Export::Acf => {
                let cols = columns(&products.samples, &products.names, false);
                let rows = acf_table(&cols, &DEFAULT_LAGS, &DEFAULT_THINNINGS)?;
                write_file(&dir, "acf.csv", &mut written, |w| write_acf_csv(&rows, &DEFAULT_LAGS, w))?;
            }
        }
    }

    let mode = match spec.algorithm {
        Algorithm::Pt if spec.pt.exchanges == Some(0) => "independent-chains",
        Algorithm::Pt if spec.pt.rings.is_some() => "rings",
        Algorithm::Pt => "uniform-exchange",
        Algorithm::Mcmc => "mcmc",
        Algorithm::Rejection => "rejection",
    };
    written.push(REPORT_FILE.to_string());
    let report = Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: hash,
        seed: spec.seed,
        model: match spec.model {
            ModelSpec::Toy(_) => "toy".into(),
            ModelSpec::Tb(_) => "tb".into(),
        },
        algorithm: spec.algorithm,
        mode: mode.into(),
        config: spec.clone(),
        parameter_names: products.names.clone(),
        iterations,
        burn_in,
        thin,
        rings: products.rings.as_ref().map(RingReport::from),
        init_proposals: products.init_proposals,
        acceptance,
        exchanges,
        rejection: products.rejection,
        summary,
        derived_summary,
        artifacts: written,
        execution: Execution {
            started_unix,
            wall_seconds,
            workers,
        },
    };
    let mut scratch = Vec::new();
    write_file(&dir, REPORT_FILE, &mut scratch, |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)
    })?;
    let _ = writeln!(log, "wrote {} files to {}", report.artifacts.len(), dir.display());
    Ok(RunOutcome { dir, report })
}

fn execute<M: Model>(spec: &RunSpec, model: &M, workers: usize) -> Result<Products> {
    let names = model.parameter_names();
    match spec.algorithm {
        Algorithm::Pt => {
            let config = spec.pt.to_config(spec.seed)?;
            let out = run_abc_pt_with_workers(&config, model, workers)?;
            Ok(Products {
                samples: out.chain_samples(0),
                names,
                init_proposals: Some(out.init_proposals),
                rings: out.rings,
                trace: Some(out.trace),
                rejection: None,
            })
        }
        Algorithm::Mcmc => {
            let m = &spec.mcmc;
            let mut rng = stream(spec.seed, 0);
            let (init, attempts) = rejection_state(model, m.epsilon, 0, Some(m.init_max_attempts), &mut rng)?;
            let out = abc_mcmc_run(model, m.epsilon, m.temperature, m.iterations, m.burn_in, init, &mut rng)?;
            Ok(Products {
                samples: out.samples(m.thin),
                names,
                init_proposals: Some(vec![attempts]),
                rings: None,
                trace: Some(out.trace),
                rejection: None,
            })
        }
        Algorithm::Rejection => {
            let r = &spec.rejection;
            let mut rng = stream(spec.seed, 0);
            let out = abc_rejection_budget(model, r.epsilon, r.proposals, &mut rng)?;
            let accepted = out.samples.len();
            Ok(Products {
                rejection: Some(RejectionReport {
                    proposals: out.proposals_used,
                    accepted,
                    rate: accepted as f64 / out.proposals_used as f64,
                }),
                samples: out.samples,
                names,
                init_proposals: None,
                rings: None,
                trace: None,
            })
        }
    }
}
