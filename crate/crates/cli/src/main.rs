use std::path::PathBuf;
use std::process::ExitCode;

use abcpt::diagnostics::ExchangeMode;
use abcpt_cli::config::TraceFormat;
use abcpt_cli::diagnose::{cmd_diagnose, DiagnoseOptions, Request, Transform};
use abcpt_cli::run::cmd_run;
use abcpt_cli::validate::{cmd_validate, non_strict_predicate, ValidateOptions};
use abcpt_cli::{Algorithm, CliError, Overrides, Preset, RunSpec};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "abcpt", version, about = "Likelihood-free inference with ABC parallel tempering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its trace, tables and report
    Run(RunArgs),
    /// Build diagnostic tables from a stored trace
    Diagnose(DiagnoseArgs),
    /// Check the samplers and models against analytic oracles
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration: toy, toy-paper or tb
    #[arg(long)]
    preset: Option<Preset>,
    /// pt, mcmc or rejection
    #[arg(long)]
    algorithm: Option<Algorithm>,
    #[arg(long)]
    seed: Option<u64>,
    /// Threads for local moves; results do not depend on it
    #[arg(long)]
    workers: Option<usize>,
    /// Number of rings; 0 selects pairs among all chains
    #[arg(long)]
    rings: Option<usize>,
    /// Exchange proposals per iteration; 0 runs independent chains
    #[arg(long)]
    exchanges: Option<usize>,
    /// Iterations (proposal budget for rejection sampling)
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    thin: Option<usize>,
    /// Output directory [default: $ABCPT_OUT_DIR, then ./abcpt-out]
    #[arg(long)]
    out: Option<PathBuf>,
    /// binary, csv or both
    #[arg(long)]
    trace_format: Option<TraceFormat>,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Binary trace written by `run`
    #[arg(long)]
    trace: PathBuf,
    /// Tables to build: acceptance, exchange-matrix, acf, summary, density,
    /// histogram, trace-csv
    #[arg(required = true)]
    requests: Vec<String>,
    /// Chain to summarize, counted from 1
    #[arg(long, default_value_t = 1)]
    chain: usize,
    /// [default: the run's burn-in when its report is beside the trace]
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    thin: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,10,20")]
    lags: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,10,50")]
    thinnings: Vec<usize>,
    /// per-iteration or per-proposal
    #[arg(long, default_value = "per-iteration")]
    exchange_mode: ExchangeMode,
    /// tb: report transmission rate, doubling time and reproductive value
    #[arg(long)]
    transform: Option<Transform>,
    #[arg(long, default_value_t = 512)]
    grid_points: usize,
    /// Density bandwidth [default: Silverman's rule]
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long, default_value_t = 50)]
    bins: usize,
    /// Output directory [default: the trace's directory]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Replace the exchange predicate with a non-strict comparison
    #[arg(long, hide = true)]
    flip_exchange_inequality: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout();
    let result = match cli.command {
        Command::Run(a) => run(a, &mut stdout),
        Command::Diagnose(a) => diagnose(a, &mut stdout),
        Command::Validate(a) => validate(a, &mut stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(a: RunArgs, out: &mut std::io::Stdout) -> Result<ExitCode, CliError> {
    let mut spec = match (&a.config, a.preset) {
        (Some(path), _) => RunSpec::from_file(path)?,
        (None, Some(p)) => RunSpec::preset(p),
        (None, None) => return Err(CliError::Usage("give --config FILE or --preset NAME".into())),
    };
    spec.apply(&Overrides {
        algorithm: a.algorithm,
        seed: a.seed,
        workers: a.workers,
        rings: a.rings,
        exchanges: a.exchanges,
        iterations: a.iterations,
        burn_in: a.burn_in,
        thin: a.thin,
        out: a.out,
        trace_format: a.trace_format,
    })?;
    cmd_run(&spec, out)?;
    Ok(ExitCode::SUCCESS)
}

fn diagnose(a: DiagnoseArgs, out: &mut std::io::Stdout) -> Result<ExitCode, CliError> {
    let requests = a.requests.iter().map(|r| r.parse()).collect::<Result<Vec<Request>, _>>()?;
    let opts = DiagnoseOptions {
        chain: a.chain,
        burn_in: a.burn_in,
        thin: a.thin,
        lags: a.lags,
        thinnings: a.thinnings,
        exchange_mode: a.exchange_mode,
        transform: a.transform,
        grid_points: a.grid_points,
        bandwidth: a.bandwidth,
        bins: a.bins,
        out: a.out,
        ..DiagnoseOptions::new(a.trace, requests)
    };
    cmd_diagnose(&opts, out)?;
    Ok(ExitCode::SUCCESS)
}

fn validate(a: ValidateArgs, out: &mut std::io::Stdout) -> Result<ExitCode, CliError> {
    let mut opts = ValidateOptions {
        seed: a.seed,
        ..ValidateOptions::default()
    };
    if a.flip_exchange_inequality {
        opts.exchange_predicate = non_strict_predicate;
    }
    let checks = cmd_validate(&opts, out)?;
    Ok(if checks.iter().all(|c| c.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
