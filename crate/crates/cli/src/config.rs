//! Run configuration.
//!
//! A run is described by one TOML file. Every key is optional: values not
//! given are taken from a preset (`preset = "toy"` or the default preset
//! of the chosen model), and command-line flags override both.
//!
//! ```toml
//! preset = "toy"            # toy | toy-paper | tb
//! model = "toy"             # toy | tb
//! algorithm = "pt"          # pt | mcmc | rejection
//! seed = 42
//! workers = 4               # execution only, never changes results
//!
//! [pt]
//! tolerances = { lo = 0.025, hi = 2.0, n = 15, spacing = "log" }
//! temperatures = [1.0, 1.1, 1.2]   # explicit arrays work for both
//! iterations = 600000
//! burn_in = 150000
//! thin = 1
//! exchanges = 15            # proposals per iteration; 0 = independent chains
//! rings = 3                 # omit or 0 for uniform pair selection
//! init_max_attempts = 10000000
//!
//! [mcmc]
//! epsilon = 0.025
//! temperature = 1.0
//! iterations = 600000
//! burn_in = 150000
//! thin = 1
//!
//! [rejection]
//! epsilon = 0.025
//! proposals = 100000
//!
//! [toy]
//! observation = 0.0
//! weights = [0.45, 0.45, 0.1]
//! kernel_sd = 0.15
//!
//! [tb]
//! observed = "clusters.txt" # `size count` lines, relative to this file
//! # clusters = [[30, 1], [23, 1], [1, 282]]
//! stop_size = 10000
//! max_events = 1000000000
//! kernel_power = "spectral" # or "entrywise"
//!
//! [output]
//! dir = "runs/toy"
//! trace = "binary"          # binary | csv | both
//! exports = ["acceptance", "exchange-matrix", "summary"]
//! ```
//!
//! Schedules are either explicit arrays or `{ lo, hi, n, spacing = "log" }`.
//! Temperature generators must start at `lo = 1`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use abcpt::tb::{ClusterConfiguration, KernelPower, DEFAULT_MAX_EVENTS, DEFAULT_STOP_SIZE};
use abcpt::toy::MODIFIED_WEIGHTS;
use abcpt::{
    log_spaced_schedule, PtConfig, TemperatureSchedule, ToleranceSchedule, DEFAULT_INIT_MAX_ATTEMPTS,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ABCPT_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "abcpt-out";
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Pt,
    Mcmc,
    Rejection,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pt => "pt",
            Self::Mcmc => "mcmc",
            Self::Rejection => "rejection",
        })
    }
}

impl FromStr for Algorithm {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pt" => Ok(Self::Pt),
            "mcmc" => Ok(Self::Mcmc),
            "rejection" => Ok(Self::Rejection),
            _ => Err(CliError::Usage(format!(
                "unknown algorithm `{s}` (expected pt, mcmc or rejection)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Toy,
    Tb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Toy model at desk scale (60k iterations).
    Toy,
    /// Toy model at the published scale (600k iterations).
    ToyPaper,
    Tb,
}

impl Preset {
    pub const NAMES: [&'static str; 3] = ["toy", "toy-paper", "tb"];

    pub fn name(self) -> &'static str {
        match self {
            Self::Toy => "toy",
            Self::ToyPaper => "toy-paper",
            Self::Tb => "tb",
        }
    }
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "toy" => Ok(Self::Toy),
            "toy-paper" => Ok(Self::ToyPaper),
            "tb" => Ok(Self::Tb),
            _ => Err(CliError::Usage(format!(
                "unknown preset `{s}` (expected one of {})",
                Preset::NAMES.join(", ")
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToySpec {
    pub observation: f64,
    pub weights: [f64; 3],
    pub kernel_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TbSpec {
    /// `(size, count)` pairs of the observed cluster configuration.
    pub clusters: Vec<(u32, u32)>,
    pub stop_size: usize,
    pub max_events: u64,
    pub kernel_power: KernelPower,
}

impl TbSpec {
    pub fn observed(&self) -> Result<ClusterConfiguration> {
        ClusterConfiguration::from_size_counts(&self.clusters).map_err(|e| CliError::Invalid(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Toy(ToySpec),
    Tb(TbSpec),
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            Self::Toy(_) => ModelKind::Toy,
            Self::Tb(_) => ModelKind::Tb,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtSpec {
    pub tolerances: Vec<f64>,
    pub temperatures: Vec<f64>,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// `None` means one proposal per chain.
    pub exchanges: Option<usize>,
    pub rings: Option<usize>,
    pub init_max_attempts: u64,
}

impl PtSpec {
    pub fn to_config(&self, seed: u64) -> abcpt::Result<PtConfig> {
        let tolerances = ToleranceSchedule::new(self.tolerances.clone())?;
        let n = tolerances.len();
        let cfg = PtConfig {
            tolerances,
            temperatures: TemperatureSchedule::new(self.temperatures.clone())?,
            iterations: self.iterations,
            burn_in: self.burn_in,
            thinning: self.thin,
            exchanges_per_iteration: self.exchanges.unwrap_or(n),
            ring_count: self.rings,
            master_seed: seed,
            init_max_attempts: self.init_max_attempts,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcSpec {
    pub epsilon: f64,
    pub temperature: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub init_max_attempts: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionSpec {
    pub epsilon: f64,
    pub proposals: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceFormat {
    Binary,
    Csv,
    Both,
}

impl FromStr for TraceFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(Self::Binary),
            "csv" => Ok(Self::Csv),
            "both" => Ok(Self::Both),
            _ => Err(CliError::Usage(format!("unknown trace format `{s}` (expected binary, csv or both)"))),
        }
    }
}

/// Diagnostic tables written next to the trace after a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Export {
    Acceptance,
    ExchangeMatrix,
    Summary,
    Density,
    Acf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub trace: TraceFormat,
    pub exports: Vec<Export>,
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub model: ModelSpec,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub pt: PtSpec,
    pub mcmc: McmcSpec,
    pub rejection: RejectionSpec,
    #[serde(skip)]
    pub workers: Option<usize>,
    #[serde(skip)]
    pub output: Option<OutputSpec>,
}

fn toy_spec() -> ToySpec {
    ToySpec {
        observation: 0.0,
        weights: MODIFIED_WEIGHTS,
        kernel_sd: 0.15,
    }
}

fn tb_spec() -> TbSpec {
    TbSpec {
        clusters: ClusterConfiguration::observed().size_counts(),
        stop_size: DEFAULT_STOP_SIZE,
        max_events: DEFAULT_MAX_EVENTS,
        kernel_power: KernelPower::Spectral,
    }
}

impl RunSpec {
    pub fn preset(preset: Preset) -> Self {
        let (model, base, rejection_budget) = match preset {
            Preset::Toy => (
                ModelSpec::Toy(toy_spec()),
                PtConfig::toy_preset(DEFAULT_SEED).with_iterations(60_000, 15_000).expect("valid"),
                100_000,
            ),
            Preset::ToyPaper => (ModelSpec::Toy(toy_spec()), PtConfig::toy_preset(DEFAULT_SEED), 100_000),
            Preset::Tb => (ModelSpec::Tb(tb_spec()), PtConfig::tb_preset(DEFAULT_SEED), 10_000),
        };
        let eps1 = base.tolerances.get(0);
        Self {
            model,
            algorithm: Algorithm::Pt,
            seed: DEFAULT_SEED,
            pt: PtSpec {
                tolerances: base.tolerances.as_slice().to_vec(),
                temperatures: base.temperatures.as_slice().to_vec(),
                iterations: base.iterations,
                burn_in: base.burn_in,
                thin: base.thinning,
                exchanges: None,
                rings: None,
                init_max_attempts: base.init_max_attempts,
            },
            mcmc: McmcSpec {
                epsilon: eps1,
                temperature: 1.0,
                iterations: base.iterations,
                burn_in: base.burn_in,
                thin: 1,
                init_max_attempts: DEFAULT_INIT_MAX_ATTEMPTS,
            },
            rejection: RejectionSpec {
                epsilon: eps1,
                proposals: rejection_budget,
            },
            workers: None,
            output: None,
        }
    }

    /// Reads a configuration file. Relative paths inside it resolve against
    /// the file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, &path.display().to_string(), base)
    }

    /// Parses configuration text. `origin` labels error messages.
    pub fn from_toml_str(text: &str, origin: &str, base_dir: &Path) -> Result<Self> {
        let src = Source { text, origin };
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let offset = e.span().map(|s| s.start).unwrap_or(0);
            src.error_at(offset, e.message().trim().to_string())
        })?;
        let spec = raw.resolve(&src, base_dir)?;
        spec.check().map_err(|(field, msg)| src.error_for(field, msg))?;
        Ok(spec)
    }

    /// Applies command-line overrides and re-validates.
    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(a) = o.algorithm {
            self.algorithm = a;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(w) = o.workers {
            self.workers = Some(w);
        }
        let algorithm = self.algorithm;
        let pt_only =
            |flag: &str| CliError::Invalid(format!("{flag} applies only to the pt algorithm, not {algorithm}"));
        if let Some(k) = o.rings {
            if self.algorithm != Algorithm::Pt {
                return Err(pt_only("--rings"));
            }
            self.pt.rings = (k > 0).then_some(k);
        }
        if let Some(x) = o.exchanges {
            if self.algorithm != Algorithm::Pt {
                return Err(pt_only("--exchanges"));
            }
            self.pt.exchanges = Some(x);
        }
        match self.algorithm {
            Algorithm::Pt => {
                if let Some(it) = o.iterations {
                    self.pt.iterations = it;
                }
                if let Some(b) = o.burn_in {
                    self.pt.burn_in = b;
                }
                if let Some(t) = o.thin {
                    self.pt.thin = t;
                }
            }
            Algorithm::Mcmc => {
                if let Some(it) = o.iterations {
                    self.mcmc.iterations = it;
                }
                if let Some(b) = o.burn_in {
                    self.mcmc.burn_in = b;
                }
                if let Some(t) = o.thin {
                    self.mcmc.thin = t;
                }
            }
            Algorithm::Rejection => {
                if o.burn_in.is_some() || o.thin.is_some() {
                    return Err(CliError::Invalid(
                        "--burn-in and --thin do not apply to rejection sampling".into(),
                    ));
                }
                if let Some(it) = o.iterations {
                    self.rejection.proposals = it as u64;
                }
            }
        }
        if let Some(dir) = &o.out {
            self.output_mut().dir = dir.clone();
        }
        if let Some(f) = o.trace_format {
            self.output_mut().trace = f;
        }
        self.check()
            .map_err(|(field, msg)| CliError::Invalid(format!("{field}: {msg}")))
    }

    fn output_mut(&mut self) -> &mut OutputSpec {
        let algorithm = self.algorithm;
        self.output.get_or_insert_with(|| default_output(algorithm, None))
    }

    /// Output settings, falling back to [`OUT_DIR_ENV`] and then
    /// [`DEFAULT_OUT_DIR`] for the directory.
    pub fn output(&self) -> OutputSpec {
        self.output
            .clone()
            .unwrap_or_else(|| default_output(self.algorithm, std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)))
    }

    /// Checks every field that can be wrong on its own or in combination.
    /// Errors name the offending key as `section.key`.
    fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        let sch = |field, e: abcpt::Error| (field, e.to_string());
        match &self.model {
            ModelSpec::Toy(t) => {
                abcpt::toy::ToyModel::new()
                    .with_weights(t.weights)
                    .map_err(|e| sch("toy.weights", e))?
                    .with_kernel_sd(t.kernel_sd)
                    .map_err(|e| sch("toy.kernel_sd", e))?
                    .with_observation(t.observation)
                    .map_err(|e| sch("toy.observation", e))?;
            }
            ModelSpec::Tb(t) => {
                let obs = ClusterConfiguration::from_size_counts(&t.clusters).map_err(|e| sch("tb.observed", e))?;
                if (t.stop_size as u64) < obs.sample_size() {
                    return Err((
                        "tb.stop_size",
                        format!("{} is smaller than the observed sample size {}", t.stop_size, obs.sample_size()),
                    ));
                }
                if t.max_events == 0 {
                    return Err(("tb.max_events", "must be positive".into()));
                }
            }
        }
        match self.algorithm {
            Algorithm::Pt => {
                let p = &self.pt;
                let tol = ToleranceSchedule::new(p.tolerances.clone()).map_err(|e| sch("pt.tolerances", e))?;
                TemperatureSchedule::new(p.temperatures.clone()).map_err(|e| sch("pt.temperatures", e))?;
                if p.temperatures.len() != tol.len() {
                    return Err((
                        "pt.temperatures",
                        format!("{} temperatures for {} tolerance levels", p.temperatures.len(), tol.len()),
                    ));
                }
                if tol.len() < 2 {
                    return Err(("pt.tolerances", "ABC-PT needs at least two chains".into()));
                }
                check_run_length(p.iterations, p.burn_in, p.thin, "pt")?;
                if let Some(k) = p.rings {
                    if k == 0 || k > tol.len() {
                        return Err(("pt.rings", format!("ring count {k} must lie in 1..={}", tol.len())));
                    }
                }
                if p.init_max_attempts == 0 {
                    return Err(("pt.init_max_attempts", "must be positive".into()));
                }
                p.to_config(self.seed).map_err(|e| sch("pt", e))?;
            }
            Algorithm::Mcmc => {
                let m = &self.mcmc;
                if !(m.epsilon > 0.0 && m.epsilon.is_finite()) {
                    return Err(("mcmc.epsilon", format!("must be positive, got {}", m.epsilon)));
                }
                if !(m.temperature >= 1.0 && m.temperature.is_finite()) {
                    return Err(("mcmc.temperature", format!("must be at least 1, got {}", m.temperature)));
                }
                check_run_length(m.iterations, m.burn_in, m.thin, "mcmc")?;
                if m.init_max_attempts == 0 {
                    return Err(("mcmc.init_max_attempts", "must be positive".into()));
                }
            }
            Algorithm::Rejection => {
                let r = &self.rejection;
                if !(r.epsilon > 0.0 && r.epsilon.is_finite()) {
                    return Err(("rejection.epsilon", format!("must be positive, got {}", r.epsilon)));
                }
                if r.proposals == 0 {
                    return Err(("rejection.proposals", "must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// The fields that determine the output of the run.
    pub fn semantic(&self) -> SemanticConfig<'_> {
        let active = match self.algorithm {
            Algorithm::Pt => ActiveSection::Pt(&self.pt),
            Algorithm::Mcmc => ActiveSection::Mcmc(&self.mcmc),
            Algorithm::Rejection => ActiveSection::Rejection(&self.rejection),
        };
        SemanticConfig {
            model: &self.model,
            algorithm: self.algorithm,
            seed: self.seed,
            active,
        }
    }

    /// SHA-256 of the canonical JSON of [`RunSpec::semantic`], in hex. Two
    /// specs hash equal iff every field that can affect the samples agrees.
    pub fn config_hash(&self) -> String {
        let mut normalized = self.clone();
        if let Algorithm::Pt = self.algorithm {
            // an explicit default and an omitted value mean the same thing
            let n = normalized.pt.tolerances.len();
            normalized.pt.exchanges.get_or_insert(n);
        }
        let json = serde_json::to_vec(&normalized.semantic()).expect("serializable");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn check_run_length(
    iterations: usize,
    burn_in: usize,
    thin: usize,
    section: &'static str,
) -> std::result::Result<(), (&'static str, String)> {
    let field = |k: &str| -> &'static str {
        match (section, k) {
            ("pt", "iterations") => "pt.iterations",
            ("pt", "burn_in") => "pt.burn_in",
            ("pt", _) => "pt.thin",
            (_, "iterations") => "mcmc.iterations",
            (_, "burn_in") => "mcmc.burn_in",
            _ => "mcmc.thin",
        }
    };
    if iterations == 0 {
        return Err((field("iterations"), "must be positive".into()));
    }
    if burn_in >= iterations {
        return Err((
            field("burn_in"),
            format!("burn-in ({burn_in}) must be smaller than iterations ({iterations})"),
        ));
    }
    if thin == 0 {
        return Err((field("thin"), "must be at least 1".into()));
    }
    Ok(())
}

fn default_output(algorithm: Algorithm, dir: Option<PathBuf>) -> OutputSpec {
    let exports = match algorithm {
        Algorithm::Pt => vec![Export::Acceptance, Export::ExchangeMatrix, Export::Summary],
        Algorithm::Mcmc => vec![Export::Acceptance, Export::Summary],
        Algorithm::Rejection => vec![Export::Summary],
    };
    OutputSpec {
        dir: dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
        trace: TraceFormat::Binary,
        exports,
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "algorithm", content = "settings", rename_all = "lowercase")]
pub enum ActiveSection<'a> {
    Pt(&'a PtSpec),
    Mcmc(&'a McmcSpec),
    Rejection(&'a RejectionSpec),
}

#[derive(Debug, Clone, Serialize)]
pub struct SemanticConfig<'a> {
    pub model: &'a ModelSpec,
    #[serde(skip)]
    pub algorithm: Algorithm,
    pub seed: u64,
    #[serde(flatten)]
    pub active: ActiveSection<'a>,
}

/// Values given on the command line; each replaces the matching file or
/// preset field.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub algorithm: Option<Algorithm>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    /// Zero disables rings.
    pub rings: Option<usize>,
    pub exchanges: Option<usize>,
    /// For rejection sampling this is the proposal budget.
    pub iterations: Option<usize>,
    pub burn_in: Option<usize>,
    pub thin: Option<usize>,
    pub out: Option<PathBuf>,
    pub trace_format: Option<TraceFormat>,
}

struct Source<'a> {
    text: &'a str,
    origin: &'a str,
}

impl Source<'_> {
    fn error_at(&self, offset: usize, message: String) -> CliError {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
        CliError::Config {
            origin: self.origin.to_string(),
            line,
            column,
            message,
        }
    }

    /// Error located at the key `section.key`, or at the section header,
    /// or at the top of the file when neither appears.
    fn error_for(&self, field: &str, message: String) -> CliError {
        let (section, key) = field.split_once('.').unwrap_or((field, ""));
        let offset = self
            .locate(section, key)
            .or_else(|| self.locate(section, ""))
            .or_else(|| self.locate("", "preset"))
            .unwrap_or(0);
        let message = if key.is_empty() {
            message
        } else {
            format!("{field}: {message}")
        };
        self.error_at(offset, message)
    }

    /// Byte offset of `key = ...` inside `[section]` (or a dotted
    /// `section.key = ...` at top level); with an empty key, of the
    /// `[section]` header itself.
    fn locate(&self, section: &str, key: &str) -> Option<usize> {
        let mut current = String::new();
        let mut offset = 0;
        for line in self.text.split_inclusive('\n') {
            let trimmed = line.trim_start();
            let indent = line.len() - trimmed.len();
            if let Some(rest) = trimmed.strip_prefix('[') {
                if let Some(end) = rest.find(']') {
                    current = rest[..end].trim().to_string();
                    if key.is_empty() && current == section {
                        return Some(offset + indent);
                    }
                }
            } else if !key.is_empty() {
                let lhs = trimmed.split('=').next().unwrap_or("").trim();
                let dotted = format!("{section}.{key}");
                let hit = if current == section {
                    lhs == key
                } else {
                    current.is_empty() && (lhs == dotted || (section.is_empty() && lhs == key))
                };
                if hit && trimmed.contains('=') {
                    return Some(offset + indent);
                }
            }
            offset += line.len();
        }
        None
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawSchedule {
    List(Vec<f64>),
    Generator {
        lo: f64,
        hi: f64,
        n: usize,
        #[serde(default = "log_spacing")]
        spacing: String,
    },
}

fn log_spacing() -> String {
    "log".into()
}

impl RawSchedule {
    fn values(self) -> std::result::Result<Vec<f64>, String> {
        match self {
            Self::List(v) => Ok(v),
            Self::Generator { lo, hi, n, spacing } => {
                if spacing != "log" {
                    return Err(format!("unsupported spacing `{spacing}` (only \"log\" is available)"));
                }
                log_spaced_schedule(lo, hi, n).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Option<String>,
    model: Option<ModelKind>,
    algorithm: Option<Algorithm>,
    seed: Option<u64>,
    workers: Option<usize>,
    pt: Option<RawPt>,
    mcmc: Option<RawMcmc>,
    rejection: Option<RawRejection>,
    toy: Option<RawToy>,
    tb: Option<RawTb>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPt {
    tolerances: Option<RawSchedule>,
    temperatures: Option<RawSchedule>,
    iterations: Option<usize>,
    burn_in: Option<usize>,
    thin: Option<usize>,
    exchanges: Option<usize>,
    rings: Option<usize>,
    init_max_attempts: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMcmc {
    epsilon: Option<f64>,
    temperature: Option<f64>,
    iterations: Option<usize>,
    burn_in: Option<usize>,
    thin: Option<usize>,
    init_max_attempts: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRejection {
    epsilon: Option<f64>,
    proposals: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawToy {
    observation: Option<f64>,
    weights: Option<[f64; 3]>,
    kernel_sd: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTb {
    observed: Option<PathBuf>,
    clusters: Option<Vec<(u32, u32)>>,
    stop_size: Option<usize>,
    max_events: Option<u64>,
    kernel_power: Option<KernelPower>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    trace: Option<TraceFormat>,
    exports: Option<Vec<Export>>,
}

impl RawConfig {
    fn resolve(self, src: &Source<'_>, base_dir: &Path) -> Result<RunSpec> {
        let preset = match &self.preset {
            Some(name) => name.parse().map_err(|e: CliError| src.error_for("preset", e.to_string()))?,
            None => match self.model {
                Some(ModelKind::Tb) => Preset::Tb,
                _ => Preset::Toy,
            },
        };
        let mut spec = RunSpec::preset(preset);
        if let Some(kind) = self.model {
            if spec.model.kind() != kind {
                spec.model = match kind {
                    ModelKind::Toy => ModelSpec::Toy(toy_spec()),
                    ModelKind::Tb => ModelSpec::Tb(tb_spec()),
                };
            }
        }
        if let Some(a) = self.algorithm {
            spec.algorithm = a;
        }
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        spec.workers = self.workers;

        if let Some(p) = self.pt {
            let schedule = |s: RawSchedule, field| s.values().map_err(|m| src.error_for(field, m));
            if let Some(s) = p.tolerances {
                spec.pt.tolerances = schedule(s, "pt.tolerances")?;
            }
            if let Some(s) = p.temperatures {
                spec.pt.temperatures = schedule(s, "pt.temperatures")?;
            }
            set(&mut spec.pt.iterations, p.iterations);
            set(&mut spec.pt.burn_in, p.burn_in);
            set(&mut spec.pt.thin, p.thin);
            set(&mut spec.pt.init_max_attempts, p.init_max_attempts);
            if p.exchanges.is_some() {
                spec.pt.exchanges = p.exchanges;
            }
            if let Some(k) = p.rings {
                spec.pt.rings = (k > 0).then_some(k);
            }
        }
        if let Some(m) = self.mcmc {
            set(&mut spec.mcmc.epsilon, m.epsilon);
            set(&mut spec.mcmc.temperature, m.temperature);
            set(&mut spec.mcmc.iterations, m.iterations);
            set(&mut spec.mcmc.burn_in, m.burn_in);
            set(&mut spec.mcmc.thin, m.thin);
            set(&mut spec.mcmc.init_max_attempts, m.init_max_attempts);
        }
        if let Some(r) = self.rejection {
            set(&mut spec.rejection.epsilon, r.epsilon);
            set(&mut spec.rejection.proposals, r.proposals);
        }
        match &mut spec.model {
            ModelSpec::Toy(t) => {
                if self.tb.is_some() {
                    return Err(src.error_for("tb", "a [tb] section requires model = \"tb\"".into()));
                }
                if let Some(raw) = self.toy {
                    set(&mut t.observation, raw.observation);
                    set(&mut t.weights, raw.weights);
                    set(&mut t.kernel_sd, raw.kernel_sd);
                }
            }
            ModelSpec::Tb(t) => {
                if self.toy.is_some() {
                    return Err(src.error_for("toy", "a [toy] section requires model = \"toy\"".into()));
                }
                if let Some(raw) = self.tb {
                    match (raw.observed, raw.clusters) {
                        (Some(_), Some(_)) => {
                            return Err(src.error_for(
                                "tb.clusters",
                                "give either `observed` or `clusters`, not both".into(),
                            ))
                        }
                        (Some(path), None) => {
                            let path = base_dir.join(path);
                            let obs = std::fs::read_to_string(&path)
                                .map_err(|e| e.to_string())
                                .and_then(|text| {
                                    text.parse::<ClusterConfiguration>().map_err(|e| e.to_string())
                                })
                                .map_err(|m| src.error_for("tb.observed", format!("{}: {m}", path.display())))?;
                            t.clusters = obs.size_counts();
                        }
                        (None, Some(c)) => t.clusters = c,
                        (None, None) => {}
                    }
                    set(&mut t.stop_size, raw.stop_size);
                    set(&mut t.max_events, raw.max_events);
                    set(&mut t.kernel_power, raw.kernel_power);
                }
            }
        }
        if let Some(o) = self.output {
            let mut out = default_output(spec.algorithm, None);
            let explicit_dir = o.dir.is_some();
            if let Some(d) = o.dir {
                out.dir = base_dir.join(d);
            }
            set(&mut out.trace, o.trace);
            if let Some(mut e) = o.exports {
                e.sort();
                e.dedup();
                out.exports = e;
            }
            if !explicit_dir {
                if let Some(env) = std::env::var_os(OUT_DIR_ENV) {
                    out.dir = PathBuf::from(env);
                }
            }
            spec.output = Some(out);
        }
        Ok(spec)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}
