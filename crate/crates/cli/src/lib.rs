//! The `fsd` command line: `detect`, `oracle`, `evaluate` and `synth`.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad flags or parameter
//! values), 2 for data errors (unreadable or malformed files, streams the
//! detector rejects, ground truth without both classes).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fsd_core::textprep::TextprepError;
use fsd_core::{
    det_curve, generate_synthetic, join_truth, read_stream, read_verdicts, write_det_csv,
    write_stream, write_verdicts, CostParams, Detector, DetectorConfig, DetectorError, EvalError,
    LshParams, Stoplist, StreamError, SynthConfig, WeightingMode,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

impl From<StreamError> for CliError {
    fn from(e: StreamError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<TextprepError> for CliError {
    fn from(e: TextprepError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<DetectorError> for CliError {
    fn from(e: DetectorError) -> Self {
        match e {
            DetectorError::Config(_) | DetectorError::Lsh(_) => CliError::Usage(e.to_string()),
            DetectorError::DuplicateDoc(_) | DetectorError::Weigh(_) => {
                CliError::Data(e.to_string())
            }
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::InvalidCost(_) => CliError::Usage(e.to_string()),
            EvalError::DegenerateTruth(_) | EvalError::Csv(_) => CliError::Data(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fsd", version, about = "Streaming first-story detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the LSH-backed detector over a stream.
    Detect(DetectArgs),
    /// Run the exhaustive nearest-neighbour detector over a stream.
    Oracle(OracleArgs),
    /// Score verdicts against ground truth and write the DET curve.
    Evaluate(EvaluateArgs),
    /// Write a labelled synthetic stream.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Static,
    Incremental,
}

impl From<Mode> for WeightingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Static => WeightingMode::Static,
            Mode::Incremental => WeightingMode::Incremental,
        }
    }
}

/// Flags shared by `detect` and `oracle`.
#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "incremental")]
    pub mode: Mode,
    /// Leading documents absorbed as the training batch.
    #[arg(long, default_value_t = 0)]
    pub train_prefix: usize,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[arg(long, default_value_t = 1)]
    pub batch_size: usize,
    /// Stopword file, one word per line; the built-in English list otherwise.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Hyperplanes per table.
    #[arg(long, default_value_t = 13)]
    pub k: u32,
    /// Explicit table count, instead of planning it from --phi and --pcoll.
    #[arg(long, conflicts_with_all = ["phi", "pcoll"])]
    pub tables: Option<usize>,
    /// Tolerated probability of missing a neighbour at --pcoll.
    #[arg(long, default_value_t = 0.05)]
    pub phi: f64,
    /// Per-hyperplane collision probability the plan is made for.
    #[arg(long, default_value_t = 0.9)]
    pub pcoll: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub verdicts: PathBuf,
    /// Labelled stream providing the ground truth.
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub det_out: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub c_miss: f64,
    #[arg(long, default_value_t = 0.1)]
    pub c_fa: f64,
    #[arg(long, default_value_t = 0.02)]
    pub p_target: f64,
    /// Ignore the first N verdicts, e.g. a training prefix.
    #[arg(long, default_value_t = 0)]
    pub skip: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub docs: usize,
    #[arg(long)]
    pub events: usize,
    #[arg(long, default_value_t = 2000)]
    pub vocab: usize,
    #[arg(long, default_value_t = 0.05)]
    pub drift: f64,
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of leading documents that are all first stories.
    #[arg(long, default_value_t = 0)]
    pub lead: usize,
}

fn stoplist(path: Option<&Path>) -> Result<Stoplist, CliError> {
    match path {
        Some(p) => Ok(Stoplist::from_path(p)?),
        None => Ok(Stoplist::english()),
    }
}

fn detector_config(common: &CommonArgs, lsh: LshParams) -> DetectorConfig<f64> {
    DetectorConfig {
        threshold: common.threshold,
        lsh,
        mode: common.mode.into(),
        batch_size: common.batch_size,
        train_prefix: common.train_prefix,
    }
}

fn lsh_params(args: &DetectArgs) -> Result<LshParams, CliError> {
    let params = match args.tables {
        Some(l) => LshParams::new(args.k, l, args.seed),
        None => LshParams::planned(args.phi, args.pcoll, args.k, args.seed),
    };
    params.map_err(|e| CliError::Usage(e.to_string()))
}

fn detect(args: &DetectArgs) -> Result<String, CliError> {
    let config = detector_config(&args.common, lsh_params(args)?);
    config.validate()?;
    let stop = stoplist(args.common.stopwords.as_deref())?;
    let docs = read_stream(&args.common.input)?;
    let verdicts = Detector::with_lsh(config, stop)?.run(&docs)?;
    write_verdicts(&args.common.output, &verdicts)?;
    let novel = verdicts.iter().filter(|v| v.is_novel).count();
    Ok(format!("{} documents, {novel} novel", verdicts.len()))
}

fn oracle(args: &OracleArgs) -> Result<String, CliError> {
    // index parameters are unused by the exhaustive detector
    let config = detector_config(&args.common, DetectorConfig::<f64>::default().lsh);
    config.validate()?;
    let stop = stoplist(args.common.stopwords.as_deref())?;
    let docs = read_stream(&args.common.input)?;
    let verdicts = Detector::exhaustive(config, stop)?.run(&docs)?;
    write_verdicts(&args.common.output, &verdicts)?;
    let novel = verdicts.iter().filter(|v| v.is_novel).count();
    Ok(format!("{} documents, {novel} novel", verdicts.len()))
}

fn evaluate(args: &EvaluateArgs) -> Result<String, CliError> {
    let params = CostParams::new(args.c_miss, args.c_fa, args.p_target)?;
    let verdicts = read_verdicts(&args.verdicts)?;
    let docs = read_stream(&args.truth)?;
    let scored = join_truth(&verdicts[args.skip.min(verdicts.len())..], &docs);
    let curve = det_curve(&scored, &params)?;
    let file = File::create(&args.det_out)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.det_out.display())))?;
    let mut out = BufWriter::new(file);
    write_det_csv(&curve, &mut out)?;
    out.flush()
        .map_err(|e| CliError::Data(format!("{}: {e}", args.det_out.display())))?;
    let best = curve.min_cost_point();
    Ok(format!(
        "min cost {:.4} at threshold {}: p_miss {:.4}, p_fa {:.4} ({} scored documents)",
        best.cost_norm,
        best.threshold,
        best.p_miss,
        best.p_fa,
        scored.len()
    ))
}

fn synth(args: &SynthArgs) -> Result<String, CliError> {
    let cfg = SynthConfig {
        n_docs: args.docs,
        n_events: args.events,
        vocab_size: args.vocab,
        drift_rate: args.drift,
        duplicate_noise: args.noise,
        seed: args.seed,
        lead_events: args.lead,
    };
    let docs = generate_synthetic(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    write_stream(&args.out, &docs)?;
    Ok(format!("{} documents, {} events", docs.len(), args.events))
}

/// Executes a parsed command, returning a one-line summary.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Detect(a) => detect(a),
        Command::Oracle(a) => oracle(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Synth(a) => synth(a),
    }
}

/// Parses `args` (including the program name), runs the command, reports on
/// stdout/stderr and returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            println!("{summary}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("fsd: {e}");
            e.exit_code()
        }
    }
}
