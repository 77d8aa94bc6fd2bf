//! Command-line surface: `dataset`, `train`, `eval` and `landscape`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use qmeta_core::graphlab::generate_dataset;
use qmeta_core::metaloop::train;
use qmeta_core::rng::SeededRng;
use qmeta_core::seqmodels::{AnyModel, MetaOptimizer};

use crate::checkpoint::{load_model, Checkpoint};
use crate::config::{DatasetSettings, EvalSettings, LandscapeSettings, RunConfig, TrainSettings};
use crate::dataset::{read_dataset, write_dataset};
use crate::error::CliError;
use crate::landscape::{run_landscape, write_landscape};
use crate::output::{csv_bytes, g6, write_atomic};
use crate::parallel::ParallelEvaluator;
use crate::suite::{run_suite, write_results, SuiteConfig};

pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const TRAIN_LOG_FILE: &str = "train_log.csv";
pub const RUN_FILE: &str = "run.json";

#[derive(Debug, Parser)]
#[command(name = "qmeta", version, about = "Meta-learned QAOA initialization for Max-Cut")]
pub struct Cli {
    /// Worker threads for per-graph work (0 = all cores). Output does not
    /// depend on this.
    #[arg(long, global = true, env = "QMETA_WORKERS", default_value_t = 0)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an Erdős–Rényi Max-Cut dataset as JSONL.
    Dataset(DatasetArgs),
    /// Meta-train a sequence model.
    Train(TrainArgs),
    /// Run the two-phase protocol and the random-seed baseline.
    Eval(EvalArgs),
    /// Emit a cost landscape with each model's first steps over it.
    Landscape(LandscapeArgs),
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Settings file (a previous run.json works); flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output JSONL file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// lstm, qlstm, qklstm or qfwp.
    #[arg(long)]
    pub model: Option<String>,
    /// Training dataset (JSONL).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Output directory for the checkpoint, log and run.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Rollout length T.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub lr_core: Option<f64>,
    #[arg(long)]
    pub lr_fc: Option<f64>,
    #[arg(long)]
    pub clip_norm: Option<f64>,
    #[arg(long)]
    pub patience: Option<usize>,
    /// Backpropagate through the cost input as well.
    #[arg(long)]
    pub cost_input_gradient: bool,
    #[arg(long)]
    pub qlstm_qubits: Option<usize>,
    #[arg(long)]
    pub qlstm_layers: Option<usize>,
    #[arg(long)]
    pub qk_anchors: Option<usize>,
    #[arg(long)]
    pub qk_kernel_reps: Option<usize>,
    #[arg(long)]
    pub qk_per_gate_kernel: bool,
    #[arg(long)]
    pub qk_train_anchors: bool,
    #[arg(long)]
    pub qfwp_layers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Checkpoint files, comma separated or repeated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub checkpoints: Vec<PathBuf>,
    /// Test dataset (JSONL).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Output directory for the result tables.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Total iterations per trajectory, model steps included.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Seed of the baseline's random starting angles.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Learning rate of the gradient-ascent phase.
    #[arg(long)]
    pub lr: Option<f64>,
    /// Convergence tolerance on the mean relative-error curve.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Skip the random-seed baseline.
    #[arg(long)]
    pub no_baseline: bool,
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Expected degree; edge probability is k/n.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid points per axis.
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub checkpoints: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

macro_rules! override_with {
    ($dst:expr; $($field:ident),+ $(,)?) => {
        $(if let Some(v) = $dst.1.$field.clone() { $dst.0.$field = v; })+
    };
}

fn base_config<T>(path: Option<&Path>, pick: impl FnOnce(RunConfig) -> Option<T>) -> Result<Option<T>, CliError> {
    let Some(path) = path else { return Ok(None) };
    let cfg = RunConfig::load(path).map_err(CliError::Config)?;
    pick(cfg)
        .map(Some)
        .ok_or_else(|| CliError::config(format!("{} is a config for a different command", path.display())))
}

fn require(path: &Path, flag: &str) -> Result<(), CliError> {
    if path.as_os_str().is_empty() {
        return Err(CliError::config(format!("--{flag} is required")));
    }
    Ok(())
}

impl DatasetArgs {
    pub fn settings(&self) -> Result<DatasetSettings, CliError> {
        let mut s = base_config(self.config.as_deref(), |c| match c {
            RunConfig::Dataset(s) => Some(s),
            _ => None,
        })?
        .unwrap_or_default();
        override_with!((&mut s, self); n_min, n_max, count, seed, out);
        require(&s.out, "out")?;
        Ok(s)
    }
}

impl TrainArgs {
    pub fn settings(&self) -> Result<TrainSettings, CliError> {
        let mut s = base_config(self.config.as_deref(), |c| match c {
            RunConfig::Train(s) => Some(s),
            _ => None,
        })?
        .unwrap_or_default();
        override_with!((&mut s, self); model, data, out, epochs, batch, seed, horizon, lr_core, lr_fc);
        if self.clip_norm.is_some() {
            s.clip_norm = self.clip_norm;
        }
        if self.patience.is_some() {
            s.patience = self.patience;
        }
        s.cost_input_gradient |= self.cost_input_gradient;
        override_with!((&mut s.arch, self); qlstm_qubits, qlstm_layers, qk_anchors, qk_kernel_reps, qfwp_layers);
        s.arch.qk_per_gate_kernel |= self.qk_per_gate_kernel;
        s.arch.qk_train_anchors |= self.qk_train_anchors;
        s.kind().map_err(CliError::Config)?;
        require(&s.data, "data")?;
        require(&s.out, "out")?;
        Ok(s)
    }
}

impl EvalArgs {
    pub fn settings(&self) -> Result<EvalSettings, CliError> {
        let mut s = base_config(self.config.as_deref(), |c| match c {
            RunConfig::Eval(s) => Some(s),
            _ => None,
        })?
        .unwrap_or_default();
        override_with!((&mut s, self); data, out, iterations, seed, horizon, lr, epsilon);
        if !self.checkpoints.is_empty() {
            s.checkpoints = self.checkpoints.clone();
        }
        if self.no_baseline {
            s.baseline = false;
        }
        require(&s.data, "data")?;
        require(&s.out, "out")?;
        if s.iterations < s.horizon.max(2) {
            return Err(CliError::config("--iterations must be at least the horizon and at least 2"));
        }
        Ok(s)
    }
}

impl LandscapeArgs {
    pub fn settings(&self) -> Result<LandscapeSettings, CliError> {
        let mut s = base_config(self.config.as_deref(), |c| match c {
            RunConfig::Landscape(s) => Some(s),
            _ => None,
        })?
        .unwrap_or_default();
        override_with!((&mut s, self); n, k, seed, resolution, gamma_min, gamma_max, beta_min, beta_max, steps, out);
        if !self.checkpoints.is_empty() {
            s.checkpoints = self.checkpoints.clone();
        }
        require(&s.out, "out")?;
        Ok(s)
    }
}

fn load_models(paths: &[PathBuf]) -> Result<Vec<AnyModel>, CliError> {
    paths
        .iter()
        .map(|p| {
            if !p.is_file() {
                return Err(CliError::config(format!("checkpoint {} not found", p.display())));
            }
            load_model(p).map_err(CliError::Config)
        })
        .collect()
}

fn load_data(path: &Path) -> Result<Vec<qmeta_core::graphlab::Instance>, CliError> {
    read_dataset(path).map_err(CliError::Config)
}

pub fn cmd_dataset(args: &DatasetArgs) -> Result<(), CliError> {
    let s = args.settings()?;
    let data = generate_dataset(&s.spec(), &mut SeededRng::new(s.seed)).map_err(|e| CliError::Config(e.into()))?;
    if let Some(dir) = s.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    write_dataset(&s.out, &data)?;
    RunConfig::Dataset(s.clone()).write(&s.out.with_extension("run.json"))?;
    eprintln!("wrote {} instances to {}", data.len(), s.out.display());
    Ok(())
}

pub fn cmd_train(args: &TrainArgs, workers: usize) -> Result<(), CliError> {
    let s = args.settings()?;
    let data = load_data(&s.data)?;
    let cfg = s.train_config();
    cfg.validate().map_err(|e| CliError::Config(e.into()))?;
    let mut model = AnyModel::new(&s.model_config().map_err(CliError::Config)?)
        .map_err(|e| CliError::Config(e.into()))?;
    println!("{}", model.param_report());

    fs::create_dir_all(&s.out)?;
    RunConfig::Train(s.clone()).write(&s.out.join(RUN_FILE))?;
    let ckpt_path = s.out.join(CHECKPOINT_FILE);
    let log_path = s.out.join(TRAIN_LOG_FILE);
    Checkpoint::from_model(&model, 0).save(&ckpt_path)?;
    write_atomic(&log_path, &csv_bytes(&LOG_HEADER, Vec::<[String; 3]>::new())?)?;

    let evaluator = ParallelEvaluator::new(workers)?;
    let start = Instant::now();
    let mut rows: Vec<[String; 3]> = Vec::new();
    let mut failure: Option<anyhow::Error> = None;
    let result = train(&mut model, &data, &cfg, &evaluator, |stats, m| {
        let secs = start.elapsed().as_secs_f64();
        rows.push([stats.epoch.to_string(), g6(stats.mean_loss), g6(secs)]);
        let saved = Checkpoint::from_model(m, stats.epoch)
            .save(&ckpt_path)
            .and_then(|_| write_atomic(&log_path, &csv_bytes(&LOG_HEADER, rows.iter().cloned())?));
        eprintln!("epoch {:>3}  meta-loss {}  {:.1}s", stats.epoch, g6(stats.mean_loss), secs);
        match saved {
            Ok(()) => true,
            Err(e) => {
                failure = Some(e);
                false
            }
        }
    });
    if let Some(e) = failure {
        return Err(CliError::Runtime(e));
    }
    let log = result.context("training failed")?;
    if log.stopped_early {
        eprintln!("stopped early after {} epochs", log.epochs.len());
    }
    Ok(())
}

const LOG_HEADER: [&str; 3] = ["epoch", "mean_meta_loss", "seconds"];

pub fn cmd_eval(args: &EvalArgs, workers: usize) -> Result<(), CliError> {
    let s = args.settings()?;
    let models = load_models(&s.checkpoints)?;
    let data = load_data(&s.data)?;
    let evaluator = ParallelEvaluator::new(workers)?;
    let cfg = SuiteConfig { eval: s.eval_config(), seed: s.seed, epsilon: s.epsilon, baseline: s.baseline };
    let results = run_suite(&models, &data, &cfg, evaluator.pool())?;
    write_results(&s.out, &results)?;
    RunConfig::Eval(s.clone()).write(&s.out.join(RUN_FILE))?;
    eprintln!(
        "evaluated {} graphs x {} series into {}",
        data.len(),
        models.len() + usize::from(s.baseline),
        s.out.display()
    );
    Ok(())
}

pub fn cmd_landscape(args: &LandscapeArgs) -> Result<(), CliError> {
    let s = args.settings()?;
    let models = load_models(&s.checkpoints)?;
    let r = run_landscape(&models, &s).map_err(CliError::Config)?;
    write_landscape(&s.out, &r)?;
    RunConfig::Landscape(s.clone()).write(&s.out.join(RUN_FILE))?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Dataset(a) => cmd_dataset(a),
        Command::Train(a) => cmd_train(a, cli.workers),
        Command::Eval(a) => cmd_eval(a, cli.workers),
        Command::Landscape(a) => cmd_landscape(a),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
