//! Serializable run settings. Every command echoes the merged settings, the
//! code version and its seeds as `run.json`, and accepts such a file back via
//! `--config` (flags given on the command line win).

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qmeta_core::bench::{EvalConfig, CONVERGENCE_TOL, DEFAULT_SGD_LR, DEFAULT_TOTAL_ITERATIONS, PHASE1_STEPS};
use qmeta_core::graphlab::DatasetSpec;
use qmeta_core::metaloop::TrainConfig;
use qmeta_core::seqmodels::{ModelConfig, ModelKind};
use serde::{Deserialize, Serialize};

use crate::VERSION;

/// Architecture flags of [`ModelConfig`] in file form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArchSettings {
    pub qlstm_qubits: usize,
    pub qlstm_layers: usize,
    pub qk_anchors: usize,
    pub qk_per_gate_kernel: bool,
    pub qk_train_anchors: bool,
    pub qk_kernel_reps: usize,
    pub qfwp_layers: usize,
}

impl Default for ArchSettings {
    fn default() -> Self {
        Self::from(&ModelConfig::new(ModelKind::Lstm, 0))
    }
}

impl From<&ModelConfig> for ArchSettings {
    fn from(c: &ModelConfig) -> Self {
        Self {
            qlstm_qubits: c.qlstm_qubits,
            qlstm_layers: c.qlstm_layers,
            qk_anchors: c.qk_anchors,
            qk_per_gate_kernel: c.qk_per_gate_kernel,
            qk_train_anchors: c.qk_train_anchors,
            qk_kernel_reps: c.qk_kernel_reps,
            qfwp_layers: c.qfwp_layers,
        }
    }
}

impl ArchSettings {
    pub fn model_config(&self, kind: ModelKind, seed: u64) -> ModelConfig {
        ModelConfig {
            kind,
            seed,
            qlstm_qubits: self.qlstm_qubits,
            qlstm_layers: self.qlstm_layers,
            qk_anchors: self.qk_anchors,
            qk_per_gate_kernel: self.qk_per_gate_kernel,
            qk_train_anchors: self.qk_train_anchors,
            qk_kernel_reps: self.qk_kernel_reps,
            qfwp_layers: self.qfwp_layers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSettings {
    pub n_min: usize,
    pub n_max: usize,
    pub count: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for DatasetSettings {
    fn default() -> Self {
        Self { n_min: 6, n_max: 9, count: 1008, seed: 0, out: PathBuf::new() }
    }
}

impl DatasetSettings {
    pub fn spec(&self) -> DatasetSpec {
        DatasetSpec { n_min: self.n_min, n_max: self.n_max, count: self.count }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSettings {
    pub model: String,
    pub data: PathBuf,
    pub out: PathBuf,
    /// Seeds both the parameter initialization and the epoch shuffles.
    pub seed: u64,
    pub epochs: usize,
    pub batch: usize,
    pub horizon: usize,
    pub lr_core: f64,
    pub lr_fc: f64,
    pub rms_alpha: f64,
    pub rms_eps: f64,
    pub clip_norm: Option<f64>,
    pub patience: Option<usize>,
    pub cost_input_gradient: bool,
    pub arch: ArchSettings,
}

impl Default for TrainSettings {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            model: String::new(),
            data: PathBuf::new(),
            out: PathBuf::new(),
            seed: t.seed,
            epochs: t.epochs,
            batch: t.batch_size,
            horizon: t.horizon,
            lr_core: t.lr_core,
            lr_fc: t.lr_fc,
            rms_alpha: t.rms_alpha,
            rms_eps: t.rms_eps,
            clip_norm: t.clip_norm,
            patience: t.patience,
            cost_input_gradient: t.cost_input_gradient,
            arch: ArchSettings::default(),
        }
    }
}

impl TrainSettings {
    pub fn kind(&self) -> Result<ModelKind> {
        ModelKind::from_name(&self.model).with_context(|| {
            format!("unknown model {:?} (expected lstm, qlstm, qklstm or qfwp)", self.model)
        })
    }

    pub fn model_config(&self) -> Result<ModelConfig> {
        Ok(self.arch.model_config(self.kind()?, self.seed))
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            horizon: self.horizon,
            lr_core: self.lr_core,
            lr_fc: self.lr_fc,
            batch_size: self.batch,
            seed: self.seed,
            rms_alpha: self.rms_alpha,
            rms_eps: self.rms_eps,
            clip_norm: self.clip_norm,
            patience: self.patience,
            cost_input_gradient: self.cost_input_gradient,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSettings {
    pub checkpoints: Vec<PathBuf>,
    pub data: PathBuf,
    pub out: PathBuf,
    /// Seeds the random-seed baseline.
    pub seed: u64,
    pub iterations: usize,
    pub horizon: usize,
    pub lr: f64,
    pub epsilon: f64,
    pub baseline: bool,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            checkpoints: Vec::new(),
            data: PathBuf::new(),
            out: PathBuf::new(),
            seed: 0,
            iterations: DEFAULT_TOTAL_ITERATIONS,
            horizon: PHASE1_STEPS,
            lr: DEFAULT_SGD_LR,
            epsilon: CONVERGENCE_TOL,
            baseline: true,
        }
    }
}

impl EvalSettings {
    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig { total_iterations: self.iterations, horizon: self.horizon, lr: self.lr }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LandscapeSettings {
    pub n: usize,
    pub k: usize,
    /// Seeds the graph draw.
    pub seed: u64,
    pub resolution: usize,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub steps: usize,
    pub lr: f64,
    pub checkpoints: Vec<PathBuf>,
    pub out: PathBuf,
}

impl Default for LandscapeSettings {
    fn default() -> Self {
        use std::f64::consts::PI;
        Self {
            n: 10,
            k: 4,
            seed: 0,
            resolution: 101,
            gamma_min: -PI,
            gamma_max: PI,
            beta_min: -PI / 2.0,
            beta_max: PI / 2.0,
            steps: PHASE1_STEPS,
            lr: DEFAULT_SGD_LR,
            checkpoints: Vec::new(),
            out: PathBuf::new(),
        }
    }
}

/// The document written to `run.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum RunConfig {
    Dataset(DatasetSettings),
    Train(TrainSettings),
    Eval(EvalSettings),
    Landscape(LandscapeSettings),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RunRecord {
    version: String,
    #[serde(flatten)]
    config: RunConfig,
}

impl RunConfig {
    pub fn to_json(&self) -> Result<String> {
        let rec = RunRecord { version: VERSION.into(), config: self.clone() };
        Ok(serde_json::to_string_pretty(&rec)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        // Accept both bare configs and echoed run records.
        let mut value: serde_json::Value = serde_json::from_str(text)?;
        if let Some(obj) = value.as_object_mut() {
            obj.remove("version");
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        crate::output::write_atomic(path, self.to_json()?.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_json_round_trips() {
        let cfg = RunConfig::Train(TrainSettings { model: "qfwp".into(), epochs: 3, ..Default::default() });
        let text = cfg.to_json().unwrap();
        assert!(text.contains("\"command\": \"train\""));
        assert!(text.contains(&format!("\"version\": \"{VERSION}\"")));
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_config_takes_defaults() {
        let cfg = RunConfig::from_json(r#"{"command":"eval","iterations":50}"#).unwrap();
        let RunConfig::Eval(e) = cfg else { panic!() };
        assert_eq!(e.iterations, 50);
        assert_eq!(e.horizon, 10);
        assert!(RunConfig::from_json(r#"{"command":"eval","bogus":1}"#).is_err());
    }

    #[test]
    fn defaults_follow_the_library() {
        let t = TrainSettings::default();
        assert_eq!((t.epochs, t.batch, t.horizon), (50, 32, 10));
        assert_eq!((t.lr_core, t.lr_fc), (6e-6, 1e-4));
    }
}
