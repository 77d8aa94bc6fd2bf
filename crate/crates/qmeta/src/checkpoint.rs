//! Model checkpoints: the architecture config plus every named tensor as
//! decimal floats. Floats are written in shortest round-trip form, so a
//! reloaded model reproduces the saved one bit for bit.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qmeta_core::seqmodels::{AnyModel, Group, MetaOptimizer, ModelKind};
use serde::{Deserialize, Serialize};

use crate::config::ArchSettings;
use crate::output::write_atomic;
use crate::VERSION;

const FORMAT: &str = "qmeta-checkpoint-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorRecord {
    pub name: String,
    pub group: String,
    pub shape: [usize; 2],
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format: String,
    pub version: String,
    pub model: String,
    pub seed: u64,
    pub arch: ArchSettings,
    /// Completed training epochs.
    pub epoch: usize,
    pub trainable_parameters: usize,
    pub reference_parameters: usize,
    pub tensors: Vec<TensorRecord>,
}

impl Checkpoint {
    pub fn from_model(model: &AnyModel, epoch: usize) -> Self {
        let cfg = model.config();
        let p = model.params();
        let report = model.param_report();
        Self {
            format: FORMAT.into(),
            version: VERSION.into(),
            model: cfg.kind.name().into(),
            seed: cfg.seed,
            arch: ArchSettings::from(cfg),
            epoch,
            trainable_parameters: report.total,
            reference_parameters: report.reference_total,
            tensors: p
                .tensors()
                .iter()
                .map(|t| TensorRecord {
                    name: t.name.clone(),
                    group: t.group.name().into(),
                    shape: [t.rows, t.cols],
                    values: p.values()[t.range()].to_vec(),
                })
                .collect(),
        }
    }

    /// Rebuilds the model; the tensor layout must match the config exactly.
    pub fn to_model(&self) -> Result<AnyModel> {
        if self.format != FORMAT {
            bail!("unsupported checkpoint format {:?}", self.format);
        }
        let kind = ModelKind::from_name(&self.model)
            .with_context(|| format!("unknown model {:?}", self.model))?;
        let mut model = AnyModel::new(&self.arch.model_config(kind, self.seed))?;
        let expected = model.params().tensors().to_vec();
        if expected.len() != self.tensors.len() {
            bail!("checkpoint has {} tensors, model expects {}", self.tensors.len(), expected.len());
        }
        for (want, got) in expected.iter().zip(&self.tensors) {
            if want.name != got.name
                || Group::from_name(&got.group) != Some(want.group)
                || got.shape != [want.rows, want.cols]
            {
                bail!(
                    "tensor {} ({}, {:?}) does not match expected {} ({}, [{}, {}])",
                    got.name,
                    got.group,
                    got.shape,
                    want.name,
                    want.group.name(),
                    want.rows,
                    want.cols
                );
            }
            model.params_mut().set_tensor(&got.name, &got.values)?;
        }
        Ok(model)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Loads a checkpoint and rebuilds its model.
pub fn load_model(path: &Path) -> Result<AnyModel> {
    Checkpoint::load(path)?
        .to_model()
        .with_context(|| format!("loading {}", path.display()))
}
