//! Durable model state: JSON checkpoints holding named weight tensors.
//!
//! A checkpoint stores everything inference needs — architecture, window
//! geometry, the scaler fitted on the training slice, and every weight
//! tensor with its explicit shape — plus the seed the run was trained with.
//! Serialization is deterministic: saving, loading, and saving again emits
//! byte-identical JSON, and equal training runs produce equal files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataio::ScalerStats;
use crate::error::{Error, Result};
use crate::model::{ForecastModel, ModelVariant};
use crate::ssae::{SsaeHyper, SsaeModel};
use crate::tensors::{TensorView, TensorViewMut};

/// Current on-disk schema version.
pub const FORMAT_VERSION: u32 = 1;

/// One weight tensor: row-major values plus an explicit shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorRecord {
    pub name: String,
    /// `[rows, cols]` for matrices, `[len]` for vectors.
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

/// Geometry of a plain encoder–decoder model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeqHyper {
    pub lookback: usize,
    pub hidden: usize,
    pub horizon: usize,
    pub head_bias: bool,
}

/// Architecture-specific hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckpointHyper {
    Ssae(SsaeHyper),
    Seq(SeqHyper),
}

/// The complete serialized model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format_version: u32,
    /// Tool identity that wrote the file. Deliberately free of wall-clock
    /// state so identical runs write identical files.
    pub created_by: String,
    pub variant: ModelVariant,
    pub hyper: CheckpointHyper,
    pub scaler: ScalerStats,
    /// Seed the model was trained under.
    pub seed: u64,
    pub tensors: Vec<TensorRecord>,
}

impl Checkpoint {
    /// Snapshots a model's weights into a serializable checkpoint.
    pub fn from_model(model: &ForecastModel, seed: u64) -> Self {
        let hyper = match model {
            ForecastModel::Ssae(m) => CheckpointHyper::Ssae(m.hyper.clone()),
            ForecastModel::Seq(m) => CheckpointHyper::Seq(SeqHyper {
                lookback: m.lookback,
                hidden: m.params.encoder.hidden_dim(),
                horizon: model.horizon(),
                head_bias: m.params.head.b.is_some(),
            }),
        };
        let tensors = model
            .tensors()
            .into_iter()
            .map(|(name, view)| {
                let (shape, data) = match view {
                    TensorView::Mat(m) => (vec![m.rows(), m.cols()], m.data().to_vec()),
                    TensorView::Vec(v) => (vec![v.len()], v.to_vec()),
                };
                TensorRecord { name, shape, data }
            })
            .collect();
        Checkpoint {
            format_version: FORMAT_VERSION,
            created_by: format!("ssae-core {}", crate::VERSION),
            variant: model.variant(),
            hyper,
            scaler: model.scaler().clone(),
            seed,
            tensors,
        }
    }

    /// Rebuilds a runnable model from the checkpoint, verifying the stored
    /// variant against the stored architecture and every tensor's name,
    /// shape, and length against the model's canonical enumeration.
    pub fn to_model(&self) -> Result<ForecastModel> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::data(format!(
                "unsupported checkpoint format_version {} (this build reads {})",
                self.format_version, FORMAT_VERSION
            )));
        }
        let mut model = match (&self.variant, &self.hyper) {
            (ModelVariant::Ssae, CheckpointHyper::Ssae(h)) => {
                ForecastModel::Ssae(SsaeModel::new(h.clone(), self.scaler.clone())?)
            }
            (v @ (ModelVariant::S2s1 | ModelVariant::S2s2), CheckpointHyper::Seq(h)) => {
                ForecastModel::new_seq(
                    *v,
                    h.lookback,
                    h.hidden,
                    h.horizon,
                    h.head_bias,
                    self.scaler.clone(),
                )?
            }
            (v, CheckpointHyper::Ssae(_)) => {
                return Err(Error::data(format!(
                    "checkpoint declares variant \"{}\" but stores dual-branch hyperparameters; refusing to load",
                    v.as_str()
                )));
            }
            (v, CheckpointHyper::Seq(_)) => {
                return Err(Error::data(format!(
                    "checkpoint declares variant \"{}\" but stores single-branch hyperparameters; refusing to load",
                    v.as_str()
                )));
            }
        };

        let specs = model.tensor_specs();
        if specs.len() != self.tensors.len() {
            return Err(Error::data(format!(
                "checkpoint holds {} tensors, the \"{}\" architecture defines {}",
                self.tensors.len(),
                self.variant.as_str(),
                specs.len()
            )));
        }
        for (spec, record) in specs.iter().zip(&self.tensors) {
            if spec.name != record.name {
                return Err(Error::data(format!(
                    "tensor order mismatch: expected \"{}\", found \"{}\"",
                    spec.name, record.name
                )));
            }
            if spec.shape != record.shape {
                return Err(Error::data(format!(
                    "tensor \"{}\" has shape {:?}, expected {:?}",
                    record.name, record.shape, spec.shape
                )));
            }
            if record.data.len() != spec.len() {
                return Err(Error::data(format!(
                    "tensor \"{}\" holds {} values, its shape {:?} needs {}",
                    record.name,
                    record.data.len(),
                    record.shape,
                    spec.len()
                )));
            }
        }

        for ((_, view), record) in model.tensors_mut().iter_mut().zip(&self.tensors) {
            match view {
                TensorViewMut::Mat(m) => m.data_mut().copy_from_slice(&record.data),
                TensorViewMut::Vec(v) => v.copy_from_slice(&record.data),
            }
        }
        debug_assert_eq!(self.scalar_count(), model.count_parameters());
        Ok(model)
    }

    /// Total number of stored weight scalars.
    pub fn scalar_count(&self) -> usize {
        self.tensors.iter().map(|t| t.data.len()).sum()
    }

    /// Serializes to pretty JSON with full round-trip float precision.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::data(format!("cannot read checkpoint {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// Saves `model` (and its training seed) as a checkpoint file.
pub fn save_model(model: &ForecastModel, seed: u64, path: &Path) -> Result<()> {
    Checkpoint::from_model(model, seed).write(path)
}

/// Loads a checkpoint file back into a runnable model plus its seed.
pub fn load_model(path: &Path) -> Result<(ForecastModel, u64)> {
    let ckpt = Checkpoint::read(path)?;
    let model = ckpt.to_model()?;
    Ok((model, ckpt.seed))
}
