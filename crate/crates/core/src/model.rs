//! One forecaster type over the three architectures the trainer and CLI
//! handle: the dual-branch model and the two plain encoder–decoder styles.
//!
//! Everything the training loop, checkpoints, and evaluation need lives
//! behind this enum: forward/backward passes, dropout-mask drawing, the
//! canonical flat parameter layout, and raw-unit prediction.

use serde::{Deserialize, Serialize};

use crate::dataio::ScalerStats;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::nnkernel::{dropout_mask, Activation};
use crate::rng::Rng;
use crate::seq2seq::{
    s2s_backward, s2s_forward, Seq2SeqParams, SeqTrace, SeqVariant,
};
use crate::ssae::{ssae_backward, ssae_forward, SsaeMasks, SsaeModel, SsaeTrace};
use crate::tensors::{self, add_flat, TensorList, TensorListMut, TensorSpec};

/// Which architecture a model (or a checkpoint) uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModelVariant {
    #[default]
    Ssae,
    S2s1,
    S2s2,
}

impl ModelVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelVariant::Ssae => "ssae",
            ModelVariant::S2s1 => "s2s1",
            ModelVariant::S2s2 => "s2s2",
        }
    }
}

/// A plain encoder–decoder forecaster reading the whole window.
#[derive(Debug, Clone)]
pub struct SeqModel {
    pub params: Seq2SeqParams,
    /// Window length in rows.
    pub lookback: usize,
    pub scaler: ScalerStats,
}

/// Any trainable forecaster: window in, `H` scalars out.
// The inline size gap between variants is a few hundred bytes of tensor
// headers; the weights themselves live on the heap, and a model is moved
// only at construction/load, so boxing would buy nothing.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
pub enum ForecastModel {
    Ssae(SsaeModel),
    Seq(SeqModel),
}

/// Per-branch dropout masks for one forward/backward pass. Plain
/// encoder–decoder models use only `primary`; the dual-branch model maps
/// `primary` to its short branch and `seasonal` to its seasonal branch.
#[derive(Debug, Clone, Default)]
pub struct ModelMasks {
    pub primary: Option<Vec<f64>>,
    pub seasonal: Option<Vec<f64>>,
}

/// The forward-pass record a backward pass consumes.
#[derive(Debug, Clone)]
pub enum ModelTrace {
    Ssae(SsaeTrace),
    Seq(SeqTrace),
}

impl ForecastModel {
    /// Zero-weight dual-branch model (weights come from an initializer or a
    /// checkpoint).
    pub fn new_ssae(hyper: crate::ssae::SsaeHyper, scaler: ScalerStats) -> Result<Self> {
        Ok(ForecastModel::Ssae(SsaeModel::new(hyper, scaler)?))
    }

    /// Zero-weight plain encoder–decoder over all input columns.
    pub fn new_seq(
        variant: ModelVariant,
        lookback: usize,
        hidden: usize,
        horizon: usize,
        head_bias: bool,
        scaler: ScalerStats,
    ) -> Result<Self> {
        if lookback == 0 || hidden == 0 || horizon == 0 {
            return Err(Error::usage("lookback, hidden width, and horizon must be positive"));
        }
        let params = match variant {
            ModelVariant::S2s2 => Seq2SeqParams::new_s2s2(
                scaler.n_columns(),
                hidden,
                horizon,
                Activation::Tanh,
                Activation::Relu,
                false,
                head_bias,
            ),
            ModelVariant::S2s1 => {
                Seq2SeqParams::new_s2s1(scaler.n_columns(), hidden, horizon, head_bias)
            }
            ModelVariant::Ssae => {
                return Err(Error::usage("dual-branch models are built from SsaeHyper"))
            }
        };
        Ok(ForecastModel::Seq(SeqModel {
            params,
            lookback,
            scaler,
        }))
    }

    pub fn variant(&self) -> ModelVariant {
        match self {
            ForecastModel::Ssae(_) => ModelVariant::Ssae,
            ForecastModel::Seq(m) => match m.params.variant {
                SeqVariant::S2s1 => ModelVariant::S2s1,
                SeqVariant::S2s2 => ModelVariant::S2s2,
            },
        }
    }

    /// Window length in rows.
    pub fn lookback(&self) -> usize {
        match self {
            ForecastModel::Ssae(m) => m.lookback(),
            ForecastModel::Seq(m) => m.lookback,
        }
    }

    pub fn horizon(&self) -> usize {
        match self {
            ForecastModel::Ssae(m) => m.horizon(),
            ForecastModel::Seq(m) => m.params.horizon(),
        }
    }

    /// Number of input columns a window must carry.
    pub fn input_dim(&self) -> usize {
        self.scaler().n_columns()
    }

    pub fn scaler(&self) -> &ScalerStats {
        match self {
            ForecastModel::Ssae(m) => &m.scaler,
            ForecastModel::Seq(m) => &m.scaler,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ForecastModel::Ssae(m) => m.validate(),
            ForecastModel::Seq(m) => {
                m.params.validate()?;
                if m.params.input_dim() != m.scaler.n_columns() {
                    return Err(Error::data("model width disagrees with the scaler"));
                }
                if m.lookback == 0 {
                    return Err(Error::data("lookback must be positive"));
                }
                Ok(())
            }
        }
    }

    /// Exact scalar parameter count.
    pub fn count_parameters(&self) -> usize {
        match self {
            ForecastModel::Ssae(m) => m.count_parameters(),
            ForecastModel::Seq(m) => m.params.count_parameters(),
        }
    }

    /// Canonical named-tensor enumeration (the flat layout all training
    /// state, checkpoints, and gradient accumulators share).
    pub fn tensors(&self) -> TensorList<'_> {
        match self {
            ForecastModel::Ssae(m) => m.tensors(),
            ForecastModel::Seq(m) => m.params.tensors(""),
        }
    }

    /// Mutable twin of [`ForecastModel::tensors`] (same order).
    pub fn tensors_mut(&mut self) -> TensorListMut<'_> {
        match self {
            ForecastModel::Ssae(m) => m.tensors_mut(),
            ForecastModel::Seq(m) => m.params.tensors_mut(""),
        }
    }

    pub fn tensor_specs(&self) -> Vec<TensorSpec> {
        tensors::specs(&self.tensors())
    }

    /// Total flat parameter length (equals [`ForecastModel::count_parameters`]).
    pub fn flat_len(&self) -> usize {
        tensors::flat_len(&self.tensors())
    }

    /// Draws one fresh mask per branch; `p = 0` disables masking entirely.
    pub fn draw_masks(&self, p: f64, rng: &mut Rng) -> Result<ModelMasks> {
        if p == 0.0 {
            return Ok(ModelMasks::default());
        }
        match self {
            ForecastModel::Ssae(m) => Ok(ModelMasks {
                primary: Some(dropout_mask(m.short.hidden_dim(), p, rng)?),
                seasonal: Some(dropout_mask(m.seasonal.hidden_dim(), p, rng)?),
            }),
            ForecastModel::Seq(m) => Ok(ModelMasks {
                primary: Some(dropout_mask(m.params.hidden_dim(), p, rng)?),
                seasonal: None,
            }),
        }
    }

    /// Forward pass over one scaled window.
    pub fn forward(&self, x: &Mat, masks: &ModelMasks) -> Result<(Vec<f64>, ModelTrace)> {
        match self {
            ForecastModel::Ssae(m) => {
                let ssae_masks = SsaeMasks {
                    short: masks.primary.clone(),
                    seasonal: masks.seasonal.clone(),
                };
                let (y, trace) = ssae_forward(m, x, &ssae_masks)?;
                Ok((y, ModelTrace::Ssae(trace)))
            }
            ForecastModel::Seq(m) => {
                if x.rows() != m.lookback || x.cols() != m.params.input_dim() {
                    return Err(Error::data(format!(
                        "window is {}×{}, model expects {}×{}",
                        x.rows(),
                        x.cols(),
                        m.lookback,
                        m.params.input_dim()
                    )));
                }
                let (y, trace) = s2s_forward(&m.params, x, masks.primary.as_deref());
                Ok((y, ModelTrace::Seq(trace)))
            }
        }
    }

    /// Backward pass; adds this window's parameter gradients onto the flat
    /// accumulator (same layout as [`ForecastModel::tensors`]).
    pub fn backward_into(&self, trace: &ModelTrace, grad_forecasts: &[f64], acc: &mut [f64]) {
        let mut pos = 0;
        match (self, trace) {
            (ForecastModel::Ssae(m), ModelTrace::Ssae(t)) => {
                let grads = ssae_backward(m, t, grad_forecasts);
                add_flat(&grads.tensors(m.hyper.combine), acc, &mut pos);
            }
            (ForecastModel::Seq(m), ModelTrace::Seq(t)) => {
                let grads = s2s_backward(&m.params, t, grad_forecasts);
                add_flat(&grads.tensors(""), acc, &mut pos);
            }
            _ => panic!("trace does not belong to this model"),
        }
        debug_assert_eq!(pos, acc.len(), "gradient layout drifted from parameters");
    }

    /// Forecasts in raw target units from an unscaled window; see the
    /// scaling round trip on the dual-branch variant.
    pub fn predict_raw_units(&self, raw: &Mat, clamp_nonneg: bool) -> Result<Vec<f64>> {
        match self {
            ForecastModel::Ssae(m) => crate::ssae::predict_mm(m, raw, clamp_nonneg),
            ForecastModel::Seq(m) => {
                let scaled = m.scaler.scale_matrix(raw)?;
                let (forecasts, _) = self.forward(&scaled, &ModelMasks::default())?;
                Ok(forecasts
                    .into_iter()
                    .map(|y| {
                        let v = m.scaler.invert_target_value(y);
                        if clamp_nonneg {
                            v.max(0.0)
                        } else {
                            v
                        }
                    })
                    .collect())
            }
        }
    }
}
