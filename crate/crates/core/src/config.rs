//! Run configuration: one flat JSON document covering architecture, data
//! split, and training settings.

use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelVariant;
use crate::ssae::{ComboMode, SsaeHyper};
use crate::train::{default_decay_rate, LossKind, OptimizerKind, TrainConfig};

fn d_lookback() -> usize {
    169
}
fn d_short_window() -> usize {
    6
}
fn d_horizon() -> usize {
    3
}
fn d_pool_window() -> usize {
    125
}
fn d_pool_stride() -> usize {
    60
}
fn d_hidden() -> usize {
    100
}
fn d_head_bias() -> bool {
    true
}
fn d_epochs() -> usize {
    30
}
fn d_batch_size() -> usize {
    256
}
fn d_learning_rate() -> f64 {
    1e-3
}
fn d_lr_decay() -> f64 {
    default_decay_rate()
}
fn d_quantile_r() -> f64 {
    0.8
}
fn d_beta1() -> f64 {
    0.9
}
fn d_beta2() -> f64 {
    0.999
}
fn d_eps_opt() -> f64 {
    1e-8
}
fn d_patience() -> usize {
    10
}
fn d_seed() -> u64 {
    42
}
fn d_val_fraction() -> f64 {
    0.1
}

/// A complete run description. Every field has a default, so a config file
/// only needs the fields it changes. Unknown keys are rejected to catch
/// typos.
///
/// For the plain encoder–decoder variants (`s2s1`, `s2s2`) the model reads
/// all input columns over `lookback` rows with `hidden_short` units; the
/// pooling fields are unused, and `combine`/`seasonal_features` must stay
/// unset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    // --- architecture ---
    #[serde(default)]
    pub variant: ModelVariant,
    /// Branch combination rule; dual-branch (`ssae`) only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub combine: Option<ComboMode>,
    #[serde(default = "d_lookback")]
    pub lookback: usize,
    #[serde(default = "d_short_window")]
    pub short_window: usize,
    #[serde(default = "d_horizon")]
    pub horizon: usize,
    #[serde(default = "d_pool_window")]
    pub pool_window: usize,
    #[serde(default = "d_pool_stride")]
    pub pool_stride: usize,
    #[serde(default = "d_hidden")]
    pub hidden_short: usize,
    #[serde(default = "d_hidden")]
    pub hidden_seasonal: usize,
    /// Input columns the seasonal branch reads; dual-branch only.
    /// Defaults to the target column itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seasonal_features: Option<Vec<String>>,
    #[serde(default = "d_head_bias")]
    pub head_bias: bool,

    // --- training ---
    #[serde(default = "d_epochs")]
    pub epochs: usize,
    #[serde(default = "d_batch_size")]
    pub batch_size: usize,
    #[serde(default = "d_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "d_lr_decay")]
    pub lr_decay: f64,
    #[serde(default)]
    pub loss: LossKind,
    #[serde(default = "d_quantile_r")]
    pub quantile_r: f64,
    #[serde(default)]
    pub optimizer: OptimizerKind,
    #[serde(default = "d_beta1")]
    pub beta1: f64,
    #[serde(default = "d_beta2")]
    pub beta2: f64,
    #[serde(default = "d_eps_opt")]
    pub eps_opt: f64,
    #[serde(default = "d_patience")]
    pub early_stop_patience: usize,
    #[serde(default)]
    pub dropout: f64,
    #[serde(default = "d_seed")]
    pub seed: u64,

    // --- data split ---
    /// Last date of the training slice (inclusive). Set together with
    /// `test_start`, or leave both out to train on everything.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_end: Option<NaiveDate>,
    /// First date the test metrics score (inclusive).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_start: Option<NaiveDate>,
    /// Fraction of training windows held out (from the newest end) for
    /// validation.
    #[serde(default = "d_val_fraction")]
    pub val_fraction: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config deserializes to all defaults")
    }
}

impl RunConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            Error::data(format!("cannot read config {}: {e}", path.as_ref().display()))
        })?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.variant != ModelVariant::Ssae {
            if self.combine.is_some() {
                return Err(Error::usage(
                    "combine applies only to the dual-branch (ssae) variant",
                ));
            }
            if self.seasonal_features.is_some() {
                return Err(Error::usage(
                    "seasonal_features applies only to the dual-branch (ssae) variant",
                ));
            }
        }
        if !(0.0..1.0).contains(&self.val_fraction) {
            return Err(Error::usage("val_fraction must lie in [0, 1)"));
        }
        match (self.train_end, self.test_start) {
            (Some(end), Some(start)) if end >= start => {
                return Err(Error::usage(format!(
                    "train_end {end} must precede test_start {start}"
                )));
            }
            (Some(_), None) | (None, Some(_)) => {
                return Err(Error::usage(
                    "train_end and test_start must be set together",
                ));
            }
            _ => {}
        }
        if self.variant == ModelVariant::Ssae {
            self.hyper().validate()?;
        } else if self.lookback == 0 || self.hidden_short == 0 || self.horizon == 0 {
            return Err(Error::usage("lookback, hidden width, and horizon must be positive"));
        }
        self.train_config().validate()
    }

    /// The architecture block for the dual-branch variant.
    pub fn hyper(&self) -> SsaeHyper {
        SsaeHyper {
            lookback: self.lookback,
            short_window: self.short_window,
            horizon: self.horizon,
            pool_window: self.pool_window,
            pool_stride: self.pool_stride,
            hidden_short: self.hidden_short,
            hidden_seasonal: self.hidden_seasonal,
            seasonal_features: self
                .seasonal_features
                .clone()
                .unwrap_or_else(|| vec![crate::dataio::TARGET_NAME.to_string()]),
            combine: self.combine.unwrap_or_default(),
            head_bias: self.head_bias,
        }
    }

    /// The training block.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            lr_decay: self.lr_decay,
            loss: self.loss,
            quantile_r: self.quantile_r,
            optimizer: self.optimizer,
            beta1: self.beta1,
            beta2: self.beta2,
            eps_opt: self.eps_opt,
            early_stop_patience: self.early_stop_patience,
            dropout: self.dropout,
            seed: self.seed,
        }
    }
}
