//! The minibatch training loop: seeded shuffling, fixed-order gradient
//! accumulation, scheduled optimizer steps, and early stopping on
//! validation MSE.

use log::{debug, info};
use serde::{Deserialize, Serialize};

use crate::dataio::WindowSet;
use crate::error::{Error, Result};
use crate::model::{ForecastModel, ModelMasks};
use crate::rng::Rng;
use crate::tensors::{read_flat, write_flat};
use crate::train::loss::{mse_loss, Loss, LossKind};
use crate::train::optim::{lr_at_epoch, Optimizer, OptimizerKind};

/// Per-epoch decay rate chosen so thirty epochs multiply the learning rate
/// by 0.955 overall.
pub fn default_decay_rate() -> f64 {
    0.955_f64.powf(1.0 / 30.0)
}

/// Everything the training loop needs besides the model and the data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Per-epoch multiplier on the learning rate.
    pub lr_decay: f64,
    pub loss: LossKind,
    /// Pinball level used when `loss` is `quantile`.
    pub quantile_r: f64,
    pub optimizer: OptimizerKind,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_opt: f64,
    /// Non-improving validation epochs tolerated before stopping; 0 turns
    /// early stopping off.
    pub early_stop_patience: usize,
    /// Hidden-state dropout probability during training; 0 turns it off.
    pub dropout: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 30,
            batch_size: 256,
            learning_rate: 1e-3,
            lr_decay: default_decay_rate(),
            loss: LossKind::Mse,
            quantile_r: 0.8,
            optimizer: OptimizerKind::Radam,
            beta1: 0.9,
            beta2: 0.999,
            eps_opt: 1e-8,
            early_stop_patience: 10,
            dropout: 0.0,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::usage("epochs must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::usage("batch size must be at least 1"));
        }
        if self.learning_rate <= 0.0 {
            return Err(Error::usage("learning rate must be positive"));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return Err(Error::usage("learning-rate decay must lie in (0, 1]"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::usage("dropout probability must lie in [0, 1)"));
        }
        self.loss_fn().validate()
    }

    /// The concrete loss this configuration trains with.
    pub fn loss_fn(&self) -> Loss {
        match self.loss {
            LossKind::Mse => Loss::Mse,
            LossKind::Quantile => Loss::Quantile(self.quantile_r),
        }
    }
}

/// One epoch's record in the training history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean training loss over the epoch's windows (scaled units).
    pub train_loss: f64,
    /// Mean validation MSE (scaled units); absent without a validation set.
    pub val_mse: Option<f64>,
    /// Effective learning rate this epoch.
    pub lr: f64,
}

/// What a training run did, epoch by epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    /// Epoch whose parameters the returned model carries (early stopping
    /// restores the best validation epoch).
    pub best_epoch: Option<usize>,
    pub stopped_early: bool,
}

/// Number of batches a dataset of `n` windows yields at batch size `m`
/// (the last batch may be smaller).
pub fn batch_count(n: usize, m: usize) -> usize {
    n.div_ceil(m)
}

/// Mean MSE of `model` over `windows` (masks off, scaled units).
pub fn validation_mse(model: &ForecastModel, windows: &WindowSet) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..windows.len() {
        let (pred, _) = model.forward(windows.input(i), &ModelMasks::default())?;
        let (loss, _) = mse_loss(&pred, windows.target(i));
        total += loss;
    }
    Ok(total / windows.len() as f64)
}

/// Trains `model` in place and reports the per-epoch history.
///
/// Determinism contract: given the same (model weights, data, config), the
/// run is bit-identical — shuffling and dropout draw from fixed labeled
/// streams of the config seed, and gradients accumulate in batch order.
pub fn fit(
    model: &mut ForecastModel,
    train: &WindowSet,
    val: &WindowSet,
    cfg: &TrainConfig,
) -> Result<TrainHistory> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::data("training set has no windows"));
    }
    if cfg.early_stop_patience > 0 && val.is_empty() {
        return Err(Error::usage(
            "early stopping needs a validation set (set patience to 0 to train without one)",
        ));
    }
    let loss_fn = cfg.loss_fn();
    let n_params = model.flat_len();
    let mut optimizer = Optimizer::new(cfg.optimizer, n_params, cfg.beta1, cfg.beta2, cfg.eps_opt)?;
    let mut shuffle_rng = Rng::labeled(cfg.seed, "shuffle");
    let mut dropout_rng = Rng::labeled(cfg.seed, "dropout");

    let mut history = TrainHistory::default();
    let mut best_val = f64::INFINITY;
    let mut best_flat: Option<Vec<f64>> = None;
    let mut non_improving = 0usize;

    let mut indices: Vec<usize> = (0..train.len()).collect();
    for epoch in 0..cfg.epochs {
        let lr = lr_at_epoch(cfg.learning_rate, cfg.lr_decay, epoch);
        shuffle_rng.shuffle(&mut indices);

        let mut epoch_loss = 0.0;
        for (batch_no, batch) in indices.chunks(cfg.batch_size).enumerate() {
            let mut grad_acc = vec![0.0; n_params];
            for &idx in batch {
                let masks = model.draw_masks(cfg.dropout, &mut dropout_rng)?;
                let (pred, trace) = model.forward(train.input(idx), &masks)?;
                let (loss, grad) = loss_fn.evaluate(&pred, train.target(idx))?;
                if !loss.is_finite() {
                    return Err(Error::numeric(format!(
                        "loss became non-finite at epoch {epoch}, batch {batch_no}, window {idx}"
                    )));
                }
                epoch_loss += loss;
                model.backward_into(&trace, &grad, &mut grad_acc);
            }
            let scale = 1.0 / batch.len() as f64;
            for g in grad_acc.iter_mut() {
                *g *= scale;
            }

            let mut flat = Vec::with_capacity(n_params);
            write_flat(&model.tensors(), &mut flat);
            optimizer.step(&mut flat, &grad_acc, lr);
            if flat.iter().any(|v| !v.is_finite()) {
                return Err(Error::numeric(format!(
                    "parameters became non-finite at epoch {epoch}, batch {batch_no}"
                )));
            }
            let mut pos = 0;
            read_flat(&mut model.tensors_mut(), &flat, &mut pos);
        }
        let train_loss = epoch_loss / train.len() as f64;

        let val_mse = if val.is_empty() {
            None
        } else {
            Some(validation_mse(model, val)?)
        };
        debug!(
            "epoch {epoch}: train loss {train_loss:.6e}, val mse {:?}, lr {lr:.3e}",
            val_mse
        );
        history.epochs.push(EpochRecord {
            epoch,
            train_loss,
            val_mse,
            lr,
        });

        if cfg.early_stop_patience > 0 {
            let v = val_mse.expect("validated: patience > 0 implies a validation set");
            if v < best_val {
                best_val = v;
                history.best_epoch = Some(epoch);
                let mut snapshot = Vec::with_capacity(n_params);
                write_flat(&model.tensors(), &mut snapshot);
                best_flat = Some(snapshot);
                non_improving = 0;
            } else {
                non_improving += 1;
                if non_improving >= cfg.early_stop_patience {
                    info!("stopping early at epoch {epoch} (best epoch {:?})", history.best_epoch);
                    history.stopped_early = true;
                    break;
                }
            }
        }
    }

    if let Some(flat) = best_flat {
        let mut pos = 0;
        read_flat(&mut model.tensors_mut(), &flat, &mut pos);
    }
    Ok(history)
}
