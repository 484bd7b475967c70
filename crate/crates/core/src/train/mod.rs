//! Losses, weight initialization, optimizers, and the training loop.

mod fit;
mod init;
mod loss;
mod optim;

pub use fit::{
    batch_count, default_decay_rate, fit, validation_mse, EpochRecord, TrainConfig, TrainHistory,
};
pub use init::{init_weights, truncated_normal};
pub use loss::{mse_loss, quantile_loss, Loss, LossKind};
pub use optim::{
    adam_step, lr_at_epoch, radam_rectifier, radam_step, sgd_step, OptState, Optimizer,
    OptimizerKind,
};
