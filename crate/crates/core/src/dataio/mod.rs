//! Data handling: loading, validation, scaling, windowing, pooling,
//! chronological splits, and a synthetic benchmark generator.
//!
//! The central type is [`SeriesTable`], a gap-free daily table of named
//! feature columns plus a nonnegative precipitation target. Models consume
//! [`WindowSet`]s built from scaled tables; the target column is appended to
//! the features as the last input column, so a table with `m` features feeds
//! networks with `m + 1` inputs.

mod pool;
mod scaler;
mod series;
mod synth;
mod window;

pub use pool::{average_pool, pooled_len};
pub use scaler::{apply_scaler, fit_scaler, invert_target, ScalerStats};
pub use series::{load_csv, write_csv, SeriesTable, TARGET_NAME};
pub use synth::{synth_generate, SynthConfig};
pub use window::{make_windows, WindowSet};
