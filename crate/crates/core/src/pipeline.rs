//! End-to-end orchestration: split → scale → window → model → train →
//! score, glued together exactly the way the CLI commands need it.

use chrono::NaiveDate;
use log::info;

use crate::config::RunConfig;
use crate::dataio::{apply_scaler, fit_scaler, make_windows, ScalerStats, SeriesTable, WindowSet};
use crate::error::{Error, Result};
use crate::eval::{evaluate, MetricReport};
use crate::model::{ForecastModel, ModelVariant};
use crate::train::{fit, init_weights, TrainHistory};

/// Scaled, windowed data ready for a training run.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub train_windows: WindowSet,
    pub val_windows: WindowSet,
    pub scaler: ScalerStats,
}

/// Splits off the training slice, fits the scaler on it alone, scales it,
/// windows it, and holds out the newest `val_fraction` of windows for
/// validation.
pub fn prepare(table: &SeriesTable, cfg: &RunConfig) -> Result<PreparedData> {
    cfg.validate()?;
    let train_table = match (cfg.train_end, cfg.test_start) {
        (Some(end), Some(start)) => table.split_by_date(end, start)?.0,
        _ => table.clone(),
    };
    let scaler = fit_scaler(&train_table)?;
    let scaled = apply_scaler(&train_table, &scaler)?;
    let windows = make_windows(&scaled, cfg.lookback, cfg.horizon)?;
    let n_val = (windows.len() as f64 * cfg.val_fraction).floor() as usize;
    let (train_windows, val_windows) = windows.split_tail(n_val);
    if train_windows.is_empty() {
        return Err(Error::data(
            "no training windows left after the validation split",
        ));
    }
    info!(
        "prepared {} training and {} validation windows over {} columns",
        train_windows.len(),
        val_windows.len(),
        scaler.n_columns()
    );
    Ok(PreparedData {
        train_windows,
        val_windows,
        scaler,
    })
}

/// Builds the zero-weight model `cfg` describes over `scaler`'s columns.
pub fn build_model(cfg: &RunConfig, scaler: ScalerStats) -> Result<ForecastModel> {
    match cfg.variant {
        ModelVariant::Ssae => ForecastModel::new_ssae(cfg.hyper(), scaler),
        variant => ForecastModel::new_seq(
            variant,
            cfg.lookback,
            cfg.hidden_short,
            cfg.horizon,
            cfg.head_bias,
            scaler,
        ),
    }
}

/// One full training run: prepare the data, build and initialize the model,
/// fit, and return the trained model with its history.
pub fn train_run(cfg: &RunConfig, table: &SeriesTable) -> Result<(ForecastModel, TrainHistory)> {
    let prepared = prepare(table, cfg)?;
    let mut model = build_model(cfg, prepared.scaler)?;
    init_weights(&mut model, cfg.seed);
    let history = fit(
        &mut model,
        &prepared.train_windows,
        &prepared.val_windows,
        &cfg.train_config(),
    )?;
    Ok((model, history))
}

/// Builds the test windows for `model` from the raw table: every window
/// whose first forecast day is on or after `test_start`, with look-back
/// context reaching into earlier rows.
pub fn test_windows(
    model: &ForecastModel,
    table: &SeriesTable,
    test_start: NaiveDate,
) -> Result<WindowSet> {
    let tail = table.tail_with_context(test_start, model.lookback())?;
    let scaled = apply_scaler(&tail, model.scaler())?;
    make_windows(&scaled, model.lookback(), model.horizon())
}

/// Scores `model` on the raw table's windows from `test_start` onward.
pub fn evaluate_model(
    model: &ForecastModel,
    table: &SeriesTable,
    test_start: NaiveDate,
) -> Result<MetricReport> {
    let windows = test_windows(model, table, test_start)?;
    evaluate(model, &windows)
}
