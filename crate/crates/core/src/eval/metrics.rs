//! Per-horizon forecast metrics in raw target units.

use serde::{Deserialize, Serialize};

use crate::dataio::WindowSet;
use crate::error::{Error, Result};
use crate::model::{ForecastModel, ModelMasks};

/// Root-mean-squared error: `√((1/Ñ)·Σ(ŷ−y)²)`.
pub fn rmse(preds: &[f64], actuals: &[f64]) -> Result<f64> {
    if preds.len() != actuals.len() {
        return Err(Error::data("prediction/actual length mismatch"));
    }
    if preds.is_empty() {
        return Err(Error::data("cannot score an empty series"));
    }
    let n = preds.len() as f64;
    let sum_sq: f64 = preds
        .iter()
        .zip(actuals)
        .map(|(&p, &a)| (p - a) * (p - a))
        .sum();
    Ok((sum_sq / n).sqrt())
}

/// Pearson correlation coefficient.
///
/// A constant series has no defined correlation; that is an error, kept
/// distinct from a genuine 0.
pub fn corr(preds: &[f64], actuals: &[f64]) -> Result<f64> {
    if preds.len() != actuals.len() {
        return Err(Error::data("prediction/actual length mismatch"));
    }
    if preds.len() < 2 {
        return Err(Error::data("correlation needs at least two points"));
    }
    let n = preds.len() as f64;
    let mean_p: f64 = preds.iter().sum::<f64>() / n;
    let mean_a: f64 = actuals.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_p = 0.0;
    let mut var_a = 0.0;
    for (&p, &a) in preds.iter().zip(actuals) {
        let dp = p - mean_p;
        let da = a - mean_a;
        cov += dp * da;
        var_p += dp * dp;
        var_a += da * da;
    }
    if var_p == 0.0 || var_a == 0.0 {
        return Err(Error::numeric(
            "correlation is undefined for a constant series",
        ));
    }
    Ok(cov / (var_p.sqrt() * var_a.sqrt()))
}

/// Scores for one forecast step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonMetrics {
    /// 1-based forecast step (day 1 = the first forecast day).
    pub step: usize,
    pub rmse: f64,
    /// `None` when the correlation is undefined (a constant series).
    pub corr: Option<f64>,
}

/// Per-horizon scores over a test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub n_test: usize,
    pub per_horizon: Vec<HorizonMetrics>,
}

/// Scores `model` on `test`, one (RMSE, CORR) pair per forecast step, in
/// raw target units (forecasts and targets both pass through the model's
/// scaler inversion). A pure function of its inputs.
pub fn evaluate(model: &ForecastModel, test: &WindowSet) -> Result<MetricReport> {
    if test.is_empty() {
        return Err(Error::data("test set has no windows"));
    }
    if test.lookback() != model.lookback() || test.horizon() != model.horizon() {
        return Err(Error::data(format!(
            "test windows are {}×…→{}, model expects {}×…→{}",
            test.lookback(),
            test.horizon(),
            model.lookback(),
            model.horizon()
        )));
    }
    let h = model.horizon();
    let scaler = model.scaler();
    let mut preds = vec![Vec::with_capacity(test.len()); h];
    let mut actuals = vec![Vec::with_capacity(test.len()); h];
    for i in 0..test.len() {
        let (forecast, _) = model.forward(test.input(i), &ModelMasks::default())?;
        for k in 0..h {
            preds[k].push(scaler.invert_target_value(forecast[k]));
            actuals[k].push(scaler.invert_target_value(test.target(i)[k]));
        }
    }
    let per_horizon = (0..h)
        .map(|k| {
            Ok(HorizonMetrics {
                step: k + 1,
                rmse: rmse(&preds[k], &actuals[k])?,
                corr: match corr(&preds[k], &actuals[k]) {
                    Ok(c) => Some(c),
                    Err(Error::Numeric(_)) => None,
                    Err(e) => return Err(e),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricReport {
        n_test: test.len(),
        per_horizon,
    })
}

/// One horizon step's mean/spread across repeated runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateHorizon {
    pub step: usize,
    pub rmse_mean: f64,
    /// Sample standard deviation; `None` below two runs.
    pub rmse_std: Option<f64>,
    /// Mean over runs whose correlation was defined; `None` if none were.
    pub corr_mean: Option<f64>,
    pub corr_std: Option<f64>,
    /// How many runs had a defined correlation.
    pub corr_n: usize,
}

/// Mean and sample standard deviation across repeated-run reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub n_reports: usize,
    pub per_horizon: Vec<AggregateHorizon>,
}

fn mean_and_std(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, Some(var.sqrt()))
}

/// Merges repeated-run reports into per-horizon mean/stddev.
pub fn aggregate_reports(reports: &[MetricReport]) -> Result<AggregateReport> {
    let first = reports
        .first()
        .ok_or_else(|| Error::usage("no reports to aggregate"))?;
    let h = first.per_horizon.len();
    if reports.iter().any(|r| r.per_horizon.len() != h) {
        return Err(Error::data("reports disagree on the number of horizon steps"));
    }
    let per_horizon = (0..h)
        .map(|k| {
            let rmses: Vec<f64> = reports.iter().map(|r| r.per_horizon[k].rmse).collect();
            let corrs: Vec<f64> = reports
                .iter()
                .filter_map(|r| r.per_horizon[k].corr)
                .collect();
            let (rmse_mean, rmse_std) = mean_and_std(&rmses);
            let (corr_mean, corr_std) = if corrs.is_empty() {
                (None, None)
            } else {
                let (m, s) = mean_and_std(&corrs);
                (Some(m), s)
            };
            AggregateHorizon {
                step: k + 1,
                rmse_mean,
                rmse_std,
                corr_mean,
                corr_std,
                corr_n: corrs.len(),
            }
        })
        .collect();
    Ok(AggregateReport {
        n_reports: reports.len(),
        per_horizon,
    })
}
