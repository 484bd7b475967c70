//! Predictive uncertainty from repeated stochastic forward passes.
//!
//! Dropout stays active at inference: each of the `n_runs` passes draws one
//! hidden-state mask per branch and keeps it for the whole test set, so a
//! run is one coherent sample from the model's posterior approximation.
//! Bands are empirical quantiles of the run ensemble, in raw target units.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::dataio::WindowSet;
use crate::error::{Error, Result};
use crate::model::ForecastModel;
use crate::rng::Rng;

/// A central interval at one coverage level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    /// Coverage level in (0, 1), e.g. 0.75.
    pub level: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Ensemble summary for one forecast step of one window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonBand {
    /// 1-based forecast step.
    pub step: usize,
    /// Ensemble mean.
    pub mean: f64,
    /// Ensemble median.
    pub median: f64,
    /// Intervals ordered by level, innermost first.
    pub bands: Vec<Band>,
}

/// All forecast steps of one test window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowBands {
    /// Date of the window's first forecast day.
    pub anchor_date: NaiveDate,
    pub per_horizon: Vec<HorizonBand>,
}

/// The full uncertainty report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyBands {
    pub n_runs: usize,
    /// Dropout probability used for the stochastic passes.
    pub p: f64,
    pub levels: Vec<f64>,
    pub windows: Vec<WindowBands>,
}

/// Empirical quantile with linear interpolation between order statistics.
///
/// `sorted` must be ascending; `q` in [0, 1] maps 0 to the minimum and 1 to
/// the maximum.
pub fn empirical_quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    assert!((0.0..=1.0).contains(&q), "quantile level {q} outside [0, 1]");
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Runs `model` `n_runs` times over `test` with dropout probability `p`
/// active, and summarizes the per-window, per-step forecast ensembles as
/// central quantile bands at the given coverage `levels`.
///
/// Per-run RNG streams split deterministically from `seed`, so the report
/// is reproducible.
pub fn mc_dropout(
    model: &ForecastModel,
    test: &WindowSet,
    p: f64,
    n_runs: usize,
    levels: &[f64],
    seed: u64,
) -> Result<UncertaintyBands> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::usage(format!(
            "dropout probability {p} must lie strictly between 0 and 1"
        )));
    }
    if n_runs < 2 {
        return Err(Error::usage("uncertainty needs at least two runs"));
    }
    if levels.is_empty() {
        return Err(Error::usage("no coverage levels requested"));
    }
    if levels.iter().any(|l| !(0.0 < *l && *l < 1.0)) {
        return Err(Error::usage("coverage levels must lie strictly between 0 and 1"));
    }
    if test.is_empty() {
        return Err(Error::data("test set has no windows"));
    }
    let mut levels = levels.to_vec();
    levels.sort_by(|a, b| a.partial_cmp(b).expect("levels are finite"));

    let h = model.horizon();
    let scaler = model.scaler();
    // ensemble[w][k][r]: run r's forecast for window w, step k, in raw units
    let mut ensemble = vec![vec![Vec::with_capacity(n_runs); h]; test.len()];
    for run in 0..n_runs {
        let mut rng = Rng::labeled(seed, &format!("mc{run}"));
        let masks = model.draw_masks(p, &mut rng)?;
        for (w, window_runs) in ensemble.iter_mut().enumerate() {
            let (forecast, _) = model.forward(test.input(w), &masks)?;
            for (step_runs, &f) in window_runs.iter_mut().zip(&forecast) {
                step_runs.push(scaler.invert_target_value(f));
            }
        }
    }

    let windows = (0..test.len())
        .map(|w| WindowBands {
            anchor_date: test.anchor_date(w),
            per_horizon: (0..h)
                .map(|k| {
                    let sample = &mut ensemble[w][k];
                    let mean = sample.iter().sum::<f64>() / sample.len() as f64;
                    sample.sort_by(|a, b| a.partial_cmp(b).expect("forecasts are finite"));
                    let median = empirical_quantile(sample, 0.5);
                    let bands = levels
                        .iter()
                        .map(|&level| {
                            let tail = (1.0 - level) / 2.0;
                            Band {
                                level,
                                lower: empirical_quantile(sample, tail),
                                upper: empirical_quantile(sample, 1.0 - tail),
                            }
                        })
                        .collect();
                    HorizonBand { step: k + 1, mean, median, bands }
                })
                .collect(),
        })
        .collect();

    Ok(UncertaintyBands {
        n_runs,
        p,
        levels,
        windows,
    })
}
