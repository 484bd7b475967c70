//! Permutation variable importance: how much day-1 skill a feature's
//! destruction costs.
//!
//! The full protocol permutes one input column over the whole table (so the
//! shuffled column stays consistent across the train/test split), retrains
//! from a fresh initialization, scores day 1 on the test split, and repeats
//! with fresh shuffles. A positive `vip_rmse` (error grew) or positive
//! `vip_corr` (correlation fell) marks an informative feature.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::dataio::SeriesTable;
use crate::error::{Error, Result};
use crate::model::ForecastModel;
use crate::pipeline::{evaluate_model, train_run};
use crate::rng::Rng;

/// One repetition's raw day-1 scores on the permuted data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VipRepScore {
    pub rep: usize,
    pub rmse: f64,
    pub corr: Option<f64>,
}

/// Permutation-importance summary for one feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VipReport {
    pub feature: String,
    pub repetitions: usize,
    pub baseline_rmse: f64,
    pub baseline_corr: Option<f64>,
    /// Mean over repetitions of (permuted RMSE − baseline RMSE); positive
    /// means the feature carried information.
    pub vip_rmse: f64,
    /// Mean over repetitions of (baseline CORR − permuted CORR); `None`
    /// when any correlation involved was undefined.
    pub vip_corr: Option<f64>,
    pub rep_scores: Vec<VipRepScore>,
}

fn day1(report: &crate::eval::MetricReport) -> (f64, Option<f64>) {
    let first = &report.per_horizon[0];
    (first.rmse, first.corr)
}

fn summarize(
    feature: &str,
    baseline: (f64, Option<f64>),
    rep_scores: Vec<VipRepScore>,
) -> VipReport {
    let (baseline_rmse, baseline_corr) = baseline;
    let n = rep_scores.len() as f64;
    let vip_rmse = rep_scores
        .iter()
        .map(|s| s.rmse - baseline_rmse)
        .sum::<f64>()
        / n;
    let vip_corr = baseline_corr.and_then(|bc| {
        rep_scores
            .iter()
            .map(|s| s.corr.map(|c| bc - c))
            .sum::<Option<f64>>()
            .map(|total| total / n)
    });
    VipReport {
        feature: feature.to_string(),
        repetitions: rep_scores.len(),
        baseline_rmse,
        baseline_corr,
        vip_rmse,
        vip_corr,
        rep_scores,
    }
}

/// Full-protocol importance: permute, retrain from fresh init, score day 1;
/// repeat with a fresh shuffle and a fresh training seed each time.
///
/// `cfg` must carry a train/test split; the baseline is one unpermuted run
/// under the config's own seed.
pub fn vip_retrain(
    cfg: &RunConfig,
    table: &SeriesTable,
    feature: &str,
    repetitions: usize,
) -> Result<VipReport> {
    if repetitions == 0 {
        return Err(Error::usage("importance needs at least one repetition"));
    }
    let test_start = cfg
        .test_start
        .ok_or_else(|| Error::usage("variable importance needs a train/test split"))?;

    let (baseline_model, _) = train_run(cfg, table)?;
    let baseline = day1(&evaluate_model(&baseline_model, table, test_start)?);

    let mut rep_scores = Vec::with_capacity(repetitions);
    for rep in 0..repetitions {
        let mut perm_rng = Rng::labeled(cfg.seed, &format!("vip-perm-{rep}"));
        let permuted = table.with_permuted_input(feature, &mut perm_rng)?;
        let mut rep_cfg = cfg.clone();
        rep_cfg.seed = Rng::labeled(cfg.seed, &format!("vip-train-{rep}")).next_u64();
        let (model, _) = train_run(&rep_cfg, &permuted)?;
        let (rmse, corr) = day1(&evaluate_model(&model, &permuted, test_start)?);
        rep_scores.push(VipRepScore { rep, rmse, corr });
    }
    Ok(summarize(feature, baseline, rep_scores))
}

/// Re-evaluation-only importance: permute the column and re-score the SAME
/// trained model, no retraining. Cheap, and exact for sanity checks — a
/// feature the model provably ignores scores a `vip_rmse` of exactly zero.
pub fn vip_reevaluate(
    model: &ForecastModel,
    table: &SeriesTable,
    test_start: NaiveDate,
    feature: &str,
    repetitions: usize,
    seed: u64,
) -> Result<VipReport> {
    if repetitions == 0 {
        return Err(Error::usage("importance needs at least one repetition"));
    }
    let baseline = day1(&evaluate_model(model, table, test_start)?);
    let mut rep_scores = Vec::with_capacity(repetitions);
    for rep in 0..repetitions {
        let mut perm_rng = Rng::labeled(seed, &format!("vip-perm-{rep}"));
        let permuted = table.with_permuted_input(feature, &mut perm_rng)?;
        let (rmse, corr) = day1(&evaluate_model(model, &permuted, test_start)?);
        rep_scores.push(VipRepScore { rep, rmse, corr });
    }
    Ok(summarize(feature, baseline, rep_scores))
}
