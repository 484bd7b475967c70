//! Min-max scaling fitted on training rows only.

use serde::{Deserialize, Serialize};

use crate::dataio::series::{SeriesTable, TARGET_NAME};
use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Per-column minima and maxima, one entry per model input column.
///
/// The target's statistics sit last under the name `precip`; they scale both
/// the target values and the target's input copy, so forecasts can be mapped
/// back to millimetres with [`ScalerStats::invert_target_value`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerStats {
    names: Vec<String>,
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl ScalerStats {
    /// Validated constructor (used by checkpoint loading).
    pub fn new(names: Vec<String>, mins: Vec<f64>, maxs: Vec<f64>) -> Result<Self> {
        if names.len() != mins.len() || names.len() != maxs.len() || names.is_empty() {
            return Err(Error::data("scaler stats: mismatched or empty columns"));
        }
        for j in 0..names.len() {
            // Negated form so NaN extrema are rejected too.
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(maxs[j] > mins[j]) {
                return Err(Error::data(format!(
                    "constant feature \"{}\": max {} ≤ min {}",
                    names[j], maxs[j], mins[j]
                )));
            }
        }
        if names.last().map(String::as_str) != Some(TARGET_NAME) {
            return Err(Error::data(format!(
                "scaler stats must end with the \"{TARGET_NAME}\" column"
            )));
        }
        Ok(ScalerStats { names, mins, maxs })
    }

    /// Input column names, target last.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Number of model input columns covered (features + target).
    pub fn n_columns(&self) -> usize {
        self.names.len()
    }

    pub fn mins(&self) -> &[f64] {
        &self.mins
    }

    pub fn maxs(&self) -> &[f64] {
        &self.maxs
    }

    fn scale(&self, col: usize, x: f64) -> f64 {
        (x - self.mins[col]) / (self.maxs[col] - self.mins[col])
    }

    fn invert(&self, col: usize, x: f64) -> f64 {
        self.mins[col] + x * (self.maxs[col] - self.mins[col])
    }

    /// Scales one raw target value into model space.
    pub fn scale_target_value(&self, y: f64) -> f64 {
        self.scale(self.n_columns() - 1, y)
    }

    /// Maps one model-space target value back to millimetres.
    pub fn invert_target_value(&self, y: f64) -> f64 {
        self.invert(self.n_columns() - 1, y)
    }

    /// Scales a raw row-major window (columns in this scaler's order) into
    /// model space.
    pub fn scale_matrix(&self, raw: &Mat) -> Result<Mat> {
        if raw.cols() != self.n_columns() {
            return Err(Error::data(format!(
                "window has {} columns, the scaler expects {}",
                raw.cols(),
                self.n_columns()
            )));
        }
        Ok(Mat::from_fn(raw.rows(), raw.cols(), |r, c| {
            self.scale(c, raw.at(r, c))
        }))
    }
}

/// Fits column minima/maxima over the rows of `table` (pass the training
/// slice only — test rows must not leak into the statistics).
pub fn fit_scaler(table: &SeriesTable) -> Result<ScalerStats> {
    let m = table.n_features();
    let mut names = table.input_names();
    let mut mins = vec![f64::INFINITY; m + 1];
    let mut maxs = vec![f64::NEG_INFINITY; m + 1];
    for row in 0..table.n_rows() {
        for col in 0..=m {
            let v = table.input_value(row, col);
            mins[col] = mins[col].min(v);
            maxs[col] = maxs[col].max(v);
        }
    }
    for col in 0..=m {
        if maxs[col] <= mins[col] {
            return Err(Error::data(format!(
                "constant feature \"{}\" (all values {})",
                names[col], mins[col]
            )));
        }
    }
    // names ends with the target already; keep ownership moves explicit
    let names = std::mem::take(&mut names);
    ScalerStats::new(names, mins, maxs)
}

/// Applies min-max scaling columnwise: `(x − min) / (max − min)`.
///
/// Values outside the fitted range scale outside `[0, 1]`; nothing is
/// clipped.
pub fn apply_scaler(table: &SeriesTable, stats: &ScalerStats) -> Result<SeriesTable> {
    let expected = table.input_names();
    if stats.names() != expected.as_slice() {
        return Err(Error::data(format!(
            "scaler columns {:?} do not match table columns {:?}",
            stats.names(),
            expected
        )));
    }
    let target_col = stats.n_columns() - 1;
    Ok(table.map_columns(
        |col, x| stats.scale(col, x),
        |y| stats.scale(target_col, y),
    ))
}

/// Maps model-space target values back to millimetres.
pub fn invert_target(values: &[f64], stats: &ScalerStats) -> Vec<f64> {
    values.iter().map(|&y| stats.invert_target_value(y)).collect()
}
