//! The moving-window method: adjacent (input, target) pairs from a table.

use chrono::NaiveDate;

use crate::dataio::series::SeriesTable;
use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Paired input windows and target windows.
///
/// Pair `i` covers table rows `[i, i+T)` as inputs (all feature columns plus
/// the target copy as the last column) and rows `[i+T, i+T+H)` as targets.
/// A length-`N` table yields exactly `N − T − H + 1` pairs.
#[derive(Debug, Clone)]
pub struct WindowSet {
    inputs: Vec<Mat>,
    targets: Vec<Vec<f64>>,
    anchor_dates: Vec<NaiveDate>,
    lookback: usize,
    horizon: usize,
}

impl WindowSet {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn lookback(&self) -> usize {
        self.lookback
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Input window of pair `i`, a `T×(m+1)` matrix (rows oldest→newest).
    pub fn input(&self, i: usize) -> &Mat {
        &self.inputs[i]
    }

    /// Target window of pair `i`, length `H`.
    pub fn target(&self, i: usize) -> &[f64] {
        &self.targets[i]
    }

    /// Date of the first target day of pair `i`.
    pub fn anchor_date(&self, i: usize) -> NaiveDate {
        self.anchor_dates[i]
    }

    /// Splits off the last `n_tail` pairs (used for validation splits).
    pub fn split_tail(self, n_tail: usize) -> (WindowSet, WindowSet) {
        let n_tail = n_tail.min(self.len());
        let cut = self.len() - n_tail;
        let mut head = self;
        let tail = WindowSet {
            inputs: head.inputs.split_off(cut),
            targets: head.targets.split_off(cut),
            anchor_dates: head.anchor_dates.split_off(cut),
            lookback: head.lookback,
            horizon: head.horizon,
        };
        (head, tail)
    }
}

/// Slides a window of `lookback` input rows followed by `horizon` target rows
/// over the table, one day at a time.
pub fn make_windows(table: &SeriesTable, lookback: usize, horizon: usize) -> Result<WindowSet> {
    if lookback == 0 || horizon == 0 {
        return Err(Error::usage("lookback and horizon must be positive"));
    }
    let n = table.n_rows();
    let needed = lookback + horizon;
    if n < needed {
        return Err(Error::data(format!(
            "need at least {needed} rows for lookback {lookback} + horizon {horizon}, got {n}"
        )));
    }
    let m_in = table.input_dim();
    let count = n - lookback - horizon + 1;
    let mut inputs = Vec::with_capacity(count);
    let mut targets = Vec::with_capacity(count);
    let mut anchor_dates = Vec::with_capacity(count);
    for i in 0..count {
        inputs.push(Mat::from_fn(lookback, m_in, |r, c| table.input_value(i + r, c)));
        targets.push(table.target()[i + lookback..i + lookback + horizon].to_vec());
        anchor_dates.push(table.dates()[i + lookback]);
    }
    Ok(WindowSet { inputs, targets, anchor_dates, lookback, horizon })
}
