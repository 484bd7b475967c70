//! The dated multivariate series table and its CSV round trip.

use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Name of the target column in CSV files and scaler statistics.
pub const TARGET_NAME: &str = "precip";

/// A gap-free daily table: named feature columns plus a precipitation target.
///
/// Invariants enforced at construction:
/// - dates are strictly increasing and exactly one day apart,
/// - every value is finite,
/// - the target is nonnegative (raw tables only; scaled tables may dip below
///   zero when test rows fall outside the training range).
///
/// The target doubles as the last model input column. Permutation-importance
/// runs can replace that input copy without touching the true target via
/// [`SeriesTable::with_permuted_input`].
#[derive(Debug, Clone)]
pub struct SeriesTable {
    dates: Vec<NaiveDate>,
    feature_names: Vec<String>,
    /// Row-major N×m feature values.
    features: Vec<f64>,
    target: Vec<f64>,
    /// Stand-in for the target *input* column; `None` means "use the target".
    input_target: Option<Vec<f64>>,
}

impl SeriesTable {
    /// Builds a raw table, enforcing every invariant including `target ≥ 0`.
    pub fn new(
        dates: Vec<NaiveDate>,
        feature_names: Vec<String>,
        features: Vec<f64>,
        target: Vec<f64>,
    ) -> Result<Self> {
        let table = Self::new_unsigned(dates, feature_names, features, target)?;
        for (i, &y) in table.target.iter().enumerate() {
            if y < 0.0 {
                return Err(Error::data(format!(
                    "negative target {y} on {}",
                    table.dates[i]
                )));
            }
        }
        Ok(table)
    }

    /// Builds a table without the target-sign check (scaled slices may have
    /// negative targets when values fall below the training minimum).
    pub(crate) fn new_unsigned(
        dates: Vec<NaiveDate>,
        feature_names: Vec<String>,
        features: Vec<f64>,
        target: Vec<f64>,
    ) -> Result<Self> {
        let n = dates.len();
        let m = feature_names.len();
        if n == 0 {
            return Err(Error::data("table has no rows"));
        }
        if target.len() != n || features.len() != n * m {
            return Err(Error::data(format!(
                "shape mismatch: {n} dates, {} targets, {} feature values for {m} columns",
                target.len(),
                features.len()
            )));
        }
        for w in dates.windows(2) {
            let expect = w[0].succ_opt().expect("date overflow");
            if w[1] == w[0] {
                return Err(Error::data(format!("duplicate date {}", w[0])));
            }
            if w[1] != expect {
                return Err(Error::data(format!("gap after {}", w[0])));
            }
        }
        for (i, &y) in target.iter().enumerate() {
            if !y.is_finite() {
                return Err(Error::data(format!(
                    "non-finite target on {}",
                    dates[i]
                )));
            }
        }
        for (idx, &v) in features.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::data(format!(
                    "non-finite value in column \"{}\" on {}",
                    feature_names[idx % m],
                    dates[idx / m]
                )));
            }
        }
        Ok(SeriesTable { dates, feature_names, features, target, input_target: None })
    }

    /// Convenience constructor from per-row feature vectors.
    pub fn from_rows(
        dates: Vec<NaiveDate>,
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        target: Vec<f64>,
    ) -> Result<Self> {
        let m = feature_names.len();
        let mut flat = Vec::with_capacity(rows.len() * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::data(format!(
                    "row {i} has {} values, expected {m}",
                    row.len()
                )));
            }
            flat.extend_from_slice(row);
        }
        Self::new(dates, feature_names, flat, target)
    }

    pub fn n_rows(&self) -> usize {
        self.dates.len()
    }

    /// Number of feature columns (excluding the target).
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Number of model input columns: features plus the target copy.
    pub fn input_dim(&self) -> usize {
        self.n_features() + 1
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Model input column names: features in order, then the target.
    pub fn input_names(&self) -> Vec<String> {
        let mut names = self.feature_names.clone();
        names.push(TARGET_NAME.to_string());
        names
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn feature(&self, row: usize, col: usize) -> f64 {
        self.features[row * self.n_features() + col]
    }

    /// Model input value at (row, col); the last column is the target copy.
    pub fn input_value(&self, row: usize, col: usize) -> f64 {
        let m = self.n_features();
        if col < m {
            self.features[row * m + col]
        } else {
            match &self.input_target {
                Some(shadow) => shadow[row],
                None => self.target[row],
            }
        }
    }

    /// Index of the row carrying `date`, if present.
    pub fn index_of_date(&self, date: NaiveDate) -> Option<usize> {
        let first = *self.dates.first()?;
        let offset = (date - first).num_days();
        if offset < 0 || offset as usize >= self.dates.len() {
            None
        } else {
            Some(offset as usize)
        }
    }

    /// Copy of the half-open row range `[start, end)` as its own table.
    pub fn slice_rows(&self, start: usize, end: usize) -> Result<SeriesTable> {
        if start >= end || end > self.n_rows() {
            return Err(Error::data(format!(
                "empty or out-of-range slice {start}..{end} of {} rows",
                self.n_rows()
            )));
        }
        let m = self.n_features();
        Ok(SeriesTable {
            dates: self.dates[start..end].to_vec(),
            feature_names: self.feature_names.clone(),
            features: self.features[start * m..end * m].to_vec(),
            target: self.target[start..end].to_vec(),
            input_target: self.input_target.as_ref().map(|s| s[start..end].to_vec()),
        })
    }

    /// Chronological split into a training slice (rows up to and including
    /// `train_end`) and a test slice (rows from `test_start` on).
    ///
    /// The slices are disjoint; callers that window the test period should
    /// prepend look-back context via [`SeriesTable::tail_with_context`].
    pub fn split_by_date(
        &self,
        train_end: NaiveDate,
        test_start: NaiveDate,
    ) -> Result<(SeriesTable, SeriesTable)> {
        if train_end >= test_start {
            return Err(Error::data(format!(
                "train_end {train_end} must precede test_start {test_start}"
            )));
        }
        let end_idx = self
            .index_of_date(train_end)
            .ok_or_else(|| Error::data(format!("train_end {train_end} outside table dates")))?;
        let start_idx = self
            .index_of_date(test_start)
            .ok_or_else(|| Error::data(format!("test_start {test_start} outside table dates")))?;
        Ok((self.slice_rows(0, end_idx + 1)?, self.slice_rows(start_idx, self.n_rows())?))
    }

    /// Rows from `lookback` days before `first_target` through the end of the
    /// table. Windowing this slice yields forecasts whose first anchor date is
    /// exactly `first_target`.
    pub fn tail_with_context(&self, first_target: NaiveDate, lookback: usize) -> Result<SeriesTable> {
        let idx = self
            .index_of_date(first_target)
            .ok_or_else(|| Error::data(format!("date {first_target} outside table dates")))?;
        if idx < lookback {
            return Err(Error::data(format!(
                "need {lookback} context rows before {first_target}, only {idx} available"
            )));
        }
        self.slice_rows(idx - lookback, self.n_rows())
    }

    /// Copy of the table with one model *input* column permuted across all
    /// rows. Permuting the target's input copy leaves the true target (and
    /// therefore every evaluation score's ground truth) untouched.
    pub fn with_permuted_input(&self, name: &str, rng: &mut Rng) -> Result<SeriesTable> {
        let mut out = self.clone();
        if name == TARGET_NAME {
            let mut shadow = match &self.input_target {
                Some(s) => s.clone(),
                None => self.target.clone(),
            };
            rng.shuffle(&mut shadow);
            out.input_target = Some(shadow);
            return Ok(out);
        }
        let col = self
            .feature_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::data(format!("unknown input column \"{name}\"")))?;
        let m = self.n_features();
        let mut column: Vec<f64> = (0..self.n_rows()).map(|r| self.features[r * m + col]).collect();
        rng.shuffle(&mut column);
        for (r, v) in column.into_iter().enumerate() {
            out.features[r * m + col] = v;
        }
        Ok(out)
    }

    /// Rebuilds the table with transformed values (used by the scaler).
    pub(crate) fn map_columns(
        &self,
        mut feature_fn: impl FnMut(usize, f64) -> f64,
        mut target_fn: impl FnMut(f64) -> f64,
    ) -> SeriesTable {
        let m = self.n_features();
        let features = self
            .features
            .iter()
            .enumerate()
            .map(|(idx, &v)| feature_fn(idx % m, v))
            .collect();
        SeriesTable {
            dates: self.dates.clone(),
            feature_names: self.feature_names.clone(),
            features,
            target: self.target.iter().map(|&y| target_fn(y)).collect(),
            input_target: self.input_target.as_ref().map(|s| s.iter().map(|&y| target_fn(y)).collect()),
        }
    }
}

/// Loads a daily CSV table: `date` first, a `precip` target column, and any
/// number of numeric feature columns in between (order preserved).
pub fn load_csv(path: impl AsRef<Path>) -> Result<SeriesTable> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::data(format!("cannot open {}: {e}", path.display())))?;

    let headers = reader
        .headers()
        .map_err(|e| Error::data(format!("cannot read header: {e}")))?
        .clone();
    if headers.is_empty() || headers.get(0) != Some("date") {
        return Err(Error::data("first column must be \"date\""));
    }
    let target_col = headers
        .iter()
        .position(|h| h == TARGET_NAME)
        .ok_or_else(|| Error::data(format!("missing \"{TARGET_NAME}\" column")))?;
    if target_col == 0 {
        return Err(Error::data("first column must be \"date\""));
    }
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != 0 && i != target_col)
        .map(|(_, h)| h.to_string())
        .collect();

    let mut dates = Vec::new();
    let mut features = Vec::new();
    let mut target = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::data(format!("row {}: {e}", row_idx + 1)))?;
        if record.len() != headers.len() {
            return Err(Error::data(format!(
                "row {} has {} fields, expected {}",
                row_idx + 1,
                record.len(),
                headers.len()
            )));
        }
        let date_text = record.get(0).unwrap_or("");
        let date = NaiveDate::parse_from_str(date_text, "%Y-%m-%d").map_err(|_| {
            Error::data(format!("row {}: invalid date \"{date_text}\"", row_idx + 1))
        })?;
        dates.push(date);
        for (col, field) in record.iter().enumerate().skip(1) {
            let value: f64 = field.parse().map_err(|_| {
                Error::data(format!(
                    "non-numeric value \"{field}\" in column \"{}\" on row {}",
                    headers.get(col).unwrap_or("?"),
                    row_idx + 1
                ))
            })?;
            if col == target_col {
                target.push(value);
            } else {
                features.push(value);
            }
        }
    }
    SeriesTable::new(dates, feature_names, features, target)
}

/// Writes a table in the same CSV format [`load_csv`] reads (target last).
pub fn write_csv(table: &SeriesTable, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut header = vec!["date".to_string()];
    header.extend(table.feature_names().iter().cloned());
    header.push(TARGET_NAME.to_string());
    writer.write_record(&header)?;
    for row in 0..table.n_rows() {
        let mut record = vec![table.dates()[row].to_string()];
        for col in 0..table.n_features() {
            record.push(format!("{:.17e}", table.feature(row, col)));
        }
        record.push(format!("{:.17e}", table.target()[row]));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dates_from(start: &str, n: usize) -> Vec<NaiveDate> {
        let first = NaiveDate::parse_from_str(start, "%Y-%m-%d").unwrap();
        (0..n).map(|i| first + chrono::Days::new(i as u64)).collect()
    }

    fn small_table() -> SeriesTable {
        SeriesTable::from_rows(
            dates_from("2020-01-01", 4),
            vec!["a".into(), "b".into()],
            vec![
                vec![1.0, 10.0],
                vec![2.0, 20.0],
                vec![3.0, 30.0],
                vec![4.0, 40.0],
            ],
            vec![0.0, 1.0, 0.0, 2.0],
        )
        .unwrap()
    }

    #[test]
    fn three_row_csv_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(
            &path,
            "date,temp,precip\n2020-01-01,1.5,0.0\n2020-01-02,2.5,3.25\n2020-01-03,3.5,0.5\n",
        )
        .unwrap();
        let table = load_csv(&path).unwrap();
        assert_eq!(table.n_rows(), 3);
        assert_eq!(table.n_features(), 1);
        assert_eq!(table.feature_names(), &["temp".to_string()]);
        assert_eq!(table.target(), &[0.0, 3.25, 0.5]);
        assert_eq!(table.input_dim(), 2);
        assert_eq!(table.input_value(1, 1), 3.25);
    }

    #[test]
    fn date_gap_is_rejected_naming_the_gap() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gap.csv");
        std::fs::write(
            &path,
            "date,temp,precip\n2020-01-01,1.0,0.0\n2020-01-03,2.0,0.0\n",
        )
        .unwrap();
        let err = load_csv(&path).unwrap_err().to_string();
        assert!(err.contains("gap after 2020-01-01"), "{err}");
    }

    #[test]
    fn duplicate_date_is_rejected() {
        let err = SeriesTable::from_rows(
            vec![
                NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
                NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            ],
            vec!["a".into()],
            vec![vec![1.0], vec![2.0]],
            vec![0.0, 0.0],
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("duplicate date 2020-01-01"), "{err}");
    }

    #[test]
    fn missing_target_column_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("no_precip.csv");
        std::fs::write(&path, "date,temp\n2020-01-01,1.0\n").unwrap();
        let err = load_csv(&path).unwrap_err().to_string();
        assert!(err.contains("missing \"precip\" column"), "{err}");
    }

    #[test]
    fn non_numeric_cell_names_row_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(
            &path,
            "date,temp,precip\n2020-01-01,1.0,0.0\n2020-01-02,oops,0.0\n",
        )
        .unwrap();
        let err = load_csv(&path).unwrap_err().to_string();
        assert!(err.contains("column \"temp\""), "{err}");
        assert!(err.contains("row 2"), "{err}");
    }

    #[test]
    fn negative_target_is_rejected_for_raw_tables() {
        let err = SeriesTable::from_rows(
            dates_from("2020-01-01", 2),
            vec!["a".into()],
            vec![vec![1.0], vec![2.0]],
            vec![0.0, -0.5],
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("negative target"), "{err}");
    }

    #[test]
    fn split_by_date_gives_disjoint_slices() {
        let table = small_table();
        let (train, test) = table
            .split_by_date(
                NaiveDate::from_ymd_opt(2020, 1, 2).unwrap(),
                NaiveDate::from_ymd_opt(2020, 1, 3).unwrap(),
            )
            .unwrap();
        assert_eq!(train.n_rows(), 2);
        assert_eq!(test.n_rows(), 2);
        assert_eq!(test.dates()[0], NaiveDate::from_ymd_opt(2020, 1, 3).unwrap());
    }

    #[test]
    fn split_rejects_reversed_dates() {
        let table = small_table();
        let err = table
            .split_by_date(
                NaiveDate::from_ymd_opt(2020, 1, 3).unwrap(),
                NaiveDate::from_ymd_opt(2020, 1, 2).unwrap(),
            )
            .unwrap_err()
            .to_string();
        assert!(err.contains("must precede"), "{err}");
    }

    #[test]
    fn split_rejects_out_of_range_dates() {
        let table = small_table();
        let err = table
            .split_by_date(
                NaiveDate::from_ymd_opt(2019, 12, 30).unwrap(),
                NaiveDate::from_ymd_opt(2020, 1, 3).unwrap(),
            )
            .unwrap_err()
            .to_string();
        assert!(err.contains("outside table dates"), "{err}");
    }

    #[test]
    fn tail_with_context_prepends_lookback_rows() {
        let table = small_table();
        let slice = table
            .tail_with_context(NaiveDate::from_ymd_opt(2020, 1, 3).unwrap(), 2)
            .unwrap();
        assert_eq!(slice.n_rows(), 4); // 2 context rows + 2 remaining rows
        assert_eq!(slice.dates()[0], NaiveDate::from_ymd_opt(2020, 1, 1).unwrap());

        let err = table
            .tail_with_context(NaiveDate::from_ymd_opt(2020, 1, 2).unwrap(), 3)
            .unwrap_err()
            .to_string();
        assert!(err.contains("context rows"), "{err}");
    }

    #[test]
    fn csv_round_trip_preserves_values_and_dates() {
        let table = small_table();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("round.csv");
        write_csv(&table, &path).unwrap();
        let back = load_csv(&path).unwrap();
        assert_eq!(back.dates(), table.dates());
        assert_eq!(back.target(), table.target());
        for r in 0..table.n_rows() {
            for c in 0..table.n_features() {
                assert_eq!(back.feature(r, c), table.feature(r, c));
            }
        }
    }

    #[test]
    fn permuting_a_feature_keeps_the_multiset_and_the_target() {
        let table = small_table();
        let mut rng = Rng::new(4);
        let permuted = table.with_permuted_input("a", &mut rng).unwrap();
        let mut col: Vec<f64> = (0..4).map(|r| permuted.feature(r, 0)).collect();
        col.sort_by(f64::total_cmp);
        assert_eq!(col, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(permuted.target(), table.target());
        // untouched column survives
        for r in 0..4 {
            assert_eq!(permuted.feature(r, 1), table.feature(r, 1));
        }
    }

    #[test]
    fn permuting_the_target_input_copy_leaves_the_true_target_alone() {
        let table = small_table();
        let mut rng = Rng::new(123);
        let permuted = table.with_permuted_input(TARGET_NAME, &mut rng).unwrap();
        assert_eq!(permuted.target(), table.target());
        let m = table.n_features();
        let mut shadow: Vec<f64> = (0..4).map(|r| permuted.input_value(r, m)).collect();
        shadow.sort_by(f64::total_cmp);
        assert_eq!(shadow, vec![0.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn unknown_permutation_column_errors() {
        let table = small_table();
        let mut rng = Rng::new(1);
        let err = table.with_permuted_input("nope", &mut rng).unwrap_err().to_string();
        assert!(err.contains("unknown input column"), "{err}");
    }
}
