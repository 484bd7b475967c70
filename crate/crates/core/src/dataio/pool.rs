//! Average pooling over long input windows.
//!
//! The seasonal branch does not read its long window row by row; it reads
//! block averages. Windows of `window` rows are anchored to the newest row
//! and repeat every `stride` rows going back in time; whatever does not fit
//! at the old end is dropped.

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Number of pooled rows for a length-`t` input: `floor((t − window)/stride) + 1`.
pub fn pooled_len(t: usize, window: usize, stride: usize) -> usize {
    assert!(window >= 1 && window <= t && stride >= 1);
    (t - window) / stride + 1
}

/// Columnwise means over backward-anchored windows, oldest output row first.
///
/// Output row `P−1` averages the newest `window` input rows; each earlier
/// output row ends `stride` rows further back.
pub fn average_pool(seq: &Mat, window: usize, stride: usize) -> Result<Mat> {
    let t = seq.rows();
    let k = seq.cols();
    if window == 0 || stride == 0 {
        return Err(Error::usage("pool window and stride must be positive"));
    }
    if window > t {
        return Err(Error::data(format!(
            "pool window {window} exceeds sequence length {t}"
        )));
    }
    let p = pooled_len(t, window, stride);
    let mut out = Mat::zeros(p, k);
    for row in 0..p {
        // newest window (row p−1) ends at the last input row
        let end = t - (p - 1 - row) * stride;
        let start = end - window;
        for col in 0..k {
            let sum: f64 = (start..end).map(|r| seq.at(r, col)).sum();
            *out.at_mut(row, col) = sum / window as f64;
        }
    }
    Ok(out)
}
