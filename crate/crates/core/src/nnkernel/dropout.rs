//! Inverted dropout masks.

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Draws a mask whose entries are 0 with probability `p` and `1/(1−p)`
/// otherwise, so the mask has unit expectation and plain inference needs no
/// rescaling.
pub fn dropout_mask(dim: usize, p: f64, rng: &mut Rng) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::usage(format!(
            "dropout probability must satisfy 0 ≤ p < 1, got {p}"
        )));
    }
    let keep = 1.0 / (1.0 - p);
    Ok((0..dim).map(|_| if rng.bernoulli(p) { 0.0 } else { keep }).collect())
}
