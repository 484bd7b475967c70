//! Weight initialization: truncated Glorot normal for matrices, zeros for
//! biases (which the zero-weight constructors already provide).

use crate::model::ForecastModel;
use crate::rng::Rng;
use crate::tensors::TensorViewMut;

/// One `N(0, σ²)` draw, redrawn until it lands within two standard
/// deviations.
pub fn truncated_normal(rng: &mut Rng, sigma: f64) -> f64 {
    loop {
        let z = sigma * rng.next_normal();
        if z.abs() <= 2.0 * sigma {
            return z;
        }
    }
}

/// Fills every matrix tensor of `model` with truncated Glorot-normal draws,
/// `σ² = 2/(n_in + n_out)` per tensor, leaving vector tensors (biases and
/// the combination pair) at their constructed values.
///
/// The draw order is the canonical tensor enumeration, so a given seed
/// always produces the same weights.
pub fn init_weights(model: &mut ForecastModel, seed: u64) {
    let mut rng = Rng::labeled(seed, "init");
    for (_, tensor) in model.tensors_mut().iter_mut() {
        if let TensorViewMut::Mat(m) = tensor {
            let sigma = (2.0 / (m.rows() + m.cols()) as f64).sqrt();
            for v in m.data_mut() {
                *v = truncated_normal(&mut rng, sigma);
            }
        }
    }
}
