//! Pointwise nonlinearities.

use serde::{Deserialize, Serialize};

/// Logistic sigmoid σ(x) = 1 / (1 + e^{−x}).
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Candidate/output activation of an LSTM cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Relu,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Relu => x.max(0.0),
        }
    }

    /// Derivative expressed through the activation's *output* `y = φ(x)`.
    ///
    /// For ReLU the derivative at 0 is defined as 0, which this encoding
    /// honours: `y > 0` exactly when `x > 0`.
    pub fn deriv_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}
