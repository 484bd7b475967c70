//! Neural network kernels: LSTM cell forward/backward, dense layers,
//! dropout masks, and a finite-difference gradient oracle.
//!
//! Everything is hand-derived reverse-mode math on `f64` — no autodiff. The
//! LSTM follows the standard gate equations with a configurable candidate/
//! output activation (tanh or ReLU), and every backward pass here is checked
//! against central finite differences in the tests.

mod activation;
mod dense;
mod dropout;
mod gradcheck;
mod lstm;

pub use activation::{sigmoid, Activation};
pub use dense::{dense_backward, dense_forward, DenseGrads, DenseParams};
pub use dropout::dropout_mask;
pub use gradcheck::{finite_diff_grad, max_relative_error, relative_error};
pub use lstm::{
    lstm_backward, lstm_backward_masked, lstm_forward, lstm_forward_masked, lstm_step,
    lstm_step_masked, LstmGrads, LstmParams, LstmState, StepCache,
};
