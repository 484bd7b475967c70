//! Dense (affine) layer used for forecast heads and the S2S-1 bridge.

use crate::linalg::Mat;

/// Weights of a dense layer `y = Wx (+ b)`.
///
/// The bias is optional so the heads can run in a strict no-bias mode.
#[derive(Debug, Clone)]
pub struct DenseParams {
    pub w: Mat,
    pub b: Option<Vec<f64>>,
}

impl DenseParams {
    pub fn zeros(out_dim: usize, in_dim: usize, bias: bool) -> Self {
        DenseParams {
            w: Mat::zeros(out_dim, in_dim),
            b: bias.then(|| vec![0.0; out_dim]),
        }
    }

    pub fn out_dim(&self) -> usize {
        self.w.rows()
    }

    pub fn in_dim(&self) -> usize {
        self.w.cols()
    }

    pub fn n_params(&self) -> usize {
        self.w.rows() * self.w.cols() + self.b.as_ref().map_or(0, Vec::len)
    }
}

/// Gradients for a dense layer.
#[derive(Debug, Clone)]
pub struct DenseGrads {
    pub w: Mat,
    pub b: Option<Vec<f64>>,
}

impl DenseGrads {
    pub fn zeros_like(params: &DenseParams) -> Self {
        DenseGrads {
            w: Mat::zeros(params.w.rows(), params.w.cols()),
            b: params.b.as_ref().map(|b| vec![0.0; b.len()]),
        }
    }
}

/// `y = Wx + b`.
pub fn dense_forward(params: &DenseParams, x: &[f64]) -> Vec<f64> {
    let mut y = match &params.b {
        Some(b) => b.clone(),
        None => vec![0.0; params.out_dim()],
    };
    params.w.matvec_add(x, &mut y);
    y
}

/// Exact gradients of the affine map: `(∂L/∂W, ∂L/∂b)` and `∂L/∂x`.
pub fn dense_backward(params: &DenseParams, x: &[f64], grad_y: &[f64]) -> (DenseGrads, Vec<f64>) {
    let mut grads = DenseGrads::zeros_like(params);
    grads.w.add_outer(grad_y, x);
    if let Some(b) = grads.b.as_mut() {
        b.copy_from_slice(grad_y);
    }
    let mut grad_x = vec![0.0; params.in_dim()];
    params.w.matvec_t_add(grad_y, &mut grad_x);
    (grads, grad_x)
}
