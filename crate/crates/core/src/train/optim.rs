//! First-order optimizers over the flat parameter vector, plus the
//! per-epoch learning-rate schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which update rule a run uses. `Sgd` is the plain step `w ← w − η·g`,
/// kept for full-batch equivalence checks and as a debugging baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Adam,
    #[default]
    Radam,
    Sgd,
}

/// Moment estimates shared by Adam and RAdam, flat over all parameters.
#[derive(Debug, Clone)]
pub struct OptState {
    /// First-moment (mean) estimate per parameter.
    pub m: Vec<f64>,
    /// Second-moment (uncentered variance) estimate per parameter.
    pub v: Vec<f64>,
    /// Update counter, 1-based after the first step.
    pub step: usize,
}

impl OptState {
    pub fn new(n: usize) -> Self {
        OptState {
            m: vec![0.0; n],
            v: vec![0.0; n],
            step: 0,
        }
    }
}

/// Per-epoch exponential decay: `η_eff = η · rate^epoch`.
pub fn lr_at_epoch(lr: f64, decay_rate: f64, epoch: usize) -> f64 {
    lr * decay_rate.powi(epoch as i32)
}

/// One Adam update with bias correction.
pub fn adam_step(
    state: &mut OptState,
    params: &mut [f64],
    grads: &[f64],
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
) {
    assert_eq!(params.len(), grads.len(), "parameter/gradient length mismatch");
    assert_eq!(params.len(), state.m.len(), "optimizer state length mismatch");
    state.step += 1;
    let k = state.step as i32;
    let corr1 = 1.0 - beta1.powi(k);
    let corr2 = 1.0 - beta2.powi(k);
    for i in 0..params.len() {
        let g = grads[i];
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g;
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g * g;
        let m_hat = state.m[i] / corr1;
        let v_hat = state.v[i] / corr2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
    }
}

/// The rectification factor applied to the adaptive step at update `k`, or
/// `None` while the variance estimate is still considered untrustworthy
/// (`ρ_k ≤ 4`) and the update falls back to plain momentum.
pub fn radam_rectifier(k: usize, beta2: f64) -> Option<f64> {
    let rho_inf = 2.0 / (1.0 - beta2) - 1.0;
    let b2k = beta2.powi(k as i32);
    let rho_k = rho_inf - 2.0 * (k as f64) * b2k / (1.0 - b2k);
    if rho_k > 4.0 {
        let num = (rho_k - 4.0) * (rho_k - 2.0) * rho_inf;
        let den = (rho_inf - 4.0) * (rho_inf - 2.0) * rho_k;
        Some((num / den).sqrt())
    } else {
        None
    }
}

/// One rectified-Adam update: early steps take an unadapted momentum step,
/// later steps the Adam step scaled by the rectifier.
pub fn radam_step(
    state: &mut OptState,
    params: &mut [f64],
    grads: &[f64],
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
) {
    assert_eq!(params.len(), grads.len(), "parameter/gradient length mismatch");
    assert_eq!(params.len(), state.m.len(), "optimizer state length mismatch");
    state.step += 1;
    let k = state.step;
    let corr1 = 1.0 - beta1.powi(k as i32);
    let corr2 = 1.0 - beta2.powi(k as i32);
    let rectifier = radam_rectifier(k, beta2);
    for i in 0..params.len() {
        let g = grads[i];
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g;
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g * g;
        let m_hat = state.m[i] / corr1;
        match rectifier {
            Some(r) => {
                let v_hat = state.v[i] / corr2;
                params[i] -= lr * r * m_hat / (v_hat.sqrt() + eps);
            }
            None => params[i] -= lr * m_hat,
        }
    }
}

/// Plain gradient descent: `w ← w − η·g`.
pub fn sgd_step(params: &mut [f64], grads: &[f64], lr: f64) {
    assert_eq!(params.len(), grads.len(), "parameter/gradient length mismatch");
    for (w, &g) in params.iter_mut().zip(grads) {
        *w -= lr * g;
    }
}

/// A ready-to-use optimizer: update rule plus its state and coefficients.
#[derive(Debug, Clone)]
pub struct Optimizer {
    pub kind: OptimizerKind,
    pub state: OptState,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, n: usize, beta1: f64, beta2: f64, eps: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta1) || !(0.0..1.0).contains(&beta2) {
            return Err(Error::usage("moment coefficients must lie in [0, 1)"));
        }
        if eps <= 0.0 {
            return Err(Error::usage("optimizer epsilon must be positive"));
        }
        Ok(Optimizer {
            kind,
            state: OptState::new(n),
            beta1,
            beta2,
            eps,
        })
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) {
        match self.kind {
            OptimizerKind::Adam => adam_step(
                &mut self.state,
                params,
                grads,
                lr,
                self.beta1,
                self.beta2,
                self.eps,
            ),
            OptimizerKind::Radam => radam_step(
                &mut self.state,
                params,
                grads,
                lr,
                self.beta1,
                self.beta2,
                self.eps,
            ),
            OptimizerKind::Sgd => sgd_step(params, grads, lr),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    #[test]
    fn schedule_decays_exponentially_per_epoch() {
        assert_eq!(lr_at_epoch(0.3, 0.5, 0), 0.3);
        assert!((lr_at_epoch(0.3, 0.5, 2) - 0.075).abs() < 1e-15);
        assert_eq!(lr_at_epoch(0.3, 1.0, 50), 0.3);
    }

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut state = OptState::new(3);
        let mut params = vec![1.0, -2.0, 0.5];
        let before = params.clone();
        adam_step(&mut state, &mut params, &[0.0; 3], 0.1, B1, B2, EPS);
        assert_eq!(params, before);
        radam_step(&mut state, &mut params, &[0.0; 3], 0.1, B1, B2, EPS);
        assert_eq!(params, before);
    }

    #[test]
    fn first_adam_step_moves_by_roughly_the_learning_rate() {
        // Bias correction makes m̂ = g and v̂ = g² on step one, so the update
        // is lr·g/(|g|+ε) ≈ lr for g = 1.
        let mut state = OptState::new(1);
        let mut params = vec![5.0];
        adam_step(&mut state, &mut params, &[1.0], 0.1, B1, B2, EPS);
        assert!((params[0] - 4.9).abs() < 1e-8, "{}", params[0]);
    }

    #[test]
    fn adam_descends_a_convex_bowl_monotonically() {
        let mut state = OptState::new(1);
        let mut w = vec![1.0];
        let mut last = w[0] * w[0];
        for _ in 0..10 {
            let g = vec![2.0 * w[0]];
            adam_step(&mut state, &mut w, &g, 0.05, B1, B2, EPS);
            let f = w[0] * w[0];
            assert!(f < last, "loss rose: {f} after {last}");
            last = f;
        }
    }

    #[test]
    fn early_rectified_steps_are_momentum_only() {
        // k = 1, β2 = 0.999 → ρ_1 = ρ∞ − 2·0.999/0.001 = 1999 − 1998 = 1 ≤ 4.
        assert!(radam_rectifier(1, B2).is_none());
        let mut state = OptState::new(1);
        let mut params = vec![3.0];
        radam_step(&mut state, &mut params, &[1.0], 0.1, B1, B2, EPS);
        // momentum step: m̂ = 1 exactly → w decreases by exactly lr
        assert!((params[0] - 2.9).abs() < 1e-15, "{}", params[0]);
    }

    #[test]
    fn rho_infinity_for_the_default_coefficient() {
        let rho_inf = 2.0 / (1.0 - B2) - 1.0;
        assert!((rho_inf - 1999.0).abs() < 1e-9);
    }

    #[test]
    fn rectifier_approaches_one_in_the_long_run() {
        let r = radam_rectifier(10_000, B2).expect("long-run steps are rectified");
        assert!((r - 1.0).abs() < 0.01, "rectifier {r}");
        // and it is monotone enough to stay near 1 beyond that
        let r2 = radam_rectifier(100_000, B2).unwrap();
        assert!((r2 - 1.0).abs() < (r - 1.0).abs() + 1e-12);
    }

    #[test]
    fn sgd_is_the_plain_update() {
        let mut params = vec![1.0, 2.0];
        sgd_step(&mut params, &[0.5, -1.0], 0.1);
        assert_eq!(params, vec![0.95, 2.1]);
    }

    #[test]
    fn optimizer_state_mirrors_parameter_length() {
        let opt = Optimizer::new(OptimizerKind::Adam, 17, B1, B2, EPS).unwrap();
        assert_eq!(opt.state.m.len(), 17);
        assert_eq!(opt.state.v.len(), 17);
        assert_eq!(opt.state.step, 0);
    }

    #[test]
    fn bad_coefficients_are_usage_errors() {
        assert!(Optimizer::new(OptimizerKind::Adam, 1, 1.0, B2, EPS).is_err());
        assert!(Optimizer::new(OptimizerKind::Adam, 1, B1, -0.1, EPS).is_err());
        assert!(Optimizer::new(OptimizerKind::Adam, 1, B1, B2, 0.0).is_err());
    }
}
