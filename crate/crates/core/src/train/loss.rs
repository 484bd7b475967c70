//! Training losses, each returning the loss value and its gradient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which loss a run trains with (the quantile level rides separately in the
/// run configuration).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    #[default]
    Mse,
    Quantile,
}

/// A fully-specified loss function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Loss {
    Mse,
    /// Pinball loss at level `r`: under-prediction costs `r`, over-prediction
    /// costs `1−r`.
    Quantile(f64),
}

impl Loss {
    pub fn validate(&self) -> Result<()> {
        if let Loss::Quantile(r) = self {
            if !(0.0..=1.0).contains(r) {
                return Err(Error::usage(format!("quantile level {r} must lie in [0, 1]")));
            }
        }
        Ok(())
    }

    /// Loss value and gradient with respect to the predictions.
    pub fn evaluate(&self, pred: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.validate()?;
        match self {
            Loss::Mse => Ok(mse_loss(pred, target)),
            Loss::Quantile(r) => Ok(quantile_loss(pred, target, *r)),
        }
    }
}

/// Mean squared error over the horizon: `(1/H)·Σ(ŷ_k − y_k)²`, gradient
/// `2(ŷ_k − y_k)/H`.
pub fn mse_loss(pred: &[f64], target: &[f64]) -> (f64, Vec<f64>) {
    assert_eq!(pred.len(), target.len(), "prediction/target length mismatch");
    let h = pred.len() as f64;
    let mut loss = 0.0;
    let grad = pred
        .iter()
        .zip(target)
        .map(|(&p, &t)| {
            let d = p - t;
            loss += d * d;
            2.0 * d / h
        })
        .collect();
    (loss / h, grad)
}

/// Pinball loss at level `r`, averaged over the horizon.
///
/// Per element: `r·(y−ŷ)` when under-predicting, `(1−r)·(ŷ−y)` when
/// over-predicting. The gradient is `−r/H`, `(1−r)/H`, or `0` at equality.
pub fn quantile_loss(pred: &[f64], target: &[f64], r: f64) -> (f64, Vec<f64>) {
    assert_eq!(pred.len(), target.len(), "prediction/target length mismatch");
    let h = pred.len() as f64;
    let mut loss = 0.0;
    let grad = pred
        .iter()
        .zip(target)
        .map(|(&p, &t)| {
            if p < t {
                loss += r * (t - p);
                -r / h
            } else if p > t {
                loss += (1.0 - r) * (p - t);
                (1.0 - r) / h
            } else {
                0.0
            }
        })
        .collect();
    (loss / h, grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nnkernel::{finite_diff_grad, max_relative_error};
    use crate::rng::Rng;

    #[test]
    fn perfect_prediction_has_zero_mse() {
        let (loss, grad) = mse_loss(&[1.0, -2.0, 0.5], &[1.0, -2.0, 0.5]);
        assert_eq!(loss, 0.0);
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn mse_hand_example() {
        let (loss, grad) = mse_loss(&[1.0, 2.0], &[1.0, 4.0]);
        assert_eq!(loss, 2.0);
        assert_eq!(grad, vec![0.0, -2.0]);
    }

    #[test]
    fn median_pinball_is_half_the_absolute_error() {
        let pred = [0.0, 3.0, -1.0];
        let target = [2.0, 1.0, -1.0];
        let (loss, _) = quantile_loss(&pred, &target, 0.5);
        let mean_abs: f64 = pred
            .iter()
            .zip(&target)
            .map(|(p, t)| (p - t).abs())
            .sum::<f64>()
            / 3.0;
        assert!((loss - 0.5 * mean_abs).abs() < 1e-15);
    }

    #[test]
    fn pinball_asymmetry_hand_examples() {
        // one element, r = 0.8: under-predicting by 1 costs 0.8 ...
        let (under, grad_under) = quantile_loss(&[0.0], &[1.0], 0.8);
        assert!((under - 0.8).abs() < 1e-15);
        assert_eq!(grad_under, vec![-0.8]);
        // ... over-predicting by 1 costs 0.2
        let (over, grad_over) = quantile_loss(&[1.0], &[0.0], 0.8);
        assert!((over - 0.2).abs() < 1e-15);
        assert!((grad_over[0] - 0.2).abs() < 1e-15);
        // equality is flat
        let (eq, grad_eq) = quantile_loss(&[1.0], &[1.0], 0.8);
        assert_eq!(eq, 0.0);
        assert_eq!(grad_eq, vec![0.0]);
    }

    #[test]
    fn gradients_match_finite_differences_at_random_points() {
        let mut rng = Rng::new(7);
        for trial in 0..100 {
            let h = 1 + (trial % 4);
            let target: Vec<f64> = (0..h).map(|_| rng.next_normal()).collect();
            // keep a margin from the pinball kink
            let pred: Vec<f64> = target
                .iter()
                .map(|t| {
                    let mut d = rng.next_normal();
                    while d.abs() < 1e-3 {
                        d = rng.next_normal();
                    }
                    t + d
                })
                .collect();
            for loss in [Loss::Mse, Loss::Quantile(0.8), Loss::Quantile(0.3)] {
                let (_, analytic) = loss.evaluate(&pred, &target).unwrap();
                let numeric = finite_diff_grad(
                    |p| loss.evaluate(p, &target).unwrap().0,
                    &pred,
                    1e-6,
                );
                let err = max_relative_error(&analytic, &numeric);
                assert!(err < 1e-4, "{loss:?}: max relative error {err}");
            }
        }
    }

    #[test]
    fn quantile_level_outside_the_unit_interval_is_a_usage_error() {
        assert!(Loss::Quantile(1.5).evaluate(&[0.0], &[0.0]).is_err());
        assert!(Loss::Quantile(-0.1).validate().is_err());
        assert!(Loss::Quantile(0.0).validate().is_ok());
        assert!(Loss::Quantile(1.0).validate().is_ok());
    }
}
