//! Whole-model gradient verification.
//!
//! Treats a model as a black-box loss `L(θ)` over its flat parameter
//! vector, compares the analytic backward pass against central finite
//! differences, and reports the worst relative error per named tensor.
//! Small hidden sizes keep the sweep under a second, so the same routine
//! backs both the test suite and the `gradcheck` CLI command.

use crate::dataio::{fit_scaler, synth_generate, ScalerStats, SynthConfig};
use crate::error::Result;
use crate::linalg::Mat;
use crate::model::{ForecastModel, ModelMasks, ModelVariant};
use crate::nnkernel::finite_diff_grad;
use crate::rng::Rng;
use crate::ssae::{ComboMode, SsaeHyper};
use crate::tensors::{read_flat, write_flat};
use crate::train::mse_loss;

/// Default relative-error tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-4;
/// Default central-difference step.
pub const DEFAULT_EPS: f64 = 1e-5;

/// Per-coordinate error: `|a − f| / max(|a|, |f|, 1e-6)`.
///
/// The floor turns the measure absolute for coordinates at round-off
/// scale: a central difference of an `f64` loss carries ~1e-12 of
/// cancellation noise, so a pure relative error on a 1e-9 gradient would
/// read ~1e-4 even when the analytic value is exact. Any genuinely
/// missing term of magnitude 1e-10 or more still trips the tolerance.
fn coord_error(a: f64, f: f64) -> f64 {
    (a - f).abs() / a.abs().max(f.abs()).max(1e-6)
}

/// Worst relative error observed inside one named tensor, with the two
/// gradient values behind it for diagnosis.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorCheck {
    pub name: String,
    pub max_rel_err: f64,
    pub analytic: f64,
    pub finite_diff: f64,
}

/// Per-tensor comparison of analytic vs finite-difference gradients for
/// one model configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    /// Configuration label, e.g. `ssae/multiplicative`.
    pub label: String,
    pub tolerance: f64,
    pub checks: Vec<TensorCheck>,
}

impl GradCheckReport {
    /// Tensors whose error exceeds the tolerance.
    // Negated comparison so a NaN error counts as an offender.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn offenders(&self) -> Vec<&TensorCheck> {
        self.checks
            .iter()
            .filter(|c| !(c.max_rel_err < self.tolerance))
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.offenders().is_empty()
    }

    /// Largest error across all tensors.
    pub fn worst(&self) -> f64 {
        self.checks.iter().map(|c| c.max_rel_err).fold(0.0, f64::max)
    }
}

/// Compares the analytic gradient of the squared-error loss on one
/// `(input, target)` pair against central finite differences, tensor by
/// tensor. The model's current weights are the evaluation point and are
/// restored before returning.
pub fn check_model(
    model: &mut ForecastModel,
    label: &str,
    input: &Mat,
    target: &[f64],
    eps: f64,
    tolerance: f64,
) -> Result<GradCheckReport> {
    let mut theta = Vec::with_capacity(model.flat_len());
    write_flat(&model.tensors(), &mut theta);

    // Analytic gradient at θ.
    let (forecasts, trace) = model.forward(input, &ModelMasks::default())?;
    let (_, grad_forecasts) = mse_loss(&forecasts, target);
    let mut analytic = vec![0.0; theta.len()];
    model.backward_into(&trace, &grad_forecasts, &mut analytic);

    // Finite differences around θ, through a scratch copy of the model.
    let mut probe = model.clone();
    let fd = finite_diff_grad(
        |p| {
            let mut pos = 0;
            read_flat(&mut probe.tensors_mut(), p, &mut pos);
            let (f, _) = probe
                .forward(input, &ModelMasks::default())
                .expect("forward must succeed at a perturbed point");
            mse_loss(&f, target).0
        },
        &theta,
        eps,
    );

    let mut checks = Vec::new();
    let mut offset = 0;
    for spec in model.tensor_specs() {
        let n = spec.len();
        let mut check = TensorCheck {
            name: spec.name,
            max_rel_err: 0.0,
            analytic: 0.0,
            finite_diff: 0.0,
        };
        for (&a, &f) in analytic[offset..offset + n].iter().zip(&fd[offset..offset + n]) {
            let e = coord_error(a, f);
            if e > check.max_rel_err {
                check.max_rel_err = e;
                check.analytic = a;
                check.finite_diff = f;
            }
        }
        checks.push(check);
        offset += n;
    }
    debug_assert_eq!(offset, theta.len());

    Ok(GradCheckReport {
        label: label.to_string(),
        tolerance,
        checks,
    })
}

/// Draws uniform weights in (−0.5, 0.5) for every tensor, biases and
/// combination coefficients included, so no gradient path sits at a
/// symmetric dead point.
fn randomize_all(model: &mut ForecastModel, rng: &mut Rng) {
    let theta: Vec<f64> = (0..model.flat_len())
        .map(|_| rng.next_f64() - 0.5)
        .collect();
    let mut pos = 0;
    read_flat(&mut model.tensors_mut(), &theta, &mut pos);
}

fn tiny_scaler(seed: u64) -> Result<ScalerStats> {
    let table = synth_generate(&SynthConfig {
        days: 40,
        period: 10,
        n_features: 3,
        seed,
        noise_scale: 0.5,
    })?;
    fit_scaler(&table)
}

fn random_pair(rng: &mut Rng, rows: usize, cols: usize, horizon: usize) -> (Mat, Vec<f64>) {
    let mut x = Mat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            *x.at_mut(i, j) = rng.next_f64();
        }
    }
    let y = (0..horizon).map(|_| rng.next_f64()).collect();
    (x, y)
}

/// Runs the standard sweep: the dual-branch model under all three
/// combination rules plus both standalone encoder–decoder variants, each
/// on a tiny configuration (4 input columns, hidden width 4, 12-row
/// window, horizon 2) with randomized weights and data.
pub fn standard_sweep(seed: u64, eps: f64, tolerance: f64) -> Result<Vec<GradCheckReport>> {
    let mut rng = Rng::labeled(seed, "gradcheck");
    let scaler = tiny_scaler(seed)?;
    let (lookback, horizon, hidden) = (12, 2, 4);
    let input_dim = scaler.n_columns();
    let mut reports = Vec::new();

    for combine in [
        ComboMode::Multiplicative,
        ComboMode::Additive,
        ComboMode::Linear,
    ] {
        let hyper = SsaeHyper {
            lookback,
            short_window: 3,
            horizon,
            pool_window: 6,
            pool_stride: 3,
            hidden_short: hidden,
            hidden_seasonal: hidden,
            seasonal_features: vec!["u1".into(), "precip".into()],
            combine,
            head_bias: true,
        };
        let mut model = ForecastModel::new_ssae(hyper, scaler.clone())?;
        randomize_all(&mut model, &mut rng);
        let (x, y) = random_pair(&mut rng, lookback, input_dim, horizon);
        let label = format!("ssae/{combine:?}").to_lowercase();
        reports.push(check_model(&mut model, &label, &x, &y, eps, tolerance)?);
    }

    for variant in [ModelVariant::S2s1, ModelVariant::S2s2] {
        let mut model =
            ForecastModel::new_seq(variant, lookback, hidden, horizon, true, scaler.clone())?;
        randomize_all(&mut model, &mut rng);
        let (x, y) = random_pair(&mut rng, lookback, input_dim, horizon);
        reports.push(check_model(
            &mut model,
            variant.as_str(),
            &x,
            &y,
            eps,
            tolerance,
        )?);
    }

    Ok(reports)
}
