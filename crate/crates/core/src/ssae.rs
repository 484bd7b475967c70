//! Dual-branch forecaster: a short-term branch over the most recent rows
//! and a seasonal branch over a pooled long window, combined per step.
//!
//! The short branch `f_S` reads the last `c` scaled rows with every input
//! column and uses a ReLU decoder, so its output `g_S` can be exactly zero —
//! a natural fit for day-scale rain/no-rain structure. The seasonal branch
//! `f_L` reads only the selected feature columns over the whole `T`-row
//! window, average-pooled with window `ℓ` and stride `Δ`, and uses tanh
//! throughout, tracking the slow envelope. The step-`k` forecast combines
//! the branch outputs:
//!
//! - multiplicative (default): `ŷ_k = g_S[k] · g_L[k]`
//! - additive:                 `ŷ_k = g_S[k] + g_L[k]`
//! - linear:                   `ŷ_k = a·g_L[k] + b·g_S[k]`, `a`, `b` trained
//!
//! All model math runs in scaled units; [`predict_mm`] wraps a forward pass
//! with min–max scaling on the way in and target inversion on the way out.

use serde::{Deserialize, Serialize};

use crate::dataio::{average_pool, pooled_len, ScalerStats};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::nnkernel::Activation;
use crate::seq2seq::{s2s_backward, s2s_forward, Seq2SeqGrads, Seq2SeqParams, SeqTrace, SeqVariant};
use crate::tensors::{self, TensorList, TensorListMut, TensorSpec, TensorView, TensorViewMut};

/// How the two branch outputs are merged into the forecast.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ComboMode {
    #[default]
    Multiplicative,
    Additive,
    Linear,
}

/// Architecture hyperparameters for the dual-branch model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsaeHyper {
    /// Full look-back window length `T` in days.
    pub lookback: usize,
    /// Short-branch window length `c` (most recent rows).
    pub short_window: usize,
    /// Forecast horizon `H`.
    pub horizon: usize,
    /// Pooling window `ℓ` for the seasonal branch.
    pub pool_window: usize,
    /// Pooling stride `Δ` for the seasonal branch.
    pub pool_stride: usize,
    /// Short-branch hidden width.
    pub hidden_short: usize,
    /// Seasonal-branch hidden width.
    pub hidden_seasonal: usize,
    /// Input columns the seasonal branch reads (by name).
    pub seasonal_features: Vec<String>,
    /// Branch combination rule.
    pub combine: ComboMode,
    /// Whether the dense heads carry bias terms.
    pub head_bias: bool,
}

impl SsaeHyper {
    /// Checks the internal consistency of the window geometry.
    pub fn validate(&self) -> Result<()> {
        if self.short_window == 0 || self.short_window > self.lookback {
            return Err(Error::usage(format!(
                "short window {} must lie in 1..={}",
                self.short_window, self.lookback
            )));
        }
        if self.pool_window == 0 || self.pool_window > self.lookback {
            return Err(Error::usage(format!(
                "pool window {} must lie in 1..={}",
                self.pool_window, self.lookback
            )));
        }
        if self.pool_stride == 0 {
            return Err(Error::usage("pool stride must be positive"));
        }
        if self.horizon == 0 {
            return Err(Error::usage("horizon must be at least 1"));
        }
        if self.hidden_short == 0 || self.hidden_seasonal == 0 {
            return Err(Error::usage("hidden widths must be positive"));
        }
        if self.seasonal_features.is_empty() {
            return Err(Error::usage("seasonal branch needs at least one feature"));
        }
        Ok(())
    }

    /// Rows the seasonal branch sees after pooling.
    pub fn pooled_rows(&self) -> usize {
        pooled_len(self.lookback, self.pool_window, self.pool_stride)
    }
}

/// The complete dual-branch model: both branches, the combination weights,
/// and the scaler that defines its input space.
#[derive(Debug, Clone)]
pub struct SsaeModel {
    pub hyper: SsaeHyper,
    /// Short-term branch: per-step decoder cells, ReLU decoder, no encoder
    /// state handoff.
    pub short: Seq2SeqParams,
    /// Seasonal branch: tanh throughout, decoder starts from the encoder's
    /// final state.
    pub seasonal: Seq2SeqParams,
    /// `[a, b]` for the linear rule; carried (untrained) in other modes.
    pub combo: Vec<f64>,
    pub scaler: ScalerStats,
    seasonal_idx: Vec<usize>,
}

impl SsaeModel {
    /// Builds a zero-weight model shaped by `hyper` over the scaler's
    /// column space. Weights are filled in by an initializer or a
    /// checkpoint load.
    pub fn new(hyper: SsaeHyper, scaler: ScalerStats) -> Result<Self> {
        hyper.validate()?;
        let seasonal_idx = resolve_columns(&hyper.seasonal_features, scaler.names())?;
        let short = Seq2SeqParams::new_s2s2(
            scaler.n_columns(),
            hyper.hidden_short,
            hyper.horizon,
            Activation::Tanh,
            Activation::Relu,
            false,
            hyper.head_bias,
        );
        let seasonal = Seq2SeqParams::new_s2s2(
            seasonal_idx.len(),
            hyper.hidden_seasonal,
            hyper.horizon,
            Activation::Tanh,
            Activation::Tanh,
            true,
            hyper.head_bias,
        );
        Ok(SsaeModel {
            hyper,
            short,
            seasonal,
            combo: vec![1.0, 1.0],
            scaler,
            seasonal_idx,
        })
    }

    /// Column indices (into the input space) the seasonal branch reads.
    pub fn seasonal_indices(&self) -> &[usize] {
        &self.seasonal_idx
    }

    /// Number of input columns a forward window must carry.
    pub fn input_dim(&self) -> usize {
        self.scaler.n_columns()
    }

    pub fn horizon(&self) -> usize {
        self.hyper.horizon
    }

    pub fn lookback(&self) -> usize {
        self.hyper.lookback
    }

    /// Structural invariants tying the branches to the hyperparameters.
    pub fn validate(&self) -> Result<()> {
        self.hyper.validate()?;
        self.short.validate()?;
        self.seasonal.validate()?;
        if self.short.variant != SeqVariant::S2s2 || self.seasonal.variant != SeqVariant::S2s2 {
            return Err(Error::data("both branches must use per-step decoders"));
        }
        if self.short.feed_encoder_state || !self.seasonal.feed_encoder_state {
            return Err(Error::data(
                "state handoff must be off for the short branch and on for the seasonal branch",
            ));
        }
        if self.short.input_dim() != self.scaler.n_columns() {
            return Err(Error::data("short branch width disagrees with the scaler"));
        }
        if self.seasonal.input_dim() != self.seasonal_idx.len() {
            return Err(Error::data("seasonal branch width disagrees with the feature list"));
        }
        if self.short.horizon() != self.hyper.horizon || self.seasonal.horizon() != self.hyper.horizon
        {
            return Err(Error::data("branch horizons disagree with the hyperparameters"));
        }
        if self.combo.len() != 2 {
            return Err(Error::data("combination weights must be a pair"));
        }
        Ok(())
    }

    /// The short branch's input: the last `c` rows, every column.
    pub fn short_input(&self, x: &Mat) -> Mat {
        let c = self.hyper.short_window;
        let first = x.rows() - c;
        Mat::from_fn(c, x.cols(), |r, col| x.at(first + r, col))
    }

    /// The seasonal branch's input: selected columns over the whole window,
    /// average-pooled.
    pub fn seasonal_input(&self, x: &Mat) -> Result<Mat> {
        let selected = Mat::from_fn(x.rows(), self.seasonal_idx.len(), |r, j| {
            x.at(r, self.seasonal_idx[j])
        });
        average_pool(&selected, self.hyper.pool_window, self.hyper.pool_stride)
    }

    /// Exact scalar parameter count (`+2` for the linear rule's `a`, `b`).
    pub fn count_parameters(&self) -> usize {
        let combo = match self.hyper.combine {
            ComboMode::Linear => 2,
            _ => 0,
        };
        self.short.count_parameters() + self.seasonal.count_parameters() + combo
    }

    /// Canonical tensor enumeration: short branch, seasonal branch, then
    /// the combination pair when it is trainable.
    pub fn tensors(&self) -> TensorList<'_> {
        let mut list = self.short.tensors("short.");
        list.extend(self.seasonal.tensors("seasonal."));
        if self.hyper.combine == ComboMode::Linear {
            list.push(("combo".to_string(), TensorView::Vec(&self.combo)));
        }
        list
    }

    /// Mutable twin of [`SsaeModel::tensors`] (same order).
    pub fn tensors_mut(&mut self) -> TensorListMut<'_> {
        let mut list = self.short.tensors_mut("short.");
        list.extend(self.seasonal.tensors_mut("seasonal."));
        if self.hyper.combine == ComboMode::Linear {
            list.push(("combo".to_string(), TensorViewMut::Vec(&mut self.combo)));
        }
        list
    }

    pub fn tensor_specs(&self) -> Vec<TensorSpec> {
        tensors::specs(&self.tensors())
    }
}

fn resolve_columns(wanted: &[String], available: &[String]) -> Result<Vec<usize>> {
    wanted
        .iter()
        .map(|name| {
            available
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::data(format!("unknown seasonal feature \"{name}\"")))
        })
        .collect()
}

/// Everything the backward pass needs from one dual-branch forward pass.
#[derive(Debug, Clone)]
pub struct SsaeTrace {
    short: SeqTrace,
    seasonal: SeqTrace,
}

impl SsaeTrace {
    /// Short-branch outputs `g_S` (scaled units).
    pub fn g_short(&self) -> &[f64] {
        &self.short.forecasts
    }

    /// Seasonal-branch outputs `g_L` (scaled units).
    pub fn g_seasonal(&self) -> &[f64] {
        &self.seasonal.forecasts
    }
}

/// Gradients mirroring [`SsaeModel`]'s trainable tensors.
#[derive(Debug, Clone)]
pub struct SsaeGrads {
    pub short: Seq2SeqGrads,
    pub seasonal: Seq2SeqGrads,
    /// `[∂L/∂a, ∂L/∂b]`; zero outside linear mode.
    pub combo: Vec<f64>,
}

impl SsaeGrads {
    pub fn zeros_like(model: &SsaeModel) -> Self {
        SsaeGrads {
            short: Seq2SeqGrads::zeros_like(&model.short),
            seasonal: Seq2SeqGrads::zeros_like(&model.seasonal),
            combo: vec![0.0, 0.0],
        }
    }

    /// Gradient tensors in the same canonical order as the parameters.
    pub fn tensors(&self, combine: ComboMode) -> TensorList<'_> {
        let mut list = self.short.tensors("short.");
        list.extend(self.seasonal.tensors("seasonal."));
        if combine == ComboMode::Linear {
            list.push(("combo".to_string(), TensorView::Vec(&self.combo)));
        }
        list
    }
}

/// Per-branch dropout masks for one forward/backward pass.
#[derive(Debug, Clone, Default)]
pub struct SsaeMasks {
    pub short: Option<Vec<f64>>,
    pub seasonal: Option<Vec<f64>>,
}

/// Full forward pass over one scaled `T×m` window.
///
/// Returns the combined forecasts (scaled units) and the trace holding both
/// branch outputs and everything the backward pass needs.
pub fn ssae_forward(model: &SsaeModel, x: &Mat, masks: &SsaeMasks) -> Result<(Vec<f64>, SsaeTrace)> {
    if x.rows() != model.hyper.lookback || x.cols() != model.input_dim() {
        return Err(Error::data(format!(
            "window is {}×{}, model expects {}×{}",
            x.rows(),
            x.cols(),
            model.hyper.lookback,
            model.input_dim()
        )));
    }
    let short_in = model.short_input(x);
    let seasonal_in = model.seasonal_input(x)?;
    let (g_short, short_trace) = s2s_forward(&model.short, &short_in, masks.short.as_deref());
    let (g_seasonal, seasonal_trace) =
        s2s_forward(&model.seasonal, &seasonal_in, masks.seasonal.as_deref());
    let (a, b) = (model.combo[0], model.combo[1]);
    let forecasts = g_short
        .iter()
        .zip(&g_seasonal)
        .map(|(&s, &l)| match model.hyper.combine {
            ComboMode::Multiplicative => s * l,
            ComboMode::Additive => s + l,
            ComboMode::Linear => a * l + b * s,
        })
        .collect();
    Ok((
        forecasts,
        SsaeTrace {
            short: short_trace,
            seasonal: seasonal_trace,
        },
    ))
}

/// Exact reverse-mode gradients for one forward pass.
///
/// The combination rule splits `∂L/∂ŷ` into per-branch output gradients —
/// the product rule for the multiplicative form, pass-through for the
/// additive form, and the `a`/`b` weights (plus their own gradients) for
/// the linear form — then each branch runs its own backward pass.
pub fn ssae_backward(model: &SsaeModel, trace: &SsaeTrace, grad_forecasts: &[f64]) -> SsaeGrads {
    let h = model.hyper.horizon;
    assert_eq!(grad_forecasts.len(), h, "gradient length mismatch");
    let g_s = trace.g_short();
    let g_l = trace.g_seasonal();
    let (a, b) = (model.combo[0], model.combo[1]);

    let mut d_short = vec![0.0; h];
    let mut d_seasonal = vec![0.0; h];
    let mut d_combo = vec![0.0, 0.0];
    for k in 0..h {
        let dy = grad_forecasts[k];
        match model.hyper.combine {
            ComboMode::Multiplicative => {
                d_short[k] = dy * g_l[k];
                d_seasonal[k] = dy * g_s[k];
            }
            ComboMode::Additive => {
                d_short[k] = dy;
                d_seasonal[k] = dy;
            }
            ComboMode::Linear => {
                d_short[k] = dy * b;
                d_seasonal[k] = dy * a;
                d_combo[0] += dy * g_l[k];
                d_combo[1] += dy * g_s[k];
            }
        }
    }

    SsaeGrads {
        short: s2s_backward(&model.short, &trace.short, &d_short),
        seasonal: s2s_backward(&model.seasonal, &trace.seasonal, &d_seasonal),
        combo: d_combo,
    }
}

/// Forecasts in millimeters from a raw (unscaled) window.
///
/// Scales each column with the model's stored min–max stats, runs the
/// forward pass, and maps the scaled forecasts back through the target
/// column's range. Negative outputs are kept unless `clamp_nonneg` is set.
pub fn predict_mm(model: &SsaeModel, raw: &Mat, clamp_nonneg: bool) -> Result<Vec<f64>> {
    let scaled = model.scaler.scale_matrix(raw)?;
    let (forecasts, _) = ssae_forward(model, &scaled, &SsaeMasks::default())?;
    Ok(forecasts
        .into_iter()
        .map(|y| {
            let mm = model.scaler.invert_target_value(y);
            if clamp_nonneg {
                mm.max(0.0)
            } else {
                mm
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nnkernel::{finite_diff_grad, max_relative_error};
    use crate::rng::Rng;
    use crate::tensors::{flat_len, read_flat, write_flat};

    fn test_scaler(feature_names: &[&str]) -> ScalerStats {
        let mut names: Vec<String> = feature_names.iter().map(|s| s.to_string()).collect();
        names.push("precip".to_string());
        let n = names.len();
        ScalerStats::new(names, vec![0.0; n], vec![1.0; n]).unwrap()
    }

    fn tiny_hyper(combine: ComboMode) -> SsaeHyper {
        SsaeHyper {
            lookback: 8,
            short_window: 3,
            horizon: 2,
            pool_window: 4,
            pool_stride: 2,
            hidden_short: 3,
            hidden_seasonal: 2,
            seasonal_features: vec!["u2".to_string(), "precip".to_string()],
            combine,
            head_bias: true,
        }
    }

    fn tiny_model(combine: ComboMode, seed: u64) -> SsaeModel {
        let mut model = SsaeModel::new(tiny_hyper(combine), test_scaler(&["u1", "u2"])).unwrap();
        randomize(&mut model, seed, 0.4);
        model
    }

    fn randomize(model: &mut SsaeModel, seed: u64, scale: f64) {
        let mut rng = Rng::new(seed);
        let n = flat_len(&model.tensors());
        let flat: Vec<f64> = (0..n).map(|_| scale * rng.next_normal()).collect();
        let mut pos = 0;
        read_flat(&mut model.tensors_mut(), &flat, &mut pos);
        assert_eq!(pos, n);
    }

    fn random_window(model: &SsaeModel, seed: u64) -> Mat {
        let mut rng = Rng::new(seed);
        Mat::from_fn(model.lookback(), model.input_dim(), |_, _| rng.next_f64())
    }

    fn pack(model: &SsaeModel) -> Vec<f64> {
        let mut out = Vec::new();
        write_flat(&model.tensors(), &mut out);
        out
    }

    fn unpack(template: &SsaeModel, flat: &[f64]) -> SsaeModel {
        let mut m = template.clone();
        let mut pos = 0;
        read_flat(&mut m.tensors_mut(), flat, &mut pos);
        assert_eq!(pos, flat.len());
        m
    }

    #[test]
    fn hyper_validation_rejects_broken_geometry() {
        let mut h = tiny_hyper(ComboMode::Multiplicative);
        assert!(h.validate().is_ok());
        h.short_window = 9; // exceeds lookback
        assert!(h.validate().is_err());
        h.short_window = 3;
        h.pool_stride = 0;
        assert!(h.validate().is_err());
        h.pool_stride = 2;
        h.seasonal_features.clear();
        assert!(h.validate().is_err());
    }

    #[test]
    fn unknown_seasonal_feature_is_a_data_error() {
        let mut hyper = tiny_hyper(ComboMode::Multiplicative);
        hyper.seasonal_features = vec!["nope".to_string()];
        let err = SsaeModel::new(hyper, test_scaler(&["u1", "u2"])).unwrap_err();
        assert!(err.to_string().contains("nope"));
    }

    #[test]
    fn forcing_the_seasonal_head_to_one_reduces_to_the_short_branch() {
        let mut model = tiny_model(ComboMode::Multiplicative, 7);
        // Seasonal head: W = 0, b = 1 → g_L ≡ 1 → ŷ = g_S.
        for v in model.seasonal.head.w.data_mut() {
            *v = 0.0;
        }
        for v in model.seasonal.head.b.as_mut().unwrap() {
            *v = 1.0;
        }
        let x = random_window(&model, 11);
        let (forecasts, trace) = ssae_forward(&model, &x, &SsaeMasks::default()).unwrap();
        assert!(trace.g_seasonal().iter().all(|&v| v == 1.0));

        let short_in = model.short_input(&x);
        let (direct, _) = s2s_forward(&model.short, &short_in, None);
        for (a, b) in forecasts.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_short_branch_nulls_multiplicative_and_passes_additive() {
        let mut mult = tiny_model(ComboMode::Multiplicative, 8);
        // Zero the whole short branch → g_S ≡ 0.
        {
            let n = flat_len(&mult.short.tensors(""));
            let zeros = vec![0.0; n];
            let mut pos = 0;
            read_flat(&mut mult.short.tensors_mut(""), &zeros, &mut pos);
        }
        let x = random_window(&mult, 12);
        let (y_mult, trace) = ssae_forward(&mult, &x, &SsaeMasks::default()).unwrap();
        assert!(trace.g_short().iter().all(|&v| v == 0.0));
        assert!(y_mult.iter().all(|&v| v == 0.0));

        let mut add = mult.clone();
        add.hyper.combine = ComboMode::Additive;
        let (y_add, trace_add) = ssae_forward(&add, &x, &SsaeMasks::default()).unwrap();
        assert_eq!(y_add, trace_add.g_seasonal().to_vec());
    }

    #[test]
    fn seasonal_branch_ignores_unselected_columns() {
        let model = tiny_model(ComboMode::Multiplicative, 9);
        let x = random_window(&model, 13);
        let (_, trace) = ssae_forward(&model, &x, &SsaeMasks::default()).unwrap();

        // u1 (column 0) is not a seasonal feature; perturb it everywhere.
        let mut bumped = x.clone();
        for r in 0..bumped.rows() {
            *bumped.at_mut(r, 0) += 0.37;
        }
        let (_, trace_b) = ssae_forward(&model, &bumped, &SsaeMasks::default()).unwrap();
        assert_eq!(trace.g_seasonal(), trace_b.g_seasonal());
        // ...but the short branch saw the change.
        assert_ne!(trace.g_short(), trace_b.g_short());
    }

    #[test]
    fn short_branch_ignores_rows_before_its_window() {
        let model = tiny_model(ComboMode::Multiplicative, 10);
        let x = random_window(&model, 14);
        let (_, trace) = ssae_forward(&model, &x, &SsaeMasks::default()).unwrap();

        // Perturb the row just before the short window (T−c−1 from the top).
        let row = model.lookback() - model.hyper.short_window - 1;
        let mut bumped = x.clone();
        for c in 0..bumped.cols() {
            *bumped.at_mut(row, c) += 0.29;
        }
        let (_, trace_b) = ssae_forward(&model, &bumped, &SsaeMasks::default()).unwrap();
        assert_eq!(trace.g_short(), trace_b.g_short());
        // The row sits inside a pooling window, so the seasonal side moves.
        assert_ne!(trace.g_seasonal(), trace_b.g_seasonal());
    }

    #[test]
    fn wide_config_pools_to_three_rows_of_two_columns() {
        // T=70, c=2, ℓ=41, Δ=14, two seasonal columns → pooled input 3×2.
        let hyper = SsaeHyper {
            lookback: 70,
            short_window: 2,
            horizon: 1,
            pool_window: 41,
            pool_stride: 14,
            hidden_short: 4,
            hidden_seasonal: 4,
            seasonal_features: vec!["wdir_a".to_string(), "wdir_b".to_string()],
            combine: ComboMode::Multiplicative,
            head_bias: true,
        };
        let model =
            SsaeModel::new(hyper, test_scaler(&["t2m", "wdir_a", "wdir_b", "rh"])).unwrap();
        assert_eq!(model.hyper.pooled_rows(), 3);
        let x = random_window(&model, 15);
        let pooled = model.seasonal_input(&x).unwrap();
        assert_eq!((pooled.rows(), pooled.cols()), (3, 2));
        let (forecasts, _) = ssae_forward(&model, &x, &SsaeMasks::default()).unwrap();
        assert_eq!(forecasts.len(), 1);
    }

    #[test]
    fn wrong_window_shape_is_a_data_error() {
        let model = tiny_model(ComboMode::Multiplicative, 16);
        let bad = Mat::zeros(model.lookback() - 1, model.input_dim());
        assert!(ssae_forward(&model, &bad, &SsaeMasks::default()).is_err());
        let bad_cols = Mat::zeros(model.lookback(), model.input_dim() + 1);
        assert!(ssae_forward(&model, &bad_cols, &SsaeMasks::default()).is_err());
    }

    #[test]
    fn parameter_count_matches_the_tensor_enumeration() {
        for combine in [ComboMode::Multiplicative, ComboMode::Additive, ComboMode::Linear] {
            let model = tiny_model(combine, 17);
            assert_eq!(model.count_parameters(), flat_len(&model.tensors()));
        }
        // Linear mode carries exactly two extra scalars.
        let mult = tiny_model(ComboMode::Multiplicative, 18);
        let lin = tiny_model(ComboMode::Linear, 18);
        assert_eq!(lin.count_parameters(), mult.count_parameters() + 2);
    }

    #[test]
    fn zero_forecast_gradient_means_zero_parameter_gradient() {
        let model = tiny_model(ComboMode::Linear, 19);
        let x = random_window(&model, 20);
        let (_, trace) = ssae_forward(&model, &x, &SsaeMasks::default()).unwrap();
        let grads = ssae_backward(&model, &trace, &[0.0, 0.0]);
        let mut flat = Vec::new();
        write_flat(&grads.tensors(ComboMode::Linear), &mut flat);
        assert!(flat.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_combo_gradient_is_the_other_branch_output() {
        let model = tiny_model(ComboMode::Linear, 21);
        let x = random_window(&model, 22);
        let (_, trace) = ssae_forward(&model, &x, &SsaeMasks::default()).unwrap();
        let grad = vec![1.0, 0.0];
        let grads = ssae_backward(&model, &trace, &grad);
        assert!((grads.combo[0] - trace.g_seasonal()[0]).abs() < 1e-15);
        assert!((grads.combo[1] - trace.g_short()[0]).abs() < 1e-15);
    }

    #[test]
    fn gradients_match_finite_differences_in_all_combo_modes() {
        for (i, combine) in [ComboMode::Multiplicative, ComboMode::Additive, ComboMode::Linear]
            .into_iter()
            .enumerate()
        {
            let model = tiny_model(combine, 23 + i as u64);
            let x = random_window(&model, 30 + i as u64);
            let loss_w = [0.8, -1.1];
            let (_, trace) = ssae_forward(&model, &x, &SsaeMasks::default()).unwrap();
            let grads = ssae_backward(&model, &trace, &loss_w);
            let mut analytic = Vec::new();
            write_flat(&grads.tensors(combine), &mut analytic);

            let flat = pack(&model);
            let numeric = finite_diff_grad(
                |w| {
                    let m = unpack(&model, w);
                    let (forecasts, _) = ssae_forward(&m, &x, &SsaeMasks::default()).unwrap();
                    forecasts.iter().zip(&loss_w).map(|(a, b)| a * b).sum()
                },
                &flat,
                1e-5,
            );
            let err = max_relative_error(&analytic, &numeric);
            assert!(err < 1e-4, "{combine:?}: max relative error {err}");
        }
    }

    #[test]
    fn masked_gradients_match_finite_differences() {
        let model = tiny_model(ComboMode::Multiplicative, 40);
        let x = random_window(&model, 41);
        let masks = SsaeMasks {
            short: Some(vec![4.0 / 3.0, 0.0, 4.0 / 3.0]),
            seasonal: Some(vec![0.0, 2.0]),
        };
        let loss_w = [1.0, 0.5];
        let (_, trace) = ssae_forward(&model, &x, &masks).unwrap();
        let grads = ssae_backward(&model, &trace, &loss_w);
        let mut analytic = Vec::new();
        write_flat(&grads.tensors(ComboMode::Multiplicative), &mut analytic);

        let flat = pack(&model);
        let numeric = finite_diff_grad(
            |w| {
                let m = unpack(&model, w);
                let (forecasts, _) = ssae_forward(&m, &x, &masks).unwrap();
                forecasts.iter().zip(&loss_w).map(|(a, b)| a * b).sum()
            },
            &flat,
            1e-5,
        );
        let err = max_relative_error(&analytic, &numeric);
        assert!(err < 1e-4, "max relative error {err}");
    }

    #[test]
    fn predict_with_identity_scaler_matches_the_scaled_forward_pass() {
        let model = tiny_model(ComboMode::Multiplicative, 50);
        let x = random_window(&model, 51); // values already in [0,1)
        let mm = predict_mm(&model, &x, false).unwrap();
        let (scaled, _) = ssae_forward(&model, &x, &SsaeMasks::default()).unwrap();
        // mins 0, maxs 1 → scaling and inversion are both the identity.
        for (a, b) in mm.iter().zip(&scaled) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_model_with_zero_target_min_predicts_zero_mm() {
        let scaler = ScalerStats::new(
            vec!["u1".into(), "u2".into(), "precip".into()],
            vec![-1.0, -2.0, 0.0],
            vec![1.0, 2.0, 10.0],
        )
        .unwrap();
        let model = SsaeModel::new(tiny_hyper(ComboMode::Multiplicative), scaler).unwrap();
        let raw = Mat::from_fn(8, 3, |r, c| (r + c) as f64 * 0.3);
        let mm = predict_mm(&model, &raw, false).unwrap();
        assert!(mm.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn clamp_flag_floors_negative_millimeters_at_zero() {
        let scaler = ScalerStats::new(
            vec!["u1".into(), "u2".into(), "precip".into()],
            vec![0.0, 0.0, 0.0],
            vec![1.0, 1.0, 10.0],
        )
        .unwrap();
        let mut model = SsaeModel::new(tiny_hyper(ComboMode::Additive), scaler).unwrap();
        // All-zero weights except head biases → ŷ = −0.1 + −0.1 = −0.2
        // scaled → −2.0 mm through the target range [0, 10].
        for v in model.short.head.b.as_mut().unwrap() {
            *v = -0.1;
        }
        for v in model.seasonal.head.b.as_mut().unwrap() {
            *v = -0.1;
        }
        let raw = Mat::from_fn(8, 3, |_, _| 0.5);
        let open = predict_mm(&model, &raw, false).unwrap();
        assert!((open[0] - -2.0).abs() < 1e-12);
        let clamped = predict_mm(&model, &raw, true).unwrap();
        assert_eq!(clamped[0], 0.0);
    }

    #[test]
    fn column_count_mismatch_in_prediction_is_a_data_error() {
        let model = tiny_model(ComboMode::Multiplicative, 60);
        let raw = Mat::zeros(8, 2);
        let err = predict_mm(&model, &raw, false).unwrap_err();
        assert!(matches!(err, Error::Data(_)));
    }

    #[test]
    fn model_validation_catches_branch_drift() {
        let mut model = tiny_model(ComboMode::Multiplicative, 61);
        assert!(model.validate().is_ok());
        model.short.feed_encoder_state = true;
        assert!(model.validate().is_err());
        model.short.feed_encoder_state = false;
        model.combo.push(3.0);
        assert!(model.validate().is_err());
    }
}
