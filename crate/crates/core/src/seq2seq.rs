//! Encoder–decoder autoencoders producing `H` forecast scalars.
//!
//! Two decoder styles share this type:
//!
//! - **S2S-2** (the workhorse): every horizon step has its own LSTM cell.
//!   Step `k` reads `[context ; ŷ_{k−1}]` — the encoder's final hidden state
//!   concatenated with the previous step's forecast (`ŷ_0 = 0`), and the
//!   head's row `k` turns the step's hidden state into `ŷ_k` inline so it
//!   can feed step `k+1`.
//! - **S2S-1** (the original): one shared decoder cell applied `H` times,
//!   input = context only (no feedback), with a tanh bridge layer between
//!   encoder and decoder and the decoder state initialized from the
//!   encoder's final state.
//!
//! The backward pass is hand-derived and covers the feedback path, the
//! context fan-out into every decoder step, and the encoder-state path when
//! the decoder starts from the encoder's final state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, Mat};
use crate::nnkernel::{
    dense_backward, dense_forward, lstm_backward_masked, lstm_forward_masked, lstm_step_masked,
    Activation, DenseGrads, DenseParams, LstmGrads, LstmParams, LstmState, StepCache,
};
use crate::tensors::{self, TensorList, TensorListMut, TensorSpec};

/// Decoder style.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeqVariant {
    S2s1,
    S2s2,
}

/// Weights of one encoder–decoder autoencoder.
#[derive(Debug, Clone)]
pub struct Seq2SeqParams {
    pub variant: SeqVariant,
    /// Whether the decoder's first step starts from the encoder's final
    /// (h, c) instead of zeros.
    pub feed_encoder_state: bool,
    pub encoder: LstmParams,
    /// S2S-2: one cell per horizon step. S2S-1: a single shared cell.
    pub decoders: Vec<LstmParams>,
    /// `H×h` head; row `k` maps step `k`'s hidden state to the scalar ŷ_k.
    pub head: DenseParams,
    /// S2S-1 only: `h×h` dense layer (tanh) between encoder and decoder.
    pub bridge: Option<DenseParams>,
}

impl Seq2SeqParams {
    /// Zero-weight S2S-2: per-step decoder cells with forecast feedback.
    pub fn new_s2s2(
        input_dim: usize,
        hidden_dim: usize,
        horizon: usize,
        enc_activation: Activation,
        dec_activation: Activation,
        feed_encoder_state: bool,
        head_bias: bool,
    ) -> Self {
        Seq2SeqParams {
            variant: SeqVariant::S2s2,
            feed_encoder_state,
            encoder: LstmParams::zeros(input_dim, hidden_dim, enc_activation),
            decoders: (0..horizon)
                .map(|_| LstmParams::zeros(hidden_dim + 1, hidden_dim, dec_activation))
                .collect(),
            head: DenseParams::zeros(horizon, hidden_dim, head_bias),
            bridge: None,
        }
    }

    /// Zero-weight S2S-1: shared decoder cell, tanh bridge, state handoff.
    pub fn new_s2s1(input_dim: usize, hidden_dim: usize, horizon: usize, head_bias: bool) -> Self {
        Seq2SeqParams {
            variant: SeqVariant::S2s1,
            feed_encoder_state: true,
            encoder: LstmParams::zeros(input_dim, hidden_dim, Activation::Tanh),
            decoders: vec![LstmParams::zeros(hidden_dim, hidden_dim, Activation::Tanh)],
            head: DenseParams::zeros(horizon, hidden_dim, head_bias),
            bridge: Some(DenseParams::zeros(hidden_dim, hidden_dim, true)),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.encoder.input_dim()
    }

    pub fn hidden_dim(&self) -> usize {
        self.encoder.hidden_dim()
    }

    pub fn horizon(&self) -> usize {
        self.head.out_dim()
    }

    /// Checks the structural invariants (decoder count and input dims).
    pub fn validate(&self) -> Result<()> {
        let h = self.hidden_dim();
        let expected_cells = match self.variant {
            SeqVariant::S2s2 => self.horizon(),
            SeqVariant::S2s1 => 1,
        };
        if self.decoders.len() != expected_cells {
            return Err(Error::data(format!(
                "expected {expected_cells} decoder cells, found {}",
                self.decoders.len()
            )));
        }
        let dec_in = match self.variant {
            SeqVariant::S2s2 => h + 1,
            SeqVariant::S2s1 => h,
        };
        for (k, cell) in self.decoders.iter().enumerate() {
            if cell.input_dim() != dec_in || cell.hidden_dim() != h {
                return Err(Error::data(format!(
                    "decoder cell {k} has shape {}×{}, expected {dec_in}×{h}",
                    cell.input_dim(),
                    cell.hidden_dim()
                )));
            }
        }
        if self.head.in_dim() != h || self.horizon() == 0 {
            return Err(Error::data("head shape inconsistent with hidden dim"));
        }
        if let Some(bridge) = &self.bridge {
            if self.variant == SeqVariant::S2s2 {
                return Err(Error::data("bridge layer is S2S-1 only"));
            }
            if bridge.in_dim() != h || bridge.out_dim() != h {
                return Err(Error::data("bridge must map hidden→hidden"));
            }
        }
        Ok(())
    }

    fn decoder_cell(&self, step: usize) -> &LstmParams {
        match self.variant {
            SeqVariant::S2s2 => &self.decoders[step],
            SeqVariant::S2s1 => &self.decoders[0],
        }
    }

    /// Exact scalar parameter count across all tensors.
    pub fn count_parameters(&self) -> usize {
        self.encoder.n_params()
            + self.decoders.iter().map(LstmParams::n_params).sum::<usize>()
            + self.head.n_params()
            + self.bridge.as_ref().map_or(0, DenseParams::n_params)
    }

    /// Canonical tensor enumeration under `prefix` (encoder, bridge,
    /// decoder steps, head).
    pub fn tensors(&self, prefix: &str) -> TensorList<'_> {
        let mut list = tensors::lstm_tensors(&format!("{prefix}enc"), &self.encoder);
        if let Some(bridge) = &self.bridge {
            list.extend(tensors::dense_tensors(&format!("{prefix}bridge"), bridge));
        }
        for (k, cell) in self.decoders.iter().enumerate() {
            list.extend(tensors::lstm_tensors(&format!("{prefix}dec{k}"), cell));
        }
        list.extend(tensors::dense_tensors(&format!("{prefix}head"), &self.head));
        list
    }

    /// Mutable twin of [`Seq2SeqParams::tensors`] (same order).
    pub fn tensors_mut(&mut self, prefix: &str) -> TensorListMut<'_> {
        let mut list = tensors::lstm_tensors_mut(&format!("{prefix}enc"), &mut self.encoder);
        if let Some(bridge) = &mut self.bridge {
            list.extend(tensors::dense_tensors_mut(&format!("{prefix}bridge"), bridge));
        }
        for (k, cell) in self.decoders.iter_mut().enumerate() {
            list.extend(tensors::lstm_tensors_mut(&format!("{prefix}dec{k}"), cell));
        }
        list.extend(tensors::dense_tensors_mut(&format!("{prefix}head"), &mut self.head));
        list
    }

    pub fn tensor_specs(&self, prefix: &str) -> Vec<TensorSpec> {
        tensors::specs(&self.tensors(prefix))
    }
}

/// Gradients mirroring [`Seq2SeqParams`].
#[derive(Debug, Clone)]
pub struct Seq2SeqGrads {
    pub encoder: LstmGrads,
    /// One entry per decoder cell (H for S2S-2, 1 shared for S2S-1).
    pub decoders: Vec<LstmGrads>,
    pub head: DenseGrads,
    pub bridge: Option<DenseGrads>,
}

impl Seq2SeqGrads {
    pub fn zeros_like(params: &Seq2SeqParams) -> Self {
        Seq2SeqGrads {
            encoder: LstmGrads::zeros_like(&params.encoder),
            decoders: params.decoders.iter().map(LstmGrads::zeros_like).collect(),
            head: DenseGrads::zeros_like(&params.head),
            bridge: params.bridge.as_ref().map(DenseGrads::zeros_like),
        }
    }

    /// Gradient tensors in the same canonical order as the parameters.
    pub fn tensors(&self, prefix: &str) -> TensorList<'_> {
        let mut list = tensors::lstm_grad_tensors(&format!("{prefix}enc"), &self.encoder);
        if let Some(bridge) = &self.bridge {
            list.extend(tensors::dense_grad_tensors(&format!("{prefix}bridge"), bridge));
        }
        for (k, cell) in self.decoders.iter().enumerate() {
            list.extend(tensors::lstm_grad_tensors(&format!("{prefix}dec{k}"), cell));
        }
        list.extend(tensors::dense_grad_tensors(&format!("{prefix}head"), &self.head));
        list
    }
}

/// Everything the backward pass needs from one forward pass.
#[derive(Debug, Clone)]
pub struct SeqTrace {
    enc_caches: Vec<StepCache>,
    /// Encoder final state as emitted (hidden already masked if masking ran).
    enc_final: LstmState,
    /// Post-bridge context fed to every decoder step.
    context: Vec<f64>,
    dec_caches: Vec<StepCache>,
    /// Masked decoder hidden state per step (head inputs).
    dec_hiddens: Vec<Vec<f64>>,
    pub forecasts: Vec<f64>,
    /// The dropout mask used for every cell in this pass, if any.
    mask: Option<Vec<f64>>,
}

/// Runs the encoder over the input rows.
///
/// Returns the decoder context (final hidden state, after the S2S-1 bridge
/// when present), the raw final state, and the per-step caches.
pub fn encode(
    params: &Seq2SeqParams,
    input: &Mat,
    mask: Option<&[f64]>,
) -> (Vec<f64>, LstmState, Vec<StepCache>) {
    assert_eq!(input.cols(), params.input_dim(), "encoder input width mismatch");
    assert!(input.rows() > 0, "encoder needs at least one row");
    let xs: Vec<Vec<f64>> = (0..input.rows()).map(|r| input.row(r).to_vec()).collect();
    let init = LstmState::zeros(params.hidden_dim());
    let (states, caches) = lstm_forward_masked(&params.encoder, &xs, &init, mask);
    let final_state = states.last().expect("nonempty sequence").clone();
    let context = match &params.bridge {
        Some(bridge) => dense_forward(bridge, &final_state.h)
            .into_iter()
            .map(f64::tanh)
            .collect(),
        None => final_state.h.clone(),
    };
    (context, final_state, caches)
}

/// Runs the decoder for `H` steps from the given context and encoder state.
pub fn decode(
    params: &Seq2SeqParams,
    context: &[f64],
    enc_final: &LstmState,
    mask: Option<&[f64]>,
) -> (Vec<Vec<f64>>, Vec<f64>, Vec<StepCache>) {
    let h_dim = params.hidden_dim();
    assert_eq!(context.len(), h_dim, "context width mismatch");
    let horizon = params.horizon();
    let mut state = if params.feed_encoder_state {
        enc_final.clone()
    } else {
        LstmState::zeros(h_dim)
    };
    let mut prev_forecast = 0.0;
    let mut hiddens = Vec::with_capacity(horizon);
    let mut forecasts = Vec::with_capacity(horizon);
    let mut caches = Vec::with_capacity(horizon);
    for k in 0..horizon {
        let x = match params.variant {
            SeqVariant::S2s2 => {
                let mut x = context.to_vec();
                x.push(prev_forecast);
                x
            }
            SeqVariant::S2s1 => context.to_vec(),
        };
        let (next, cache) = lstm_step_masked(params.decoder_cell(k), &x, &state, mask);
        let mut y = dot(params.head.w.row(k), &next.h);
        if let Some(b) = &params.head.b {
            y += b[k];
        }
        hiddens.push(next.h.clone());
        forecasts.push(y);
        caches.push(cache);
        state = next;
        prev_forecast = y;
    }
    (hiddens, forecasts, caches)
}

/// Full forward pass: encode, then decode. Deterministic given inputs.
pub fn s2s_forward(
    params: &Seq2SeqParams,
    input: &Mat,
    mask: Option<&[f64]>,
) -> (Vec<f64>, SeqTrace) {
    let (context, enc_final, enc_caches) = encode(params, input, mask);
    let (dec_hiddens, forecasts, dec_caches) = decode(params, &context, &enc_final, mask);
    let trace = SeqTrace {
        enc_caches,
        enc_final,
        context,
        dec_caches,
        dec_hiddens,
        forecasts: forecasts.clone(),
        mask: mask.map(<[f64]>::to_vec),
    };
    (forecasts, trace)
}

/// Exact reverse-mode gradients for one forward pass.
///
/// Covers the three coupling paths: forecast feedback ŷ_{k−1} → step k input,
/// the context fanning out into every decoder step (and back through the
/// bridge when present), and the encoder state handoff when
/// `feed_encoder_state` is set.
pub fn s2s_backward(
    params: &Seq2SeqParams,
    trace: &SeqTrace,
    grad_forecasts: &[f64],
) -> Seq2SeqGrads {
    let h_dim = params.hidden_dim();
    let horizon = params.horizon();
    assert_eq!(grad_forecasts.len(), horizon, "gradient length mismatch");
    assert_eq!(trace.dec_caches.len(), horizon, "trace/params horizon mismatch");
    let mask = trace.mask.as_deref();

    let mut grads = Seq2SeqGrads::zeros_like(params);

    // --- decoder, newest step first ---
    let mut dh_state = vec![0.0; h_dim]; // vs masked h_k, from step k+1's recurrence
    let mut dc_state = vec![0.0; h_dim]; // vs c_k, from step k+1's recurrence
    let mut dy_feedback = 0.0; // vs ŷ_k, from step k+1's input (S2S-2)
    let mut dcontext = vec![0.0; h_dim];
    for k in (0..horizon).rev() {
        let dy = grad_forecasts[k] + dy_feedback;

        // head row k: ŷ_k = w_k · h_k (+ b_k)
        let h_k = &trace.dec_hiddens[k];
        for (w, &h) in grads.head.w.row_mut(k).iter_mut().zip(h_k) {
            *w += dy * h;
        }
        if let Some(b) = grads.head.b.as_mut() {
            b[k] += dy;
        }
        let mut dh: Vec<f64> = dh_state;
        for (d, &w) in dh.iter_mut().zip(params.head.w.row(k)) {
            *d += dy * w;
        }

        let cell = params.decoder_cell(k);
        let (cell_grads, dx, d_prev) = lstm_backward_masked(
            cell,
            std::slice::from_ref(&trace.dec_caches[k]),
            std::slice::from_ref(&dh),
            &dc_state,
            mask,
        );
        match params.variant {
            SeqVariant::S2s2 => grads.decoders[k].accumulate(&cell_grads),
            SeqVariant::S2s1 => grads.decoders[0].accumulate(&cell_grads),
        }

        for j in 0..h_dim {
            dcontext[j] += dx[0][j];
        }
        dy_feedback = match params.variant {
            // ŷ_{k−1} sat in the last input slot; at k=0 that slot held the
            // constant 0, so the value is dropped when the loop ends.
            SeqVariant::S2s2 => dx[0][h_dim],
            SeqVariant::S2s1 => 0.0,
        };
        dh_state = d_prev.h;
        dc_state = d_prev.c;
    }

    // --- decoder init state → encoder final state ---
    let (mut dh_final, dc_final) = if params.feed_encoder_state {
        (dh_state, dc_state)
    } else {
        (vec![0.0; h_dim], vec![0.0; h_dim])
    };

    // --- context path, through the bridge when present ---
    match (&params.bridge, grads.bridge.as_mut()) {
        (Some(bridge), Some(bridge_grads)) => {
            // context = tanh(W h_T + b)
            let dpre: Vec<f64> = dcontext
                .iter()
                .zip(&trace.context)
                .map(|(&d, &ctx)| d * (1.0 - ctx * ctx))
                .collect();
            let (bg, dh_bridge) = dense_backward(bridge, &trace.enc_final.h, &dpre);
            bridge_grads.w.add_assign(&bg.w);
            if let (Some(acc), Some(src)) = (bridge_grads.b.as_mut(), bg.b.as_ref()) {
                for (a, &s) in acc.iter_mut().zip(src) {
                    *a += s;
                }
            }
            for j in 0..h_dim {
                dh_final[j] += dh_bridge[j];
            }
        }
        _ => {
            for j in 0..h_dim {
                dh_final[j] += dcontext[j];
            }
        }
    }

    // --- encoder ---
    let t = trace.enc_caches.len();
    let mut grad_h = vec![vec![0.0; h_dim]; t];
    grad_h[t - 1] = dh_final;
    let (enc_grads, _, _) =
        lstm_backward_masked(&params.encoder, &trace.enc_caches, &grad_h, &dc_final, mask);
    grads.encoder = enc_grads;

    grads
}
