//! LSTM cell: forward recurrence and hand-derived backpropagation through
//! time.
//!
//! Per time step, with gates f (forget), i (input), o (output) and candidate
//! activation φ ∈ {tanh, ReLU}:
//!
//! ```text
//! f_t = σ(U_f x_t + W_f h_{t−1} + b_f)        i_t, o_t analogous
//! c̃_t = φ(U_c x_t + W_c h_{t−1} + b_c)
//! c_t = f_t ⊙ c_{t−1} + i_t ⊙ c̃_t
//! h_t = o_t ⊙ φ(c_t)
//! ```
//!
//! The `*_masked` variants multiply each step's hidden output by a fixed
//! per-sequence dropout mask (variational dropout); the mask is part of the
//! computation graph, so the backward pass folds it in exactly.

use crate::linalg::Mat;
use crate::nnkernel::activation::{sigmoid, Activation};

/// Gate index order used throughout: forget, input, output, candidate.
pub(crate) const GATES: usize = 4;

/// Weights of one LSTM cell.
#[derive(Debug, Clone)]
pub struct LstmParams {
    /// Input weights per gate, each `h×d`; order f, i, o, c.
    pub u: [Mat; GATES],
    /// Recurrent weights per gate, each `h×h`; order f, i, o, c.
    pub w: [Mat; GATES],
    /// Biases per gate, each length `h`; order f, i, o, c.
    pub b: [Vec<f64>; GATES],
    pub activation: Activation,
}

impl LstmParams {
    /// All-zero cell of the given shape.
    pub fn zeros(input_dim: usize, hidden_dim: usize, activation: Activation) -> Self {
        LstmParams {
            u: std::array::from_fn(|_| Mat::zeros(hidden_dim, input_dim)),
            w: std::array::from_fn(|_| Mat::zeros(hidden_dim, hidden_dim)),
            b: std::array::from_fn(|_| vec![0.0; hidden_dim]),
            activation,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.u[0].cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.u[0].rows()
    }

    /// Total scalar parameters: `4(h·d + h² + h)`.
    pub fn n_params(&self) -> usize {
        let (d, h) = (self.input_dim(), self.hidden_dim());
        GATES * (h * d + h * h + h)
    }
}

/// Hidden and cell state of one LSTM.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden_dim: usize) -> Self {
        LstmState { h: vec![0.0; hidden_dim], c: vec![0.0; hidden_dim] }
    }
}

/// Intermediates of one forward step, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct StepCache {
    pub x: Vec<f64>,
    /// Hidden state fed into this step (mask already applied upstream).
    pub h_prev: Vec<f64>,
    pub c_prev: Vec<f64>,
    /// Gate pre-activations, order f, i, o, c.
    pub pre: [Vec<f64>; GATES],
    pub f: Vec<f64>,
    pub i: Vec<f64>,
    pub o: Vec<f64>,
    pub c_tilde: Vec<f64>,
    pub c: Vec<f64>,
    pub phi_c: Vec<f64>,
}

/// Accumulated gradients for one cell, same shapes as [`LstmParams`].
#[derive(Debug, Clone)]
pub struct LstmGrads {
    pub u: [Mat; GATES],
    pub w: [Mat; GATES],
    pub b: [Vec<f64>; GATES],
}

impl LstmGrads {
    pub fn zeros_like(params: &LstmParams) -> Self {
        let (d, h) = (params.input_dim(), params.hidden_dim());
        LstmGrads {
            u: std::array::from_fn(|_| Mat::zeros(h, d)),
            w: std::array::from_fn(|_| Mat::zeros(h, h)),
            b: std::array::from_fn(|_| vec![0.0; h]),
        }
    }

    /// Elementwise accumulation (shared-decoder gradients sum across steps).
    pub fn accumulate(&mut self, other: &LstmGrads) {
        for g in 0..GATES {
            self.u[g].add_assign(&other.u[g]);
            self.w[g].add_assign(&other.w[g]);
            for (a, &b) in self.b[g].iter_mut().zip(&other.b[g]) {
                *a += b;
            }
        }
    }
}

/// One unmasked step of the recurrence.
pub fn lstm_step(params: &LstmParams, x: &[f64], prev: &LstmState) -> (LstmState, StepCache) {
    lstm_step_masked(params, x, prev, None)
}

/// One step with an optional dropout mask on the hidden output.
pub fn lstm_step_masked(
    params: &LstmParams,
    x: &[f64],
    prev: &LstmState,
    mask: Option<&[f64]>,
) -> (LstmState, StepCache) {
    let h_dim = params.hidden_dim();
    assert_eq!(x.len(), params.input_dim(), "input dimension mismatch");
    assert_eq!(prev.h.len(), h_dim, "state dimension mismatch");

    let mut pre: [Vec<f64>; GATES] = std::array::from_fn(|_| vec![0.0; h_dim]);
    for (g, pre_g) in pre.iter_mut().enumerate() {
        pre_g.copy_from_slice(&params.b[g]);
        params.u[g].matvec_add(x, pre_g);
        params.w[g].matvec_add(&prev.h, pre_g);
    }

    let f: Vec<f64> = pre[0].iter().map(|&v| sigmoid(v)).collect();
    let i: Vec<f64> = pre[1].iter().map(|&v| sigmoid(v)).collect();
    let o: Vec<f64> = pre[2].iter().map(|&v| sigmoid(v)).collect();
    let c_tilde: Vec<f64> = pre[3].iter().map(|&v| params.activation.apply(v)).collect();

    let mut c = vec![0.0; h_dim];
    for j in 0..h_dim {
        c[j] = f[j] * prev.c[j] + i[j] * c_tilde[j];
    }
    let phi_c: Vec<f64> = c.iter().map(|&v| params.activation.apply(v)).collect();
    let mut h = vec![0.0; h_dim];
    for j in 0..h_dim {
        h[j] = o[j] * phi_c[j];
        if let Some(m) = mask {
            h[j] *= m[j];
        }
    }

    let cache = StepCache {
        x: x.to_vec(),
        h_prev: prev.h.clone(),
        c_prev: prev.c.clone(),
        pre,
        f,
        i,
        o,
        c_tilde,
        c: c.clone(),
        phi_c,
    };
    (LstmState { h, c }, cache)
}

/// Runs the cell over a whole sequence from `init`, returning every state
/// and cache.
pub fn lstm_forward(
    params: &LstmParams,
    xs: &[Vec<f64>],
    init: &LstmState,
) -> (Vec<LstmState>, Vec<StepCache>) {
    lstm_forward_masked(params, xs, init, None)
}

/// Sequence forward with one fixed mask applied to every step's output.
pub fn lstm_forward_masked(
    params: &LstmParams,
    xs: &[Vec<f64>],
    init: &LstmState,
    mask: Option<&[f64]>,
) -> (Vec<LstmState>, Vec<StepCache>) {
    assert!(!xs.is_empty(), "lstm_forward needs a nonempty sequence");
    let mut states = Vec::with_capacity(xs.len());
    let mut caches = Vec::with_capacity(xs.len());
    let mut state = init.clone();
    for x in xs {
        let (next, cache) = lstm_step_masked(params, x, &state, mask);
        caches.push(cache);
        states.push(next.clone());
        state = next;
    }
    (states, caches)
}

/// Backpropagation through time for an unmasked forward pass.
///
/// `grad_h[t]` is ∂L/∂h_t (as emitted, i.e. after any masking);
/// `grad_final_c` is ∂L/∂c_T. Returns parameter gradients, per-step input
/// gradients, and the gradient with respect to the initial state.
pub fn lstm_backward(
    params: &LstmParams,
    caches: &[StepCache],
    grad_h: &[Vec<f64>],
    grad_final_c: &[f64],
) -> (LstmGrads, Vec<Vec<f64>>, LstmState) {
    lstm_backward_masked(params, caches, grad_h, grad_final_c, None)
}

/// BPTT with the same mask that was used in the forward pass.
pub fn lstm_backward_masked(
    params: &LstmParams,
    caches: &[StepCache],
    grad_h: &[Vec<f64>],
    grad_final_c: &[f64],
    mask: Option<&[f64]>,
) -> (LstmGrads, Vec<Vec<f64>>, LstmState) {
    assert_eq!(caches.len(), grad_h.len(), "one grad_h entry per cached step");
    assert!(!caches.is_empty(), "nothing to backpropagate");
    let h_dim = params.hidden_dim();
    let act = params.activation;

    let mut grads = LstmGrads::zeros_like(params);
    let mut grad_x = vec![vec![0.0; params.input_dim()]; caches.len()];
    // Gradients flowing into step t from step t+1 (or from the loss at t=T−1).
    let mut dh_rec = vec![0.0; h_dim];
    let mut dc_rec = grad_final_c.to_vec();
    assert_eq!(dc_rec.len(), h_dim);

    for (t, cache) in caches.iter().enumerate().rev() {
        // Total gradient on the (masked) hidden output of this step.
        let mut dh: Vec<f64> = grad_h[t].iter().zip(&dh_rec).map(|(a, b)| a + b).collect();
        if let Some(m) = mask {
            for (d, &mj) in dh.iter_mut().zip(m) {
                *d *= mj;
            }
        }

        let mut dpre: [Vec<f64>; GATES] = std::array::from_fn(|_| vec![0.0; h_dim]);
        let mut dc_prev = vec![0.0; h_dim];
        for j in 0..h_dim {
            let d_o = dh[j] * cache.phi_c[j];
            let dc = dh[j] * cache.o[j] * act.deriv_from_output(cache.phi_c[j]) + dc_rec[j];
            let d_f = dc * cache.c_prev[j];
            let d_i = dc * cache.c_tilde[j];
            let d_ct = dc * cache.i[j];
            dpre[0][j] = d_f * cache.f[j] * (1.0 - cache.f[j]);
            dpre[1][j] = d_i * cache.i[j] * (1.0 - cache.i[j]);
            dpre[2][j] = d_o * cache.o[j] * (1.0 - cache.o[j]);
            dpre[3][j] = d_ct * act.deriv_from_output(cache.c_tilde[j]);
            dc_prev[j] = dc * cache.f[j];
        }

        let mut dh_prev = vec![0.0; h_dim];
        for (g, dpre_g) in dpre.iter().enumerate() {
            grads.u[g].add_outer(dpre_g, &cache.x);
            grads.w[g].add_outer(dpre_g, &cache.h_prev);
            for (b, &d) in grads.b[g].iter_mut().zip(dpre_g) {
                *b += d;
            }
            params.u[g].matvec_t_add(dpre_g, &mut grad_x[t]);
            params.w[g].matvec_t_add(dpre_g, &mut dh_prev);
        }

        dh_rec = dh_prev;
        dc_rec = dc_prev;
    }

    (grads, grad_x, LstmState { h: dh_rec, c: dc_rec })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nnkernel::gradcheck::{finite_diff_grad, max_relative_error};
    use crate::rng::Rng;

    fn random_params(d: usize, h: usize, act: Activation, rng: &mut Rng) -> LstmParams {
        let mut p = LstmParams::zeros(d, h, act);
        for g in 0..GATES {
            for v in p.u[g].data_mut() {
                *v = 0.4 * rng.next_normal();
            }
            for v in p.w[g].data_mut() {
                *v = 0.4 * rng.next_normal();
            }
            for v in p.b[g].iter_mut() {
                *v = 0.2 * rng.next_normal();
            }
        }
        p
    }

    fn random_vec(n: usize, rng: &mut Rng) -> Vec<f64> {
        (0..n).map(|_| rng.next_normal()).collect()
    }

    // ---- scalar-loop oracle: an independent transcription of the
    // recurrence using nothing from the library linalg ----
    fn oracle_step(
        p: &LstmParams,
        x: &[f64],
        h_prev: &[f64],
        c_prev: &[f64],
    ) -> (Vec<f64>, Vec<f64>) {
        let h_dim = p.hidden_dim();
        let act = |v: f64| p.activation.apply(v);
        let gate = |g: usize, j: usize| {
            let mut s = p.b[g][j];
            for (k, &xk) in x.iter().enumerate() {
                s += p.u[g].at(j, k) * xk;
            }
            for (k, &hk) in h_prev.iter().enumerate() {
                s += p.w[g].at(j, k) * hk;
            }
            s
        };
        let mut h = vec![0.0; h_dim];
        let mut c = vec![0.0; h_dim];
        for j in 0..h_dim {
            let f = 1.0 / (1.0 + (-gate(0, j)).exp());
            let i = 1.0 / (1.0 + (-gate(1, j)).exp());
            let o = 1.0 / (1.0 + (-gate(2, j)).exp());
            let ct = act(gate(3, j));
            c[j] = f * c_prev[j] + i * ct;
            h[j] = o * act(c[j]);
        }
        (h, c)
    }

    #[test]
    fn zero_everything_gives_half_gates_and_zero_state() {
        let p = LstmParams::zeros(2, 3, Activation::Tanh);
        let (state, cache) = lstm_step(&p, &[0.0, 0.0], &LstmState::zeros(3));
        assert!(cache.f.iter().all(|&v| v == 0.5));
        assert!(cache.i.iter().all(|&v| v == 0.5));
        assert!(cache.o.iter().all(|&v| v == 0.5));
        assert!(cache.c_tilde.iter().all(|&v| v == 0.0));
        assert!(state.c.iter().all(|&v| v == 0.0));
        assert!(state.h.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hand_evaluated_relu_cell() {
        // h=1, d=1, U_c=1, everything else zero, x=1, φ=relu:
        // c̃=1, gates all 0.5, c = 0.5, h = 0.5·φ(0.5) = 0.25.
        let mut p = LstmParams::zeros(1, 1, Activation::Relu);
        *p.u[3].at_mut(0, 0) = 1.0;
        let (state, cache) = lstm_step(&p, &[1.0], &LstmState::zeros(1));
        assert_eq!(cache.c_tilde, vec![1.0]);
        assert_eq!(state.c, vec![0.5]);
        assert_eq!(state.h, vec![0.25]);
    }

    #[test]
    fn step_matches_the_scalar_loop_oracle() {
        for (seed, act) in [(10, Activation::Tanh), (11, Activation::Relu)] {
            let mut rng = Rng::new(seed);
            let p = random_params(4, 5, act, &mut rng);
            let x = random_vec(4, &mut rng);
            let prev = LstmState { h: random_vec(5, &mut rng), c: random_vec(5, &mut rng) };
            let (state, _) = lstm_step(&p, &x, &prev);
            let (h, c) = oracle_step(&p, &x, &prev.h, &prev.c);
            for j in 0..5 {
                assert!((state.h[j] - h[j]).abs() < 1e-14);
                assert!((state.c[j] - c[j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn forward_of_length_one_is_a_single_step() {
        let mut rng = Rng::new(12);
        let p = random_params(3, 4, Activation::Tanh, &mut rng);
        let x = random_vec(3, &mut rng);
        let init = LstmState::zeros(4);
        let (states, caches) = lstm_forward(&p, std::slice::from_ref(&x), &init);
        let (step_state, _) = lstm_step(&p, &x, &init);
        assert_eq!(states.len(), 1);
        assert_eq!(caches.len(), 1);
        assert_eq!(states[0], step_state);
    }

    #[test]
    fn forward_chain_matches_the_oracle() {
        let mut rng = Rng::new(13);
        let p = random_params(3, 4, Activation::Tanh, &mut rng);
        let xs: Vec<Vec<f64>> = (0..6).map(|_| random_vec(3, &mut rng)).collect();
        let (states, _) = lstm_forward(&p, &xs, &LstmState::zeros(4));

        let mut h = vec![0.0; 4];
        let mut c = vec![0.0; 4];
        for x in &xs {
            let (nh, nc) = oracle_step(&p, x, &h, &c);
            h = nh;
            c = nc;
        }
        let last = states.last().unwrap();
        for j in 0..4 {
            assert!((last.h[j] - h[j]).abs() < 1e-14);
            assert!((last.c[j] - c[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn saturated_forget_open_input_closed_conserves_cell_state() {
        let mut p = LstmParams::zeros(2, 3, Activation::Tanh);
        for j in 0..3 {
            p.b[0][j] = 50.0; // forget gate pinned to 1
            p.b[1][j] = -50.0; // input gate pinned to 0
        }
        let prev = LstmState { h: vec![0.0; 3], c: vec![0.3, -1.2, 2.5] };
        let (state, _) = lstm_step(&p, &[0.7, -0.4], &prev);
        for j in 0..3 {
            assert!((state.c[j] - prev.c[j]).abs() < 1e-15);
        }
    }

    // ---- flatten helpers shared by the finite-difference tests ----
    fn pack(p: &LstmParams) -> Vec<f64> {
        let mut out = Vec::new();
        for g in 0..GATES {
            out.extend_from_slice(p.u[g].data());
        }
        for g in 0..GATES {
            out.extend_from_slice(p.w[g].data());
        }
        for g in 0..GATES {
            out.extend_from_slice(&p.b[g]);
        }
        out
    }

    fn unpack(template: &LstmParams, flat: &[f64]) -> LstmParams {
        let mut p = template.clone();
        let mut pos = 0;
        for g in 0..GATES {
            let n = p.u[g].data().len();
            p.u[g].data_mut().copy_from_slice(&flat[pos..pos + n]);
            pos += n;
        }
        for g in 0..GATES {
            let n = p.w[g].data().len();
            p.w[g].data_mut().copy_from_slice(&flat[pos..pos + n]);
            pos += n;
        }
        for g in 0..GATES {
            let n = p.b[g].len();
            p.b[g].copy_from_slice(&flat[pos..pos + n]);
            pos += n;
        }
        assert_eq!(pos, flat.len());
        p
    }

    fn pack_grads(g: &LstmGrads) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 0..GATES {
            out.extend_from_slice(g.u[k].data());
        }
        for k in 0..GATES {
            out.extend_from_slice(g.w[k].data());
        }
        for k in 0..GATES {
            out.extend_from_slice(&g.b[k]);
        }
        out
    }

    #[test]
    fn zero_output_gradient_means_zero_parameter_gradient() {
        let mut rng = Rng::new(14);
        let p = random_params(2, 3, Activation::Tanh, &mut rng);
        let xs: Vec<Vec<f64>> = (0..4).map(|_| random_vec(2, &mut rng)).collect();
        let (_, caches) = lstm_forward(&p, &xs, &LstmState::zeros(3));
        let grad_h = vec![vec![0.0; 3]; 4];
        let (grads, grad_x, d_init) = lstm_backward(&p, &caches, &grad_h, &[0.0; 3]);
        assert!(pack_grads(&grads).iter().all(|&v| v == 0.0));
        assert!(grad_x.iter().flatten().all(|&v| v == 0.0));
        assert!(d_init.h.iter().chain(&d_init.c).all(|&v| v == 0.0));
    }

    fn check_sequence_gradient(act: Activation, steps: usize, seed: u64, mask: Option<Vec<f64>>) {
        let mut rng = Rng::new(seed);
        let p = random_params(3, 4, act, &mut rng);
        let xs: Vec<Vec<f64>> = (0..steps).map(|_| random_vec(3, &mut rng)).collect();
        let loss_w: Vec<Vec<f64>> = (0..steps).map(|_| random_vec(4, &mut rng)).collect();
        let init = LstmState { h: random_vec(4, &mut rng), c: random_vec(4, &mut rng) };

        let (_, caches) = lstm_forward_masked(&p, &xs, &init, mask.as_deref());
        let (grads, _, _) =
            lstm_backward_masked(&p, &caches, &loss_w, &[0.0; 4], mask.as_deref());
        let analytic = pack_grads(&grads);

        let flat = pack(&p);
        let numeric = finite_diff_grad(
            |w| {
                let q = unpack(&p, w);
                let (states, _) = lstm_forward_masked(&q, &xs, &init, mask.as_deref());
                states
                    .iter()
                    .zip(&loss_w)
                    .map(|(s, lw)| s.h.iter().zip(lw).map(|(a, b)| a * b).sum::<f64>())
                    .sum()
            },
            &flat,
            1e-5,
        );
        let err = max_relative_error(&analytic, &numeric);
        assert!(err < 1e-4, "max relative error {err} for {act:?}/{steps} steps");
    }

    #[test]
    fn single_step_gradient_matches_finite_differences() {
        check_sequence_gradient(Activation::Tanh, 1, 20, None);
        check_sequence_gradient(Activation::Relu, 1, 21, None);
    }

    #[test]
    fn five_step_gradient_matches_finite_differences() {
        check_sequence_gradient(Activation::Tanh, 5, 22, None);
        check_sequence_gradient(Activation::Relu, 5, 23, None);
    }

    #[test]
    fn masked_gradient_matches_finite_differences() {
        // A realistic inverted-dropout mask: some zeros, survivors scaled up.
        let mask = vec![4.0 / 3.0, 0.0, 4.0 / 3.0, 4.0 / 3.0];
        check_sequence_gradient(Activation::Tanh, 4, 24, Some(mask));
    }

    #[test]
    fn all_ones_mask_is_bitwise_identical_to_no_mask() {
        let mut rng = Rng::new(25);
        let p = random_params(2, 3, Activation::Tanh, &mut rng);
        let xs: Vec<Vec<f64>> = (0..3).map(|_| random_vec(2, &mut rng)).collect();
        let ones = vec![1.0; 3];
        let (a, _) = lstm_forward(&p, &xs, &LstmState::zeros(3));
        let (b, _) = lstm_forward_masked(&p, &xs, &LstmState::zeros(3), Some(&ones));
        for (sa, sb) in a.iter().zip(&b) {
            assert_eq!(sa.h, sb.h);
            assert_eq!(sa.c, sb.c);
        }
    }

    #[test]
    fn input_and_init_state_gradients_match_finite_differences() {
        let mut rng = Rng::new(26);
        let p = random_params(3, 4, Activation::Tanh, &mut rng);
        let xs: Vec<Vec<f64>> = (0..3).map(|_| random_vec(3, &mut rng)).collect();
        let loss_w: Vec<Vec<f64>> = (0..3).map(|_| random_vec(4, &mut rng)).collect();
        let init = LstmState { h: random_vec(4, &mut rng), c: random_vec(4, &mut rng) };

        let (_, caches) = lstm_forward(&p, &xs, &init);
        let (_, grad_x, d_init) = lstm_backward(&p, &caches, &loss_w, &[0.0; 4]);

        // flatten (xs, init.h, init.c) into one vector for the oracle
        let mut flat: Vec<f64> = xs.iter().flatten().copied().collect();
        flat.extend_from_slice(&init.h);
        flat.extend_from_slice(&init.c);
        let numeric = finite_diff_grad(
            |v| {
                let xs2: Vec<Vec<f64>> = (0..3).map(|t| v[t * 3..(t + 1) * 3].to_vec()).collect();
                let init2 = LstmState { h: v[9..13].to_vec(), c: v[13..17].to_vec() };
                let (states, _) = lstm_forward(&p, &xs2, &init2);
                states
                    .iter()
                    .zip(&loss_w)
                    .map(|(s, lw)| s.h.iter().zip(lw).map(|(a, b)| a * b).sum::<f64>())
                    .sum()
            },
            &flat,
            1e-5,
        );
        let mut analytic: Vec<f64> = grad_x.iter().flatten().copied().collect();
        analytic.extend_from_slice(&d_init.h);
        analytic.extend_from_slice(&d_init.c);
        let err = max_relative_error(&analytic, &numeric);
        assert!(err < 1e-4, "max relative error {err}");
    }

    #[test]
    fn final_cell_gradient_flows_through_grad_final_c() {
        let mut rng = Rng::new(27);
        let p = random_params(2, 3, Activation::Tanh, &mut rng);
        let xs: Vec<Vec<f64>> = (0..2).map(|_| random_vec(2, &mut rng)).collect();
        let gc = random_vec(3, &mut rng);
        let (_, caches) = lstm_forward(&p, &xs, &LstmState::zeros(3));
        let (grads, _, _) = lstm_backward(&p, &caches, &vec![vec![0.0; 3]; 2], &gc);
        let analytic = pack_grads(&grads);

        let flat = pack(&p);
        let numeric = finite_diff_grad(
            |w| {
                let q = unpack(&p, w);
                let (states, _) = lstm_forward(&q, &xs, &LstmState::zeros(3));
                states.last().unwrap().c.iter().zip(&gc).map(|(a, b)| a * b).sum()
            },
            &flat,
            1e-5,
        );
        let err = max_relative_error(&analytic, &numeric);
        assert!(err < 1e-4, "max relative error {err}");
    }
}
