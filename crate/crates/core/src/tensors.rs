//! Canonical tensor enumeration.
//!
//! Every model exposes its weight tensors as an ordered, named list. That
//! single ordering drives four things that must never disagree: the flat
//! parameter vector consumed by the optimizers, gradient accumulation,
//! checkpoint serialization, and per-tensor gradient-check reporting.
//!
//! Order conventions: LSTM cells list input weights `u_f, u_i, u_o, u_c`,
//! then recurrent weights `w_f..w_c`, then biases `b_f..b_c`. Dense layers
//! list `w` then `b`. Composites list encoder, bridge (if any), decoder
//! steps in order, then head.

use crate::linalg::Mat;
use crate::nnkernel::{DenseGrads, DenseParams, LstmGrads, LstmParams};

/// Immutable view of one tensor's storage.
pub enum TensorView<'a> {
    Mat(&'a Mat),
    Vec(&'a [f64]),
}

/// Mutable view of one tensor's storage.
pub enum TensorViewMut<'a> {
    Mat(&'a mut Mat),
    Vec(&'a mut [f64]),
}

/// Name and shape of one tensor, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSpec {
    pub name: String,
    pub shape: Vec<usize>,
}

impl TensorSpec {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A named list of tensor views.
pub type TensorList<'a> = Vec<(String, TensorView<'a>)>;
/// A named list of mutable tensor views.
pub type TensorListMut<'a> = Vec<(String, TensorViewMut<'a>)>;

const GATE_NAMES: [&str; 4] = ["f", "i", "o", "c"];

/// Enumerates one LSTM cell's tensors under `prefix`.
pub fn lstm_tensors<'a>(prefix: &str, p: &'a LstmParams) -> TensorList<'a> {
    let mut out = Vec::with_capacity(12);
    for (g, name) in GATE_NAMES.iter().enumerate() {
        out.push((format!("{prefix}.u_{name}"), TensorView::Mat(&p.u[g])));
    }
    for (g, name) in GATE_NAMES.iter().enumerate() {
        out.push((format!("{prefix}.w_{name}"), TensorView::Mat(&p.w[g])));
    }
    for (g, name) in GATE_NAMES.iter().enumerate() {
        out.push((format!("{prefix}.b_{name}"), TensorView::Vec(&p.b[g])));
    }
    out
}

/// Mutable twin of [`lstm_tensors`] (same order).
pub fn lstm_tensors_mut<'a>(prefix: &str, p: &'a mut LstmParams) -> TensorListMut<'a> {
    let mut out = Vec::with_capacity(12);
    let (u, w, b) = (&mut p.u, &mut p.w, &mut p.b);
    for (g, m) in u.iter_mut().enumerate() {
        out.push((format!("{prefix}.u_{}", GATE_NAMES[g]), TensorViewMut::Mat(m)));
    }
    for (g, m) in w.iter_mut().enumerate() {
        out.push((format!("{prefix}.w_{}", GATE_NAMES[g]), TensorViewMut::Mat(m)));
    }
    for (g, v) in b.iter_mut().enumerate() {
        out.push((format!("{prefix}.b_{}", GATE_NAMES[g]), TensorViewMut::Vec(v)));
    }
    out
}

/// Enumerates LSTM gradients in the same order as [`lstm_tensors`].
pub fn lstm_grad_tensors<'a>(prefix: &str, g: &'a LstmGrads) -> TensorList<'a> {
    let mut out = Vec::with_capacity(12);
    for (k, name) in GATE_NAMES.iter().enumerate() {
        out.push((format!("{prefix}.u_{name}"), TensorView::Mat(&g.u[k])));
    }
    for (k, name) in GATE_NAMES.iter().enumerate() {
        out.push((format!("{prefix}.w_{name}"), TensorView::Mat(&g.w[k])));
    }
    for (k, name) in GATE_NAMES.iter().enumerate() {
        out.push((format!("{prefix}.b_{name}"), TensorView::Vec(&g.b[k])));
    }
    out
}

/// Enumerates a dense layer's tensors under `prefix`.
pub fn dense_tensors<'a>(prefix: &str, p: &'a DenseParams) -> TensorList<'a> {
    let mut out = vec![(format!("{prefix}.w"), TensorView::Mat(&p.w))];
    if let Some(b) = &p.b {
        out.push((format!("{prefix}.b"), TensorView::Vec(b)));
    }
    out
}

/// Mutable twin of [`dense_tensors`].
pub fn dense_tensors_mut<'a>(prefix: &str, p: &'a mut DenseParams) -> TensorListMut<'a> {
    let mut out = vec![(format!("{prefix}.w"), TensorViewMut::Mat(&mut p.w))];
    if let Some(b) = &mut p.b {
        out.push((format!("{prefix}.b"), TensorViewMut::Vec(b)));
    }
    out
}

/// Enumerates dense gradients in the same order as [`dense_tensors`].
pub fn dense_grad_tensors<'a>(prefix: &str, g: &'a DenseGrads) -> TensorList<'a> {
    let mut out = vec![(format!("{prefix}.w"), TensorView::Mat(&g.w))];
    if let Some(b) = &g.b {
        out.push((format!("{prefix}.b"), TensorView::Vec(b)));
    }
    out
}

fn view_data<'a>(v: &'a TensorView) -> &'a [f64] {
    match v {
        TensorView::Mat(m) => m.data(),
        TensorView::Vec(s) => s,
    }
}

/// Total scalar count across a tensor list.
pub fn flat_len(list: &TensorList) -> usize {
    list.iter().map(|(_, v)| view_data(v).len()).sum()
}

/// Appends every tensor's values to `out` in order.
pub fn write_flat(list: &TensorList, out: &mut Vec<f64>) {
    for (_, v) in list {
        out.extend_from_slice(view_data(v));
    }
}

/// Adds every tensor's values into `acc` starting at `*pos` (gradient
/// accumulation), advancing `pos`.
pub fn add_flat(list: &TensorList, acc: &mut [f64], pos: &mut usize) {
    for (_, v) in list {
        let data = view_data(v);
        let dst = &mut acc[*pos..*pos + data.len()];
        for (d, &s) in dst.iter_mut().zip(data) {
            *d += s;
        }
        *pos += data.len();
    }
}

/// Copies values from `src` starting at `*pos` back into the tensors,
/// advancing `pos`.
pub fn read_flat(list: &mut TensorListMut, src: &[f64], pos: &mut usize) {
    for (_, v) in list.iter_mut() {
        let data: &mut [f64] = match v {
            TensorViewMut::Mat(m) => m.data_mut(),
            TensorViewMut::Vec(s) => s,
        };
        data.copy_from_slice(&src[*pos..*pos + data.len()]);
        *pos += data.len();
    }
}

/// Names and shapes in canonical order.
pub fn specs(list: &TensorList) -> Vec<TensorSpec> {
    list.iter()
        .map(|(name, v)| TensorSpec {
            name: name.clone(),
            shape: match v {
                TensorView::Mat(m) => vec![m.rows(), m.cols()],
                TensorView::Vec(s) => vec![s.len()],
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nnkernel::Activation;

    #[test]
    fn lstm_enumeration_has_twelve_tensors_in_gate_order() {
        let p = LstmParams::zeros(2, 3, Activation::Tanh);
        let list = lstm_tensors("enc", &p);
        let names: Vec<&str> = list.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(
            names,
            vec![
                "enc.u_f", "enc.u_i", "enc.u_o", "enc.u_c", "enc.w_f", "enc.w_i", "enc.w_o",
                "enc.w_c", "enc.b_f", "enc.b_i", "enc.b_o", "enc.b_c"
            ]
        );
        assert_eq!(flat_len(&list), p.n_params());
    }

    #[test]
    fn flat_round_trip_preserves_values() {
        let mut p = LstmParams::zeros(2, 2, Activation::Tanh);
        let n = p.n_params();
        {
            let mut list = lstm_tensors_mut("x", &mut p);
            let src: Vec<f64> = (0..n).map(|i| i as f64 * 0.5).collect();
            let mut pos = 0;
            read_flat(&mut list, &src, &mut pos);
            assert_eq!(pos, src.len());
        }
        let mut out = Vec::new();
        write_flat(&lstm_tensors("x", &p), &mut out);
        assert_eq!(out.len(), n);
        assert_eq!(out[1], 0.5);
        assert_eq!(*out.last().unwrap(), (out.len() as f64 - 1.0) * 0.5);
    }

    #[test]
    fn specs_carry_shapes() {
        let p = DenseParams::zeros(3, 4, true);
        let s = specs(&dense_tensors("head", &p));
        assert_eq!(s[0].name, "head.w");
        assert_eq!(s[0].shape, vec![3, 4]);
        assert_eq!(s[1].shape, vec![3]);
        assert_eq!(s[0].len() + s[1].len(), p.n_params());
    }

    #[test]
    fn add_flat_accumulates() {
        let mut g = LstmGrads::zeros_like(&LstmParams::zeros(1, 1, Activation::Tanh));
        g.b[0][0] = 2.0;
        let list = lstm_grad_tensors("q", &g);
        let n = flat_len(&list);
        let mut acc = vec![1.0; n];
        let mut pos = 0;
        add_flat(&list, &mut acc, &mut pos);
        assert_eq!(pos, n);
        // b_f is tensor index 8 of 12 for a 1×1 cell: offsets 0..8 are u/w mats
        assert_eq!(acc[8], 3.0);
        assert_eq!(acc[0], 1.0);
    }
}
