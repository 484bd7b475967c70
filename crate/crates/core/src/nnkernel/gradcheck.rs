//! Central finite differences — the gradient oracle every backward pass in
//! this crate is tested against.

/// Numerically differentiates `loss` at `params` with central differences:
/// `(L(w+ε) − L(w−ε)) / 2ε` per coordinate.
pub fn finite_diff_grad(
    mut loss: impl FnMut(&[f64]) -> f64,
    params: &[f64],
    eps: f64,
) -> Vec<f64> {
    let mut work = params.to_vec();
    let mut grads = Vec::with_capacity(params.len());
    for j in 0..params.len() {
        let orig = work[j];
        work[j] = orig + eps;
        let plus = loss(&work);
        work[j] = orig - eps;
        let minus = loss(&work);
        work[j] = orig;
        grads.push((plus - minus) / (2.0 * eps));
    }
    grads
}

/// Relative error with a small absolute guard in the denominator:
/// `|a − b| / (max(|a|, |b|) + 1e-8)`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / (a.abs().max(b.abs()) + 1e-8)
}

/// Worst [`relative_error`] across two equally long gradient vectors.
pub fn max_relative_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "gradient length mismatch");
    a.iter().zip(b).map(|(&x, &y)| relative_error(x, y)).fold(0.0, f64::max)
}
