//! Central finite differences, used to validate analytic Jacobians.

use alloc::vec;
use alloc::vec::Vec;

use super::Differentiable;

/// Row-major `n_out × n_in` Jacobian by central differences with step `h`.
pub fn finite_difference_jacobian<D: Differentiable + ?Sized>(node: &D, x: &[f64], h: f64) -> Vec<f64> {
    let (n_in, n_out) = (node.n_inputs(), node.n_outputs());
    let mut jac = vec![0.0; n_in * n_out];
    let mut xp = x.to_vec();
    for i in 0..n_in {
        xp[i] = x[i] + h;
        let fp = node.eval(&xp);
        xp[i] = x[i] - h;
        let fm = node.eval(&xp);
        xp[i] = x[i];
        for o in 0..n_out {
            jac[o * n_in + i] = (fp[o] - fm[o]) / (2.0 * h);
        }
    }
    jac
}

/// Central-difference gradient of a scalar function.
pub fn finite_difference_gradient<F: FnMut(&[f64]) -> f64>(mut f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            xp[i] = x[i] + h;
            let fp = f(&xp);
            xp[i] = x[i] - h;
            let fm = f(&xp);
            xp[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// `‖a − b‖ / max(‖b‖, floor)`.
pub fn relative_error(a: &[f64], b: &[f64], floor: f64) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let norm: f64 = b.iter().map(|y| y * y).sum();
    libm::sqrt(diff) / libm::sqrt(norm).max(floor)
}
