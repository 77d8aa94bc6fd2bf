//! Reverse-mode differentiation and the two parameter-update rules.

pub mod check;
mod optim;
mod tape;

pub use optim::{clip_global_norm, sgd_step, RmsProp};
pub use tape::{Gradients, Tape, Var};

use alloc::vec::Vec;

/// A vector function with a known Jacobian, inserted into a [`Tape`] as a
/// single opaque node. Circuit expectations enter the tape this way.
pub trait Differentiable {
    fn n_inputs(&self) -> usize;
    fn n_outputs(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Vec<f64>;
    /// Values and the row-major `n_outputs × n_inputs` Jacobian at `x`.
    fn eval_with_jacobian(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>);
}
