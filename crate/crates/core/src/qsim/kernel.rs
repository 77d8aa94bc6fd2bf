use alloc::vec;
use alloc::vec::Vec;

use super::circuit::{Angle, ParamCircuit, ParamGate};
use super::state::StateVector;
use crate::error::{invalid, Result};
use crate::gradkit::Differentiable;

/// Layout of the feature-encoding unitary `U(x, w)`.
///
/// Each repetition applies `H` to every qubit, `RY(w_k x_k)` on qubit `k`, a
/// CNOT ladder `k → k+1`, then `RZ(w_k x_k)` on qubit `k`. One feature per
/// qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelCircuit {
    pub n_qubits: usize,
    pub reps: usize,
}

impl Default for KernelCircuit {
    fn default() -> Self {
        Self { n_qubits: 4, reps: 1 }
    }
}

impl KernelCircuit {
    /// Template whose slot `k` is the encoded angle `w_k x_k`.
    pub fn template(&self) -> Result<ParamCircuit> {
        let n = self.n_qubits;
        let mut c = ParamCircuit::new(n, n)?;
        for _ in 0..self.reps {
            for q in 0..n {
                c.push(ParamGate::H(q))?;
            }
            for q in 0..n {
                c.push(ParamGate::Ry(q, Angle::Slot(q)))?;
            }
            for q in 0..n.saturating_sub(1) {
                c.push(ParamGate::Cnot { control: q, target: q + 1 })?;
            }
            for q in 0..n {
                c.push(ParamGate::Rz(q, Angle::Slot(q)))?;
            }
        }
        Ok(c)
    }

    pub fn encode(&self, x: &[f64], w: &[f64]) -> Result<StateVector> {
        if x.len() != self.n_qubits || w.len() != self.n_qubits {
            return Err(invalid("kernel feature dimension mismatch"));
        }
        let angles: Vec<f64> = x.iter().zip(w).map(|(a, b)| a * b).collect();
        self.template()?.prepare(&angles)
    }
}

/// `|⟨0|U†(b,w) U(a,w)|0⟩|²`, computed from exact statevectors.
pub fn fidelity_kernel(a: &[f64], b: &[f64], w: &[f64], circuit: &KernelCircuit) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid("kernel arguments differ in dimension"));
    }
    let sa = circuit.encode(a, w)?;
    let sb = circuit.encode(b, w)?;
    Ok(sb.inner(&sa)?.norm_sqr())
}

/// Tape node for the fidelity kernel. Inputs are the encoded angles of the
/// first argument followed by those of the second; one output.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityNode {
    template: ParamCircuit,
}

impl FidelityNode {
    pub fn new(circuit: &KernelCircuit) -> Result<Self> {
        Ok(Self { template: circuit.template()? })
    }

    fn fidelity(a: &StateVector, b: &StateVector) -> f64 {
        b.inner(a).expect("same width").norm_sqr()
    }
}

impl Differentiable for FidelityNode {
    fn n_inputs(&self) -> usize {
        2 * self.template.n_slots()
    }

    fn n_outputs(&self) -> usize {
        1
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let m = self.template.n_slots();
        let sa = self.template.prepare_shifted(&x[..m], usize::MAX, 0.0);
        let sb = self.template.prepare_shifted(&x[m..], usize::MAX, 0.0);
        vec![Self::fidelity(&sa, &sb)]
    }

    fn eval_with_jacobian(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let m = self.template.n_slots();
        let (xa, xb) = x.split_at(m);
        let sa = self.template.prepare_shifted(xa, usize::MAX, 0.0);
        let sb = self.template.prepare_shifted(xb, usize::MAX, 0.0);
        let value = Self::fidelity(&sa, &sb);
        let ja = self
            .template
            .shift_jacobian(xa, 1, |s| vec![Self::fidelity(s, &sb)]);
        let jb = self
            .template
            .shift_jacobian(xb, 1, |s| vec![Self::fidelity(&sa, s)]);
        let mut jac = ja;
        jac.extend(jb);
        (vec![value], jac)
    }
}
