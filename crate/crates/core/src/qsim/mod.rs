//! Dense statevector simulation.
//!
//! Basis ordering: qubit 0 is the most significant bit of an amplitude index,
//! matching the vertex convention of [`crate::graphlab`].

mod circuit;
mod kernel;
mod qaoa;
mod state;

pub use circuit::{Angle, Circuit, Gate, ParamCircuit, ParamGate, ZReadout};
pub use kernel::{fidelity_kernel, FidelityNode, KernelCircuit};
pub use qaoa::{
    expect_cut, landscape_grid, qaoa_circuit, qaoa_cost, qaoa_grad, qaoa_state, CostTable,
    Landscape, QaoaCostNode,
};
pub use state::{apply_gate, init_plus, StateVector, MAX_QUBITS};
