use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::FRAC_PI_2;

use super::state::StateVector;
use crate::error::{invalid, Result};
use crate::gradkit::Differentiable;

/// A concrete gate; rotation angles are in radians.
///
/// Rotations follow `R_P(θ) = exp(-iθP/2)`, and `Rzz(θ) = exp(-iθ Z⊗Z / 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    Cnot { control: usize, target: usize },
    Rzz(usize, usize, f64),
}

/// An ordered gate list on a fixed register.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    /// Applies every gate in order.
    pub fn run(&self, state: &mut StateVector) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(invalid("circuit width differs from state width"));
        }
        for g in &self.gates {
            state.apply(g)?;
        }
        Ok(())
    }
}

/// Where a parameterized rotation takes its angle from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Fixed(f64),
    Slot(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamGate {
    H(usize),
    Rx(usize, Angle),
    Ry(usize, Angle),
    Rz(usize, Angle),
    Cnot { control: usize, target: usize },
    Rzz(usize, usize, Angle),
}

impl ParamGate {
    fn angle(&self) -> Option<Angle> {
        match *self {
            ParamGate::Rx(_, a) | ParamGate::Ry(_, a) | ParamGate::Rz(_, a) | ParamGate::Rzz(_, _, a) => {
                Some(a)
            }
            _ => None,
        }
    }

    fn bind(&self, slots: &[f64], delta: f64) -> Gate {
        let v = |a: Angle| match a {
            Angle::Fixed(x) => x + delta,
            Angle::Slot(s) => slots[s] + delta,
        };
        match *self {
            ParamGate::H(q) => Gate::H(q),
            ParamGate::Rx(q, a) => Gate::Rx(q, v(a)),
            ParamGate::Ry(q, a) => Gate::Ry(q, v(a)),
            ParamGate::Rz(q, a) => Gate::Rz(q, v(a)),
            ParamGate::Cnot { control, target } => Gate::Cnot { control, target },
            ParamGate::Rzz(a, b, t) => Gate::Rzz(a, b, v(t)),
        }
    }
}

/// A gate template whose rotation angles are read from a slot vector, always
/// started from `|0…0⟩`.
///
/// Every slotted gate is a Pauli rotation, so the derivative with respect to
/// a slot is the sum over its occurrences of the two-term shift rule
/// `(E(θ+π/2) − E(θ−π/2)) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCircuit {
    n_qubits: usize,
    n_slots: usize,
    gates: Vec<ParamGate>,
}

impl ParamCircuit {
    pub fn new(n_qubits: usize, n_slots: usize) -> Result<Self> {
        StateVector::zero(n_qubits)?;
        Ok(Self { n_qubits, n_slots, gates: Vec::new() })
    }

    pub fn push(&mut self, gate: ParamGate) -> Result<&mut Self> {
        let q_ok = |q: usize| q < self.n_qubits;
        let ok = match gate {
            ParamGate::H(q) | ParamGate::Rx(q, _) | ParamGate::Ry(q, _) | ParamGate::Rz(q, _) => q_ok(q),
            ParamGate::Cnot { control, target } => q_ok(control) && q_ok(target) && control != target,
            ParamGate::Rzz(a, b, _) => q_ok(a) && q_ok(b) && a != b,
        };
        if !ok {
            return Err(invalid("gate qubit indices invalid for circuit width"));
        }
        if let Some(Angle::Slot(s)) = gate.angle() {
            if s >= self.n_slots {
                return Err(invalid("angle slot out of range"));
            }
        }
        self.gates.push(gate);
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn gates(&self) -> &[ParamGate] {
        &self.gates
    }

    /// Concrete circuit for the given slot values.
    pub fn bind(&self, slots: &[f64]) -> Result<Circuit> {
        self.check_slots(slots)?;
        Ok(Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().map(|g| g.bind(slots, 0.0)).collect(),
        })
    }

    fn check_slots(&self, slots: &[f64]) -> Result<()> {
        if slots.len() != self.n_slots {
            return Err(invalid(alloc::format!(
                "expected {} angle slots, got {}",
                self.n_slots,
                slots.len()
            )));
        }
        Ok(())
    }

    /// `U(slots)|0…0⟩`.
    pub fn prepare(&self, slots: &[f64]) -> Result<StateVector> {
        self.check_slots(slots)?;
        Ok(self.prepare_shifted(slots, usize::MAX, 0.0))
    }

    /// As [`prepare`](Self::prepare) with gate `shifted` offset by `delta`.
    pub(crate) fn prepare_shifted(&self, slots: &[f64], shifted: usize, delta: f64) -> StateVector {
        let mut state = StateVector::zero(self.n_qubits).expect("width validated at construction");
        for (i, g) in self.gates.iter().enumerate() {
            let d = if i == shifted { delta } else { 0.0 };
            state.apply_unchecked(&g.bind(slots, d));
        }
        state
    }

    /// `(gate index, slot)` for every slotted rotation.
    pub(crate) fn slot_occurrences(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.gates.iter().enumerate().filter_map(|(i, g)| match g.angle() {
            Some(Angle::Slot(s)) => Some((i, s)),
            _ => None,
        })
    }

    /// Shift-rule Jacobian of a state functional `f`, row-major
    /// `n_out × n_slots`.
    pub(crate) fn shift_jacobian<F>(&self, slots: &[f64], n_out: usize, f: F) -> Vec<f64>
    where
        F: Fn(&StateVector) -> Vec<f64>,
    {
        let mut jac = vec![0.0; n_out * self.n_slots];
        for (gate, slot) in self.slot_occurrences() {
            let plus = f(&self.prepare_shifted(slots, gate, FRAC_PI_2));
            let minus = f(&self.prepare_shifted(slots, gate, -FRAC_PI_2));
            for o in 0..n_out {
                jac[o * self.n_slots + slot] += 0.5 * (plus[o] - minus[o]);
            }
        }
        jac
    }
}

/// Pauli-Z expectations of selected qubits after a [`ParamCircuit`]; the
/// inputs are the circuit's angle slots.
#[derive(Debug, Clone, PartialEq)]
pub struct ZReadout {
    pub circuit: ParamCircuit,
    pub qubits: Vec<usize>,
}

impl ZReadout {
    pub fn new(circuit: ParamCircuit, qubits: Vec<usize>) -> Result<Self> {
        if qubits.iter().any(|&q| q >= circuit.n_qubits()) {
            return Err(invalid("readout qubit out of range"));
        }
        Ok(Self { circuit, qubits })
    }

    fn read(&self, state: &StateVector) -> Vec<f64> {
        self.qubits.iter().map(|&q| state.expect_z(q)).collect()
    }
}

impl Differentiable for ZReadout {
    fn n_inputs(&self) -> usize {
        self.circuit.n_slots()
    }

    fn n_outputs(&self) -> usize {
        self.qubits.len()
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.read(&self.circuit.prepare_shifted(x, usize::MAX, 0.0))
    }

    fn eval_with_jacobian(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let value = self.eval(x);
        let jac = self
            .circuit
            .shift_jacobian(x, self.qubits.len(), |s| self.read(s));
        (value, jac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_validation() {
        let mut c = ParamCircuit::new(2, 1).unwrap();
        assert!(c.push(ParamGate::Ry(0, Angle::Slot(1))).is_err());
        assert!(c.push(ParamGate::Ry(2, Angle::Slot(0))).is_err());
        assert!(c.push(ParamGate::Cnot { control: 0, target: 0 }).is_err());
        assert!(c.push(ParamGate::Ry(1, Angle::Slot(0))).is_ok());
        assert!(c.prepare(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn ry_readout_is_cosine() {
        let mut c = ParamCircuit::new(1, 1).unwrap();
        c.push(ParamGate::Ry(0, Angle::Slot(0))).unwrap();
        let r = ZReadout::new(c, alloc::vec![0]).unwrap();
        let (v, j) = r.eval_with_jacobian(&[0.7]);
        assert!((v[0] - libm::cos(0.7)).abs() < 1e-14);
        assert!((j[0] + libm::sin(0.7)).abs() < 1e-14);
    }

    #[test]
    fn shared_slot_accumulates() {
        // RY(a) RY(a) = RY(2a): d/da cos(2a) = -2 sin(2a)
        let mut c = ParamCircuit::new(1, 1).unwrap();
        c.push(ParamGate::Ry(0, Angle::Slot(0))).unwrap();
        c.push(ParamGate::Ry(0, Angle::Slot(0))).unwrap();
        let r = ZReadout::new(c, alloc::vec![0]).unwrap();
        let (_, j) = r.eval_with_jacobian(&[0.4]);
        assert!((j[0] + 2.0 * libm::sin(0.8)).abs() < 1e-13);
    }
}
