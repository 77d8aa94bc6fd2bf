use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::circuit::Gate;
use crate::error::{invalid, Error, Result};
use crate::math;

/// Upper bound on simulated register width.
pub const MAX_QUBITS: usize = 16;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A pure state on `n` qubits stored as `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::ResourceLimit {
            what: "qubit count",
            value: n,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

/// `|+⟩^⊗n`.
pub fn init_plus(n: usize) -> Result<StateVector> {
    check_width(n)?;
    let a = 1.0 / math::sqrt((1u64 << n) as f64);
    Ok(StateVector {
        n,
        amps: vec![Complex64::new(a, 0.0); 1 << n],
    })
}

/// Applies one gate to an owned state.
pub fn apply_gate(mut state: StateVector, gate: &Gate) -> Result<StateVector> {
    state.apply(gate)?;
    Ok(state)
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        check_width(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_width(n)?;
        if index >= 1 << n {
            return Err(invalid("basis index out of range"));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Wraps raw amplitudes after normalizing them.
    pub fn from_amplitudes(n: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        check_width(n)?;
        if amps.len() != 1 << n {
            return Err(invalid("amplitude count must be 2^n"));
        }
        let norm = math::sqrt(amps.iter().map(|a| a.norm_sqr()).sum());
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("amplitudes must have finite non-zero norm"));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self { n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(invalid("inner product of states with different widths"));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `⟨Z_q⟩`.
    pub fn expect_z(&self, q: usize) -> f64 {
        let bit = self.bit(q);
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| if i & bit == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum()
    }

    /// Expectation of a diagonal observable given by its eigenvalues.
    pub fn expect_diagonal(&self, diag: &[f64]) -> Result<f64> {
        if diag.len() != self.amps.len() {
            return Err(invalid("diagonal length differs from state dimension"));
        }
        Ok(self.amps.iter().zip(diag).map(|(a, d)| a.norm_sqr() * d).sum())
    }

    #[inline]
    fn bit(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(invalid(alloc::format!(
                "qubit {q} out of range for {} qubits",
                self.n
            )));
        }
        Ok(())
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        match *gate {
            Gate::H(q) | Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => self.check_qubit(q)?,
            Gate::Cnot { control, target } => {
                self.check_qubit(control)?;
                self.check_qubit(target)?;
                if control == target {
                    return Err(invalid("CNOT control equals target"));
                }
            }
            Gate::Rzz(a, b, _) => {
                self.check_qubit(a)?;
                self.check_qubit(b)?;
                if a == b {
                    return Err(invalid("RZZ on a single qubit"));
                }
            }
        }
        self.apply_unchecked(gate);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, gate: &Gate) {
        match *gate {
            Gate::H(q) => {
                let s = core::f64::consts::FRAC_1_SQRT_2;
                self.single(q, [
                    Complex64::new(s, 0.0),
                    Complex64::new(s, 0.0),
                    Complex64::new(s, 0.0),
                    Complex64::new(-s, 0.0),
                ]);
            }
            Gate::Rx(q, t) => {
                let (c, s) = (math::cos(t / 2.0), math::sin(t / 2.0));
                self.single(q, [
                    Complex64::new(c, 0.0),
                    Complex64::new(0.0, -s),
                    Complex64::new(0.0, -s),
                    Complex64::new(c, 0.0),
                ]);
            }
            Gate::Ry(q, t) => {
                let (c, s) = (math::cos(t / 2.0), math::sin(t / 2.0));
                self.single(q, [
                    Complex64::new(c, 0.0),
                    Complex64::new(-s, 0.0),
                    Complex64::new(s, 0.0),
                    Complex64::new(c, 0.0),
                ]);
            }
            Gate::Rz(q, t) => {
                let bit = self.bit(q);
                let lo = math::cis(-t / 2.0);
                let hi = math::cis(t / 2.0);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a *= if i & bit == 0 { lo } else { hi };
                }
            }
            Gate::Cnot { control, target } => {
                let cb = self.bit(control);
                let tb = self.bit(target);
                for i in 0..self.amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
            Gate::Rzz(a, b, t) => {
                let (ab, bb) = (self.bit(a), self.bit(b));
                let even = math::cis(-t / 2.0);
                let odd = math::cis(t / 2.0);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    let parity = ((i & ab) != 0) ^ ((i & bb) != 0);
                    *amp *= if parity { odd } else { even };
                }
            }
        }
    }

    /// Applies a 2×2 matrix `[m00, m01, m10, m11]` to qubit `q`.
    fn single(&mut self, q: usize, m: [Complex64; 4]) {
        let bit = self.bit(q);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = m[0] * a0 + m[1] * a1;
                self.amps[i | bit] = m[2] * a0 + m[3] * a1;
            }
        }
    }

    /// Multiplies amplitude `z` by `exp(-i·angle·diag[z])`.
    pub(crate) fn apply_diagonal_phase(&mut self, diag: &[f64], angle: f64) {
        for (a, d) in self.amps.iter_mut().zip(diag) {
            *a *= math::cis(-angle * d);
        }
    }

    /// `Σ_q X_q |self⟩`.
    pub(crate) fn x_sum(&self) -> StateVector {
        let mut out = vec![ZERO; self.amps.len()];
        for q in 0..self.n {
            let bit = self.bit(q);
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.amps[i ^ bit];
            }
        }
        StateVector { n: self.n, amps: out }
    }

    pub(crate) fn scale_diagonal(&self, diag: &[f64]) -> StateVector {
        StateVector {
            n: self.n,
            amps: self.amps.iter().zip(diag).map(|(a, d)| a * d).collect(),
        }
    }
}
