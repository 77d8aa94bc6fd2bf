use alloc::vec;
use alloc::vec::Vec;

use super::circuit::{Circuit, Gate};
use super::state::{init_plus, StateVector, MAX_QUBITS};
use crate::error::{invalid, Error, Result};
use crate::gradkit::Differentiable;
use crate::graphlab::{cut_of_index, Graph};

/// The diagonal of the cut Hamiltonian `Σ_{(i,j)∈E} (I − Z_i Z_j)/2`,
/// i.e. the cut value of every basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct CostTable {
    n: usize,
    num_edges: usize,
    cuts: Vec<f64>,
}

impl CostTable {
    pub fn new(g: &Graph) -> Result<Self> {
        if g.n() > MAX_QUBITS {
            return Err(Error::ResourceLimit {
                what: "qubit count",
                value: g.n(),
                limit: MAX_QUBITS,
            });
        }
        let cuts = (0..1u64 << g.n()).map(|z| cut_of_index(g, z) as f64).collect();
        Ok(Self { n: g.n(), num_edges: g.num_edges(), cuts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    /// `⟨ψ|H_C|ψ⟩`.
    pub fn expect(&self, state: &StateVector) -> Result<f64> {
        if state.n_qubits() != self.n {
            return Err(invalid("state width differs from graph size"));
        }
        state.expect_diagonal(&self.cuts)
    }

    /// `e^{-iβ H_M} e^{-iγ H_C} |+⟩^⊗n` with `H_M = Σ_q X_q`.
    pub fn state(&self, gamma: f64, beta: f64) -> StateVector {
        let mut s = self.cost_layer(gamma);
        self.mixer(&mut s, beta);
        s
    }

    fn cost_layer(&self, gamma: f64) -> StateVector {
        let mut s = init_plus(self.n).expect("width checked in constructor");
        s.apply_diagonal_phase(&self.cuts, gamma);
        s
    }

    fn mixer(&self, s: &mut StateVector, beta: f64) {
        for q in 0..self.n {
            s.apply_unchecked(&Gate::Rx(q, 2.0 * beta));
        }
    }

    /// Expected cut value at `theta = (γ, β)`.
    pub fn cost(&self, theta: [f64; 2]) -> f64 {
        let s = self.state(theta[0], theta[1]);
        s.expect_diagonal(&self.cuts).expect("dimensions match")
    }

    /// Expected cut and its exact gradient.
    ///
    /// With `φ = e^{-iγC}|+⟩` and `ψ = M(β)φ`:
    /// `∂γ f = 2 Im⟨Cψ | M(β) Cφ⟩` and `∂β f = 2 Im⟨Cψ | Σ_q X_q ψ⟩`.
    pub fn cost_and_grad(&self, theta: [f64; 2]) -> (f64, [f64; 2]) {
        let [gamma, beta] = theta;
        let phi = self.cost_layer(gamma);
        let mut psi = phi.clone();
        self.mixer(&mut psi, beta);
        let c_psi = psi.scale_diagonal(&self.cuts);
        let cost = psi.inner(&c_psi).expect("same width").re;

        let mut chi = phi.scale_diagonal(&self.cuts);
        self.mixer(&mut chi, beta);
        let d_gamma = 2.0 * c_psi.inner(&chi).expect("same width").im;
        let d_beta = 2.0 * c_psi.inner(&psi.x_sum()).expect("same width").im;
        (cost, [d_gamma, d_beta])
    }
}

/// `⟨ψ|H_C|ψ⟩` for an arbitrary state.
pub fn expect_cut(state: &StateVector, g: &Graph) -> Result<f64> {
    if state.n_qubits() != g.n() {
        return Err(invalid("state width differs from graph size"));
    }
    CostTable::new(g)?.expect(state)
}

/// Single-layer QAOA state.
pub fn qaoa_state(g: &Graph, gamma: f64, beta: f64) -> Result<StateVector> {
    Ok(CostTable::new(g)?.state(gamma, beta))
}

/// Gate-level single-layer ansatz: `H` on every qubit, `RZZ(−γ)` per edge,
/// `RX(2β)` on every qubit. Equal to [`qaoa_state`] up to a global phase.
pub fn qaoa_circuit(g: &Graph, gamma: f64, beta: f64) -> Circuit {
    let mut c = Circuit::new(g.n());
    for q in 0..g.n() {
        c.push(Gate::H(q));
    }
    for &(a, b) in g.edges() {
        c.push(Gate::Rzz(a, b, -gamma));
    }
    for q in 0..g.n() {
        c.push(Gate::Rx(q, 2.0 * beta));
    }
    c
}

pub fn qaoa_cost(g: &Graph, theta: [f64; 2]) -> Result<f64> {
    Ok(CostTable::new(g)?.cost(theta))
}

pub fn qaoa_grad(g: &Graph, theta: [f64; 2]) -> Result<[f64; 2]> {
    Ok(CostTable::new(g)?.cost_and_grad(theta).1)
}

/// Tape node for the expected cut; inputs `(γ, β)`, one output.
#[derive(Debug, Clone, Copy)]
pub struct QaoaCostNode<'a>(pub &'a CostTable);

impl Differentiable for QaoaCostNode<'_> {
    fn n_inputs(&self) -> usize {
        2
    }

    fn n_outputs(&self) -> usize {
        1
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        vec![self.0.cost([x[0], x[1]])]
    }

    fn eval_with_jacobian(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (c, g) = self.0.cost_and_grad([x[0], x[1]]);
        (vec![c], g.to_vec())
    }
}

/// Expected cut on a `γ × β` grid, stored gamma-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Landscape {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub costs: Vec<f64>,
}

impl Landscape {
    pub fn at(&self, gi: usize, bi: usize) -> f64 {
        self.costs[gi * self.betas.len() + bi]
    }

    pub fn max(&self) -> f64 {
        self.costs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Evaluates the cost on an inclusive, evenly spaced grid.
pub fn landscape_grid(
    table: &CostTable,
    gamma_range: (f64, f64),
    beta_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<Landscape> {
    if resolution.0 < 2 || resolution.1 < 2 {
        return Err(invalid("landscape resolution must be at least 2 per axis"));
    }
    let gammas = linspace(gamma_range.0, gamma_range.1, resolution.0);
    let betas = linspace(beta_range.0, beta_range.1, resolution.1);
    let mut costs = Vec::with_capacity(gammas.len() * betas.len());
    for &g in &gammas {
        for &b in &betas {
            costs.push(table.cost([g, b]));
        }
    }
    Ok(Landscape { gammas, betas, costs })
}
