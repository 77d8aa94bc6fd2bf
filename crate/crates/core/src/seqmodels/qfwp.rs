use alloc::vec::Vec;
use core::ops::Range;

use super::{small_uniform, Group, MetaOptimizer, ModelConfig, ModelKind, Params, RecurrentState};
use crate::error::{invalid, Result};
use crate::gradkit::{Tape, Var};
use crate::qsim::{Angle, ParamCircuit, ParamGate, ZReadout};
use crate::rng::SeededRng;

const INPUT: usize = 3;
const QUBITS: usize = 2;
/// RX, RY, RZ per qubit.
const PER_LAYER: usize = 3 * QUBITS;

/// Quantum fast weight programmer.
///
/// A bias-free linear slow net maps `x_t` to `(L, Q) ∈ R^layers × R^6`; the
/// fast weights accumulate `θ_ij += L_i Q_j` and parameterize a 2-qubit
/// circuit whose Z readout is post-processed by a linear layer and a global
/// scale. Fast weights restart at zero every rollout.
#[derive(Debug, Clone)]
pub struct Qfwp {
    config: ModelConfig,
    params: Params,
    fast_circuit: ZReadout,
    slow: Range<usize>,
    post_w: Range<usize>,
    post_b: Range<usize>,
    scale: Range<usize>,
}

fn fast_circuit(layers: usize) -> Result<ZReadout> {
    let mut c = ParamCircuit::new(QUBITS, INPUT + layers * PER_LAYER)?;
    for k in 0..INPUT {
        c.push(ParamGate::Ry(k % QUBITS, Angle::Slot(k)))?;
    }
    for l in 0..layers {
        let base = INPUT + l * PER_LAYER;
        for q in 0..QUBITS {
            c.push(ParamGate::Rx(q, Angle::Slot(base + 3 * q)))?;
            c.push(ParamGate::Ry(q, Angle::Slot(base + 3 * q + 1)))?;
            c.push(ParamGate::Rz(q, Angle::Slot(base + 3 * q + 2)))?;
        }
        c.push(ParamGate::Cnot { control: 0, target: 1 })?;
    }
    ZReadout::new(c, (0..QUBITS).collect())
}

impl Qfwp {
    pub fn new(config: ModelConfig) -> Result<Self> {
        if config.kind != ModelKind::Qfwp {
            return Err(invalid("QFWP built from a non-QFWP config"));
        }
        let layers = config.qfwp_layers;
        if layers == 0 {
            return Err(invalid("QFWP needs at least one fast layer"));
        }
        let mut rng = SeededRng::derived(config.seed, 1);
        let mut init = small_uniform(&mut rng);
        let mut params = Params::new();
        let slow = params.add("qfwp.slow.weight", Group::Core, layers + PER_LAYER, INPUT, &mut init);
        let post_w = params.add("qfwp.post.weight", Group::Core, 2, QUBITS, &mut init);
        let post_b = params.add("qfwp.post.bias", Group::Core, 2, 1, &mut init);
        let scale = params.add("qfwp.output_scale", Group::Core, 1, 1, || 1.0);
        Ok(Self {
            config,
            params,
            fast_circuit: fast_circuit(layers)?,
            slow,
            post_w,
            post_b,
            scale,
        })
    }

    pub fn fast_circuit(&self) -> &ZReadout {
        &self.fast_circuit
    }
}

impl MetaOptimizer for Qfwp {
    fn kind(&self) -> ModelKind {
        ModelKind::Qfwp
    }

    fn config(&self) -> &ModelConfig {
        &self.config
    }

    fn params(&self) -> &Params {
        &self.params
    }

    fn params_mut(&mut self) -> &mut Params {
        &mut self.params
    }

    fn initial_state(&self, tape: &mut Tape) -> RecurrentState {
        RecurrentState::zeros(tape, 0, self.config.qfwp_layers * PER_LAYER)
    }

    fn cell(&self, tape: &mut Tape, p: &[Var], state: &mut RecurrentState, x: [Var; 3]) -> Result<[Var; 2]> {
        let layers = self.config.qfwp_layers;
        let latent = tape.affine(&p[self.slow.clone()], &x, &[]);
        let (l, q) = latent.split_at(layers);
        for i in 0..layers {
            for j in 0..PER_LAYER {
                let u = tape.mul(l[i], q[j]);
                let k = i * PER_LAYER + j;
                state.fast[k] = tape.add(state.fast[k], u);
            }
        }
        let mut inputs: Vec<Var> = x.iter().map(|&xk| tape.atan(xk)).collect();
        inputs.extend_from_slice(&state.fast);
        let z = tape.apply(&self.fast_circuit, &inputs)?;
        let out = tape.affine(&p[self.post_w.clone()], &z, &[&p[self.post_b.clone()]]);
        let s = p[self.scale.start];
        Ok([tape.mul(s, out[0]), tape.mul(s, out[1])])
    }
}
