use alloc::vec::Vec;
use core::ops::Range;

use super::{gated_update, small_uniform, Group, MetaOptimizer, ModelConfig, ModelKind, Params, RecurrentState};
use crate::error::{invalid, Result};
use crate::gradkit::{Tape, Var};
use crate::qsim::{Angle, ParamCircuit, ParamGate, ZReadout};
use crate::rng::SeededRng;

const INPUT: usize = 3;
const GATES: [&str; 4] = ["forget", "input", "cell", "output"];

/// Builds the gate VQC: angle encoding of `v_t` followed by variational
/// layers.
///
/// Feature `k` goes to qubit `k mod Q`; the first pass over the register uses
/// `RY`, the second `RZ`, alternating after that. Slots `0..F` hold the
/// encoded features, the remaining `L·Q` slots the variational `RY` angles.
/// Each layer ends with a CNOT ring `0→1→…→Q−1→0`.
pub(crate) fn gate_vqc(qubits: usize, features: usize, layers: usize) -> Result<ZReadout> {
    let mut c = ParamCircuit::new(qubits, features + layers * qubits)?;
    for k in 0..features {
        let q = k % qubits;
        let g = if (k / qubits) % 2 == 0 {
            ParamGate::Ry(q, Angle::Slot(k))
        } else {
            ParamGate::Rz(q, Angle::Slot(k))
        };
        c.push(g)?;
    }
    for l in 0..layers {
        for q in 0..qubits {
            c.push(ParamGate::Ry(q, Angle::Slot(features + l * qubits + q)))?;
        }
        if qubits > 1 {
            for q in 0..qubits {
                c.push(ParamGate::Cnot { control: q, target: (q + 1) % qubits })?;
            }
        }
    }
    ZReadout::new(c, (0..qubits).collect())
}

/// QLSTM: each LSTM gate's pre-activation is the Z readout of its own VQC
/// on `[h_{t−1}; x_t]`; a linear head maps `h_t` to `Δθ`.
#[derive(Debug, Clone)]
pub struct Qlstm {
    config: ModelConfig,
    params: Params,
    vqc: ZReadout,
    gate_weights: [Range<usize>; 4],
    fc_w: Range<usize>,
    fc_b: Range<usize>,
}

impl Qlstm {
    pub fn new(config: ModelConfig) -> Result<Self> {
        if config.kind != ModelKind::Qlstm {
            return Err(invalid("QLSTM built from a non-QLSTM config"));
        }
        let q = config.qlstm_qubits;
        let layers = config.qlstm_layers;
        if q == 0 || layers == 0 {
            return Err(invalid("QLSTM needs at least one qubit and one layer"));
        }
        let vqc = gate_vqc(q, q + INPUT, layers)?;
        let mut rng = SeededRng::derived(config.seed, 1);
        let mut init = small_uniform(&mut rng);
        let mut params = Params::new();
        let gate_weights = GATES.map(|g| {
            params.add(&alloc::format!("qlstm.vqc_{g}"), Group::Core, layers, q, &mut init)
        });
        let fc_w = params.add("qlstm.fc.weight", Group::FcHead, 2, q, &mut init);
        let fc_b = params.add("qlstm.fc.bias", Group::FcHead, 2, 1, &mut init);
        Ok(Self { config, params, vqc, gate_weights, fc_w, fc_b })
    }

    pub fn vqc(&self) -> &ZReadout {
        &self.vqc
    }
}

impl MetaOptimizer for Qlstm {
    fn kind(&self) -> ModelKind {
        ModelKind::Qlstm
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
        RecurrentState::zeros(tape, self.config.qlstm_qubits, 0)
    }

    fn cell(&self, tape: &mut Tape, p: &[Var], state: &mut RecurrentState, x: [Var; 3]) -> Result<[Var; 2]> {
        let v = Tape::concat(&state.h, &x);
        let encoded: Vec<Var> = v.iter().map(|&vk| tape.atan(vk)).collect();
        let mut pre: Vec<Vec<Var>> = Vec::with_capacity(4);
        for w in &self.gate_weights {
            let inputs = Tape::concat(&encoded, &p[w.clone()]);
            pre.push(tape.apply(&self.vqc, &inputs)?);
        }
        let (h, c) = gated_update(tape, &pre[0], &pre[1], &pre[2], &pre[3], &state.c);
        state.h = h;
        state.c = c;
        let out = tape.affine(&p[self.fc_w.clone()], &state.h, &[&p[self.fc_b.clone()]]);
        Ok([out[0], out[1]])
    }
}
