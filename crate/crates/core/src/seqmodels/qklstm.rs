use alloc::vec::Vec;
use core::ops::Range;

use super::{gated_update, small_uniform, Group, MetaOptimizer, ModelConfig, ModelKind, Params, RecurrentState};
use crate::error::{invalid, Result};
use crate::gradkit::{Tape, Var};
use crate::qsim::{FidelityNode, KernelCircuit};
use crate::rng::{Draw, SeededRng};

const INPUT: usize = 3;
const HIDDEN: usize = 1;
const FEATURES: usize = HIDDEN + INPUT;

/// QK-LSTM with a scalar cell.
///
/// Each gate pre-activation is `Σ_j β_j κ(v_t, a_j)` over anchor vectors
/// `a_j`, where `κ` is the fidelity kernel of the encoding circuit with
/// elementwise scales `w` (angle `w_k v_k` on qubit `k`). By default all four
/// gates share one `w`; `qk_per_gate_kernel` gives each gate its own.
#[derive(Debug, Clone)]
pub struct QkLstm {
    config: ModelConfig,
    params: Params,
    kernel: FidelityNode,
    beta: Range<usize>,
    scales: Range<usize>,
    anchors: Range<usize>,
    fc_w: Range<usize>,
    fc_b: Range<usize>,
}

impl QkLstm {
    pub fn new(config: ModelConfig) -> Result<Self> {
        if config.kind != ModelKind::QkLstm {
            return Err(invalid("QK-LSTM built from a non-QK-LSTM config"));
        }
        if config.qk_anchors == 0 || config.qk_kernel_reps == 0 {
            return Err(invalid("QK-LSTM needs at least one anchor and one encoding repetition"));
        }
        let kernel = FidelityNode::new(&KernelCircuit { n_qubits: FEATURES, reps: config.qk_kernel_reps })?;
        let n = config.qk_anchors;
        let mut rng = SeededRng::derived(config.seed, 1);
        let mut anchor_rng = SeededRng::derived(config.seed, 3);
        let mut init = small_uniform(&mut rng);
        let mut params = Params::new();
        let beta = params.add("qklstm.beta", Group::Core, 4, n, &mut init);
        let kernels = if config.qk_per_gate_kernel { 4 } else { 1 };
        let scales = params.add("qklstm.encoding_scale", Group::Core, kernels, FEATURES, || 1.0);
        let anchor_group = if config.qk_train_anchors { Group::Core } else { Group::Frozen };
        let anchors = params.add("qklstm.anchors", anchor_group, n, FEATURES, || anchor_rng.normal());
        let fc_w = params.add("qklstm.fc.weight", Group::FcHead, 2, HIDDEN, &mut init);
        let fc_b = params.add("qklstm.fc.bias", Group::FcHead, 2, 1, &mut init);
        Ok(Self { config, params, kernel, beta, scales, anchors, fc_w, fc_b })
    }

    pub fn kernel(&self) -> &FidelityNode {
        &self.kernel
    }

    /// Kernel row `κ(v, a_j)` for every anchor under scale vector `w`.
    fn kernel_row(&self, tape: &mut Tape, v: &[Var], w: &[Var], anchors: &[Var]) -> Result<Vec<Var>> {
        let a_angles = tape.hadamard(w, v);
        anchors
            .chunks(FEATURES)
            .map(|anchor| {
                let b_angles = tape.hadamard(w, anchor);
                let inputs = Tape::concat(&a_angles, &b_angles);
                Ok(tape.apply(&self.kernel, &inputs)?[0])
            })
            .collect()
    }
}

impl MetaOptimizer for QkLstm {
    fn kind(&self) -> ModelKind {
        ModelKind::QkLstm
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
        RecurrentState::zeros(tape, HIDDEN, 0)
    }

    fn cell(&self, tape: &mut Tape, p: &[Var], state: &mut RecurrentState, x: [Var; 3]) -> Result<[Var; 2]> {
        let v = Tape::concat(&state.h, &x);
        let anchors = &p[self.anchors.clone()];
        let scales = &p[self.scales.clone()];
        let n = self.config.qk_anchors;
        let beta = &p[self.beta.clone()];

        let shared = if self.config.qk_per_gate_kernel {
            None
        } else {
            Some(self.kernel_row(tape, &v, scales, anchors)?)
        };
        let mut pre = Vec::with_capacity(4);
        for g in 0..4 {
            let row = match &shared {
                Some(r) => r.clone(),
                None => self.kernel_row(tape, &v, &scales[g * FEATURES..(g + 1) * FEATURES], anchors)?,
            };
            pre.push(tape.dot(&beta[g * n..(g + 1) * n], &row));
        }
        let (h, c) = gated_update(tape, &pre[0..1], &pre[1..2], &pre[2..3], &pre[3..4], &state.c);
        state.h = h;
        state.c = c;
        let out = tape.affine(&p[self.fc_w.clone()], &state.h, &[&p[self.fc_b.clone()]]);
        Ok([out[0], out[1]])
    }
}
