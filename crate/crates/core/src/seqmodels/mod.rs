//! Learned optimizers for the QAOA angles.
//!
//! Every model consumes `x_t = [γ_t, β_t, y_t]` plus its recurrent state and
//! emits an update `Δθ`; [`step`] applies it residually,
//! `θ_{t+1} = θ_t + Δθ`.

mod cell;
mod lstm;
mod params;
mod qfwp;
mod qklstm;
mod qlstm;

pub use cell::{gated_update, lstm_cell};
pub use lstm::Lstm;
pub use params::{Group, ParamReport, Params, TensorInfo};
pub use qfwp::Qfwp;
pub use qklstm::QkLstm;
pub use qlstm::Qlstm;

use alloc::vec::Vec;

use crate::error::Result;
use crate::gradkit::{Tape, Var};
use crate::rng::{Draw, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Lstm,
    Qlstm,
    QkLstm,
    Qfwp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::QkLstm, ModelKind::Lstm, ModelKind::Qlstm, ModelKind::Qfwp];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Lstm => "lstm",
            ModelKind::Qlstm => "qlstm",
            ModelKind::QkLstm => "qklstm",
            ModelKind::Qfwp => "qfwp",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Published trainable-parameter totals.
    pub fn reference_param_count(self) -> usize {
        match self {
            ModelKind::Lstm => 56,
            ModelKind::Qlstm => 43,
            ModelKind::QkLstm => 43,
            ModelKind::Qfwp => 31,
        }
    }
}

/// Architecture choices for every model kind; only the fields of `kind`
/// are read.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub seed: u64,
    /// QLSTM: qubits per VQC (also the hidden size).
    pub qlstm_qubits: usize,
    /// QLSTM: variational layers per VQC.
    pub qlstm_layers: usize,
    /// QK-LSTM: number of anchor vectors.
    pub qk_anchors: usize,
    /// QK-LSTM: one encoding-scale vector per gate instead of a shared one.
    pub qk_per_gate_kernel: bool,
    /// QK-LSTM: make the anchors trainable.
    pub qk_train_anchors: bool,
    pub qk_kernel_reps: usize,
    /// QFWP: fast-circuit layers.
    pub qfwp_layers: usize,
}

impl ModelConfig {
    pub fn new(kind: ModelKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            qlstm_qubits: 4,
            qlstm_layers: 2,
            qk_anchors: 8,
            qk_per_gate_kernel: false,
            qk_train_anchors: false,
            qk_kernel_reps: 1,
            qfwp_layers: 2,
        }
    }
}

/// Per-rollout memory. LSTM-family models use `h`/`c`; QFWP keeps its fast
/// weights in `fast`.
#[derive(Debug, Clone, Default)]
pub struct RecurrentState {
    pub h: Vec<Var>,
    pub c: Vec<Var>,
    pub fast: Vec<Var>,
}

impl RecurrentState {
    pub fn zeros(tape: &mut Tape, hidden: usize, fast: usize) -> Self {
        Self {
            h: (0..hidden).map(|_| tape.leaf(0.0)).collect(),
            c: (0..hidden).map(|_| tape.leaf(0.0)).collect(),
            fast: (0..fast).map(|_| tape.leaf(0.0)).collect(),
        }
    }
}

/// A sequence model that proposes QAOA angle updates.
pub trait MetaOptimizer {
    fn kind(&self) -> ModelKind;
    fn config(&self) -> &ModelConfig;
    fn params(&self) -> &Params;
    fn params_mut(&mut self) -> &mut Params;

    /// Fresh recurrent state for a new rollout.
    fn initial_state(&self, tape: &mut Tape) -> RecurrentState;

    /// One cell evaluation; `p` are the tape leaves of [`params`](Self::params)
    /// in storage order. Returns `Δθ`.
    fn cell(&self, tape: &mut Tape, p: &[Var], state: &mut RecurrentState, x: [Var; 3]) -> Result<[Var; 2]>;

    fn param_report(&self) -> ParamReport {
        ParamReport::new(self.kind(), self.params())
    }
}

/// `θ_{t+1} = θ_t + Model(state, [θ_t, y_t])`.
pub fn step<M: MetaOptimizer + ?Sized>(
    model: &M,
    tape: &mut Tape,
    p: &[Var],
    state: &mut RecurrentState,
    theta: [Var; 2],
    y: Var,
) -> Result<[Var; 2]> {
    let delta = model.cell(tape, p, state, [theta[0], theta[1], y])?;
    Ok([tape.add(theta[0], delta[0]), tape.add(theta[1], delta[1])])
}

/// Uniform(−0.1, 0.1) initializer on a derived stream.
pub(crate) fn small_uniform(rng: &mut SeededRng) -> impl FnMut() -> f64 + '_ {
    move || rng.uniform(-0.1, 0.1)
}

/// Any of the four models, for code that picks the kind at runtime.
#[derive(Debug, Clone)]
pub enum AnyModel {
    Lstm(Lstm),
    Qlstm(Qlstm),
    QkLstm(QkLstm),
    Qfwp(Qfwp),
}

impl AnyModel {
    pub fn new(config: &ModelConfig) -> Result<Self> {
        Ok(match config.kind {
            ModelKind::Lstm => AnyModel::Lstm(Lstm::new(config.clone())?),
            ModelKind::Qlstm => AnyModel::Qlstm(Qlstm::new(config.clone())?),
            ModelKind::QkLstm => AnyModel::QkLstm(QkLstm::new(config.clone())?),
            ModelKind::Qfwp => AnyModel::Qfwp(Qfwp::new(config.clone())?),
        })
    }

    fn inner(&self) -> &dyn MetaOptimizer {
        match self {
            AnyModel::Lstm(m) => m,
            AnyModel::Qlstm(m) => m,
            AnyModel::QkLstm(m) => m,
            AnyModel::Qfwp(m) => m,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn MetaOptimizer {
        match self {
            AnyModel::Lstm(m) => m,
            AnyModel::Qlstm(m) => m,
            AnyModel::QkLstm(m) => m,
            AnyModel::Qfwp(m) => m,
        }
    }

    /// Sets every parameter to zero (frozen tensors included).
    pub fn zero_params(&mut self) {
        self.params_mut().values_mut().iter_mut().for_each(|v| *v = 0.0);
    }
}

impl MetaOptimizer for AnyModel {
    fn kind(&self) -> ModelKind {
        self.inner().kind()
    }

    fn config(&self) -> &ModelConfig {
        self.inner().config()
    }

    fn params(&self) -> &Params {
        self.inner().params()
    }

    fn params_mut(&mut self) -> &mut Params {
        self.inner_mut().params_mut()
    }

    fn initial_state(&self, tape: &mut Tape) -> RecurrentState {
        self.inner().initial_state(tape)
    }

    fn cell(&self, tape: &mut Tape, p: &[Var], state: &mut RecurrentState, x: [Var; 3]) -> Result<[Var; 2]> {
        self.inner().cell(tape, p, state, x)
    }
}
