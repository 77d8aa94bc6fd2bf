//! Meta-training: rollouts of a sequence model on QAOA instances, the
//! time-weighted meta-loss, and the RMSprop/BPTT training loop.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::gradkit::{clip_global_norm, RmsProp, Tape, Var};
use crate::graphlab::Instance;
use crate::qsim::{CostTable, QaoaCostNode};
use crate::rng::{Draw, SeededRng};
use crate::seqmodels::{step, Group, MetaOptimizer};

/// How the cost input `y_t = −⟨H_C⟩(θ_t) / |E|` enters the tape.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum CostInput {
    /// Recomputed every step and treated as a constant.
    #[default]
    Detached,
    /// Recomputed every step with gradient flowing through it.
    Attached,
    /// Replayed from a recorded sequence (one value per step).
    Replay(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RolloutStep {
    pub theta: [f64; 2],
    pub expected_cut: f64,
}

/// Result of one `T`-step rollout from `θ_0 = (0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    pub loss: f64,
    /// `∂loss/∂params` in storage order (zero for frozen tensors); empty when
    /// gradients were not requested.
    pub grad: Vec<f64>,
    /// `θ_1 … θ_T`.
    pub steps: Vec<RolloutStep>,
    /// The `y_t` fed to the model at steps `1 … T`.
    pub cost_inputs: Vec<f64>,
}

/// Weight of step `t` in the meta-loss.
pub fn step_weight(t: usize) -> f64 {
    0.1 * t as f64
}

/// Runs `horizon` model steps and evaluates
/// `Σ_{t=1..T} 0.1·t·f(θ_t)` with `f = −⟨H_C⟩`.
pub fn rollout<M: MetaOptimizer + ?Sized>(
    model: &M,
    table: &CostTable,
    horizon: usize,
    input: &CostInput,
    with_grad: bool,
) -> Result<Rollout> {
    if horizon == 0 {
        return Err(invalid("rollout horizon must be at least 1"));
    }
    if let CostInput::Replay(ys) = input {
        if ys.len() != horizon {
            return Err(invalid("replayed cost inputs must match the horizon"));
        }
    }
    let edges = table.num_edges().max(1) as f64;
    let mut tape = if with_grad { Tape::new() } else { Tape::without_grad() };
    let p = tape.leaves(model.params().values());
    let mut state = model.initial_state(&mut tape);
    let mut theta = [tape.leaf(0.0), tape.leaf(0.0)];
    let node = QaoaCostNode(table);

    let mut prev_cost: Option<Var> = None;
    let mut prev_value = table.cost([0.0, 0.0]);
    let mut costs = Vec::with_capacity(horizon);
    let mut steps = Vec::with_capacity(horizon);
    let mut cost_inputs = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let y = match (input, prev_cost) {
            (CostInput::Replay(ys), _) => tape.leaf(ys[t - 1]),
            (CostInput::Attached, Some(c)) => tape.scale(c, -1.0 / edges),
            _ => tape.leaf(-prev_value / edges),
        };
        cost_inputs.push(tape.value(y));
        theta = step(model, &mut tape, &p, &mut state, theta, y)?;
        let c = tape.apply(&node, &theta)?[0];
        prev_value = tape.value(c);
        prev_cost = Some(c);
        costs.push(c);
        steps.push(RolloutStep {
            theta: [tape.value(theta[0]), tape.value(theta[1])],
            expected_cut: prev_value,
        });
    }
    let coeffs: Vec<f64> = (1..=horizon).map(|t| -step_weight(t)).collect();
    let loss = tape.weighted_sum(&costs, &coeffs);
    let grad = if with_grad {
        let mut g = tape.grad(loss).wrt(&p);
        for (gi, group) in g.iter_mut().zip(model.params().group_of_each()) {
            if group == Group::Frozen {
                *gi = 0.0;
            }
        }
        g
    } else {
        Vec::new()
    };
    Ok(Rollout { loss: tape.value(loss), grad, steps, cost_inputs })
}

/// Meta-loss and trajectory without gradients.
pub fn rollout_loss<M: MetaOptimizer + ?Sized>(
    model: &M,
    table: &CostTable,
    horizon: usize,
) -> Result<(f64, Vec<RolloutStep>)> {
    let r = rollout(model, table, horizon, &CostInput::Detached, false)?;
    Ok((r.loss, r.steps))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub horizon: usize,
    pub lr_core: f64,
    pub lr_fc: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub rms_alpha: f64,
    pub rms_eps: f64,
    /// Rescale batch gradients to at most this global L2 norm.
    pub clip_norm: Option<f64>,
    /// Stop after this many epochs without a lower mean meta-loss.
    pub patience: Option<usize>,
    /// Let gradients flow through the `y_t` input.
    pub cost_input_gradient: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            horizon: 10,
            lr_core: 6e-6,
            lr_fc: 1e-4,
            batch_size: 32,
            seed: 0,
            rms_alpha: RmsProp::DEFAULT_ALPHA,
            rms_eps: RmsProp::DEFAULT_EPS,
            clip_norm: None,
            patience: None,
            cost_input_gradient: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.horizon == 0 || self.batch_size == 0 {
            return Err(invalid("epochs, horizon and batch size must be at least 1"));
        }
        if !(self.lr_core > 0.0) || !(self.lr_fc > 0.0) {
            return Err(invalid("learning rates must be positive"));
        }
        Ok(())
    }

    fn cost_input(&self) -> CostInput {
        if self.cost_input_gradient {
            CostInput::Attached
        } else {
            CostInput::Detached
        }
    }
}

/// Evaluates the rollouts of one batch. Implementations may run them in
/// parallel but must return results in input order.
pub trait BatchEvaluator {
    fn rollouts<M: MetaOptimizer + Sync>(
        &self,
        model: &M,
        tables: &[&CostTable],
        horizon: usize,
        input: &CostInput,
    ) -> Vec<Result<Rollout>>;
}

/// Runs every rollout on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct SerialEvaluator;

impl BatchEvaluator for SerialEvaluator {
    fn rollouts<M: MetaOptimizer + Sync>(
        &self,
        model: &M,
        tables: &[&CostTable],
        horizon: usize,
        input: &CostInput,
    ) -> Vec<Result<Rollout>> {
        tables
            .iter()
            .map(|t| rollout(model, t, horizon, input, true))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    /// 1-based.
    pub epoch: usize,
    pub mean_loss: f64,
    pub batches: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainLog {
    pub epochs: Vec<EpochStats>,
    pub stopped_early: bool,
}

/// Optimizer group index for each parameter: core → 0, fc_head → 1.
fn lr_groups(groups: &[Group]) -> Vec<usize> {
    groups
        .iter()
        .map(|g| usize::from(*g == Group::FcHead))
        .collect()
}

/// Meta-trains `model` in place.
///
/// Each epoch shuffles the dataset with a stream derived from `cfg.seed`,
/// splits it into batches, averages the rollout gradients of a batch in
/// dataset order, and takes one RMSprop step. `on_epoch` sees the model after
/// every epoch and may return `false` to stop.
pub fn train<M, E, F>(
    model: &mut M,
    data: &[Instance],
    cfg: &TrainConfig,
    evaluator: &E,
    mut on_epoch: F,
) -> Result<TrainLog>
where
    M: MetaOptimizer + Sync,
    E: BatchEvaluator,
    F: FnMut(&EpochStats, &M) -> bool,
{
    cfg.validate()?;
    if data.is_empty() {
        return Err(invalid("training dataset is empty"));
    }
    let tables = data
        .iter()
        .map(|inst| CostTable::new(&inst.graph))
        .collect::<Result<Vec<_>>>()?;
    let groups = model.params().group_of_each();
    let mut opt = RmsProp::new(
        lr_groups(&groups),
        vec![cfg.lr_core, cfg.lr_fc],
        cfg.rms_alpha,
        cfg.rms_eps,
    )?;
    let mut rng = SeededRng::derived(cfg.seed, 2);
    let input = cfg.cost_input();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut log = TrainLog::default();
    let mut best = f64::INFINITY;
    let mut since_best = 0usize;

    for epoch in 1..=cfg.epochs {
        rng.shuffle(&mut order);
        let mut loss_sum = 0.0;
        let mut batches = 0;
        for (b, batch) in order.chunks(cfg.batch_size).enumerate() {
            let batch_tables: Vec<&CostTable> = batch.iter().map(|&i| &tables[i]).collect();
            let results = evaluator.rollouts(&*model, &batch_tables, cfg.horizon, &input);
            let mut grad = vec![0.0; groups.len()];
            for (&i, r) in batch.iter().zip(results) {
                let r = r?;
                if !r.loss.is_finite() || r.grad.iter().any(|g| !g.is_finite()) {
                    return Err(Error::NonFinite {
                        epoch,
                        batch: b,
                        graph: data[i].id.clone(),
                    });
                }
                loss_sum += r.loss;
                for (acc, g) in grad.iter_mut().zip(&r.grad) {
                    *acc += g;
                }
            }
            let scale = 1.0 / batch.len() as f64;
            grad.iter_mut().for_each(|g| *g *= scale);
            if let Some(max) = cfg.clip_norm {
                clip_global_norm(&mut grad, max);
            }
            opt.step(model.params_mut().values_mut(), &grad)?;
            batches += 1;
        }
        let stats = EpochStats {
            epoch,
            mean_loss: loss_sum / data.len() as f64,
            batches,
        };
        log.epochs.push(stats);
        if !on_epoch(&stats, model) {
            log.stopped_early = true;
            break;
        }
        if stats.mean_loss < best {
            best = stats.mean_loss;
            since_best = 0;
        } else {
            since_best += 1;
        }
        if cfg.patience.is_some_and(|p| since_best >= p) {
            log.stopped_early = true;
            break;
        }
    }
    Ok(log)
}
