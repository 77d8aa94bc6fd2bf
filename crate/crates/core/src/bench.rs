//! Two-phase evaluation, the random-seed baseline, and the reported metrics.
//!
//! Phase I runs a trained model for `T` steps from `θ_0 = (0, 0)`; Phase II
//! continues from `θ_T` with fixed-rate gradient ascent on the expected cut.
//! The baseline runs the same Phase II loop from a random angle pair.
//! Iterations are numbered from 1 across both phases.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::graphlab::Instance;
use crate::math;
use crate::metaloop::{rollout, CostInput};
use crate::qsim::CostTable;
use crate::rng::{Draw, SeededRng};
use crate::seqmodels::MetaOptimizer;

pub const PHASE1_STEPS: usize = 10;
pub const DEFAULT_TOTAL_ITERATIONS: usize = 300;
pub const DEFAULT_SGD_LR: f64 = 1e-3;
pub const CONVERGENCE_TOL: f64 = 1e-4;
pub const BASELINE_NAME: &str = "random";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Model,
    Sgd,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Model => "model",
            Phase::Sgd => "sgd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub iteration: usize,
    pub theta: [f64; 2],
    pub expected_cut: f64,
    pub approx_ratio: f64,
    pub relative_error: f64,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub graph_id: String,
    pub n: usize,
    pub model: String,
    pub records: Vec<Record>,
}

/// `⟨H_C⟩ / c_max`.
pub fn approx_ratio_of(expected_cut: f64, c_max: u32) -> f64 {
    expected_cut / c_max as f64
}

/// `(f − f_min) / |f_min|` with `f = −⟨H_C⟩` and `f_min = −c_max`, which is
/// `1 − ⟨H_C⟩ / c_max`.
pub fn relative_error_of(expected_cut: f64, c_max: u32) -> f64 {
    1.0 - approx_ratio_of(expected_cut, c_max)
}

pub fn approx_ratio(table: &CostTable, c_max: u32, theta: [f64; 2]) -> f64 {
    approx_ratio_of(table.cost(theta), c_max)
}

pub fn relative_error(table: &CostTable, c_max: u32, theta: [f64; 2]) -> f64 {
    relative_error_of(table.cost(theta), c_max)
}

fn record(iteration: usize, theta: [f64; 2], expected_cut: f64, c_max: u32, phase: Phase) -> Record {
    let approx_ratio = approx_ratio_of(expected_cut, c_max);
    Record {
        iteration,
        theta,
        expected_cut,
        approx_ratio,
        relative_error: 1.0 - approx_ratio,
        phase,
    }
}

/// `horizon` model proposals `θ_1 … θ_T` from the origin.
pub fn phase1<M: MetaOptimizer + ?Sized>(
    model: &M,
    table: &CostTable,
    c_max: u32,
    horizon: usize,
) -> Result<Vec<Record>> {
    let r = rollout(model, table, horizon, &CostInput::Detached, false)?;
    Ok(r.steps
        .iter()
        .enumerate()
        .map(|(i, s)| record(i + 1, s.theta, s.expected_cut, c_max, Phase::Model))
        .collect())
}

/// `iterations` steps of `θ ← θ − lr ∇f` with `f = −⟨H_C⟩`, numbered from
/// `first_iteration`.
pub fn phase2(
    table: &CostTable,
    c_max: u32,
    seed: [f64; 2],
    iterations: usize,
    lr: f64,
    first_iteration: usize,
) -> Vec<Record> {
    let mut theta = seed;
    let mut out = Vec::with_capacity(iterations);
    let (_, mut grad) = table.cost_and_grad(theta);
    for j in 0..iterations {
        // Loss gradient is −∇⟨H_C⟩.
        theta[0] += lr * grad[0];
        theta[1] += lr * grad[1];
        let (cost, g) = table.cost_and_grad(theta);
        grad = g;
        out.push(record(first_iteration + j, theta, cost, c_max, Phase::Sgd));
    }
    out
}

/// `γ ~ U[0, 2π)`, `β ~ U[0, π)`.
pub fn random_seed_theta<R: Draw + ?Sized>(rng: &mut R) -> [f64; 2] {
    let gamma = rng.uniform(0.0, 2.0 * PI);
    let beta = rng.uniform(0.0, PI);
    [gamma, beta]
}

pub fn baseline_random<R: Draw + ?Sized>(
    table: &CostTable,
    c_max: u32,
    iterations: usize,
    lr: f64,
    rng: &mut R,
) -> Vec<Record> {
    let seed = random_seed_theta(rng);
    phase2(table, c_max, seed, iterations, lr, 1)
}

/// Per-graph baseline stream, so results do not depend on evaluation order.
pub fn baseline_rng(seed: u64, graph_index: usize) -> SeededRng {
    SeededRng::derived(seed, 1_000_000 + graph_index as u64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub total_iterations: usize,
    pub horizon: usize,
    pub lr: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            total_iterations: DEFAULT_TOTAL_ITERATIONS,
            horizon: PHASE1_STEPS,
            lr: DEFAULT_SGD_LR,
        }
    }
}

/// Phase I followed by Phase II up to `total_iterations` records.
pub fn evaluate_seeded<M: MetaOptimizer + ?Sized>(
    model: &M,
    model_name: &str,
    inst: &Instance,
    table: &CostTable,
    cfg: &EvalConfig,
) -> Result<Trajectory> {
    if cfg.total_iterations < cfg.horizon {
        return Err(invalid("total iterations must cover the model phase"));
    }
    let mut records = phase1(model, table, inst.c_max(), cfg.horizon)?;
    let seed = records.last().map(|r| r.theta).unwrap_or([0.0, 0.0]);
    records.extend(phase2(
        table,
        inst.c_max(),
        seed,
        cfg.total_iterations - cfg.horizon,
        cfg.lr,
        cfg.horizon + 1,
    ));
    Ok(Trajectory {
        graph_id: inst.id.clone(),
        n: inst.graph.n(),
        model: model_name.into(),
        records,
    })
}

pub fn evaluate_baseline<R: Draw + ?Sized>(
    inst: &Instance,
    table: &CostTable,
    cfg: &EvalConfig,
    rng: &mut R,
) -> Trajectory {
    Trajectory {
        graph_id: inst.id.clone(),
        n: inst.graph.n(),
        model: BASELINE_NAME.into(),
        records: baseline_random(table, inst.c_max(), cfg.total_iterations, cfg.lr, rng),
    }
}

/// Mean relative error per iteration over a set of instances.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurve {
    pub mean: Vec<f64>,
    /// `1.96 · std / √N` with the population standard deviation.
    pub ci_half_width: Vec<f64>,
    pub phases: Vec<Phase>,
    pub n_test: usize,
}

/// Population mean and standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, math::sqrt(var))
}

impl AggregateCurve {
    pub fn from_trajectories(trajs: &[&Trajectory]) -> Result<Self> {
        let first = trajs.first().ok_or_else(|| invalid("no trajectories to aggregate"))?;
        let len = first.records.len();
        if trajs.iter().any(|t| t.records.len() != len) {
            return Err(invalid("trajectories differ in length"));
        }
        let n = trajs.len();
        let mut mean = Vec::with_capacity(len);
        let mut ci = Vec::with_capacity(len);
        let mut column = Vec::with_capacity(n);
        for j in 0..len {
            column.clear();
            column.extend(trajs.iter().map(|t| t.records[j].relative_error));
            let (m, s) = mean_std(&column);
            mean.push(m);
            ci.push(1.96 * s / math::sqrt(n as f64));
        }
        Ok(Self {
            mean,
            ci_half_width: ci,
            phases: first.records.iter().map(|r| r.phase).collect(),
            n_test: n,
        })
    }
}

/// Smallest 1-based `j` with `|curve(j+1) − curve(j)| ≤ eps`, or the curve
/// length if no step is that small.
pub fn convergence_iteration(curve: &[f64], eps: f64) -> Result<usize> {
    if curve.len() < 2 {
        return Err(invalid("convergence needs a curve of at least two points"));
    }
    Ok(curve
        .windows(2)
        .position(|w| (w[1] - w[0]).abs() <= eps)
        .map_or(curve.len(), |i| i + 1))
}

/// Mean over instances of each instance's own convergence iteration.
pub fn mean_instance_convergence(trajs: &[&Trajectory], eps: f64) -> Result<f64> {
    let mut total = 0.0;
    for t in trajs {
        let curve: Vec<f64> = t.records.iter().map(|r| r.relative_error).collect();
        total += convergence_iteration(&curve, eps)? as f64;
    }
    Ok(total / trajs.len().max(1) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioStat {
    pub label: &'static str,
    pub iteration: usize,
    pub mean: f64,
    pub std: f64,
}

/// Approximation-ratio mean and std at a 1-based iteration.
pub fn ratio_at(trajs: &[&Trajectory], iteration: usize) -> Result<(f64, f64)> {
    let ratios = trajs
        .iter()
        .map(|t| {
            t.records
                .get(iteration.wrapping_sub(1))
                .map(|r| r.approx_ratio)
                .ok_or_else(|| invalid("iteration beyond trajectory length"))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean_std(&ratios))
}

/// All statistics for one (model, n) series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSummary {
    pub model: String,
    pub n: usize,
    pub curve: AggregateCurve,
    pub convergence_iteration: usize,
    pub mean_instance_convergence: f64,
    pub ratios: Vec<RatioStat>,
}

/// Ratio checkpoints: end of Phase I, ten steps into Phase II, and the end.
pub fn ratio_checkpoints(cfg: &EvalConfig) -> Vec<(&'static str, usize)> {
    let mut v = alloc::vec![("phase1", cfg.horizon)];
    if cfg.total_iterations >= cfg.horizon + 10 {
        v.push(("phase2", cfg.horizon + 10));
    }
    v.push(("final", cfg.total_iterations));
    v
}

/// Groups trajectories by (n, model); sizes ascend, models keep their first
/// appearance order.
pub fn summarize(trajs: &[Trajectory], cfg: &EvalConfig, eps: f64) -> Result<Vec<SeriesSummary>> {
    let mut sizes: Vec<usize> = trajs.iter().map(|t| t.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut models: Vec<&str> = Vec::new();
    for t in trajs {
        if !models.contains(&t.model.as_str()) {
            models.push(&t.model);
        }
    }
    let checkpoints = ratio_checkpoints(cfg);
    let mut out = Vec::new();
    for &n in &sizes {
        for &m in &models {
            let group: Vec<&Trajectory> = trajs.iter().filter(|t| t.n == n && t.model == m).collect();
            if group.is_empty() {
                continue;
            }
            let curve = AggregateCurve::from_trajectories(&group)?;
            let ratios = checkpoints
                .iter()
                .map(|&(label, it)| {
                    let (mean, std) = ratio_at(&group, it)?;
                    Ok(RatioStat { label, iteration: it, mean, std })
                })
                .collect::<Result<Vec<_>>>()?;
            out.push(SeriesSummary {
                model: m.into(),
                n,
                convergence_iteration: convergence_iteration(&curve.mean, eps)?,
                mean_instance_convergence: mean_instance_convergence(&group, eps)?,
                curve,
                ratios,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphlab::Graph;
    use crate::seqmodels::{AnyModel, ModelConfig, ModelKind};
    use alloc::vec;

    #[test]
    fn convergence_examples() {
        assert_eq!(convergence_iteration(&[0.5; 6], 1e-4).unwrap(), 1);
        let c = [1.0, 0.999, 0.998, 0.99795, 0.99];
        assert_eq!(convergence_iteration(&c, 1e-4).unwrap(), 3);
        assert_eq!(convergence_iteration(&[1.0, 0.5, 0.0], 1e-4).unwrap(), 3);
        assert!(convergence_iteration(&[1.0], 1e-4).is_err());
    }

    #[test]
    fn k4_origin_ratio() {
        let t = CostTable::new(&Graph::complete(4).unwrap()).unwrap();
        assert!((approx_ratio(&t, 4, [0.0, 0.0]) - 0.75).abs() < 1e-12);
        assert!((relative_error(&t, 4, [0.0, 0.0]) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn zero_model_phase1_is_flat() {
        let g = Graph::cycle(6).unwrap();
        let t = CostTable::new(&g).unwrap();
        let mut m = AnyModel::new(&ModelConfig::new(ModelKind::Lstm, 1)).unwrap();
        m.zero_params();
        let recs = phase1(&m, &t, 6, 10).unwrap();
        assert_eq!(recs.len(), 10);
        assert!(recs.iter().all(|r| (r.expected_cut - 3.0).abs() < 1e-12));
        assert!(recs.iter().all(|r| r.phase == Phase::Model));
        assert_eq!(recs[9].iteration, 10);
    }

    #[test]
    fn stationary_seed_stays_put() {
        let t = CostTable::new(&Graph::complete(3).unwrap()).unwrap();
        let recs = phase2(&t, 2, [0.0, 0.0], 20, 1e-3, 11);
        assert!(recs.iter().all(|r| r.theta == [0.0, 0.0]));
        assert_eq!(recs[0].iteration, 11);
    }

    #[test]
    fn baseline_is_reproducible() {
        let t = CostTable::new(&Graph::cycle(5).unwrap()).unwrap();
        let a = baseline_random(&t, 4, 30, 1e-3, &mut SeededRng::new(8));
        let b = baseline_random(&t, 4, 30, 1e-3, &mut SeededRng::new(8));
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.phase == Phase::Sgd));
    }

    #[test]
    fn seeded_trajectory_layout() {
        let g = Graph::cycle(6).unwrap();
        let inst = Instance::new("c6".into(), 3, g).unwrap();
        let t = CostTable::new(&inst.graph).unwrap();
        let m = AnyModel::new(&ModelConfig::new(ModelKind::Lstm, 3)).unwrap();
        let traj = evaluate_seeded(&m, "lstm", &inst, &t, &EvalConfig::default()).unwrap();
        assert_eq!(traj.records.len(), 300);
        let iters: Vec<usize> = traj.records.iter().map(|r| r.iteration).collect();
        assert_eq!(iters, (1..=300).collect::<Vec<_>>());
        let switches = traj.records.windows(2).filter(|w| w[0].phase != w[1].phase).count();
        assert_eq!(switches, 1);
        assert_eq!(traj.records[9].phase, Phase::Model);
        assert_eq!(traj.records[10].phase, Phase::Sgd);
    }

    #[test]
    fn aggregate_mean_and_ci() {
        let mk = |errs: &[f64]| Trajectory {
            graph_id: "g".into(),
            n: 4,
            model: "m".into(),
            records: errs
                .iter()
                .enumerate()
                .map(|(i, &e)| Record {
                    iteration: i + 1,
                    theta: [0.0; 2],
                    expected_cut: 0.0,
                    approx_ratio: 1.0 - e,
                    relative_error: e,
                    phase: Phase::Sgd,
                })
                .collect(),
        };
        let a = mk(&[0.2, 0.4]);
        let b = mk(&[0.4, 0.4]);
        let c = AggregateCurve::from_trajectories(&[&a, &b]).unwrap();
        assert!((c.mean[0] - 0.3).abs() < 1e-15);
        assert!((c.ci_half_width[0] - 1.96 * 0.1 / libm::sqrt(2.0)).abs() < 1e-15);
        assert_eq!(c.ci_half_width[1], 0.0);
        let short = mk(&[0.1]);
        assert!(AggregateCurve::from_trajectories(&[&a, &short]).is_err());
        assert!(AggregateCurve::from_trajectories(&[]).is_err());
        let (m, s) = ratio_at(&[&a, &b], 1).unwrap();
        assert!((m - 0.7).abs() < 1e-15 && (s - 0.1).abs() < 1e-15);
        assert!(ratio_at(&[&a], 3).is_err());
        let _ = vec![0];
    }
}
