//! The evaluation suite: every model plus the random-seed baseline on every
//! test graph, then the aggregate tables and curves.

use std::fs;
use std::path::Path;

use anyhow::{bail, Result};
use qmeta_core::bench::{
    baseline_rng, evaluate_baseline, evaluate_seeded, summarize, EvalConfig, SeriesSummary, Trajectory,
};
use qmeta_core::graphlab::Instance;
use qmeta_core::qsim::CostTable;
use qmeta_core::seqmodels::{AnyModel, MetaOptimizer};
use rayon::prelude::*;

use crate::output::{g6, write_csv};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub eval: EvalConfig,
    /// Seeds the baseline's random starting angles.
    pub seed: u64,
    pub epsilon: f64,
    pub baseline: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResults {
    /// Graph-major, models in the order given, baseline last.
    pub trajectories: Vec<Trajectory>,
    pub summaries: Vec<SeriesSummary>,
}

/// Evaluates every graph on `pool`; the per-graph results are folded in
/// dataset order.
pub fn run_suite(
    models: &[AnyModel],
    data: &[Instance],
    cfg: &SuiteConfig,
    pool: &rayon::ThreadPool,
) -> Result<SuiteResults> {
    if data.is_empty() {
        bail!("test dataset is empty");
    }
    if models.is_empty() && !cfg.baseline {
        bail!("nothing to evaluate");
    }
    let mut names: Vec<&str> = Vec::new();
    for m in models {
        let name = m.kind().name();
        if names.contains(&name) {
            bail!("model {name} given twice");
        }
        names.push(name);
    }
    let per_graph: Vec<Result<Vec<Trajectory>>> = pool.install(|| {
        data.par_iter()
            .enumerate()
            .map(|(i, inst)| {
                let table = CostTable::new(&inst.graph)?;
                let mut out = Vec::with_capacity(models.len() + 1);
                for m in models {
                    out.push(evaluate_seeded(m, m.kind().name(), inst, &table, &cfg.eval)?);
                }
                if cfg.baseline {
                    let mut rng = baseline_rng(cfg.seed, i);
                    out.push(evaluate_baseline(inst, &table, &cfg.eval, &mut rng));
                }
                Ok(out)
            })
            .collect()
    });
    let mut trajectories = Vec::new();
    for r in per_graph {
        trajectories.extend(r?);
    }
    let summaries = summarize(&trajectories, &cfg.eval, cfg.epsilon)?;
    Ok(SuiteResults { trajectories, summaries })
}

/// Writes `table2.csv`, `table2_instances.csv`, `table3.csv`,
/// `curves_<model>_<n>.csv` and `trajectories.csv` into `dir`.
pub fn write_results(dir: &Path, results: &SuiteResults) -> Result<()> {
    fs::create_dir_all(dir)?;
    let s = &results.summaries;
    write_csv(
        &dir.join("table2.csv"),
        &["n", "model", "convergence_iteration"],
        s.iter()
            .map(|x| [x.n.to_string(), x.model.clone(), x.convergence_iteration.to_string()]),
    )?;
    write_csv(
        &dir.join("table2_instances.csv"),
        &["n", "model", "mean_convergence_iteration"],
        s.iter()
            .map(|x| [x.n.to_string(), x.model.clone(), g6(x.mean_instance_convergence)]),
    )?;
    write_csv(
        &dir.join("table3.csv"),
        &["n", "model", "phase", "mean_ratio", "std_ratio"],
        s.iter().flat_map(|x| {
            x.ratios.iter().map(move |r| {
                [x.n.to_string(), x.model.clone(), r.label.to_string(), g6(r.mean), g6(r.std)]
            })
        }),
    )?;
    for x in s {
        let c = &x.curve;
        write_csv(
            &dir.join(format!("curves_{}_{}.csv", x.model, x.n)),
            &["iteration", "mean_rel_err", "ci_halfwidth", "phase"],
            (0..c.mean.len()).map(|j| {
                [
                    (j + 1).to_string(),
                    g6(c.mean[j]),
                    g6(c.ci_half_width[j]),
                    c.phases[j].name().to_string(),
                ]
            }),
        )?;
    }
    write_csv(
        &dir.join("trajectories.csv"),
        &[
            "graph_id", "n", "model", "iteration", "gamma", "beta", "expected_cut", "relative_error", "phase",
        ],
        results.trajectories.iter().flat_map(|t| {
            t.records.iter().map(move |r| {
                [
                    t.graph_id.clone(),
                    t.n.to_string(),
                    t.model.clone(),
                    r.iteration.to_string(),
                    g6(r.theta[0]),
                    g6(r.theta[1]),
                    g6(r.expected_cut),
                    g6(r.relative_error),
                    r.phase.name().to_string(),
                ]
            })
        }),
    )?;
    Ok(())
}
