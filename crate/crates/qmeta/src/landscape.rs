//! Cost landscape of one graph with each model's Phase-I path drawn over it.

use std::fs;
use std::path::Path;

use anyhow::Result;
use qmeta_core::bench::{phase1, phase2};
use qmeta_core::graphlab::{generate_er, Instance};
use qmeta_core::qsim::{landscape_grid, CostTable, Landscape};
use qmeta_core::rng::SeededRng;
use qmeta_core::seqmodels::{AnyModel, MetaOptimizer};

use crate::config::LandscapeSettings;
use crate::dataset::to_jsonl;
use crate::output::{g6, write_csv};

/// Name of the plain-QAOA path: gradient ascent from the same origin.
pub const QAOA_NAME: &str = "qaoa";

#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub step: usize,
    pub theta: [f64; 2],
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeResults {
    pub instance: Instance,
    pub grid: Landscape,
    /// Model paths in the order given, the plain-QAOA path last. Every path
    /// starts at step 0 from `(0, 0)`.
    pub paths: Vec<(String, Vec<PathPoint>)>,
}

pub fn run_landscape(models: &[AnyModel], s: &LandscapeSettings) -> Result<LandscapeResults> {
    let graph = generate_er(s.n, s.k, &mut SeededRng::new(s.seed))?;
    let instance = Instance::new(format!("landscape-n{:02}-k{}-s{}", s.n, s.k, s.seed), s.k, graph)?;
    let table = CostTable::new(&instance.graph)?;
    let grid = landscape_grid(
        &table,
        (s.gamma_min, s.gamma_max),
        (s.beta_min, s.beta_max),
        (s.resolution, s.resolution),
    )?;
    let origin = PathPoint { step: 0, theta: [0.0, 0.0], cost: table.cost([0.0, 0.0]) };
    let c_max = instance.c_max();
    let mut paths = Vec::new();
    for m in models {
        let mut pts = vec![origin.clone()];
        pts.extend(phase1(m, &table, c_max, s.steps)?.into_iter().map(|r| PathPoint {
            step: r.iteration,
            theta: r.theta,
            cost: r.expected_cut,
        }));
        paths.push((m.kind().name().to_string(), pts));
    }
    let mut pts = vec![origin];
    pts.extend(phase2(&table, c_max, [0.0, 0.0], s.steps, s.lr, 1).into_iter().map(|r| PathPoint {
        step: r.iteration,
        theta: r.theta,
        cost: r.expected_cut,
    }));
    paths.push((QAOA_NAME.to_string(), pts));
    Ok(LandscapeResults { instance, grid, paths })
}

/// Writes `landscape.csv`, `trajectory_<name>.csv` and `graph.jsonl`.
pub fn write_landscape(dir: &Path, r: &LandscapeResults) -> Result<()> {
    fs::create_dir_all(dir)?;
    let g = &r.grid;
    write_csv(
        &dir.join("landscape.csv"),
        &["gamma", "beta", "cost"],
        g.gammas.iter().enumerate().flat_map(|(gi, &gamma)| {
            g.betas
                .iter()
                .enumerate()
                .map(move |(bi, &beta)| [g6(gamma), g6(beta), g6(g.at(gi, bi))])
        }),
    )?;
    for (name, pts) in &r.paths {
        write_csv(
            &dir.join(format!("trajectory_{name}.csv")),
            &["step", "gamma", "beta", "cost"],
            pts.iter()
                .map(|p| [p.step.to_string(), g6(p.theta[0]), g6(p.theta[1]), g6(p.cost)]),
        )?;
    }
    crate::output::write_atomic(
        &dir.join("graph.jsonl"),
        to_jsonl(std::slice::from_ref(&r.instance))?.as_bytes(),
    )?;
    Ok(())
}
