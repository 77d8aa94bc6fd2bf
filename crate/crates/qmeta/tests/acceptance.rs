//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria 1-9 always run. The full-scale reproduction (10) takes several
//! minutes and only runs with `QMETA_FULL_REPRO=1`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_complex::Complex64;
use qmeta::parallel::ParallelEvaluator;
use qmeta::suite::{run_suite, SuiteConfig, SuiteResults};
use qmeta_core::bench::{
    approx_ratio, convergence_iteration, relative_error, AggregateCurve, EvalConfig, Trajectory,
};
use qmeta_core::gradkit::check::{finite_difference_gradient, finite_difference_jacobian, relative_error as rel_err};
use qmeta_core::gradkit::{Differentiable, Tape};
use qmeta_core::graphlab::{
    cut_value, generate_dataset, generate_er, max_cut_bruteforce, DatasetSpec, Graph, Instance,
};
use qmeta_core::metaloop::{rollout, train, CostInput, TrainConfig};
use qmeta_core::qsim::{fidelity_kernel, qaoa_cost, qaoa_grad, CostTable, FidelityNode, KernelCircuit, QaoaCostNode};
use qmeta_core::rng::{Draw, SeededRng};
use qmeta_core::seqmodels::{step, AnyModel, Group, MetaOptimizer, ModelConfig, ModelKind};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_graph(rng: &mut SeededRng, n_lo: usize, n_hi: usize) -> Graph {
    let n = rng.int_in(n_lo as u64, n_hi as u64) as usize;
    let k = rng.int_in(3, n as u64 - 1) as usize;
    generate_er(n, k, rng).unwrap()
}

// ---------------------------------------------------------------- 1

type Mat = Vec<Complex64>;

fn matmul(a: &Mat, b: &Mat, d: usize) -> Mat {
    let mut c = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            for j in 0..d {
                c[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    c
}

fn kron(a: &Mat, da: usize, b: &Mat, db: usize) -> Mat {
    let d = da * db;
    let mut c = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    c[(i * db + k) * d + j * db + l] = a[i * da + j] * b[k * db + l];
                }
            }
        }
    }
    c
}

fn identity(d: usize) -> Mat {
    let mut m = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        m[i * d + i] = Complex64::new(1.0, 0.0);
    }
    m
}

/// `op` on qubit `q` of `n`, identity elsewhere.
fn embed(op: &Mat, q: usize, n: usize) -> Mat {
    let mut m = identity(1);
    let mut dim = 1;
    for i in 0..n {
        let f = if i == q { op.clone() } else { identity(2) };
        m = kron(&m, dim, &f, 2);
        dim *= 2;
    }
    m
}

/// Scaling and squaring with a Taylor series.
fn expm(a: &Mat, d: usize) -> Mat {
    let norm: f64 = a.iter().map(|z| z.norm()).sum();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(s);
    let x: Mat = a.iter().map(|z| z * scale).collect();
    let mut result = identity(d);
    let mut term = identity(d);
    for k in 1..30 {
        term = matmul(&term, &x, d);
        term.iter_mut().for_each(|z| *z /= k as f64);
        for (r, t) in result.iter_mut().zip(&term) {
            *r += t;
        }
    }
    for _ in 0..s {
        result = matmul(&result, &result, d);
    }
    result
}

fn dense_qaoa_cost(g: &Graph, gamma: f64, beta: f64) -> f64 {
    let n = g.n();
    let d = 1 << n;
    let c = |re: f64| Complex64::new(re, 0.0);
    let z: Mat = vec![c(1.0), c(0.0), c(0.0), c(-1.0)];
    let x: Mat = vec![c(0.0), c(1.0), c(1.0), c(0.0)];
    let mut h_c = vec![c(0.0); d * d];
    for &(i, j) in g.edges() {
        let zz = matmul(&embed(&z, i, n), &embed(&z, j, n), d);
        for (k, h) in h_c.iter_mut().enumerate() {
            let id = if k % (d + 1) == 0 { 1.0 } else { 0.0 };
            *h += (c(id) - zz[k]) * 0.5;
        }
    }
    let mut h_m = vec![c(0.0); d * d];
    for q in 0..n {
        for (h, e) in h_m.iter_mut().zip(embed(&x, q, n)) {
            *h += e;
        }
    }
    let minus_i = Complex64::new(0.0, -1.0);
    let u_c = expm(&h_c.iter().map(|h| h * minus_i * gamma).collect(), d);
    let u_m = expm(&h_m.iter().map(|h| h * minus_i * beta).collect(), d);
    let u = matmul(&u_m, &u_c, d);
    let amp = 1.0 / (d as f64).sqrt();
    let psi: Vec<Complex64> = (0..d).map(|i| (0..d).map(|j| u[i * d + j] * amp).sum()).collect();
    let mut e = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            e += psi[i].conj() * h_c[i * d + j] * psi[j];
        }
    }
    e.re
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (u, w) in [(a, b), (b, a)] {
                if u == v && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative per isomorphism class of connected graphs on `n`
/// vertices.
fn connected_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> =
            (0..pairs.len()).filter(|b| mask >> b & 1 == 1).map(|b| pairs[b]).collect();
        if edges.is_empty() || !connected(n, &edges) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                let mut e: Vec<(usize, usize)> = edges
                    .iter()
                    .map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b])))
                    .collect();
                e.sort_unstable();
                e
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            out.push(Graph::new(n, edges).unwrap());
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let graphs: Vec<Graph> = (2..=4).flat_map(connected_graphs).collect();
    if graphs.len() != 9 {
        return Err(format!("expected 9 connected graphs up to isomorphism, found {}", graphs.len()));
    }
    let mut rng = SeededRng::new(101);
    let mut worst = 0.0f64;
    for g in &graphs {
        for _ in 0..10 {
            let theta = [rng.uniform(-PI, PI), rng.uniform(-PI, PI)];
            let err = (qaoa_cost(g, theta).unwrap() - dense_qaoa_cost(g, theta[0], theta[1])).abs();
            worst = worst.max(err);
        }
    }
    check(worst <= 1e-10, format!("9 graphs x 10 angles, max |diff| {worst:.2e} (tol 1e-10)"))
}

// ---------------------------------------------------------------- 2

fn criterion_2() -> Outcome {
    let mut rng = SeededRng::new(202);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let g = random_graph(&mut rng, 4, 10);
        let half = g.num_edges() as f64 / 2.0;
        let t = rng.uniform(-PI, PI);
        for theta in [[0.0, 0.0], [t, 0.0], [0.0, t]] {
            worst = worst.max((qaoa_cost(&g, theta).unwrap() - half).abs());
        }
    }
    check(worst <= 1e-12, format!("20 graphs, max |cost - |E|/2| {worst:.2e} (tol 1e-12)"))
}

// ---------------------------------------------------------------- 3

const FD_H: f64 = 1e-5;

fn node_error<D: Differentiable>(node: &D, x: &[f64]) -> f64 {
    let (_, jac) = node.eval_with_jacobian(x);
    rel_err(&jac, &finite_difference_jacobian(node, x, FD_H), 1e-8)
}

/// Random parameters, a warmed-up recurrent state, and a random linear
/// functional of the next proposal, as a function of the parameters.
fn cell_functional(model: &AnyModel, params: &[f64], inputs: &[[f64; 3]], coeffs: [f64; 2], grad: bool) -> (f64, Vec<f64>) {
    let mut tape = if grad { Tape::new() } else { Tape::without_grad() };
    let p = tape.leaves(params);
    let mut state = model.initial_state(&mut tape);
    let mut out = [tape.leaf(0.0), tape.leaf(0.0)];
    for x in inputs {
        let theta = [tape.leaf(x[0]), tape.leaf(x[1])];
        let y = tape.leaf(x[2]);
        out = step(model, &mut tape, &p, &mut state, theta, y).unwrap();
    }
    let f = tape.weighted_sum(&out, &coeffs);
    let value = tape.value(f);
    let g = if grad { tape.grad(f).wrt(&p) } else { Vec::new() };
    (value, g)
}

fn criterion_3() -> Outcome {
    let mut rng = SeededRng::new(303);
    let mut lines = Vec::new();
    let mut ok = true;

    let mut worst = 0.0f64;
    for _ in 0..50 {
        let g = random_graph(&mut rng, 4, 8);
        let theta = [rng.uniform(-PI, PI), rng.uniform(-PI, PI)];
        let a = qaoa_grad(&g, theta).unwrap();
        let fd = finite_difference_gradient(|x| qaoa_cost(&g, [x[0], x[1]]).unwrap(), &theta, FD_H);
        worst = worst.max(rel_err(&a, &fd, 1e-8));
        let table = CostTable::new(&g).unwrap();
        worst = worst.max(node_error(&QaoaCostNode(&table), &theta));
    }
    ok &= worst < 1e-6;
    lines.push(format!("qaoa {worst:.1e}"));

    let kinds = [(ModelKind::Qlstm, "vqc"), (ModelKind::Qfwp, "fast-circuit"), (ModelKind::QkLstm, "kernel")];
    for (kind, label) in kinds {
        let m = AnyModel::new(&ModelConfig::new(kind, 0)).unwrap();
        let mut worst = 0.0f64;
        for _ in 0..50 {
            worst = worst.max(match &m {
                AnyModel::Qlstm(q) => {
                    let node = q.vqc();
                    let x: Vec<f64> = (0..node.n_inputs()).map(|_| rng.uniform(-PI, PI)).collect();
                    node_error(node, &x)
                }
                AnyModel::Qfwp(q) => {
                    let node = q.fast_circuit();
                    let x: Vec<f64> = (0..node.n_inputs()).map(|_| rng.uniform(-PI, PI)).collect();
                    node_error(node, &x)
                }
                _ => {
                    let node = FidelityNode::new(&KernelCircuit::default()).unwrap();
                    let x: Vec<f64> = (0..node.n_inputs()).map(|_| rng.uniform(-PI, PI)).collect();
                    node_error(&node, &x)
                }
            });
        }
        ok &= worst < 1e-6;
        lines.push(format!("{label} {worst:.1e}"));
    }

    for kind in [ModelKind::Lstm, ModelKind::Qlstm, ModelKind::QkLstm, ModelKind::Qfwp] {
        let mut worst = 0.0f64;
        for trial in 0..50u64 {
            let m = AnyModel::new(&ModelConfig::new(kind, trial)).unwrap();
            let params: Vec<f64> = m.params().values().iter().map(|v| v + rng.uniform(-0.3, 0.3)).collect();
            let inputs: Vec<[f64; 3]> = (0..3)
                .map(|_| [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 0.0)])
                .collect();
            let coeffs = [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)];
            let (_, g) = cell_functional(&m, &params, &inputs, coeffs, true);
            let fd = finite_difference_gradient(|p| cell_functional(&m, p, &inputs, coeffs, false).0, &params, FD_H);
            worst = worst.max(rel_err(&g, &fd, 1e-8));
        }
        ok &= worst < 1e-5;
        lines.push(format!("{} cell {worst:.1e}", kind.name()));
    }

    let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
    let table = CostTable::new(&g).unwrap();
    let mut worst = 0.0f64;
    for kind in ModelKind::ALL {
        let mut m = AnyModel::new(&ModelConfig::new(kind, 5)).unwrap();
        for v in m.params_mut().values_mut() {
            *v += rng.uniform(-0.2, 0.2);
        }
        for input in [CostInput::Detached, CostInput::Attached] {
            let r = rollout(&m, &table, 10, &input, true).unwrap();
            let fd_input = match input {
                CostInput::Detached => CostInput::Replay(r.cost_inputs.clone()),
                other => other,
            };
            let base = m.params().values().to_vec();
            let mut fd = finite_difference_gradient(
                |p| {
                    let mut mm = m.clone();
                    mm.params_mut().values_mut().copy_from_slice(p);
                    rollout(&mm, &table, 10, &fd_input, false).unwrap().loss
                },
                &base,
                FD_H,
            );
            // Frozen tensors receive no gradient by contract.
            for (g, group) in fd.iter_mut().zip(m.params().group_of_each()) {
                if group == Group::Frozen {
                    *g = 0.0;
                }
            }
            worst = worst.max(rel_err(&r.grad, &fd, 1e-8));
        }
    }
    ok &= worst < 1e-4;
    lines.push(format!("10-step BPTT {worst:.1e}"));
    check(
        ok,
        format!("max rel err: {} (tol 1e-6 circuits, 1e-5 cells, 1e-4 BPTT)", lines.join(", ")),
    )
}

// ---------------------------------------------------------------- 4

fn criterion_4() -> Outcome {
    let mut rng = SeededRng::new(404);
    let circuit = KernelCircuit::default();
    let (mut self_err, mut sym_err, mut out_of_range) = (0.0f64, 0.0f64, 0usize);
    for _ in 0..200 {
        let a: Vec<f64> = (0..4).map(|_| rng.uniform(-3.0, 3.0)).collect();
        let b: Vec<f64> = (0..4).map(|_| rng.uniform(-3.0, 3.0)).collect();
        let w: Vec<f64> = (0..4).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let kab = fidelity_kernel(&a, &b, &w, &circuit).unwrap();
        let kba = fidelity_kernel(&b, &a, &w, &circuit).unwrap();
        self_err = self_err.max((fidelity_kernel(&a, &a, &w, &circuit).unwrap() - 1.0).abs());
        sym_err = sym_err.max((kab - kba).abs());
        out_of_range += usize::from(!(0.0..=1.0).contains(&kab));
    }
    check(
        self_err <= 1e-10 && sym_err <= 1e-12 && out_of_range == 0,
        format!("200 pairs: |k(x,x)-1| {self_err:.1e}, asymmetry {sym_err:.1e}, {out_of_range} outside [0,1]"),
    )
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Outcome {
    let mut ok = true;
    for n in 3..=8 {
        let s = max_cut_bruteforce(&Graph::complete(n).unwrap()).unwrap();
        ok &= s.c_max as usize == n * n / 4;
    }
    let mut rng = SeededRng::new(505);
    let mut witness_ok = 0;
    let mut perm_ok = 0;
    for _ in 0..20 {
        let g = random_graph(&mut rng, 4, 9);
        let s = max_cut_bruteforce(&g).unwrap();
        witness_ok += usize::from(cut_value(&g, &s.witness).unwrap() == s.c_max);
        let mut perm: Vec<usize> = (0..g.n()).collect();
        rng.shuffle(&mut perm);
        perm_ok += usize::from(max_cut_bruteforce(&g.relabel(&perm).unwrap()).unwrap().c_max == s.c_max);
    }
    ok &= witness_ok == 20 && perm_ok == 20;
    check(
        ok,
        format!("K_3..K_8 = floor(n^2/4); witness {witness_ok}/20, permutation {perm_ok}/20"),
    )
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in [ModelKind::Lstm, ModelKind::Qlstm, ModelKind::QkLstm, ModelKind::Qfwp] {
        let m = AnyModel::new(&ModelConfig::new(kind, 0)).unwrap();
        let report = m.param_report();
        let text = report.to_string();
        ok &= match kind {
            ModelKind::Lstm => report.total == 56,
            ModelKind::Qfwp => report.total == 31,
            _ => {
                (report.total as f64 - 43.0).abs() <= 0.25 * 43.0
                    && text.contains(&format!("total={}", report.total))
                    && text.contains("reference=43")
            }
        };
        parts.push(text);
    }
    check(ok, parts.join("; "))
}

// ---------------------------------------------------------------- 7

fn criterion_7() -> Outcome {
    let mut rng = SeededRng::new(707);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g = random_graph(&mut rng, 4, 9);
        let c_max = max_cut_bruteforce(&g).unwrap().c_max;
        let table = CostTable::new(&g).unwrap();
        let theta = [rng.uniform(-PI, PI), rng.uniform(-PI, PI)];
        let sum = relative_error(&table, c_max, theta) + approx_ratio(&table, c_max, theta);
        worst = worst.max((sum - 1.0).abs());
    }
    let conv = [
        convergence_iteration(&[0.3; 8], 1e-4) == Ok(1),
        convergence_iteration(&[1.0, 0.999, 0.998, 0.99795, 0.99], 1e-4) == Ok(3),
        convergence_iteration(&[1.0, 0.5, 0.0], 1e-4) == Ok(3),
    ];
    check(
        worst <= f64::EPSILON && conv.iter().all(|&c| c),
        format!("100 samples, max |rel + ratio - 1| {worst:.1e}; convergence cases {conv:?}"),
    )
}

// ---------------------------------------------------------------- 8

fn qmeta(dir: &Path, args: &[&str], workers: usize) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qmeta"))
        .current_dir(dir)
        .args(args)
        .env("QMETA_WORKERS", workers.to_string())
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("qmeta {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)))
    }
}

/// Every file under `dir` with its bytes; the wall-clock column of training
/// logs is dropped.
fn tree_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
            let mut bytes = fs::read(&path).unwrap();
            if rel.ends_with("train_log.csv") {
                let text = String::from_utf8(bytes).unwrap();
                bytes = text
                    .lines()
                    .map(|l| l.rsplit_once(',').unwrap().0.to_string() + "\n")
                    .collect::<String>()
                    .into_bytes();
            }
            out.push((rel, bytes));
        }
    }
    out.sort();
    out
}

/// Runs the whole pipeline in `dir` with relative paths.
fn pipeline(dir: &Path, workers: usize) -> Result<(), String> {
    qmeta(dir, &["dataset", "--n-min", "6", "--n-max", "9", "--count", "20", "--seed", "7", "--out", "train.jsonl"], workers)?;
    qmeta(dir, &["dataset", "--n-min", "10", "--n-max", "10", "--count", "4", "--seed", "8", "--out", "test.jsonl"], workers)?;
    for model in ["lstm", "qklstm"] {
        qmeta(
            dir,
            &["train", "--model", model, "--data", "train.jsonl", "--epochs", "2", "--batch", "8", "--seed", "3", "--out", model],
            workers,
        )?;
    }
    qmeta(
        dir,
        &[
            "eval", "--checkpoints", "lstm/checkpoint.json,qklstm/checkpoint.json", "--data", "test.jsonl",
            "--iterations", "40", "--seed", "5", "--out", "eval",
        ],
        workers,
    )
}

fn criterion_8() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    fs::create_dir_all(&a).unwrap();
    fs::create_dir_all(&b).unwrap();
    pipeline(&a, 1)?;
    pipeline(&b, 4)?;
    let (ta, tb) = (tree_bytes(&a), tree_bytes(&b));
    let differing: Vec<&str> = ta
        .iter()
        .zip(&tb)
        .filter(|(x, y)| x != y)
        .map(|(x, _)| x.0.as_str())
        .collect();
    check(
        ta.len() == tb.len() && differing.is_empty(),
        format!(
            "dataset, 2-epoch training on 20 graphs and evaluation rerun with 1 and 4 workers: \
             {} files, {} differ {:?} (train-log seconds column excluded)",
            ta.len(),
            differing.len(),
            differing
        ),
    )
}

// ---------------------------------------------------------------- 9, 10

fn train_model(kind: ModelKind, data: &[Instance], cfg: &TrainConfig, eval: &ParallelEvaluator) -> AnyModel {
    let mut m = AnyModel::new(&ModelConfig::new(kind, cfg.seed)).unwrap();
    train(&mut m, data, cfg, eval, |_, _| true).unwrap();
    m
}

fn series<'a>(r: &'a SuiteResults, model: &str, n: usize) -> Vec<&'a Trajectory> {
    r.trajectories.iter().filter(|t| t.model == model && t.n == n).collect()
}

fn ratio(r: &SuiteResults, model: &str, n: usize, label: &str) -> f64 {
    r.summaries
        .iter()
        .find(|s| s.model == model && s.n == n)
        .and_then(|s| s.ratios.iter().find(|x| x.label == label))
        .map(|x| x.mean)
        .unwrap()
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let train_set = generate_dataset(&DatasetSpec { n_min: 6, n_max: 9, count: 100 }, &mut SeededRng::new(0)).unwrap();
    let test_set = generate_dataset(&DatasetSpec { n_min: 10, n_max: 10, count: 20 }, &mut SeededRng::new(1)).unwrap();
    let pool = ParallelEvaluator::new(0).unwrap();
    let cfg = TrainConfig { epochs: 20, ..TrainConfig::default() };
    let models: Vec<AnyModel> =
        [ModelKind::QkLstm, ModelKind::Lstm].iter().map(|&k| train_model(k, &train_set, &cfg, &pool)).collect();
    let suite = SuiteConfig { eval: EvalConfig::default(), seed: 0, epsilon: 1e-4, baseline: true };
    let r = run_suite(&models, &test_set, &suite, pool.pool()).unwrap();

    let qk = ratio(&r, "qklstm", 10, "phase1");
    let lstm = ratio(&r, "lstm", 10, "phase1");
    let base = ratio(&r, "random", 10, "phase1");
    let cq = AggregateCurve::from_trajectories(&series(&r, "qklstm", 10)).unwrap();
    let cb = AggregateCurve::from_trajectories(&series(&r, "random", 10)).unwrap();
    let below = (10..=300).filter(|&j| cq.mean[j - 1] < cb.mean[j - 1]).count();
    let frac = below as f64 / 291.0;
    check(
        qk - base >= 0.05 && frac >= 0.8,
        format!(
            "ratio@10 qklstm {qk:.3} vs random {base:.3} (margin {:.3}, need 0.05; lstm {lstm:.3}); \
             qklstm curve below baseline on {below}/291 iterations ({:.0}%, need 80%); {:.0}s",
            qk - base,
            frac * 100.0,
            start.elapsed().as_secs_f64()
        ),
    )
}

/// Table III of the reference results, Phase I and Phase II means per n.
const TABLE3: [(usize, [(&str, f64, f64); 3], f64); 4] = [
    (10, [("qklstm", 0.82, 0.83), ("lstm", 0.79, 0.80), ("qlstm", 0.81, 0.82)], 0.70),
    (11, [("qklstm", 0.83, 0.84), ("lstm", 0.79, 0.81), ("qlstm", 0.82, 0.84)], 0.72),
    (12, [("qklstm", 0.81, 0.82), ("lstm", 0.76, 0.78), ("qlstm", 0.78, 0.81)], 0.71),
    (13, [("qklstm", 0.83, 0.84), ("lstm", 0.77, 0.80), ("qlstm", 0.81, 0.83)], 0.75),
];

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let train_set = generate_dataset(&DatasetSpec { n_min: 6, n_max: 9, count: 1008 }, &mut SeededRng::new(0)).unwrap();
    let test_set = generate_dataset(&DatasetSpec { n_min: 10, n_max: 13, count: 90 }, &mut SeededRng::new(1)).unwrap();
    let pool = ParallelEvaluator::new(0).unwrap();
    let cfg = TrainConfig::default();
    let models: Vec<AnyModel> = [ModelKind::QkLstm, ModelKind::Qlstm, ModelKind::Lstm]
        .iter()
        .map(|&k| train_model(k, &train_set, &cfg, &pool))
        .collect();
    let suite = SuiteConfig { eval: EvalConfig::default(), seed: 0, epsilon: 1e-4, baseline: true };
    let r = run_suite(&models, &test_set, &suite, pool.pool()).unwrap();

    let mut ok = true;
    let mut misses = Vec::new();
    let mut rows = Vec::new();
    for (n, models, random_ref) in TABLE3 {
        let mut got_ratios = Vec::new();
        for (name, p1, p2) in models {
            let (a, b) = (ratio(&r, name, n, "phase1"), ratio(&r, name, n, "phase2"));
            got_ratios.push(format!("{name} {a:.3}/{b:.3}"));
            for (label, got, want) in [("I", a, p1), ("II", b, p2)] {
                if (got - want).abs() > 0.05 {
                    ok = false;
                    misses.push(format!("n={n} {name} phase {label}: {got:.3} vs {want}"));
                }
            }
        }
        let random = ratio(&r, "random", n, "phase2");
        let conv = |m: &str| r.summaries.iter().find(|s| s.model == m && s.n == n).unwrap().convergence_iteration;
        let (cq, cl, cs, cr) = (conv("qklstm"), conv("qlstm"), conv("lstm"), conv("random"));
        let ordered = cq < cl && cl < cs && cs < cr;
        ok &= ordered;
        rows.push(format!(
            "n={n} ratios I/II {} random@20 {random:.3} (ref {random_ref}); conv qk/ql/lstm/rand {cq}/{cl}/{cs}/{cr}{}",
            got_ratios.join(" "),
            if ordered { "" } else { " (order broken)" }
        ));
    }
    let mut detail = rows.join("; ");
    if !misses.is_empty() {
        detail += &format!("; outside +-0.05: {}", misses.join(", "));
    }
    detail += &format!("; {:.0}s", start.elapsed().as_secs_f64());
    check(ok, detail)
}

fn main() -> ExitCode {
    let full = std::env::var("QMETA_FULL_REPRO").is_ok_and(|v| v == "1");
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "simulator matches dense matrix exponential", criterion_1),
        (2, "analytic |E|/2 anchors", criterion_2),
        (3, "gradients match finite differences", criterion_3),
        (4, "fidelity kernel properties", criterion_4),
        (5, "brute-force Max-Cut oracle", criterion_5),
        (6, "parameter counts", criterion_6),
        (7, "metric identities", criterion_7),
        (8, "byte-level determinism", criterion_8),
        (9, "scaled reproduction: QK-LSTM beats random seed", criterion_9),
        (10, "full-scale reproduction", criterion_10),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        if id == 10 && !full {
            println!("SKIP [{id:>2}] {name}: set QMETA_FULL_REPRO=1 to run");
            continue;
        }
        match run() {
            Ok(detail) => println!("PASS [{id:>2}] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{id:>2}] {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
