//! Max-Cut instances: Erdős–Rényi sampling, cut values and the exact optimum.
//!
//! Bitstring convention, shared with [`crate::qsim`]: vertex `i` maps to bit
//! `n - 1 - i` of a basis index (vertex 0 is the most significant bit), a clear
//! bit means spin `+1` and a set bit means spin `-1`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::rng::Draw;

/// Largest vertex count the brute-force solver will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 26;

/// Zero-edge Erdős–Rényi draws are redrawn at most this many times.
pub const MAX_RESAMPLES: usize = 10_000;

/// An unweighted, undirected simple graph with canonical edge storage.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph, canonicalizing each pair to `(min, max)` and sorting.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("graph needs at least 2 vertices, got {n}")));
        }
        let mut canon = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(invalid(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(invalid(format!("self-loop on vertex {a}")));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        let before = canon.len();
        canon.dedup();
        if canon.len() != before {
            return Err(invalid("repeated edge"));
        }
        Ok(Self { n, edges: canon })
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    pub fn cycle(n: usize) -> Result<Self> {
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (0..n - 1).map(|i| (i, i + 1)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// The same graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(invalid("permutation length differs from vertex count"));
        }
        Self::new(self.n, self.edges.iter().map(|&(a, b)| (perm[a], perm[b])))
    }

    /// Neighbour masks in basis-index bit positions.
    fn adjacency_masks(&self) -> Vec<u64> {
        let mut masks = alloc::vec![0u64; self.n];
        for &(a, b) in &self.edges {
            masks[a] |= 1 << (self.n - 1 - b);
            masks[b] |= 1 << (self.n - 1 - a);
        }
        masks
    }
}

/// Number of edges whose endpoints carry opposite spins.
pub fn cut_value(g: &Graph, z: &[i8]) -> Result<u32> {
    if z.len() != g.n {
        return Err(invalid(format!(
            "assignment has {} entries, graph has {} vertices",
            z.len(),
            g.n
        )));
    }
    if z.iter().any(|&s| s != 1 && s != -1) {
        return Err(invalid("assignment entries must be +1 or -1"));
    }
    Ok(g.edges.iter().filter(|&&(a, b)| z[a] != z[b]).count() as u32)
}

/// Cut value of a basis index under the module bit convention.
pub fn cut_of_index(g: &Graph, index: u64) -> u32 {
    let n = g.n;
    g.edges
        .iter()
        .filter(|&&(a, b)| ((index >> (n - 1 - a)) ^ (index >> (n - 1 - b))) & 1 == 1)
        .count() as u32
}

/// Spin assignment encoded by a basis index.
pub fn assignment_of_index(n: usize, index: u64) -> Vec<i8> {
    (0..n)
        .map(|v| if (index >> (n - 1 - v)) & 1 == 0 { 1 } else { -1 })
        .collect()
}

/// The exact Max-Cut optimum together with one optimal assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxCutSolution {
    pub c_max: u32,
    pub witness: Vec<i8>,
}

/// Exhaustive Max-Cut.
///
/// Only indices with vertex 0 on the `+1` side are enumerated (the cut is
/// invariant under a global spin flip); the witness is the smallest optimal
/// basis index, which is also the lexicographically smallest optimal
/// bitstring overall.
pub fn max_cut_bruteforce(g: &Graph) -> Result<MaxCutSolution> {
    let n = g.n;
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::ResourceLimit {
            what: "brute-force vertex count",
            value: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let masks = g.adjacency_masks();
    let full = (1u64 << n) - 1;
    let mut best = 0u32;
    let mut best_index = 0u64;
    for index in 0..(1u64 << (n - 1)) {
        let mut twice_cut = 0u32;
        for (v, &mask) in masks.iter().enumerate() {
            let other_side = if (index >> (n - 1 - v)) & 1 == 1 {
                !index & full
            } else {
                index
            };
            twice_cut += (mask & other_side).count_ones();
        }
        let cut = twice_cut / 2;
        if cut > best {
            best = cut;
            best_index = index;
        }
    }
    Ok(MaxCutSolution {
        c_max: best,
        witness: assignment_of_index(n, best_index),
    })
}

/// Samples G(n, k/n), redrawing whole graphs that come out edgeless.
///
/// Candidate pairs are visited as `(0,1), (0,2), …, (n-2,n-1)` and each is
/// kept when `next_f64() < k / n`.
pub fn generate_er<R: Draw + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Graph> {
    if n < 2 {
        return Err(invalid(format!("n must be at least 2, got {n}")));
    }
    if k < 3 || k > n - 1 {
        return Err(invalid(format!("k must lie in [3, {}], got {k}", n - 1)));
    }
    let p = k as f64 / n as f64;
    for _ in 0..MAX_RESAMPLES {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.next_f64() < p {
                    edges.push((i, j));
                }
            }
        }
        if !edges.is_empty() {
            return Graph::new(n, edges);
        }
    }
    Err(Error::ResourceLimit {
        what: "edgeless Erdős–Rényi resamples",
        value: MAX_RESAMPLES,
        limit: MAX_RESAMPLES,
    })
}

/// A dataset record: a graph with its sampling parameter and cached optimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    pub k: usize,
    pub graph: Graph,
    pub solution: MaxCutSolution,
}

impl Instance {
    pub fn new(id: String, k: usize, graph: Graph) -> Result<Self> {
        let solution = max_cut_bruteforce(&graph)?;
        Ok(Self { id, k, graph, solution })
    }

    pub fn c_max(&self) -> u32 {
        self.solution.c_max
    }
}

/// Which sizes to sample and how many graphs in total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetSpec {
    pub n_min: usize,
    pub n_max: usize,
    pub count: usize,
}

impl DatasetSpec {
    /// Graphs per size: an even split, with the remainder going to the
    /// smallest sizes first.
    pub fn counts_per_n(&self) -> Vec<(usize, usize)> {
        let sizes = self.n_max - self.n_min + 1;
        let base = self.count / sizes;
        let extra = self.count % sizes;
        (0..sizes)
            .map(|i| (self.n_min + i, base + usize::from(i < extra)))
            .collect()
    }
}

/// Samples a dataset in ascending `n`; each instance draws `k` uniformly from
/// `3..=n-1` and then its graph, all from the same stream.
pub fn generate_dataset<R: Draw + ?Sized>(spec: &DatasetSpec, rng: &mut R) -> Result<Vec<Instance>> {
    if spec.n_min > spec.n_max {
        return Err(invalid("n_min exceeds n_max"));
    }
    if spec.n_min < 4 {
        return Err(invalid("n must be at least 4 so that k can lie in [3, n-1]"));
    }
    if spec.count == 0 {
        return Err(invalid("dataset count must be positive"));
    }
    let mut out = Vec::with_capacity(spec.count);
    for (n, count) in spec.counts_per_n() {
        for _ in 0..count {
            let k = rng.int_in(3, n as u64 - 1) as usize;
            let graph = generate_er(n, k, rng)?;
            let id = format!("n{n:02}-{:05}", out.len());
            out.push(Instance::new(id, k, graph)?);
        }
    }
    Ok(out)
}
