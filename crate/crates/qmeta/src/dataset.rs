//! JSONL dataset files: one instance per line with its brute-force optimum.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qmeta_core::graphlab::{Graph, Instance};
use serde::{Deserialize, Serialize};

/// One line of a dataset file. Field order is the on-disk key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: String,
    pub n: usize,
    pub k: usize,
    pub edges: Vec<[usize; 2]>,
    pub c_max: u32,
    pub witness: Vec<i8>,
}

impl From<&Instance> for InstanceRecord {
    fn from(inst: &Instance) -> Self {
        Self {
            id: inst.id.clone(),
            n: inst.graph.n(),
            k: inst.k,
            edges: inst.graph.edges().iter().map(|&(i, j)| [i, j]).collect(),
            c_max: inst.solution.c_max,
            witness: inst.solution.witness.clone(),
        }
    }
}

impl InstanceRecord {
    /// Rebuilds the instance, recomputing the optimum and rejecting records
    /// whose stored `c_max` or witness disagree with it.
    pub fn into_instance(self) -> Result<Instance> {
        let graph = Graph::new(self.n, self.edges.iter().map(|e| (e[0], e[1])))?;
        if self.witness.len() != self.n || self.witness.iter().any(|&s| s != 1 && s != -1) {
            bail!("{}: witness must hold {} entries of ±1", self.id, self.n);
        }
        let witness_cut = qmeta_core::graphlab::cut_value(&graph, &self.witness)?;
        let inst = Instance::new(self.id, self.k, graph)?;
        if inst.c_max() != self.c_max || witness_cut != self.c_max {
            bail!(
                "{}: stored c_max {} disagrees with brute force {} (witness cuts {})",
                inst.id,
                self.c_max,
                inst.c_max(),
                witness_cut
            );
        }
        Ok(inst)
    }
}

pub fn to_jsonl(instances: &[Instance]) -> Result<String> {
    let mut out = String::new();
    for inst in instances {
        out.push_str(&serde_json::to_string(&InstanceRecord::from(inst))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_jsonl(text: &str) -> Result<Vec<Instance>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let rec: InstanceRecord =
                serde_json::from_str(line).with_context(|| format!("line {}", i + 1))?;
            rec.into_instance().with_context(|| format!("line {}", i + 1))
        })
        .collect()
}

pub fn write_dataset(path: &Path, instances: &[Instance]) -> Result<()> {
    crate::output::write_atomic(path, to_jsonl(instances)?.as_bytes())
}

pub fn read_dataset(path: &Path) -> Result<Vec<Instance>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let data = parse_jsonl(&text).with_context(|| format!("parsing {}", path.display()))?;
    if data.is_empty() {
        bail!("{} holds no instances", path.display());
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qmeta_core::graphlab::{generate_dataset, DatasetSpec};
    use qmeta_core::rng::SeededRng;

    #[test]
    fn key_order_and_round_trip() {
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let inst = Instance::new("p3".into(), 2, g).unwrap();
        let line = to_jsonl(std::slice::from_ref(&inst)).unwrap();
        assert_eq!(
            line,
            "{\"id\":\"p3\",\"n\":3,\"k\":2,\"edges\":[[0,1],[1,2]],\"c_max\":2,\"witness\":[1,-1,1]}\n"
        );
        let back = parse_jsonl(&line).unwrap();
        assert_eq!(back[0].graph, inst.graph);
        assert_eq!(back[0].solution, inst.solution);
    }

    #[test]
    fn rejects_wrong_optimum() {
        let bad = "{\"id\":\"x\",\"n\":2,\"k\":1,\"edges\":[[0,1]],\"c_max\":0,\"witness\":[1,-1]}";
        assert!(parse_jsonl(bad).is_err());
        let bad_witness = "{\"id\":\"x\",\"n\":2,\"k\":1,\"edges\":[[0,1]],\"c_max\":1,\"witness\":[1,1]}";
        assert!(parse_jsonl(bad_witness).is_err());
    }

    #[test]
    fn generated_dataset_round_trips() {
        let spec = DatasetSpec { n_min: 5, n_max: 7, count: 12 };
        let data = generate_dataset(&spec, &mut SeededRng::new(3)).unwrap();
        let text = to_jsonl(&data).unwrap();
        let back = parse_jsonl(&text).unwrap();
        assert_eq!(to_jsonl(&back).unwrap(), text);
    }
}
