use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use super::ModelKind;
use crate::error::{invalid, Result};

/// Parameter groups; each trainable group has its own learning rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Core,
    FcHead,
    /// Stored with the model but never updated or counted.
    Frozen,
}

impl Group {
    pub fn name(self) -> &'static str {
        match self {
            Group::Core => "core",
            Group::FcHead => "fc_head",
            Group::Frozen => "frozen",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "core" => Some(Group::Core),
            "fc_head" => Some(Group::FcHead),
            "frozen" => Some(Group::Frozen),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorInfo {
    pub name: String,
    pub group: Group,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

impl TensorInfo {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.len()
    }
}

/// Named tensors packed into one flat vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Params {
    tensors: Vec<TensorInfo>,
    values: Vec<f64>,
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(
        &mut self,
        name: &str,
        group: Group,
        rows: usize,
        cols: usize,
        mut init: impl FnMut() -> f64,
    ) -> Range<usize> {
        let offset = self.values.len();
        self.values.extend((0..rows * cols).map(|_| init()));
        let info = TensorInfo { name: name.to_string(), group, rows, cols, offset };
        let r = info.range();
        self.tensors.push(info);
        r
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn tensors(&self) -> &[TensorInfo] {
        &self.tensors
    }

    pub fn tensor(&self, name: &str) -> Option<&[f64]> {
        self.tensors
            .iter()
            .find(|t| t.name == name)
            .map(|t| &self.values[t.range()])
    }

    /// Overwrites one tensor; the length must match.
    pub fn set_tensor(&mut self, name: &str, data: &[f64]) -> Result<()> {
        let t = self
            .tensors
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| invalid(format!("unknown tensor {name}")))?;
        if t.len() != data.len() {
            return Err(invalid(format!(
                "tensor {name} has {} entries, got {}",
                t.len(),
                data.len()
            )));
        }
        let r = t.range();
        self.values[r].copy_from_slice(data);
        Ok(())
    }

    pub fn group_of_each(&self) -> Vec<Group> {
        let mut out = Vec::with_capacity(self.values.len());
        for t in &self.tensors {
            out.extend(core::iter::repeat_n(t.group, t.len()));
        }
        out
    }

    pub fn count(&self, group: Group) -> usize {
        self.tensors.iter().filter(|t| t.group == group).map(|t| t.len()).sum()
    }

    pub fn trainable_count(&self) -> usize {
        self.count(Group::Core) + self.count(Group::FcHead)
    }
}

/// Exact trainable-parameter counts next to the published reference total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamReport {
    pub model: ModelKind,
    pub groups: Vec<(Group, usize)>,
    pub total: usize,
    pub reference_total: usize,
}

impl ParamReport {
    pub fn new(model: ModelKind, params: &Params) -> Self {
        let groups: Vec<(Group, usize)> = [Group::Core, Group::FcHead]
            .into_iter()
            .map(|g| (g, params.count(g)))
            .filter(|&(_, c)| c > 0)
            .collect();
        Self {
            model,
            total: params.trainable_count(),
            groups,
            reference_total: model.reference_param_count(),
        }
    }
}

impl fmt::Display for ParamReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.model.name())?;
        for (g, c) in &self.groups {
            write!(f, " {}={}", g.name(), c)?;
        }
        write!(f, " total={} reference={}", self.total, self.reference_total)
    }
}
