use alloc::vec;
use alloc::vec::Vec;

use super::Differentiable;
use crate::error::{invalid, Result};
use crate::math;

/// Handle to a scalar slot on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A Wengert list of scalar nodes.
///
/// Each node stores its value and the local partial derivative towards each
/// parent. Nodes are appended in evaluation order, so parents always precede
/// children and one reverse sweep yields every adjoint.
#[derive(Debug, Clone)]
pub struct Tape {
    values: Vec<f64>,
    starts: Vec<u32>,
    edges: Vec<(u32, f64)>,
    record: bool,
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

impl Tape {
    pub fn new() -> Self {
        Self {
            values: Vec::new(),
            starts: vec![0],
            edges: Vec::new(),
            record: true,
        }
    }

    /// A tape that only evaluates; custom nodes skip their Jacobians and
    /// [`backward`](Self::backward) yields zeros.
    pub fn without_grad() -> Self {
        Self { record: false, ..Self::new() }
    }

    pub fn records_grad(&self) -> bool {
        self.record
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, v: Var) -> f64 {
        self.values[v.index()]
    }

    pub fn values(&self, vs: &[Var]) -> Vec<f64> {
        vs.iter().map(|&v| self.value(v)).collect()
    }

    fn push(&mut self, value: f64, parents: &[(Var, f64)]) -> Var {
        let id = Var(self.values.len() as u32);
        self.values.push(value);
        if self.record {
            self.edges.extend(parents.iter().map(|&(p, d)| (p.0, d)));
        }
        self.starts.push(self.edges.len() as u32);
        id
    }

    /// An input node (trainable parameter or constant).
    pub fn leaf(&mut self, value: f64) -> Var {
        self.push(value, &[])
    }

    pub fn leaves(&mut self, values: &[f64]) -> Vec<Var> {
        values.iter().map(|&x| self.leaf(x)).collect()
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let v = self.value(a) + self.value(b);
        self.push(v, &[(a, 1.0), (b, 1.0)])
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        let v = self.value(a) - self.value(b);
        self.push(v, &[(a, 1.0), (b, -1.0)])
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        let (x, y) = (self.value(a), self.value(b));
        self.push(x * y, &[(a, y), (b, x)])
    }

    pub fn neg(&mut self, a: Var) -> Var {
        self.scale(a, -1.0)
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        let v = c * self.value(a);
        self.push(v, &[(a, c)])
    }

    pub fn add_scalar(&mut self, a: Var, c: f64) -> Var {
        let v = self.value(a) + c;
        self.push(v, &[(a, 1.0)])
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let s = math::sigmoid(self.value(a));
        self.push(s, &[(a, s * (1.0 - s))])
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let t = math::tanh(self.value(a));
        self.push(t, &[(a, 1.0 - t * t)])
    }

    pub fn atan(&mut self, a: Var) -> Var {
        let x = self.value(a);
        self.push(math::atan(x), &[(a, 1.0 / (1.0 + x * x))])
    }

    pub fn sum(&mut self, xs: &[Var]) -> Var {
        let v = xs.iter().map(|&x| self.value(x)).sum();
        let parents: Vec<(Var, f64)> = xs.iter().map(|&x| (x, 1.0)).collect();
        self.push(v, &parents)
    }

    /// `Σ c_k x_k` with constant coefficients.
    pub fn weighted_sum(&mut self, xs: &[Var], coeffs: &[f64]) -> Var {
        debug_assert_eq!(xs.len(), coeffs.len());
        let v = xs.iter().zip(coeffs).map(|(&x, c)| c * self.value(x)).sum();
        let parents: Vec<(Var, f64)> = xs.iter().zip(coeffs).map(|(&x, &c)| (x, c)).collect();
        self.push(v, &parents)
    }

    pub fn dot(&mut self, a: &[Var], b: &[Var]) -> Var {
        debug_assert_eq!(a.len(), b.len());
        let mut v = 0.0;
        let mut parents = Vec::with_capacity(2 * a.len());
        for (&x, &y) in a.iter().zip(b) {
            let (xv, yv) = (self.value(x), self.value(y));
            v += xv * yv;
            parents.push((x, yv));
            parents.push((y, xv));
        }
        self.push(v, &parents)
    }

    /// `W x + Σ biases` for a row-major `W` with `x.len()` columns; one node
    /// per output row.
    pub fn affine(&mut self, w: &[Var], x: &[Var], biases: &[&[Var]]) -> Vec<Var> {
        let cols = x.len();
        debug_assert!(cols > 0 && w.len().is_multiple_of(cols));
        let rows = w.len() / cols;
        let xv = self.values(x);
        let mut out = Vec::with_capacity(rows);
        let mut parents = Vec::with_capacity(2 * cols + biases.len());
        for r in 0..rows {
            parents.clear();
            let row = &w[r * cols..(r + 1) * cols];
            let mut v = 0.0;
            for (c, &wv) in row.iter().enumerate() {
                let wval = self.value(wv);
                v += wval * xv[c];
                parents.push((wv, xv[c]));
                parents.push((x[c], wval));
            }
            for b in biases {
                v += self.value(b[r]);
                parents.push((b[r], 1.0));
            }
            out.push(self.push(v, &parents));
        }
        out
    }

    pub fn hadamard(&mut self, a: &[Var], b: &[Var]) -> Vec<Var> {
        a.iter().zip(b).map(|(&x, &y)| self.mul(x, y)).collect()
    }

    pub fn concat(a: &[Var], b: &[Var]) -> Vec<Var> {
        let mut v = a.to_vec();
        v.extend_from_slice(b);
        v
    }

    /// Inserts a custom-gradient node; returns one var per output.
    pub fn apply<D: Differentiable + ?Sized>(&mut self, node: &D, inputs: &[Var]) -> Result<Vec<Var>> {
        if inputs.len() != node.n_inputs() {
            return Err(invalid(alloc::format!(
                "custom node expects {} inputs, got {}",
                node.n_inputs(),
                inputs.len()
            )));
        }
        let x = self.values(inputs);
        let n_in = inputs.len();
        if !self.record {
            let y = node.eval(&x);
            return Ok(y.into_iter().map(|v| self.push(v, &[])).collect());
        }
        let (y, jac) = node.eval_with_jacobian(&x);
        debug_assert_eq!(jac.len(), y.len() * n_in);
        let mut parents = Vec::with_capacity(n_in);
        let mut out = Vec::with_capacity(y.len());
        for (o, &v) in y.iter().enumerate() {
            parents.clear();
            parents.extend(inputs.iter().zip(&jac[o * n_in..(o + 1) * n_in]).map(|(&p, &d)| (p, d)));
            out.push(self.push(v, &parents));
        }
        Ok(out)
    }

    /// Gradient of a scalar loss with respect to every node.
    pub fn backward(&self, loss: &[Var]) -> Result<Gradients> {
        match loss {
            [l] => Ok(self.grad(*l)),
            _ => Err(invalid(alloc::format!(
                "loss must be a single scalar, got {} values",
                loss.len()
            ))),
        }
    }

    pub fn grad(&self, loss: Var) -> Gradients {
        let mut adj = vec![0.0; self.values.len()];
        if !self.record {
            return Gradients(adj);
        }
        adj[loss.index()] = 1.0;
        for i in (0..=loss.index()).rev() {
            let a = adj[i];
            if a == 0.0 {
                continue;
            }
            let (s, e) = (self.starts[i] as usize, self.starts[i + 1] as usize);
            for &(p, d) in &self.edges[s..e] {
                adj[p as usize] += a * d;
            }
        }
        Gradients(adj)
    }
}

/// Adjoints of every tape node with respect to one loss.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients(Vec<f64>);

impl Gradients {
    pub fn get(&self, v: Var) -> f64 {
        self.0[v.index()]
    }

    pub fn wrt(&self, vs: &[Var]) -> Vec<f64> {
        vs.iter().map(|&v| self.get(v)).collect()
    }
}
