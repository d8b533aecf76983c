//! H = Δ + Q on a rooted graph, ball matrices and Weyl residuals.

use serde::{Deserialize, Serialize};

use crate::eigen::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::{BallView, RootedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Δψ(v) = Σ_{u∼v} (ψ(u) − ψ(v))
    Combinatorial,
    /// Δψ(v) = Σ_{u∼v} ψ(u)
    Adjacency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum PotentialRule {
    /// α at vertices whose level is a positive perfect square.
    SparseSquares { alpha: f64 },
    Constant { c: f64 },
    Explicit { values: Vec<f64> },
    /// Q(v) = values[|v|], zero past the end.
    Radial { values: Vec<f64> },
}

pub fn is_positive_square(n: usize) -> bool {
    if n == 0 {
        return false;
    }
    let r = (n as f64).sqrt().round() as usize;
    (r.saturating_sub(1)..=r + 1).any(|s| s * s == n)
}

impl PotentialRule {
    pub fn evaluate(&self, graph: &RootedGraph) -> Result<Vec<f64>> {
        let n = graph.vertex_count();
        match self {
            PotentialRule::Constant { c } => Ok(vec![*c; n]),
            PotentialRule::Explicit { values } => {
                if values.len() != n {
                    return Err(Error::Dimension { expected: n, got: values.len() });
                }
                Ok(values.clone())
            }
            PotentialRule::SparseSquares { alpha } => Ok(graph
                .levels()
                .into_iter()
                .map(|l| if is_positive_square(l) { *alpha } else { 0.0 })
                .collect()),
            PotentialRule::Radial { values } => {
                Ok(graph.levels().into_iter().map(|l| values.get(l).copied().unwrap_or(0.0)).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    values: Vec<f64>,
    norm: f64,
}

impl StateVector {
    pub fn new(values: Vec<f64>) -> Self {
        let norm = values.iter().map(|x| x * x).sum::<f64>().sqrt();
        StateVector { values, norm }
    }

    pub fn delta(n: usize, v: usize) -> Self {
        let mut values = vec![0.0; n];
        values[v] = 1.0;
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dot(&self, other: &StateVector) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }
}

#[derive(Debug, Clone)]
pub struct BallMatrix {
    pub view: BallView,
    pub entries: DenseMatrix,
}

#[derive(Debug, Clone)]
pub struct SchrodingerOperator<'g> {
    graph: &'g RootedGraph,
    potential: Vec<f64>,
    convention: Convention,
}

impl<'g> SchrodingerOperator<'g> {
    pub fn new(graph: &'g RootedGraph, potential: Vec<f64>, convention: Convention) -> Result<Self> {
        if potential.len() != graph.vertex_count() {
            return Err(Error::Dimension { expected: graph.vertex_count(), got: potential.len() });
        }
        Ok(SchrodingerOperator { graph, potential, convention })
    }

    pub fn from_rule(graph: &'g RootedGraph, rule: &PotentialRule, convention: Convention) -> Result<Self> {
        Self::new(graph, rule.evaluate(graph)?, convention)
    }

    pub fn free(graph: &'g RootedGraph, convention: Convention) -> Self {
        SchrodingerOperator { graph, potential: vec![0.0; graph.vertex_count()], convention }
    }

    pub fn graph(&self) -> &'g RootedGraph {
        self.graph
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn dim(&self) -> usize {
        self.potential.len()
    }

    pub fn diagonal(&self, v: usize) -> f64 {
        match self.convention {
            Convention::Adjacency => self.potential[v],
            Convention::Combinatorial => self.potential[v] - self.graph.degree(v) as f64,
        }
    }

    pub(crate) fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (v, yv) in y.iter_mut().enumerate() {
            let mut acc = self.diagonal(v) * x[v];
            for &u in self.graph.neighbors(v) {
                acc += x[u];
            }
            *yv = acc;
        }
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: psi.len() });
        }
        let mut out = vec![0.0; self.dim()];
        self.apply_into(psi.values(), &mut out);
        Ok(StateVector::new(out))
    }

    /// H restricted to `members`, indexed in the given order.
    pub fn restriction(&self, members: &[usize]) -> DenseMatrix {
        let index: std::collections::HashMap<usize, usize> =
            members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut m = DenseMatrix::zeros(members.len());
        for (i, &v) in members.iter().enumerate() {
            m[(i, i)] = self.diagonal(v);
            for &u in self.graph.neighbors(v) {
                if let Some(&j) = index.get(&u) {
                    m[(i, j)] = 1.0;
                }
            }
        }
        m
    }

    pub fn ball_matrix(&self, v: usize, r: usize) -> BallMatrix {
        let view = self.graph.ball(v, r);
        let entries = self.restriction(&view.members);
        BallMatrix { view, entries }
    }

    /// ‖(H − λ)ψ‖ / ‖ψ‖
    pub fn weyl_residual(&self, psi: &StateVector, lambda: f64) -> Result<f64> {
        if psi.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        let h_psi = self.apply(psi)?;
        let res: f64 = h_psi
            .values()
            .iter()
            .zip(psi.values())
            .map(|(hx, x)| (hx - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt();
        Ok(res / psi.norm())
    }

    /// Gershgorin bound on the spectral radius.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.dim())
            .map(|v| self.diagonal(v).abs() + self.graph.degree(v) as f64)
            .fold(0.0, f64::max)
    }
}
