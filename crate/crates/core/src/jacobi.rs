//! Half-line Jacobi matrices: tails, right limits, strong limits of tails and the
//! spherical decomposition of radial operators on spherically homogeneous trees.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::eigen::eig_sym_tridiag;
use crate::error::{Error, Result};
use crate::operator::{is_positive_square, SchrodingerOperator};

/// Finite Jacobi matrix: `a[i]` couples sites i and i+1, `b[i]` sits on the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiMatrix {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl JacobiMatrix {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if !b.is_empty() && a.len() + 1 != b.len() {
            return Err(Error::Dimension { expected: b.len().saturating_sub(1), got: a.len() });
        }
        if let Some((index, &value)) = a.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
            return Err(Error::NonPositiveOffDiagonal { index, value });
        }
        Ok(JacobiMatrix { a, b })
    }

    pub fn free(len: usize) -> Self {
        JacobiMatrix { a: vec![1.0; len.saturating_sub(1)], b: vec![0.0; len] }
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    /// The k-th tail: (J^[k])_{ij} = J_{i+k, j+k}.
    pub fn tail(&self, k: usize) -> Result<JacobiMatrix> {
        if k >= self.len() {
            return Err(Error::Parameter(format!("tail {k} of a matrix of length {}", self.len())));
        }
        Ok(JacobiMatrix { a: self.a[k..].to_vec(), b: self.b[k..].to_vec() })
    }

    pub fn truncate(&self, len: usize) -> JacobiMatrix {
        let len = len.min(self.len());
        JacobiMatrix { a: self.a[..len.saturating_sub(1)].to_vec(), b: self.b[..len].to_vec() }
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eig_sym_tridiag(&self.a, &self.b)
    }

    /// sup_j (|a_j| + |b_j| + 1/a_j)
    pub fn bound(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|j| {
                let a = self.a.get(j).copied();
                a.map_or(0.0, |x| x.abs() + 1.0 / x) + self.b[j].abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Index → value sequence rules, mirroring the potential rule grammar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum SequenceRule {
    Constant { c: f64 },
    /// α at positive perfect squares (0-based index), 0 elsewhere.
    SparseSquares { alpha: f64 },
    Periodic { values: Vec<f64> },
    /// Listed values, then `tail` forever.
    Explicit { values: Vec<f64>, #[serde(default)] tail: f64 },
}

impl SequenceRule {
    pub fn value(&self, i: usize) -> f64 {
        match self {
            SequenceRule::Constant { c } => *c,
            SequenceRule::SparseSquares { alpha } => {
                if is_positive_square(i) {
                    *alpha
                } else {
                    0.0
                }
            }
            SequenceRule::Periodic { values } => values[i % values.len()],
            SequenceRule::Explicit { values, tail } => values.get(i).copied().unwrap_or(*tail),
        }
    }
}

/// A rule-generated half-line Jacobi matrix, shifted by `offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiRule {
    pub a_rule: SequenceRule,
    pub b_rule: SequenceRule,
    #[serde(default)]
    pub offset: usize,
}

impl JacobiRule {
    pub fn new(a_rule: SequenceRule, b_rule: SequenceRule) -> Self {
        JacobiRule { a_rule, b_rule, offset: 0 }
    }

    pub fn free() -> Self {
        Self::new(SequenceRule::Constant { c: 1.0 }, SequenceRule::Constant { c: 0.0 })
    }

    /// J_H of the sparse-squares tree potential: a = (√d, √(d−1), √(d−1), …), b_n = q(n).
    pub fn sparse_tree(d: usize, alpha: f64) -> Self {
        let d = d as f64;
        Self::new(
            SequenceRule::Explicit { values: vec![d.sqrt()], tail: (d - 1.0).sqrt() },
            SequenceRule::SparseSquares { alpha },
        )
    }

    pub fn a(&self, i: usize) -> f64 {
        self.a_rule.value(i + self.offset)
    }

    pub fn b(&self, i: usize) -> f64 {
        self.b_rule.value(i + self.offset)
    }

    pub fn tail(&self, k: usize) -> JacobiRule {
        JacobiRule { offset: self.offset + k, ..self.clone() }
    }

    pub fn materialize(&self, len: usize) -> Result<JacobiMatrix> {
        JacobiMatrix::new((0..len.saturating_sub(1)).map(|i| self.a(i)).collect(), (0..len).map(|i| self.b(i)).collect())
    }
}

/// Two-sided window of a Jacobi matrix: sites −h..=h, with `a[i]` coupling sites i−h and i−h+1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoSidedPattern {
    pub half_width: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Centers at which this window (or a translate merged into it) was seen.
    pub occurrences: Vec<usize>,
    /// Other windows identified with this one up to translation.
    pub translates: Vec<(Vec<f64>, Vec<f64>)>,
}

fn window(rule: &JacobiRule, center: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let b = (center - h..=center + h).map(|i| rule.b(i)).collect();
    let a = (center - h..center + h).map(|i| rule.a(i)).collect();
    (a, b)
}

fn close(x: &[f64], y: &[f64], eps: f64) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(p, q)| (p - q).abs() <= eps)
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Windows `x` and `y` agree on their overlap after shifting by `s` and carry the same entries.
fn translates(x: &(Vec<f64>, Vec<f64>), y: &(Vec<f64>, Vec<f64>), eps: f64) -> bool {
    if !close(&sorted(&x.1), &sorted(&y.1), eps) || !close(&sorted(&x.0), &sorted(&y.0), eps) {
        return false;
    }
    let n = x.1.len() as isize;
    (1 - n..n).any(|s| {
        let b_ok = (0..n).all(|i| {
            let j = i + s;
            j < 0 || j >= n || (x.1[i as usize] - y.1[j as usize]).abs() <= eps
        });
        let a_ok = (0..n - 1).all(|i| {
            let j = i + s;
            j < 0 || j >= n - 1 || (x.0[i as usize] - y.0[j as usize]).abs() <= eps
        });
        b_ok && a_ok
    })
}

/// Offset of the window's deviation from its most common diagonal value, relative to the center.
fn feature_offset(b: &[f64], eps: f64) -> f64 {
    let mut counts: Vec<(f64, usize)> = Vec::new();
    for &x in b {
        match counts.iter_mut().find(|(y, _)| (x - y).abs() <= eps) {
            Some(entry) => entry.1 += 1,
            None => counts.push((x, 1)),
        }
    }
    let mode = counts.iter().max_by_key(|(_, c)| *c).map_or(0.0, |(y, _)| *y);
    let h = (b.len() / 2) as f64;
    let (mut mass, mut moment) = (0.0, 0.0);
    for (i, &x) in b.iter().enumerate() {
        let w = (x - mode).abs();
        mass += w;
        moment += w * (i as f64 - h);
    }
    if mass > eps {
        (moment / mass).abs()
    } else {
        0.0
    }
}

pub const MIN_OCCURRENCES: usize = 3;

/// Recurring two-sided windows of width `window` (odd) over centers in `centers`,
/// identified up to translation.
pub fn jacobi_right_limits(
    rule: &JacobiRule,
    window_width: usize,
    eps: f64,
    centers: std::ops::Range<usize>,
) -> Vec<TwoSidedPattern> {
    let h = window_width / 2;
    let mut classes: Vec<((Vec<f64>, Vec<f64>), Vec<usize>)> = Vec::new();
    for c in centers.start.max(h)..centers.end {
        let w = window(rule, c, h);
        match classes.iter_mut().find(|(rep, _)| close(&rep.0, &w.0, eps) && close(&rep.1, &w.1, eps)) {
            Some((_, occ)) => occ.push(c),
            None => classes.push((w, vec![c])),
        }
    }
    classes.retain(|(_, occ)| occ.len() >= MIN_OCCURRENCES);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..classes.len() {
        match groups.iter_mut().find(|g| translates(&classes[g[0]].0, &classes[i].0, eps)) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let rep = *g
                .iter()
                .min_by(|&&i, &&j| {
                    feature_offset(&classes[i].0 .1, eps).total_cmp(&feature_offset(&classes[j].0 .1, eps))
                })
                .unwrap();
            let mut occurrences: Vec<usize> = g.iter().flat_map(|&i| classes[i].1.clone()).collect();
            occurrences.sort_unstable();
            TwoSidedPattern {
                half_width: h,
                a: classes[rep].0 .0.clone(),
                b: classes[rep].0 .1.clone(),
                occurrences,
                translates: g.iter().filter(|&&i| i != rep).map(|&i| classes[i].0.clone()).collect(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailLimit {
    pub prefix: JacobiMatrix,
    pub occurrences: Vec<usize>,
}

/// Recurring length-`depth` prefixes of the tails J^[k], k ∈ `offsets`.
pub fn strong_limits_of_tails(
    rule: &JacobiRule,
    depth: usize,
    eps: f64,
    offsets: std::ops::Range<usize>,
    min_occurrences: usize,
) -> Result<Vec<TailLimit>> {
    let mut out: Vec<TailLimit> = Vec::new();
    for k in offsets {
        let prefix = rule.tail(k).materialize(depth)?;
        match out.iter_mut().find(|t| close(&t.prefix.a, &prefix.a, eps) && close(&t.prefix.b, &prefix.b, eps)) {
            Some(t) => t.occurrences.push(k),
            None => out.push(TailLimit { prefix, occurrences: vec![k] }),
        }
    }
    out.retain(|t| t.occurrences.len() >= min_occurrences);
    Ok(out)
}

/// Whether the half-line `prefix` restricted to the first h+1 sites is the right half of
/// some window in the class `pattern`.
pub fn restricts_to(pattern: &TwoSidedPattern, prefix: &JacobiMatrix, eps: f64) -> bool {
    let h = pattern.half_width;
    let members = std::iter::once((pattern.a.clone(), pattern.b.clone())).chain(pattern.translates.iter().cloned());
    for (a, b) in members {
        let (ra, rb) = (&a[h..], &b[h..]);
        let n = rb.len().min(prefix.len());
        if close(&rb[..n], &prefix.b[..n], eps) && close(&ra[..n - 1], &prefix.a[..n - 1], eps) {
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalComponent {
    pub matrix: JacobiMatrix,
    pub multiplicity: usize,
    /// Tree level of the component's first site.
    pub start_level: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalDecomposition {
    pub components: Vec<SphericalComponent>,
    pub total_dimension: usize,
}

impl SphericalDecomposition {
    /// Multiset union of component spectra, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.total_dimension);
        for c in &self.components {
            let ev = c.matrix.eigenvalues()?;
            for _ in 0..c.multiplicity {
                out.extend_from_slice(&ev);
            }
        }
        out.sort_by(f64::total_cmp);
        Ok(out)
    }
}

/// Splits a radial operator on a spherically homogeneous rooted tree, restricted to
/// B_depth(root), into half-line Jacobi pieces. S_n starts at level n−1, has couplings
/// √κ(ℓ) where κ(ℓ) is the number of children at level ℓ, and appears
/// S(n−1) − S(n−2) times.
pub fn spherical_decompose(h: &SchrodingerOperator<'_>, depth: usize) -> Result<SphericalDecomposition> {
    let g = h.graph();
    let root = g.root();
    let levels = g.levels();
    let mut spheres: Vec<Vec<usize>> = vec![Vec::new(); depth + 1];
    for (v, &l) in levels.iter().enumerate() {
        if l <= depth {
            spheres[l].push(v);
        }
    }
    if spheres.iter().any(Vec::is_empty) {
        return Err(Error::Parameter(format!("tree has fewer than {depth} levels")));
    }
    let mut kappa = Vec::with_capacity(depth);
    for l in 0..=depth {
        let mut counts = BTreeMap::new();
        for &v in &spheres[l] {
            let children = g.neighbors(v).iter().filter(|&&u| levels[u] == l + 1).count();
            let same = g.neighbors(v).iter().filter(|&&u| levels[u] == l).count();
            let parents = g.neighbors(v).iter().filter(|&&u| levels[u] + 1 == l).count();
            if same > 0 || parents != usize::from(v != root) {
                return Err(Error::Parameter(format!("vertex {v} breaks the tree structure")));
            }
            *counts.entry(children).or_insert(0) += 1;
        }
        if l < depth {
            if counts.len() != 1 {
                return Err(Error::Parameter(format!("level {l} is not spherically homogeneous")));
            }
            kappa.push(*counts.keys().next().unwrap());
        }
    }
    let mut diag = Vec::with_capacity(depth + 1);
    for sphere in &spheres {
        let first = h.diagonal(sphere[0]);
        if let Some(&v) = sphere.iter().find(|&&v| (h.diagonal(v) - first).abs() > 1e-12) {
            return Err(Error::NotSpherical { level: levels[v], first, other: h.diagonal(v) });
        }
        diag.push(first);
    }
    let a_full: Vec<f64> = kappa.iter().map(|&k| (k as f64).sqrt()).collect();
    let mut components = Vec::new();
    for start in 0..=depth {
        let multiplicity = if start == 0 { 1 } else { spheres[start].len() - spheres[start - 1].len() };
        if multiplicity == 0 {
            continue;
        }
        let matrix = JacobiMatrix::new(a_full[start..].to_vec(), diag[start..].to_vec())?;
        components.push(SphericalComponent { matrix, multiplicity, start_level: start });
    }
    let total_dimension = components.iter().map(|c| c.multiplicity * c.matrix.len()).sum();
    Ok(SphericalDecomposition { components, total_dimension })
}
