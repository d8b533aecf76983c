//! Pyramid and annuli partitions of unity and the localization commutator
//! C^(r) = −2 Σ_u [H, ψ_{u,r}]².

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{RootedGraph, UNREACHED};
use crate::operator::SchrodingerOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKind {
    /// χ_{u,r}(v) = (r − dist(u,v))/r, one center per vertex.
    Pyramid,
    /// χ_{k,r}(v) = 1 − ||v| − k|/r, one center per integer level k.
    Annuli,
}

#[derive(Debug, Clone)]
pub struct PartitionOfUnity<'g> {
    graph: &'g RootedGraph,
    pub kind: PartitionKind,
    pub radius: usize,
    /// c_r²(u) per vertex center (pyramid; NaN beyond reach of the interior); empty for annuli.
    pub center_norms: Vec<f64>,
    /// η_r²(v) (pyramid) or Σ_k χ²_{k,r}(v) (annuli).
    pub vertex_norms: Vec<f64>,
    pub interior: Vec<usize>,
    levels: Vec<usize>,
}

fn pyramid(r: usize, d: usize) -> f64 {
    if d >= r {
        0.0
    } else {
        (r - d) as f64 / r as f64
    }
}

fn annulus(r: usize, level: usize, k: i64) -> f64 {
    let gap = (level as i64 - k).unsigned_abs() as usize;
    pyramid(r, gap)
}

/// Distances from `v` to every vertex within `radius`.
fn local_distances(g: &RootedGraph, v: usize, radius: usize) -> HashMap<usize, usize> {
    let ball = g.ball(v, radius);
    ball.members.into_iter().zip(ball.distances).collect()
}

impl<'g> PartitionOfUnity<'g> {
    pub fn graph(&self) -> &'g RootedGraph {
        self.graph
    }

    /// Annuli centers that can be nonzero somewhere on the graph.
    fn annulus_centers(&self, level: usize) -> std::ops::RangeInclusive<i64> {
        let r = self.radius as i64;
        (level as i64 - r + 1)..=(level as i64 + r - 1)
    }

    /// ψ_{u,r}(v) for a vertex center at distance `dist` (pyramid).
    fn psi_pyramid(&self, u: usize, v: usize, dist: usize) -> f64 {
        let chi = pyramid(self.radius, dist);
        if chi == 0.0 {
            0.0
        } else {
            chi / (self.center_norms[u] * self.vertex_norms[v]).sqrt()
        }
    }

    fn psi_annulus(&self, k: i64, v: usize) -> f64 {
        annulus(self.radius, self.levels[v], k) / self.vertex_norms[v].sqrt()
    }

    /// Σ_u ψ²_{u,r}(v)
    pub fn partition_sum(&self, v: usize) -> f64 {
        match self.kind {
            PartitionKind::Pyramid => local_distances(self.graph, v, self.radius)
                .into_iter()
                .map(|(u, d)| self.psi_pyramid(u, v, d).powi(2))
                .sum(),
            PartitionKind::Annuli => self.annulus_centers(self.levels[v]).map(|k| self.psi_annulus(k, v).powi(2)).sum(),
        }
    }
}

/// Partition of unity of the given kind. Pyramid entries are exact at distance ≥ 2r+2 from
/// the truncation frontier; annuli entries depend only on levels and are exact at distance ≥ 2.
pub fn build_partition<'g>(
    g: &'g RootedGraph,
    h: &SchrodingerOperator<'_>,
    kind: PartitionKind,
    r: usize,
) -> Result<PartitionOfUnity<'g>> {
    if r == 0 {
        return Err(Error::Parameter("partition radius must be ≥ 1".into()));
    }
    if h.dim() != g.vertex_count() {
        return Err(Error::Dimension { expected: g.vertex_count(), got: h.dim() });
    }
    let n = g.vertex_count();
    let margin = match kind {
        PartitionKind::Pyramid => 2 * r + 2,
        PartitionKind::Annuli => 2,
    };
    let fd = g.frontier_distances();
    let interior: Vec<usize> = (0..n).filter(|&v| fd[v] == UNREACHED || fd[v] >= margin).collect();
    if interior.is_empty() {
        return Err(Error::Parameter(format!("no vertex at distance ≥ {margin} from the truncation frontier")));
    }
    let levels = g.levels();
    let (center_norms, vertex_norms) = match kind {
        PartitionKind::Pyramid => {
            // only what the interior can see; NaN elsewhere
            let reach = g.multi_source_distances(&interior, r + 1);
            let c2: Vec<f64> = (0..n)
                .map(|u| {
                    if reach[u] > r + 1 {
                        return f64::NAN;
                    }
                    g.ball(u, r - 1).distances.iter().map(|&d| pyramid(r, d).powi(2)).sum()
                })
                .collect();
            let eta2 = (0..n)
                .map(|v| {
                    if reach[v] > 2 {
                        return f64::NAN;
                    }
                    let ball = g.ball(v, r - 1);
                    ball.members.iter().zip(&ball.distances).map(|(&u, &d)| pyramid(r, d).powi(2) / c2[u]).sum()
                })
                .collect();
            (c2, eta2)
        }
        PartitionKind::Annuli => {
            let s: f64 = (1 - r as i64..r as i64).map(|m| annulus(r, 0, m).powi(2)).sum();
            (Vec::new(), vec![s; n])
        }
    };
    Ok(PartitionOfUnity { graph: g, kind, radius: r, center_norms, vertex_norms, interior, levels })
}

/// C^(r) restricted to the interior mask, stored by rows.
#[derive(Debug, Clone)]
pub struct CommutatorOperator {
    pub radius: usize,
    /// Sorted global ids of the interior vertices.
    pub interior_mask: Vec<usize>,
    /// rows[i] lists (j, C_{v_i, v_j}) for interior indices j.
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl CommutatorOperator {
    pub fn entry(&self, v: usize, w: usize) -> Option<f64> {
        let i = self.interior_mask.binary_search(&v).ok()?;
        let j = self.interior_mask.binary_search(&w).ok()?;
        Some(self.rows[i].iter().find(|(k, _)| *k == j).map_or(0.0, |e| e.1))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().find(|(j, _)| *j == i).map_or(0.0, |e| e.1))
            .collect()
    }

    pub fn diag_min_abs(&self) -> f64 {
        self.diagonal().into_iter().map(f64::abs).fold(f64::INFINITY, f64::min)
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, x) in row {
                let y = self.rows[j].iter().find(|(k, _)| *k == i).map_or(0.0, |e| e.1);
                worst = worst.max((x - y).abs());
            }
        }
        worst
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (yi, row) in y.iter_mut().zip(&self.rows) {
            *yi = row.iter().map(|&(j, c)| c * x[j]).sum();
        }
    }

    /// Largest eigenvalue (C is positive semidefinite, so this is the norm) by power
    /// iteration from the constant vector, to relative tolerance `tol`.
    pub fn norm(&self, tol: f64, max_iter: usize) -> f64 {
        let n = self.rows.len();
        let mut x = vec![1.0 / (n as f64).sqrt(); n];
        let mut y = vec![0.0; n];
        let mut estimate = 0.0;
        for _ in 0..max_iter {
            self.apply(&x, &mut y);
            let next: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            let len = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if len == 0.0 {
                return 0.0;
            }
            for (xi, yi) in x.iter_mut().zip(&y) {
                *xi = yi / len;
            }
            if (next - estimate).abs() <= tol * next.abs() {
                return next;
            }
            estimate = next;
        }
        estimate
    }
}

/// Exact C^(r) entries on the interior: C_{vw} = 2 Σ_u Σ_{x∼v, x∼w} (ψ_u(x) − ψ_u(v))(ψ_u(x) − ψ_u(w)).
/// The potential drops out since [Q, ψ] = 0.
pub fn assemble_commutator(p: &PartitionOfUnity<'_>, h: &SchrodingerOperator<'_>) -> Result<CommutatorOperator> {
    let g = p.graph();
    if h.dim() != g.vertex_count() {
        return Err(Error::Dimension { expected: g.vertex_count(), got: h.dim() });
    }
    if p.interior.is_empty() {
        return Err(Error::Parameter("empty interior".into()));
    }
    let index: HashMap<usize, usize> = p.interior.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let r = p.radius;
    let mut rows = Vec::with_capacity(p.interior.len());
    for &v in &p.interior {
        let near = g.ball(v, 2);
        // ψ_u(y) for every center u touching B_2(v) and every y in B_2(v)
        let psi: HashMap<usize, Vec<(i64, f64)>> = near
            .members
            .iter()
            .map(|&y| {
                let values = match p.kind {
                    PartitionKind::Pyramid => local_distances(g, y, r - 1)
                        .into_iter()
                        .map(|(u, d)| (u as i64, p.psi_pyramid(u, y, d)))
                        .collect(),
                    PartitionKind::Annuli => {
                        p.annulus_centers(p.levels[y]).map(|k| (k, p.psi_annulus(k, y))).collect()
                    }
                };
                (y, values)
            })
            .collect();
        let lookup = |y: usize| -> HashMap<i64, f64> { psi[&y].iter().copied().collect() };
        let psi_v = lookup(v);
        let mut row: HashMap<usize, f64> = HashMap::new();
        for &x in g.neighbors(v) {
            let psi_x = lookup(x);
            for &w in g.neighbors(x) {
                let Some(&j) = index.get(&w) else { continue };
                let psi_w = lookup(w);
                let mut centers: Vec<i64> = psi_x.keys().chain(psi_v.keys()).chain(psi_w.keys()).copied().collect();
                centers.sort_unstable();
                centers.dedup();
                let mut acc = 0.0;
                for u in centers {
                    let at = |m: &HashMap<i64, f64>| m.get(&u).copied().unwrap_or(0.0);
                    acc += (at(&psi_x) - at(&psi_v)) * (at(&psi_x) - at(&psi_w));
                }
                *row.entry(j).or_insert(0.0) += 2.0 * acc;
            }
        }
        let mut row: Vec<(usize, f64)> = row.into_iter().collect();
        row.sort_unstable_by_key(|e| e.0);
        rows.push(row);
    }
    Ok(CommutatorOperator { radius: r, interior_mask: p.interior.clone(), rows })
}

/// Both sides of the weighted Hardy inequality
/// Σ λ_n (Σ_{k≤n} a_k)^p ≤ p^p Σ λ_n^{1−p} (Σ_{k≥n} λ_k)^p a_n^p.
pub fn hardy_sides(lambda: &[f64], a: &[f64], p: f64) -> (f64, f64) {
    let n = lambda.len().min(a.len());
    let mut lhs = 0.0;
    let mut partial = 0.0;
    for i in 0..n {
        partial += a[i];
        lhs += lambda[i] * partial.powf(p);
    }
    let mut rhs = 0.0;
    for i in 0..n {
        if lambda[i] > 0.0 {
            let tail: f64 = lambda[i..n].iter().sum();
            rhs += lambda[i].powf(1.0 - p) * tail.powf(p) * a[i].powf(p);
        }
    }
    (lhs, p.powf(p) * rhs)
}

/// The p = 2 instance from the exponential-growth bound: λ_n = S(r−n), a_n = x_r(n) =
/// f_r(r−n) − f_r(r−n+1), n = 1..r−1, for a profile f_r given by its values f_r(0..=r).
pub fn leindler_check(spheres: &[usize], profile: &[f64], r: usize) -> (f64, f64) {
    let lambda: Vec<f64> = (1..r).map(|n| spheres[r - n] as f64).collect();
    let a: Vec<f64> = (1..r).map(|n| profile[r - n] - profile[r - n + 1]).collect();
    hardy_sides(&lambda, &a, 2.0)
}

/// f_r(k) = (r − k)/r on 0..=r.
pub fn pyramid_profile(r: usize) -> Vec<f64> {
    (0..=r).map(|k| pyramid(r, k)).collect()
}
