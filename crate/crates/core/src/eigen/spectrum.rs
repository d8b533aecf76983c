use serde::Serialize;

use super::dense::eig_sym_dense;
use super::lanczos::lanczos;
use crate::error::{Error, Result};
use crate::operator::{SchrodingerOperator, StateVector};

const DENSE_LIMIT: usize = 4000;
const LANCZOS_STEPS: usize = 600;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityEntry {
    pub from_radius: usize,
    pub to_radius: usize,
    pub hausdorff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumApproximation {
    pub eigenvalues: Vec<f64>,
    pub intervals: Vec<(f64, f64)>,
    pub residual_certificates: Option<Vec<f64>>,
    pub truncation_radius: usize,
    pub stability: Vec<StabilityEntry>,
}

impl SpectrumApproximation {
    /// Clusters a sorted eigenvalue list; `gap` defaults to 10·diameter/N.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, gap: Option<f64>, truncation_radius: usize) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let gap = gap.unwrap_or_else(|| default_gap(&eigenvalues));
        let intervals = cluster_intervals(&eigenvalues, gap);
        SpectrumApproximation {
            eigenvalues,
            intervals,
            residual_certificates: None,
            truncation_radius,
            stability: Vec::new(),
        }
    }

    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }

    /// Distance from `x` to the nearest interval (0 inside).
    pub fn distance_to(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| if x < lo { lo - x } else if x > hi { x - hi } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn default_gap(sorted: &[f64]) -> f64 {
    match (sorted.first(), sorted.last()) {
        (Some(lo), Some(hi)) => 10.0 * (hi - lo) / sorted.len() as f64,
        _ => 0.0,
    }
}

/// Merges neighbouring eigenvalues closer than `gap` into intervals.
pub fn cluster_intervals(sorted: &[f64], gap: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &x in sorted {
        match out.last_mut() {
            Some(last) if x - last.1 <= gap => last.1 = x,
            _ => out.push((x, x)),
        }
    }
    out
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[f64], b: &[f64]) -> f64 {
    let one_sided = |xs: &[f64], ys: &[f64]| {
        xs.iter()
            .map(|x| ys.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// max(|lo − lo'|, |hi − hi'|) for the hull of `intervals` against [lo', hi'].
pub fn hull_distance(intervals: &[(f64, f64)], lo: f64, hi: f64) -> f64 {
    if intervals.is_empty() {
        return f64::INFINITY;
    }
    let a = intervals.iter().map(|i| i.0).fold(f64::INFINITY, f64::min);
    let b = intervals.iter().map(|i| i.1).fold(f64::NEG_INFINITY, f64::max);
    (a - lo).abs().max((b - hi).abs())
}

fn ball_eigenvalues(h: &SchrodingerOperator<'_>, center: usize, radius: usize) -> Result<Vec<f64>> {
    let bm = h.ball_matrix(center, radius);
    if bm.view.len() <= DENSE_LIMIT {
        return Ok(eig_sym_dense(&bm.entries, false)?.values);
    }
    let members = &bm.view.members;
    let local = &bm.view.index_of;
    let diag: Vec<f64> = members.iter().map(|&v| h.diagonal(v)).collect();
    let nbrs: Vec<Vec<usize>> = members
        .iter()
        .map(|&v| h.graph().neighbors(v).iter().filter_map(|u| local.get(u).copied()).collect())
        .collect();
    let matvec = |x: &[f64], y: &mut [f64]| {
        for i in 0..x.len() {
            y[i] = diag[i] * x[i] + nbrs[i].iter().map(|&j| x[j]).sum::<f64>();
        }
    };
    let mut start = vec![0.0; members.len()];
    start[0] = 1.0;
    Ok(lanczos(matvec, &start, LANCZOS_STEPS)?.ritz)
}

/// Eigenvalues of H restricted to B_r(center) for each radius; clusters the largest.
pub fn spectrum_approx(
    h: &SchrodingerOperator<'_>,
    center: usize,
    radii: &[usize],
    gap_threshold: Option<f64>,
) -> Result<SpectrumApproximation> {
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter("radii must be non-empty and increasing".into()));
    }
    let rmax = *radii.last().unwrap();
    let reach = h.graph().multi_source_distances(&[center], rmax);
    if h.graph().frontier().iter().any(|&f| reach[f] < rmax) {
        return Err(Error::BallExceedsGraph { center, radius: rmax });
    }
    let mut spectra = Vec::with_capacity(radii.len());
    for &r in radii {
        spectra.push(ball_eigenvalues(h, center, r)?);
    }
    let stability = radii
        .windows(2)
        .zip(spectra.windows(2))
        .map(|(r, s)| StabilityEntry { from_radius: r[0], to_radius: r[1], hausdorff: hausdorff(&s[0], &s[1]) })
        .collect();
    let mut approx = SpectrumApproximation::from_eigenvalues(spectra.pop().unwrap(), gap_threshold, rmax);
    approx.stability = stability;
    Ok(approx)
}

/// Weyl residual in the whole graph of each ball eigenvector extended by zero.
pub fn certify_ball_spectrum(h: &SchrodingerOperator<'_>, center: usize, radius: usize) -> Result<SpectrumApproximation> {
    let bm = h.ball_matrix(center, radius);
    let eig = eig_sym_dense(&bm.entries, true)?;
    let vecs = eig.vectors.as_ref().unwrap();
    let mut certs = Vec::with_capacity(eig.values.len());
    for (k, &lambda) in eig.values.iter().enumerate() {
        let mut psi = vec![0.0; h.dim()];
        for (i, &v) in bm.view.members.iter().enumerate() {
            psi[v] = vecs[(i, k)];
        }
        certs.push(h.weyl_residual(&StateVector::new(psi), lambda)?);
    }
    let mut approx = SpectrumApproximation::from_eigenvalues(eig.values, None, radius);
    approx.residual_certificates = Some(certs);
    Ok(approx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::RootedGraph;
    use crate::operator::Convention;

    fn path(n: usize, root: usize) -> RootedGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        RootedGraph::from_edges(n, root, &edges).unwrap().with_frontier(vec![0, n - 1]).unwrap()
    }

    #[test]
    fn path_spectrum_fills_interval() {
        let g = path(401, 200);
        let h = SchrodingerOperator::free(&g, Convention::Adjacency);
        let s = spectrum_approx(&h, 200, &[100, 200], Some(0.1)).unwrap();
        assert_eq!(s.intervals.len(), 1);
        assert!(hull_distance(&s.intervals, -2.0, 2.0) < 0.01);
        assert_eq!(s.stability.len(), 1);
        assert!(spectrum_approx(&h, 200, &[201], None).is_err());
        assert!(spectrum_approx(&h, 200, &[20, 10], None).is_err());
    }

    #[test]
    fn zero_operator_is_a_point() {
        let g = RootedGraph::from_edges(1, 0, &[]).unwrap();
        let h = SchrodingerOperator::free(&g, Convention::Adjacency);
        let s = spectrum_approx(&h, 0, &[0], None).unwrap();
        assert_eq!(s.intervals, vec![(0.0, 0.0)]);
    }

    #[test]
    fn clustering_detects_gaps() {
        let iv = cluster_intervals(&[0.0, 0.1, 0.2, 1.0, 1.05, 3.0], 0.15);
        assert_eq!(iv, vec![(0.0, 0.2), (1.0, 1.05), (3.0, 3.0)]);
        assert_eq!(hausdorff(&[0.0, 1.0], &[0.0, 0.5, 1.0]), 0.5);
    }

    #[test]
    fn certificates_are_boundary_leakage() {
        let g = path(41, 20);
        let h = SchrodingerOperator::free(&g, Convention::Adjacency);
        let s = certify_ball_spectrum(&h, 20, 5).unwrap();
        let certs = s.residual_certificates.unwrap();
        assert_eq!(certs.len(), 11);
        assert!(certs.iter().all(|&c| c > 0.0 && c < 1.0));
    }
}
