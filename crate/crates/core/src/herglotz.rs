//! Closed-form m-functions, rank-one perturbations and eigenvalue certificates.

use num_complex::Complex64;
use serde::Serialize;

use crate::eigen::{eig_sym_tridiag, SpectrumApproximation};
use crate::error::{Error, Result};

/// Default distance above the real axis for boundary-value heuristics.
pub const BOUNDARY_EPS: f64 = 1e-6;

/// √(z² − c²) with its cut on [−c, c] and √(z² − c²) ~ z at infinity.
pub fn sqrt_off_cut(z: Complex64, c: f64) -> Complex64 {
    (z - c).sqrt() * (z + c).sqrt()
}

fn check_off_cut(z: Complex64, edge: f64) -> Result<()> {
    if z.im == 0.0 && z.re.abs() <= edge {
        return Err(Error::OnCut(format!("{z}")));
    }
    Ok(())
}

/// m of the free half-line: (−z + √(z²−4))/2.
pub fn m_halfline_free(z: Complex64) -> Result<Complex64> {
    check_off_cut(z, 2.0)?;
    Ok((-z + sqrt_off_cut(z, 2.0)) / 2.0)
}

/// m of the free line at a site: −1/√(z²−4).
pub fn m_line_free(z: Complex64) -> Result<Complex64> {
    check_off_cut(z, 2.0)?;
    Ok(-sqrt_off_cut(z, 2.0).inv())
}

/// m of the d-regular tree at a vertex: −2(d−1)/((d−2)z + d√(z²−4(d−1))).
pub fn m_tree(z: Complex64, d: usize) -> Result<Complex64> {
    let edge = 2.0 * ((d - 1) as f64).sqrt();
    check_off_cut(z, edge)?;
    let d = d as f64;
    Ok(Complex64::new(-2.0 * (d - 1.0), 0.0) / ((d - 2.0) * z + d * sqrt_off_cut(z, edge)))
}

/// Diagonal Green function of the free half-line at site k ≥ 1: with z = x + 1/x, |x| < 1,
/// G_k(z) = (1 − x^{2k})/(x − 1/x).
pub fn g_halfline_site(z: Complex64, k: usize) -> Result<Complex64> {
    check_off_cut(z, 2.0)?;
    let x = (z - sqrt_off_cut(z, 2.0)) / 2.0;
    Ok((Complex64::new(1.0, 0.0) - x.powu(2 * k as u32)) / (x - x.inv()))
}

/// Result of evaluating an m-function; a rank-one transform can hit a pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MValue {
    Finite(Complex64),
    Pole,
}

impl MValue {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            MValue::Finite(v) => Some(v),
            MValue::Pole => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MFunction {
    /// Free half-line scaled by `scale` (couplings all equal to `scale`).
    HalfLine { scale: f64 },
    Line { scale: f64 },
    Tree { d: usize },
    /// Site `k` (1-based) of the scaled free half-line.
    HalfLineSite { k: usize, scale: f64 },
    RankOne { base: Box<MFunction>, alpha: f64 },
}

/// F_α = F/(1 + αF).
pub fn rank_one_transform(f: MFunction, alpha: f64) -> MFunction {
    MFunction::RankOne { base: Box::new(f), alpha }
}

impl MFunction {
    pub fn eval(&self, z: Complex64) -> Result<MValue> {
        let scaled = |scale: f64, f: &dyn Fn(Complex64) -> Result<Complex64>| -> Result<MValue> {
            Ok(MValue::Finite(f(z / scale)? / scale))
        };
        match self {
            MFunction::HalfLine { scale } => scaled(*scale, &m_halfline_free),
            MFunction::Line { scale } => scaled(*scale, &m_line_free),
            MFunction::Tree { d } => Ok(MValue::Finite(m_tree(z, *d)?)),
            MFunction::HalfLineSite { k, scale } => scaled(*scale, &|w| g_halfline_site(w, *k)),
            MFunction::RankOne { base, alpha } => match base.eval(z)? {
                MValue::Finite(f) => {
                    let denom = 1.0 + alpha * f;
                    if denom.norm() <= 1e-14 * (1.0 + alpha.abs() * f.norm()) {
                        Ok(MValue::Pole)
                    } else {
                        Ok(MValue::Finite(f / denom))
                    }
                }
                MValue::Pole => Ok(MValue::Finite(Complex64::new(1.0 / alpha, 0.0))),
            },
        }
    }

    /// Tridiagonal model (a, b, site) whose resolvent diagonal this function is, truncated to `n` sites.
    pub fn truncated_model(&self, n: usize) -> (Vec<f64>, Vec<f64>, usize) {
        match self {
            MFunction::HalfLine { scale } => (vec![*scale; n - 1], vec![0.0; n], 0),
            MFunction::Line { scale } => {
                let n = n | 1;
                (vec![*scale; n - 1], vec![0.0; n], n / 2)
            }
            MFunction::Tree { d } => {
                let mut a = vec![((d - 1) as f64).sqrt(); n - 1];
                a[0] = (*d as f64).sqrt();
                (a, vec![0.0; n], 0)
            }
            MFunction::HalfLineSite { k, scale } => (vec![*scale; n - 1], vec![0.0; n], k - 1),
            MFunction::RankOne { base, alpha } => {
                let (a, mut b, site) = base.truncated_model(n);
                b[site] += alpha;
                (a, b, site)
            }
        }
    }
}

/// ⟨δ_site, (J − z)^{−1} δ_site⟩ by two-sided tridiagonal elimination.
pub fn tridiag_resolvent_diag(a: &[f64], b: &[f64], z: Complex64, site: usize) -> Complex64 {
    let n = b.len();
    // Schur complements from the top and from the bottom.
    let mut top = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut d = Complex64::new(b[i], 0.0) - z;
        if i > 0 {
            d -= a[i - 1] * a[i - 1] / top[i - 1];
        }
        top[i] = d;
    }
    let mut bottom = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut d = Complex64::new(b[i], 0.0) - z;
        if i + 1 < n {
            d -= a[i] * a[i] / bottom[i + 1];
        }
        bottom[i] = d;
    }
    let diag = Complex64::new(b[site], 0.0) - z;
    (top[site] + bottom[site] - diag).inv()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertificateKind {
    IsolatedPoint,
    NotInSpectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenvalueCertificate {
    pub lambda: f64,
    pub kind: CertificateKind,
    /// Root residual (isolated points) or |1 − m_T m_ℕ| (non-membership).
    pub witness: f64,
}

/// Pole of the rank-one perturbed line: z₀ = sign(α)√(α² + 4(d−1)).
pub fn z0(d: usize, alpha: f64) -> f64 {
    alpha.signum() * (alpha * alpha + 4.0 * (d - 1) as f64).sqrt()
}

/// Pole of the rank-one perturbed half-line at its first site: z₁ = α + (d−1)/α.
pub fn z1(d: usize, alpha: f64) -> f64 {
    alpha + (d - 1) as f64 / alpha
}

/// f_k(x) = x(1 + x² + … + x^{2k−2})
pub fn f_k(x: f64, k: usize) -> f64 {
    let x2 = x * x;
    let mut sum = 0.0;
    let mut p = 1.0;
    for _ in 0..k {
        sum += p;
        p *= x2;
    }
    x * sum
}

/// f_k'(x) = Σ_{j<k} (2j+1) x^{2j} > 0
pub fn f_k_derivative(x: f64, k: usize) -> f64 {
    let x2 = x * x;
    let mut p = 1.0;
    let mut sum = 0.0;
    for j in 0..k {
        sum += (2 * j + 1) as f64 * p;
        p *= x2;
    }
    sum
}

/// Eigenvalue of √(d−1)·(free half-line) + α δ_k: root x_k of f_k(x) = √(d−1)/α by bisection,
/// then z_k = √(d−1)(x_k + 1/x_k). A bound state needs |x_k| < 1.
pub fn solve_zk(k: usize, d: usize, alpha: f64) -> Result<EigenvalueCertificate> {
    if k == 0 || alpha == 0.0 || d < 2 {
        return Err(Error::Parameter(format!("solve_zk needs k ≥ 1, d ≥ 2, α ≠ 0 (got {k}, {d}, {alpha})")));
    }
    let s = ((d - 1) as f64).sqrt();
    let beta = s / alpha;
    if beta.abs() >= k as f64 {
        return Err(Error::NoBoundState(format!("|β| = {} ≥ k = {k}", beta.abs())));
    }
    let (mut lo, mut hi) = if beta > 0.0 { (0.0, 1.0) } else { (-1.0, 0.0) };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f_k(mid, k) < beta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = if (f_k(lo, k) - beta).abs() <= (f_k(hi, k) - beta).abs() { lo } else { hi };
    Ok(EigenvalueCertificate {
        lambda: s * (x + 1.0 / x),
        kind: CertificateKind::IsolatedPoint,
        witness: (f_k(x, k) - beta).abs(),
    })
}

/// Isolated eigenvalue k/√(k−1) of the star of k half-lines, root of z + k·m_ℕ(z) = 0.
pub fn star_eigenvalue(k: usize) -> Result<EigenvalueCertificate> {
    if k < 3 {
        return Err(Error::Parameter(format!("star needs k ≥ 3, got {k}")));
    }
    let lambda = k as f64 / ((k - 1) as f64).sqrt();
    let z = Complex64::new(lambda, 0.0);
    let residual = (z + k as f64 * m_halfline_free(z)?).norm();
    Ok(EigenvalueCertificate { lambda, kind: CertificateKind::IsolatedPoint, witness: residual })
}

/// λ = d is not in σ(A_T̃), the d-regular tree with a half-line glued to its root:
/// 1 − m_T(d) m_ℕ(d) ≠ 0 and d lies outside both free spectra.
pub fn certify_counterexample_gap(d: usize) -> Result<EigenvalueCertificate> {
    if d < 3 {
        return Err(Error::Parameter(format!("degree {d} < 3")));
    }
    let disc = d * d - 4;
    let root = (disc as f64).sqrt().round() as usize;
    assert!(root * root != disc, "d² − 4 is never a perfect square for d > 2");
    let z = Complex64::new(d as f64, 0.0);
    let witness = (1.0 - m_tree(z, d)? * m_halfline_free(z)?).norm();
    let tree_edge = 2.0 * ((d - 1) as f64).sqrt();
    if !(d as f64 > tree_edge && witness > 0.0) {
        return Err(Error::Parameter(format!("certificate failed for d = {d}")));
    }
    Ok(EigenvalueCertificate { lambda: d as f64, kind: CertificateKind::NotInSpectrum, witness })
}

/// 1 − (d−1)(d − √(d²−4))/(2d(d−2))
pub fn counterexample_witness_closed_form(d: usize) -> f64 {
    let d = d as f64;
    1.0 - (d - 1.0) * (d - (d * d - 4.0).sqrt()) / (2.0 * d * (d - 2.0))
}

/// Witness recomputed from truncated resolvents of the radial model of T̃: a half-line of
/// `depth` sites, the root, then `depth` shells coupled by √d then √(d−1).
pub fn counterexample_witness_oracle(d: usize, depth: usize) -> f64 {
    let z = Complex64::new(d as f64, 0.0);
    let sd = (d as f64).sqrt();
    let sd1 = ((d - 1) as f64).sqrt();
    let mut a_tree = vec![sd1; depth];
    a_tree[0] = sd;
    let m_t = tridiag_resolvent_diag(&a_tree, &vec![0.0; depth + 1], z, 0);
    let mut a = vec![1.0; depth];
    a.extend_from_slice(&a_tree);
    let m_glued = tridiag_resolvent_diag(&a, &vec![0.0; 2 * depth + 1], z, depth);
    (m_t / m_glued).norm()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombEdge {
    pub theta: f64,
    pub top: f64,
    pub bottom: f64,
    /// 2√(1 + cos²θ)
    pub predicted_edge: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombSweep {
    pub union: SpectrumApproximation,
    pub edges: Vec<CombEdge>,
}

/// Spectra of A_ℤ + 2cosθ δ₀ on a centered window of N sites, for every θ on the grid.
pub fn comb_sweep(thetas: &[f64], n: usize) -> Result<CombSweep> {
    if n % 2 == 0 {
        return Err(Error::Parameter(format!("truncation {n} must be odd")));
    }
    let a = vec![1.0; n - 1];
    let mut all = Vec::with_capacity(thetas.len() * n);
    let mut edges = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let mut b = vec![0.0; n];
        b[n / 2] = 2.0 * theta.cos();
        let ev = eig_sym_tridiag(&a, &b)?;
        edges.push(CombEdge {
            theta,
            top: *ev.last().unwrap(),
            bottom: ev[0],
            predicted_edge: 2.0 * (1.0 + theta.cos().powi(2)).sqrt(),
        });
        all.extend(ev);
    }
    Ok(CombSweep { union: SpectrumApproximation::from_eigenvalues(all, None, n / 2), edges })
}

impl CombEdge {
    /// Largest |λ| of the truncation against the predicted edge.
    pub fn edge_error(&self) -> f64 {
        (self.top.abs().max(self.bottom.abs()) - self.predicted_edge).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn half_line_values() {
        let m = m_halfline_free(c(3.0, 0.0)).unwrap();
        assert!((m.re - (-3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        let far = m_halfline_free(c(100.0, 0.0)).unwrap();
        assert!((far.re + 0.0100010).abs() < 1e-7);
        assert!(m_halfline_free(c(0.0, 1.0)).unwrap().im > 0.0);
        assert!(m_halfline_free(c(1.0, 0.0)).is_err());
        let neg = m_halfline_free(c(-3.0, 0.0)).unwrap();
        assert!((neg.re - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn line_and_tree_values() {
        assert!((m_line_free(c(3.0, 0.0)).unwrap().re + 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((m_tree(c(6.0, 0.0), 6).unwrap().re + 10.0 / 48.0).abs() < 1e-15);
        let big = m_tree(c(1000.0, 0.0), 4).unwrap();
        assert!((big.re + 1e-3).abs() < 1e-5);
    }

    #[test]
    fn first_site_green_function_is_half_line_m() {
        for z in [c(3.0, 0.0), c(0.5, 0.3), c(-2.5, 1.0)] {
            let g = g_halfline_site(z, 1).unwrap();
            assert!((g - m_halfline_free(z).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn resolvent_solver_matches_closed_form() {
        let n = 5000;
        let got = tridiag_resolvent_diag(&vec![1.0; n - 1], &vec![0.0; n], c(3.0, 0.0), 0);
        assert!((got.re - (-3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-8);
        let n = 5001;
        let got = tridiag_resolvent_diag(&vec![1.0; n - 1], &vec![0.0; n], c(3.0, 0.0), n / 2);
        assert!((got.re + 1.0 / 5f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn rank_one_poles() {
        let (d, alpha) = (3, 2.0);
        let s = ((d - 1) as f64).sqrt();
        let line = rank_one_transform(MFunction::Line { scale: s }, alpha);
        assert_eq!(line.eval(c(z0(d, alpha), 0.0)).unwrap(), MValue::Pole);
        let half = rank_one_transform(MFunction::HalfLine { scale: s }, alpha);
        assert_eq!(half.eval(c(z1(d, alpha), 0.0)).unwrap(), MValue::Pole);
        assert!((z0(3, 2.0) - 12f64.sqrt()).abs() < 1e-15);
        assert_eq!(z1(3, 2.0), 3.0);
        let unchanged = rank_one_transform(MFunction::Tree { d: 3 }, 0.0);
        let z = c(0.3, 0.7);
        assert_eq!(unchanged.eval(z).unwrap(), MFunction::Tree { d: 3 }.eval(z).unwrap());
    }

    #[test]
    fn zk_roots() {
        let one = solve_zk(1, 3, 2.0).unwrap();
        assert!((one.lambda - 3.0).abs() < 1e-12);
        let ten = solve_zk(10, 3, 2.0).unwrap();
        assert!((ten.lambda - z0(3, 2.0)).abs() < 0.05);
        for k in 1..=8 {
            let cert = solve_zk(k, 3, 2.0).unwrap();
            assert!(cert.witness < 1e-12);
            let pole = rank_one_transform(MFunction::HalfLineSite { k, scale: 2f64.sqrt() }, 2.0);
            let f = pole.eval(c(cert.lambda, 0.0)).unwrap();
            assert!(matches!(f, MValue::Pole) || f.finite().unwrap().norm() > 1e8);
        }
        assert!(matches!(solve_zk(1, 3, 0.5), Err(Error::NoBoundState(_))));
        let negative = solve_zk(3, 3, -2.0).unwrap();
        assert!(negative.lambda < -2.0 * 2f64.sqrt());
    }

    #[test]
    fn f_k_is_increasing() {
        for k in 1..6 {
            for i in -40..=40 {
                let x = i as f64 / 10.0;
                assert!(f_k_derivative(x, k) > 0.0);
                if x.abs() != 1.0 && x != 0.0 {
                    let direct = (x.powi(2 * k as i32) - 1.0) / (x - 1.0 / x);
                    assert!((direct - f_k(x, k)).abs() < 1e-9 * (1.0 + direct.abs()));
                }
            }
        }
    }

    #[test]
    fn star_values() {
        let three = star_eigenvalue(3).unwrap();
        assert!((three.lambda - 2.1213203).abs() < 1e-7);
        assert!(three.witness < 1e-12);
        let four = star_eigenvalue(4).unwrap();
        assert!((four.lambda - 2.3094011).abs() < 1e-7);
        assert!(four.witness < 1e-12);
    }

    #[test]
    fn counterexample_certificate() {
        let six = certify_counterexample_gap(6).unwrap();
        assert!((six.witness - 0.9642563).abs() < 1e-6);
        assert!((six.witness - counterexample_witness_closed_form(6)).abs() < 1e-14);
        assert!((six.witness - counterexample_witness_oracle(6, 12)).abs() < 1e-4);
        let three = certify_counterexample_gap(3).unwrap();
        assert!((three.witness - 0.7453560).abs() < 1e-7);
        assert!((three.witness - counterexample_witness_oracle(3, 12)).abs() < 1e-4);
        for d in 3..20 {
            assert!(d as f64 - 2.0 * ((d - 1) as f64).sqrt() > 0.0);
        }
    }

    #[test]
    fn comb_edges() {
        let sweep = comb_sweep(&[std::f64::consts::FRAC_PI_2, 0.0], 2001).unwrap();
        assert!(sweep.edges[0].top <= 2.0 + 1e-12);
        assert!((sweep.edges[1].top - 2.0 * 2f64.sqrt()).abs() < 1e-3);
        assert!(comb_sweep(&[0.0], 2000).is_err());
    }
}
