use super::tridiag::eig_sym_tridiag;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct LanczosRun {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Ritz values, ascending.
    pub ritz: Vec<f64>,
}

/// Lanczos with full reorthogonalization; stops early on an invariant subspace.
pub fn lanczos(matvec: impl Fn(&[f64], &mut [f64]), start: &[f64], steps: usize) -> Result<LanczosRun> {
    let n = start.len();
    let norm = start.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut basis: Vec<Vec<f64>> = vec![start.iter().map(|x| x / norm).collect()];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut w = vec![0.0; n];
    for k in 0..steps.min(n) {
        matvec(&basis[k], &mut w);
        let a: f64 = w.iter().zip(&basis[k]).map(|(x, y)| x * y).sum();
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c: f64 = w.iter().zip(q).map(|(x, y)| x * y).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let b = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if k + 1 == steps.min(n) || b < 1e-10 * (a.abs() + 1.0) {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    let ritz = eig_sym_tridiag(&beta, &alpha)?;
    Ok(LanczosRun { alpha, beta, ritz })
}
