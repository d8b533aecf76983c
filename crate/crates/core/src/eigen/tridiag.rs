use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Implicit-shift QL on a symmetric tridiagonal matrix (diagonal `d`, off-diagonal
/// `e[i]` coupling i and i+1, `e[n−1]` ignored). Rotations are accumulated into the
/// column-major `z` when given. Eigenvalues are left unsorted in `d`.
pub(crate) fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS {
                    return Err(Error::NoConvergence);
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let (left, right) = z.split_at_mut((i + 1) * n);
                        let zi = &mut left[i * n..];
                        let zi1 = &mut right[..n];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let hk = *b;
                            *b = s * *a + c * hk;
                            *a = c * *a - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// All eigenvalues of the Jacobi matrix with off-diagonal `a` and diagonal `b`, ascending.
pub fn eig_sym_tridiag(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if b.is_empty() {
        return Ok(Vec::new());
    }
    if a.len() + 1 != b.len() {
        return Err(Error::Dimension { expected: b.len() - 1, got: a.len() });
    }
    if let Some((index, &value)) = a.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
        return Err(Error::NonPositiveOffDiagonal { index, value });
    }
    let mut d = b.to_vec();
    let mut e: Vec<f64> = a.iter().copied().chain(std::iter::once(0.0)).collect();
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Number of eigenvalues strictly below `x` (Sturm sequence count).
pub fn sturm_count(a: &[f64], b: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..b.len() {
        let coupling = if i == 0 { 0.0 } else { a[i - 1] * a[i - 1] / q };
        q = b[i] - x - coupling;
        if q == 0.0 {
            q = -f64::EPSILON * (b[i].abs() + x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_free_matrices() {
        let ev = eig_sym_tridiag(&[1.0, 1.0], &[0.0; 3]).unwrap();
        let s2 = 2f64.sqrt();
        for (x, y) in ev.iter().zip([-s2, 0.0, s2]) {
            assert!((x - y).abs() < 1e-14);
        }
        let ev = eig_sym_tridiag(&[1.0; 3], &[0.0; 4]).unwrap();
        for (x, y) in ev.iter().zip([-1.6180339887, -0.6180339887, 0.6180339887, 1.6180339887]) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn free_2000_top_eigenvalue() {
        let n = 2000;
        let ev = eig_sym_tridiag(&vec![1.0; n - 1], &vec![0.0; n]).unwrap();
        let exact = 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((ev[n - 1] - exact).abs() < 1e-10);
        for (k, x) in ev.iter().enumerate() {
            let exact = 2.0 * ((n - k) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((x - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_positive_coupling() {
        assert!(matches!(
            eig_sym_tridiag(&[1.0, 0.0], &[0.0; 3]),
            Err(Error::NonPositiveOffDiagonal { index: 1, .. })
        ));
    }

    #[test]
    fn sturm_count_matches_eigenvalues() {
        let a = [1.0, 0.5, 2.0, 0.3];
        let b = [0.1, -1.0, 0.4, 2.0, -0.7];
        let ev = eig_sym_tridiag(&a, &b).unwrap();
        for (k, &x) in ev.iter().enumerate() {
            assert_eq!(sturm_count(&a, &b, x - 1e-9), k);
            assert_eq!(sturm_count(&a, &b, x + 1e-9), k + 1);
        }
    }
}
