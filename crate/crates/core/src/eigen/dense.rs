use super::matrix::DenseMatrix;
use super::tridiag::ql_implicit;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column k is the unit eigenvector of `values[k]`.
    pub vectors: Option<DenseMatrix>,
}

/// Householder reduction to tridiagonal form followed by implicit QL.
pub fn eig_sym_dense(m: &DenseMatrix, want_vectors: bool) -> Result<SymmetricEigen> {
    let n = m.dim();
    if n == 0 {
        return Ok(SymmetricEigen { values: Vec::new(), vectors: want_vectors.then(|| DenseMatrix::zeros(0)) });
    }
    let scale = m.max_row_sum().max(1.0);
    let asym = m.max_asymmetry();
    if asym > 1e-12 * scale {
        return Err(Error::Asymmetric(asym));
    }
    let mut v = m.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e, want_vectors);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    ql_implicit(&mut d, &mut e, if want_vectors { Some(v.data_mut()) } else { None })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| {
        let mut out = DenseMatrix::zeros(n);
        for (k, &i) in order.iter().enumerate() {
            for r in 0..n {
                out[(r, k)] = v[(r, i)];
            }
        }
        out
    });
    Ok(SymmetricEigen { values, vectors })
}

fn tred2(v: &mut DenseMatrix, d: &mut [f64], e: &mut [f64], accumulate: bool) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    let vkj = v[(k, j)];
                    g += vkj * d[k];
                    e[k] += vkj * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    if !accumulate {
        for (i, di) in d.iter_mut().enumerate() {
            *di = v[(i, i)];
        }
        e[0] = 0.0;
        return;
    }
    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DenseMatrix::zeros(n);
        for j in 0..n {
            for i in 0..=j {
                let x: f64 = rng.gen_range(-1.0..1.0);
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        m
    }

    #[test]
    fn two_by_two_and_identity() {
        let m = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let ev = eig_sym_dense(&m, false).unwrap().values;
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
        let id = eig_sym_dense(&DenseMatrix::identity(5), true).unwrap();
        assert!(id.values.iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn eigenvectors_have_small_residuals() {
        for seed in 0..5 {
            let m = random_symmetric(40, seed);
            let eig = eig_sym_dense(&m, true).unwrap();
            let vecs = eig.vectors.unwrap();
            let norm = m.max_row_sum();
            for (k, &lambda) in eig.values.iter().enumerate() {
                let x = vecs.column(k);
                let mx = m.mul_vec(x);
                let res: f64 = mx.iter().zip(x).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
                assert!(res <= 1e-10 * norm, "residual {res}");
                let nrm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((nrm - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn values_without_vectors_agree() {
        let m = random_symmetric(30, 9);
        let a = eig_sym_dense(&m, false).unwrap().values;
        let b = eig_sym_dense(&m, true).unwrap().values;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]);
        assert!(matches!(eig_sym_dense(&m, false), Err(Error::Asymmetric(_))));
    }
}
