use crate::error::{Error, Result};

/// Eigen-decomposition of a real symmetric tridiagonal matrix by implicit QL
/// with Wilkinson shifts.
///
/// `diag` has length n and `off[i]` couples rows i and i+1 (length n − 1).
/// Returns ascending eigenvalues and, when requested, the eigenvectors as
/// columns stored column-major (`vectors[j * n + i]` is component i of
/// vector j).
pub fn tridiagonal_eigen(
    diag: &[f64],
    off: &[f64],
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), want_vectors.then(Vec::new)));
    }
    if off.len() + 1 != n {
        return Err(Error::invalid("off", format!("expected {} entries, got {}", n - 1, off.len())));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    // Row-major rotation accumulator: z[row * n + col].
    let mut z = if want_vectors {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        Some(z)
    } else {
        None
    };

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence {
                    iterations: iter,
                    worst_residual: e[l].abs(),
                    best: d,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_mut() {
                    for k in 0..n {
                        let row = k * n;
                        let f = z[row + i + 1];
                        z[row + i + 1] = s * z[row + i] + c * f;
                        z[row + i] = c * z[row + i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&j| d[j]).collect();
    let vectors = z.map(|z| {
        let mut out = vec![0.0; n * n];
        for (col, &j) in order.iter().enumerate() {
            for i in 0..n {
                out[col * n + i] = z[i * n + j];
            }
        }
        out
    });
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 50;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let (vals, vecs) = tridiagonal_eigen(&d, &e, true).unwrap();
        let vecs = vecs.unwrap();
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * (PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13, "{k}: {v} vs {exact}");
        }
        // A v = λ v and orthonormality.
        for j in 0..n {
            let col = &vecs[j * n..(j + 1) * n];
            let mut res: f64 = 0.0;
            for i in 0..n {
                let mut av = 2.0 * col[i];
                if i > 0 {
                    av -= col[i - 1];
                }
                if i + 1 < n {
                    av -= col[i + 1];
                }
                res = res.max((av - vals[j] * col[i]).abs());
            }
            assert!(res < 1e-12);
            let norm: f64 = col.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_dense_oracle() {
        let n = 40;
        let d: Vec<f64> = (0..n).map(|i| ((i * 7) % 11) as f64 - 3.0).collect();
        let e: Vec<f64> = (0..n - 1).map(|i| 0.5 + ((i * 3) % 5) as f64 * 0.1).collect();
        let (vals, _) = tridiagonal_eigen(&d, &e, false).unwrap();
        let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = d[i];
            if i + 1 < n {
                m[(i, i + 1)] = e[i];
                m[(i + 1, i)] = e[i];
            }
        }
        let mut dense: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().cloned().collect();
        dense.sort_by(|a, b| a.total_cmp(b));
        for (a, b) in vals.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn trivial_sizes() {
        assert_eq!(tridiagonal_eigen(&[3.0], &[], false).unwrap().0, vec![3.0]);
        assert!(tridiagonal_eigen(&[1.0, 2.0], &[], false).is_err());
    }
}
