use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::banded::{BandCholesky, BandedSym};
use super::tridiag::tridiagonal_eigen;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Krylov dimension cap.
    pub max_dim: usize,
    /// Residual tolerance relative to ‖A‖∞.
    pub tol: f64,
    /// Seed for the random start vector.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_dim: 600,
            tol: 1e-8,
            seed: 0x5eed,
        }
    }
}

/// Lowest eigenpairs of a symmetric operator.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    /// Eigenvectors, one per value.
    pub vectors: Vec<Vec<f64>>,
    /// ‖A v − λ v‖ for unit v.
    pub residuals: Vec<f64>,
    pub krylov_dim: usize,
}

/// The `k` lowest eigenpairs of `a` by shift-invert Lanczos with full
/// reorthogonalization. `shift` must lie below the spectrum; when it does
/// not, it is lowered until the shifted matrix factors.
///
/// A single Krylov sequence sees only one vector per degenerate eigenspace,
/// so after convergence the search is repeated in the orthogonal complement
/// of the accepted vectors until it finds nothing below the k-th value.
pub fn lowest_eigenpairs(a: &BandedSym, k: usize, shift: f64, opts: LanczosOptions) -> Result<Eigenpairs> {
    let n = a.dim();
    if k == 0 || k > n {
        return Err(Error::invalid("k", format!("need 1 <= k <= {n}, got {k}")));
    }
    let chol = shifted_cholesky(a, shift)?;
    let norm = a.norm_inf().max(f64::MIN_POSITIVE);
    let mut found = krylov(a, &chol, k, opts, &[])?;
    for round in 1..=k as u64 {
        if found.vectors.len() >= n {
            break;
        }
        let probe_opts = LanczosOptions {
            seed: opts.seed.wrapping_add(round),
            ..opts
        };
        let extra = match krylov(a, &chol, 1, probe_opts, &found.vectors) {
            Ok(e) => e,
            Err(_) => break,
        };
        let last = found.values[k - 1];
        if extra.values[0] >= last - opts.tol * norm {
            break;
        }
        found.values.pop();
        found.vectors.pop();
        found.residuals.pop();
        let at = found.values.partition_point(|&v| v <= extra.values[0]);
        found.values.insert(at, extra.values[0]);
        found.vectors.insert(at, extra.vectors[0].clone());
        found.residuals.insert(at, extra.residuals[0]);
    }
    Ok(found)
}

fn shifted_cholesky(a: &BandedSym, shift: f64) -> Result<BandCholesky> {
    let norm = a.norm_inf().max(f64::MIN_POSITIVE);
    let mut sigma = shift;
    let mut tries = 0;
    loop {
        let mut m = a.clone();
        m.shift_diagonal(-sigma);
        match m.cholesky() {
            Ok(c) => return Ok(c),
            Err(e) if tries >= 60 => return Err(e),
            Err(_) => {
                let step = (sigma - a.gershgorin_lower()).abs().max(1e-3 * norm);
                sigma -= step * 2f64.powi(tries.min(4));
                tries += 1;
            }
        }
    }
}

/// Lanczos on P (A − σ)⁻¹ P, where P projects out `locked`.
fn krylov(
    a: &BandedSym,
    chol: &BandCholesky,
    k: usize,
    opts: LanczosOptions,
    locked: &[Vec<f64>],
) -> Result<Eigenpairs> {
    let n = a.dim();
    let norm = a.norm_inf().max(f64::MIN_POSITIVE);

    let max_dim = opts.max_dim.min(n - locked.len()).max(k);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_dim);
    let mut alpha: Vec<f64> = Vec::with_capacity(max_dim);
    let mut beta: Vec<f64> = Vec::with_capacity(max_dim);

    let mut v = random_unit(&mut rng, n);
    project_out(&mut v, locked, &[]);
    normalize(&mut v);
    let mut best = Vec::new();
    let mut worst = f64::INFINITY;
    let mut scale = 0.0f64;

    while basis.len() < max_dim {
        basis.push(v.clone());
        let j = basis.len() - 1;
        let mut w = v.clone();
        chol.solve_in_place(&mut w);
        let a_j = dot(&w, &basis[j]);
        alpha.push(a_j);
        scale = scale.max(a_j.abs());
        project_out(&mut w, locked, &basis);
        let b_j = norm2(&w);
        let breakdown = b_j <= 1e-12 * scale;
        let len = basis.len();
        let done = len == max_dim;
        let ready = len >= k && (len % (len / 10).max(4) == 0 || done || breakdown);
        if ready {
            let (theta, s) = tridiagonal_eigen(&alpha, &beta, true)?;
            let s = s.expect("vectors requested");
            // |β_m s_{m,i}| bounds the shift-inverted residual of Ritz pair i;
            // only assemble Ritz vectors once every estimate is small.
            let estimate_ok = (len - k..len).all(|i| {
                (b_j * s[i * len + len - 1]).abs() <= opts.tol * theta[i].abs()
            });
            if estimate_ok || done || breakdown {
                let (vals, vecs, res) = ritz(a, &basis, &s, k);
                worst = res.iter().cloned().fold(0.0, f64::max);
                best = vals.clone();
                if worst <= opts.tol * norm {
                    return Ok(Eigenpairs {
                        values: vals,
                        vectors: vecs,
                        residuals: res,
                        krylov_dim: len,
                    });
                }
                if done {
                    break;
                }
            }
        }
        if breakdown {
            // Invariant subspace: restart with a fresh direction.
            if len + locked.len() >= n {
                break;
            }
            let mut r = random_unit(&mut rng, n);
            project_out(&mut r, locked, &basis);
            normalize(&mut r);
            beta.push(0.0);
            v = r;
        } else {
            beta.push(b_j);
            w.iter_mut().for_each(|x| *x /= b_j);
            v = w;
        }
    }
    Err(Error::NonConvergence {
        iterations: basis.len(),
        worst_residual: worst,
        best,
    })
}

/// Ritz pairs for the k largest θ (lowest λ), with λ the Rayleigh quotient
/// on A and the true residual ‖A y − λ y‖.
fn ritz(a: &BandedSym, basis: &[Vec<f64>], s: &[f64], k: usize) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let m = basis.len();
    let n = a.dim();
    let mut pairs = Vec::with_capacity(k);
    for idx in (0..m).rev().take(k) {
        let coef = &s[idx * m..(idx + 1) * m];
        let mut y = vec![0.0; n];
        for (c, q) in coef.iter().zip(basis) {
            axpy(*c, q, &mut y);
        }
        normalize(&mut y);
        let mut ay = vec![0.0; n];
        a.matvec(&y, &mut ay);
        let lambda = dot(&y, &ay);
        let res = ay
            .iter()
            .zip(&y)
            .map(|(p, q)| (p - lambda * q).powi(2))
            .sum::<f64>()
            .sqrt();
        pairs.push((lambda, y, res));
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut vals = Vec::with_capacity(k);
    let mut vecs = Vec::with_capacity(k);
    let mut res = Vec::with_capacity(k);
    for (l, y, r) in pairs {
        vals.push(l);
        vecs.push(y);
        res.push(r);
    }
    (vals, vecs, res)
}

/// Two passes of classical Gram–Schmidt against `locked` and `basis`.
fn project_out(w: &mut [f64], locked: &[Vec<f64>], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in locked.iter().chain(basis) {
            let c = dot(w, q);
            axpy(-c, q, w);
        }
    }
}

fn normalize(w: &mut [f64]) {
    let nw = norm2(w);
    w.iter_mut().for_each(|x| *x /= nw);
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    normalize(&mut v);
    v
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(c: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_dense_on_random_band() {
        let n = 300;
        let mut a = BandedSym::zeros(n, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..n {
            a.add(i, i, 10.0 * rng.gen::<f64>());
            for k in 1..=4usize.min(i) {
                a.add(i, i - k, rng.gen::<f64>() - 0.5);
            }
        }
        let got = lowest_eigenpairs(&a, 6, a.gershgorin_lower() - 1.0, LanczosOptions::default()).unwrap();
        let mut dense: Vec<f64> = a.to_dense().symmetric_eigen().eigenvalues.iter().cloned().collect();
        dense.sort_by(|x, y| x.total_cmp(y));
        for (g, d) in got.values.iter().zip(&dense) {
            assert!((g - d).abs() < 1e-9, "{g} vs {d}");
        }
        for r in &got.residuals {
            assert!(*r < 1e-8 * a.norm_inf());
        }
    }

    #[test]
    fn degenerate_spectrum_restarts() {
        // Identity plus a rank-one bump: most eigenvalues coincide.
        let n = 40;
        let mut a = BandedSym::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 1.0);
        }
        a.add(0, 0, -0.5);
        let got = lowest_eigenpairs(&a, 3, 0.0, LanczosOptions::default()).unwrap();
        assert!((got.values[0] - 0.5).abs() < 1e-12);
        assert!((got.values[1] - 1.0).abs() < 1e-12);
        assert!((got.values[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shift_above_spectrum_is_lowered() {
        let n = 50;
        let mut a = BandedSym::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
        }
        let got = lowest_eigenpairs(&a, 2, 1.0, LanczosOptions::default()).unwrap();
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / 51.0).cos();
        assert!((got.values[0] - exact).abs() < 1e-12);
    }
}
