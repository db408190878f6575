use crate::error::{Error, Result};

/// Symmetric band matrix stored by its lower band: entry (i, i − k) for
/// k = 0..=bw lives at `data[i * (bw + 1) + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSym {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        debug_assert!(i - j <= self.bw, "entry ({i}, {j}) outside band {}", self.bw);
        i * (self.bw + 1) + (i - j)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let k = i.abs_diff(j);
        if k > self.bw {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Adds `v` to entries (i, j) and (j, i).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn shift_diagonal(&mut self, s: f64) {
        for i in 0..self.n {
            self.data[i * (self.bw + 1)] += s;
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let w = self.bw + 1;
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let row = &self.data[i * w..(i + 1) * w];
            let mut acc = row[0] * x[i];
            for k in 1..w.min(i + 1) {
                let a = row[k];
                if a != 0.0 {
                    acc += a * x[i - k];
                    y[i - k] += a * x[i];
                }
            }
            y[i] += acc;
        }
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        let mut rows = vec![0.0f64; self.n];
        let w = self.bw + 1;
        for i in 0..self.n {
            for k in 0..w.min(i + 1) {
                let a = self.data[i * w + k].abs();
                rows[i] += a;
                if k > 0 {
                    rows[i - k] += a;
                }
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Lower Gershgorin bound on the spectrum.
    pub fn gershgorin_lower(&self) -> f64 {
        let mut off = vec![0.0f64; self.n];
        let w = self.bw + 1;
        for i in 0..self.n {
            for k in 1..w.min(i + 1) {
                let a = self.data[i * w + k].abs();
                off[i] += a;
                off[i - k] += a;
            }
        }
        (0..self.n)
            .map(|i| self.data[i * w] - off[i])
            .fold(f64::INFINITY, f64::min)
    }

    /// Cholesky factor L (same band) of `self`; fails if not positive definite.
    pub fn cholesky(&self) -> Result<BandCholesky> {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        let mut l = self.data.clone();
        for j in 0..n {
            let mut d = l[j * w];
            for k in 1..w.min(j + 1) {
                let v = l[j * w + k];
                d -= v * v;
            }
            if !(d > 0.0) {
                return Err(Error::invalid("matrix", format!("not positive definite at row {j}")));
            }
            let d = d.sqrt();
            l[j * w] = d;
            for i in j + 1..(j + bw + 1).min(n) {
                // L[i][j] = (A[i][j] − Σ_k L[i][k] L[j][k]) / L[j][j]
                let mut s = l[i * w + (i - j)];
                let k_lo = i.saturating_sub(bw);
                for k in k_lo..j {
                    s -= l[i * w + (i - k)] * l[j * w + (j - k)];
                }
                l[i * w + (i - j)] = s / d;
            }
        }
        Ok(BandCholesky { n, bw, l })
    }

    /// Number of eigenvalues strictly below `sigma`, from the inertia of an
    /// unpivoted LDLᵀ factorization of `self − σ I`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        let scale = self.norm_inf().max(f64::MIN_POSITIVE);
        let tiny = f64::EPSILON * scale;
        // Unit lower factor stored as in the band layout; d separately.
        let mut l = self.data.clone();
        let mut d = vec![0.0; n];
        let mut negatives = 0;
        for j in 0..n {
            let mut dj = l[j * w] - sigma;
            for k in j.saturating_sub(bw)..j {
                let v = l[j * w + (j - k)];
                dj -= v * v * d[k];
            }
            if dj.abs() < tiny {
                dj = -tiny;
            }
            d[j] = dj;
            if dj < 0.0 {
                negatives += 1;
            }
            for i in j + 1..(j + bw + 1).min(n) {
                let mut s = l[i * w + (i - j)];
                for k in i.saturating_sub(bw)..j {
                    s -= l[i * w + (i - k)] * l[j * w + (j - k)] * d[k];
                }
                l[i * w + (i - j)] = s / dj;
            }
        }
        negatives
    }

    /// All eigenvalues in `[lo, hi)` by inertia bisection, ascending.
    pub fn eigenvalues_in(&self, lo: f64, hi: f64, tol: f64) -> Vec<f64> {
        let c_lo = self.count_below(lo);
        let c_hi = self.count_below(hi);
        let mut out = Vec::with_capacity(c_hi.saturating_sub(c_lo));
        for idx in c_lo..c_hi {
            // Smallest x with count_below(x) > idx.
            let (mut a, mut b) = (lo, hi);
            while b - a > tol * (1.0 + a.abs().max(b.abs())) {
                let m = 0.5 * (a + b);
                if self.count_below(m) > idx {
                    b = m;
                } else {
                    a = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        out
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..=i {
                let v = self.get(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }
}

/// Banded Cholesky factor with triangular solves.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    /// Solves L Lᵀ x = b in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.l[i * w + (i - k)] * x[k];
            }
            x[i] = s / self.l[i * w];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for r in i + 1..(i + bw + 1).min(n) {
                s -= self.l[r * w + (r - i)] * x[r];
            }
            x[i] = s / self.l[i * w];
        }
    }
}
