use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};

use super::{FastAxis, HamiltonianSpec};
use crate::error::Result;
use crate::linalg::BandedSym;
use crate::potentials::PotentialModel;

pub(crate) enum Operator {
    /// Banded real symmetric matrix with a lower bound of its potential
    /// part (the kinetic part is positive semidefinite).
    Banded { matrix: BandedSym, floor: f64 },
    Tridiagonal { diag: Vec<f64>, off: Vec<f64> },
    DenseHermitian(DMatrix<Complex<f64>>),
}

/// Equispaced nodes θ_j = −π + 2πj/N.
pub fn phase_nodes(points: usize) -> Vec<f64> {
    (0..points)
        .map(|j| -PI + 2.0 * PI * j as f64 / points as f64)
        .collect()
}

/// Adds a·p² = −a d²/dq² on a Dirichlet grid with fourth-order central
/// differences; `index(i)` maps grid node i to the matrix row.
///
/// The walls sit one spacing beyond the outer nodes and the ghost node past
/// each wall is the odd reflection of its mirror image, so the outermost
/// diagonal entries carry 29 instead of 30.
fn add_fd_kinetic(m: &mut BandedSym, n: usize, h: f64, a: f64, index: impl Fn(usize) -> usize) {
    let s = a / (12.0 * h * h);
    for i in 0..n {
        let edge = if i == 0 || i + 1 == n { 1.0 } else { 0.0 };
        m.add(index(i), index(i), (30.0 - edge) * s);
        if i >= 1 {
            m.add(index(i), index(i - 1), -16.0 * s);
        }
        if i >= 2 {
            m.add(index(i), index(i - 2), s);
        }
    }
}

/// Kinetic kernel (1/N) Σ_{|k|≤M} k² cos(2πkd/N) of the truncated Fourier
/// representation of −d²/dθ² on N = 2M + 1 nodes, indexed by d = 0..N.
fn fourier_kernel(points: usize) -> Vec<f64> {
    let m = (points / 2) as i64;
    let nf = points as f64;
    (0..points)
        .map(|d| {
            (-m..=m)
                .map(|k| {
                    let kf = k as f64;
                    kf * kf * (2.0 * PI * kf * d as f64 / nf).cos()
                })
                .sum::<f64>()
                / nf
        })
        .collect()
}

/// c(n − n_g)² + V(θ) on the equispaced nodes of [−π, π), with the
/// kinetic term exact on the truncated Fourier basis |k| ≤ N/2.
fn phase_grid(kinetic: f64, ng: f64, v: &[f64]) -> DMatrix<Complex<f64>> {
    let points = v.len();
    let theta = phase_nodes(points);
    let m = (points / 2) as i64;
    let nf = points as f64;
    let mut h = DMatrix::<Complex<f64>>::zeros(points, points);
    for j in 0..points {
        for l in 0..points {
            let d = theta[j] - theta[l];
            let mut acc = Complex::new(0.0, 0.0);
            for k in -m..=m {
                let w = k as f64 - ng;
                acc += Complex::from_polar(w * w, k as f64 * d);
            }
            h[(j, l)] = acc * (kinetic / nf);
        }
        h[(j, j)] += Complex::new(v[j], 0.0);
    }
    h
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub(crate) fn assemble(spec: &HamiltonianSpec) -> Result<Operator> {
    match spec {
        HamiltonianSpec::Extended1D {
            kinetic,
            potential,
            grid,
        } => {
            let q = grid.nodes();
            let v = potential.values(&q)?;
            Ok(Operator::Banded {
                matrix: one_dimensional(*kinetic, grid.spacing(), &v),
                floor: min_of(&v),
            })
        }
        HamiltonianSpec::FastAtX {
            kappa,
            xi,
            lambda_j,
            potential,
            x,
            grid,
        } => {
            let s = grid.nodes();
            let v = fast_potential(*kappa, *xi, *lambda_j, potential, *x, &s)?;
            Ok(Operator::Banded {
                matrix: one_dimensional(0.5, grid.spacing(), &v),
                floor: min_of(&v),
            })
        }
        HamiltonianSpec::Compact1D {
            kinetic,
            lambda_j,
            ng,
            n_max,
        } => {
            let n = *n_max as i64;
            let diag = (-n..=n)
                .map(|k| kinetic * (k as f64 - ng) * (k as f64 - ng))
                .collect();
            let off = vec![-0.5 * lambda_j; 2 * *n_max];
            Ok(Operator::Tridiagonal { diag, off })
        }
        HamiltonianSpec::CompactPhaseGrid {
            kinetic,
            lambda_j,
            ng,
            points,
        } => {
            let v: Vec<f64> = phase_nodes(*points).iter().map(|t| -lambda_j * t.cos()).collect();
            Ok(Operator::DenseHermitian(phase_grid(*kinetic, *ng, &v)))
        }
        HamiltonianSpec::PeriodicGrid {
            kinetic,
            ng,
            potential,
            points,
        } => {
            let v = potential.values(&phase_nodes(*points))?;
            Ok(Operator::DenseHermitian(phase_grid(*kinetic, *ng, &v)))
        }
        HamiltonianSpec::Regularized2D {
            circuit,
            potential,
            slow,
            fast,
            convention,
        } => {
            let (kappa, xi, lj) = (circuit.kappa, circuit.xi, circuit.lambda_j);
            let xs = slow.nodes();
            let nx = xs.len();
            match fast {
                FastAxis::Box(fg) => {
                    let ys = fg.nodes();
                    let ny = ys.len();
                    let mut m = BandedSym::zeros(nx * ny, 2 * ny);
                    add_fd_x(&mut m, nx, ny, slow.spacing(), 0.5 * kappa * kappa);
                    for i in 0..nx {
                        add_fd_kinetic(&mut m, ny, fg.spacing(), 0.5, |j| i * ny + j);
                    }
                    let a = kappa * kappa * lj / xi;
                    let scale = kappa * xi.sqrt();
                    let mut floor = f64::INFINITY;
                    for (i, &x) in xs.iter().enumerate() {
                        for (j, &y) in ys.iter().enumerate() {
                            let d = y - kappa * x;
                            let v = 0.5 * d * d
                                + if a != 0.0 { a * potential.u(y / scale)? } else { 0.0 };
                            floor = floor.min(v);
                            m.add(i * ny + j, i * ny + j, v);
                        }
                    }
                    Ok(Operator::Banded { matrix: m, floor })
                }
                FastAxis::Circle { points } => {
                    let nc = *points;
                    let theta = phase_nodes(nc);
                    let c = convention.charge_coefficient();
                    let kern = fourier_kernel(nc);
                    let mut m = BandedSym::zeros(nx * nc, 2 * nc);
                    add_fd_x(&mut m, nx, nc, slow.spacing(), c);
                    let kc = c / kappa.powi(4);
                    let mut floor = f64::INFINITY;
                    let uc: Vec<f64> = theta
                        .iter()
                        .map(|&t| potential.u(t))
                        .collect::<Result<_>>()?;
                    for (i, &phi) in xs.iter().enumerate() {
                        for j in 0..nc {
                            for l in 0..=j {
                                m.add(i * nc + j, i * nc + l, kc * kern[j - l]);
                            }
                            let d = phi - theta[j];
                            let v = 0.5 * xi * xi * d * d + lj * uc[j];
                            floor = floor.min(v);
                            m.add(i * nc + j, i * nc + j, v);
                        }
                    }
                    Ok(Operator::Banded { matrix: m, floor })
                }
            }
        }
    }
}

/// Fourth-order −a d²/dx² along the outer index of an nx × ny layout.
fn add_fd_x(m: &mut BandedSym, nx: usize, ny: usize, h: f64, a: f64) {
    for j in 0..ny {
        add_fd_kinetic(m, nx, h, a, |i| i * ny + j);
    }
}

pub(crate) fn one_dimensional(kinetic: f64, h: f64, v: &[f64]) -> BandedSym {
    let n = v.len();
    let mut m = BandedSym::zeros(n, 2);
    add_fd_kinetic(&mut m, n, h, kinetic, |i| i);
    for (i, vi) in v.iter().enumerate() {
        m.add(i, i, *vi);
    }
    m
}

/// ½s² + κ²(λ_J/ξ) u((κx + s)/(κ√ξ)) in units of ħω′_r.
pub(crate) fn fast_potential(
    kappa: f64,
    xi: f64,
    lambda_j: f64,
    p: &PotentialModel,
    x: f64,
    s: &[f64],
) -> Result<Vec<f64>> {
    let a = kappa * kappa * lambda_j / xi;
    let scale = kappa * xi.sqrt();
    s.iter()
        .map(|&si| {
            let nl = if a == 0.0 { 0.0 } else { a * p.u((kappa * x + si) / scale)? };
            Ok(0.5 * si * si + nl)
        })
        .collect()
}
