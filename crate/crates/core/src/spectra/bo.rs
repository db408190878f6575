//! Born–Oppenheimer reduction of the extended two-coordinate circuit.
//!
//! At frozen slow coordinate x the fast operator is
//! ½p_y² + ½(y − κx)² + κ²(λ_J/ξ) u(y/(κ√ξ)), solved in s = y − κx so that
//! the unperturbed oscillator sits on the same nodes for every x.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::assemble::fast_potential;
use super::BoxGrid;
use crate::error::{Error, Result};
use crate::linalg::BandedSym;
use crate::potentials::PotentialModel;
use crate::table::{Cell, Column, SweepTable};

/// Ground-state mass allowed within one unit of either box edge.
pub const BOUNDARY_MASS: f64 = 1e-12;

const DEFAULT_HALF_WIDTH: f64 = 12.0;

/// Default fast grid: half-width 12 and spacing fine enough for both the
/// oscillator and the nonlinearity, whose scale in s is κ√ξ.
pub fn default_fast_grid(kappa: f64, xi: f64) -> BoxGrid {
    let h = (kappa * xi.sqrt() / 24.0).min(0.02);
    BoxGrid::with_spacing(DEFAULT_HALF_WIDTH, h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FastGround {
    /// Ground energy, units of ħω′_r.
    pub e0: f64,
    /// Ground-state probability within one unit of the box edges.
    pub boundary_mass: f64,
    /// Grid actually used (after any widening).
    pub grid: BoxGrid,
}

/// Ground energy of the fast operator at frozen `x`.
///
/// The ground state must leave less than [`BOUNDARY_MASS`] near the box
/// edges; the box is widened once by half, then
/// [`Error::GridInsufficient`] is returned.
pub fn bo_fast_ground(
    kappa: f64,
    xi: f64,
    lambda_j: f64,
    p: &PotentialModel,
    x: f64,
    grid: Option<BoxGrid>,
) -> Result<FastGround> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::invalid("kappa", format!("must be > 0, got {kappa}")));
    }
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::invalid("xi", format!("must be > 0, got {xi}")));
    }
    if !(lambda_j >= 0.0 && lambda_j.is_finite()) {
        return Err(Error::invalid("lambda_j", format!("must be >= 0, got {lambda_j}")));
    }
    let mut grid = grid.unwrap_or_else(|| default_fast_grid(kappa, xi));
    grid.validate("grid", 128)?;
    for attempt in 0..2 {
        let s = grid.nodes();
        let v = fast_potential(kappa, xi, lambda_j, p, x, &s)?;
        let (e0, psi) = ground_state(0.5, grid.spacing(), &v)?;
        let mass: f64 = s
            .iter()
            .zip(&psi)
            .filter(|(si, _)| (*si - grid.center).abs() >= grid.half_width - 1.0)
            .map(|(_, a)| a * a)
            .sum();
        if mass < BOUNDARY_MASS {
            return Ok(FastGround {
                e0,
                boundary_mass: mass,
                grid,
            });
        }
        if attempt == 1 {
            return Err(Error::GridInsufficient {
                amplitude: mass,
                half_width: grid.half_width,
            });
        }
        let h = grid.spacing();
        grid = BoxGrid::with_spacing(1.5 * grid.half_width, h).centered_at(grid.center);
    }
    unreachable!()
}

/// Ground pair of a·p² + V on a Dirichlet grid: the energy by inertia
/// bisection, the normalized vector by inverse iteration just below it.
pub(crate) fn ground_state(a: f64, h: f64, v: &[f64]) -> Result<(f64, Vec<f64>)> {
    let m = super::assemble::one_dimensional(a, h, v);
    let floor = v.iter().cloned().fold(f64::INFINITY, f64::min);
    ground_of(&m, floor)
}

fn ground_of(m: &BandedSym, floor: f64) -> Result<(f64, Vec<f64>)> {
    let scale = m.norm_inf().max(1.0);
    let mut lo = floor - 1e-9 * scale;
    let mut hi = floor + 1.0;
    let mut grow = 0;
    while m.count_below(hi) == 0 {
        hi += (hi - floor) * 2.0;
        grow += 1;
        if grow > 200 {
            return Err(Error::NonConvergence {
                iterations: grow,
                worst_residual: f64::NAN,
                best: vec![],
            });
        }
    }
    while hi - lo > 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if m.count_below(mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Inverse iteration with a shift just below the ground level.
    let gap_guess = 1e-10 * scale;
    let mut sigma = lo - gap_guess;
    let chol = loop {
        let mut t = m.clone();
        t.shift_diagonal(-sigma);
        match t.cholesky() {
            Ok(c) => break c,
            Err(_) => sigma -= 10.0 * (lo - sigma),
        }
    };
    let n = m.dim();
    let mut psi: Vec<f64> = (0..n).map(|i| 1.0 + 1e-3 * (i % 7) as f64).collect();
    for _ in 0..4 {
        chol.solve_in_place(&mut psi);
        let norm = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|x| *x /= norm);
    }
    Ok((0.5 * (lo + hi), psi))
}

/// Verdict on the trend of the Born–Oppenheimer estimates along a
/// decreasing κ ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoVerdict {
    /// Every difference vanishes to 1e-12.
    Zero,
    /// The fitted curvature of (e0(x) − e0(0))/κ² settles (successive
    /// relative changes under 10%) at a nonzero value.
    ConvergesNonzero,
    /// sup_x |e0(x) − e0(0)| decreases strictly along the ladder.
    Decreasing,
    Inconclusive,
}

impl BoVerdict {
    pub fn label(self) -> &'static str {
        match self {
            BoVerdict::Zero => "zero",
            BoVerdict::ConvergesNonzero => "converges-nonzero",
            BoVerdict::Decreasing => "decreasing",
            BoVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Relative change bound for the curvature fit to count as settled.
pub const CURVATURE_SETTLED: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoSweep {
    pub kappas: Vec<f64>,
    pub xs: Vec<f64>,
    /// `delta[i][j]` = e0(x_j; κ_i) − e0(0; κ_i), units of ħω′_r.
    pub delta: Vec<Vec<f64>>,
    /// sup_x |delta| per κ.
    pub sup_norms: Vec<f64>,
    /// Least-squares a in delta/κ² ≈ a x², per κ.
    pub curvature_fits: Vec<f64>,
    pub verdict: BoVerdict,
    pub xi: f64,
    pub lambda_j: f64,
}

/// e0(x; κ) − e0(0; κ) on `xs` for each κ of a strictly decreasing ladder,
/// with a trend verdict.
///
/// Points are distributed over the current rayon pool; output order is
/// the input order.
pub fn bo_effective_potential(
    kappas: &[f64],
    xs: &[f64],
    xi: f64,
    lambda_j: f64,
    p: &PotentialModel,
) -> Result<BoSweep> {
    if kappas.len() < 3 {
        return Err(Error::invalid("kappas", "need at least 3 entries"));
    }
    if kappas.windows(2).any(|w| !(w[1] < w[0])) || kappas.iter().any(|k| !(*k > 0.0)) {
        return Err(Error::invalid("kappas", "must be positive and strictly decreasing"));
    }
    if xs.is_empty() || xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("xs", "need finite slow coordinates"));
    }
    let jobs: Vec<(usize, f64)> = kappas
        .iter()
        .enumerate()
        .flat_map(|(i, _)| std::iter::once(0.0).chain(xs.iter().cloned()).map(move |x| (i, x)))
        .collect();
    let e0: Vec<f64> = jobs
        .par_iter()
        .map(|&(i, x)| bo_fast_ground(kappas[i], xi, lambda_j, p, x, None).map(|g| g.e0))
        .collect::<Result<_>>()?;
    let stride = xs.len() + 1;
    let delta: Vec<Vec<f64>> = (0..kappas.len())
        .map(|i| {
            let base = e0[i * stride];
            (0..xs.len()).map(|j| e0[i * stride + 1 + j] - base).collect()
        })
        .collect();
    let sup_norms: Vec<f64> = delta
        .iter()
        .map(|row| row.iter().map(|d| d.abs()).fold(0.0, f64::max))
        .collect();
    let x4: f64 = xs.iter().map(|x| x.powi(4)).sum();
    let curvature_fits: Vec<f64> = delta
        .iter()
        .zip(kappas)
        .map(|(row, k)| {
            if x4 == 0.0 {
                0.0
            } else {
                row.iter().zip(xs).map(|(d, x)| d / (k * k) * x * x).sum::<f64>() / x4
            }
        })
        .collect();
    let verdict = classify(&delta, &sup_norms, &curvature_fits);
    Ok(BoSweep {
        kappas: kappas.to_vec(),
        xs: xs.to_vec(),
        delta,
        sup_norms,
        curvature_fits,
        verdict,
        xi,
        lambda_j,
    })
}

fn classify(delta: &[Vec<f64>], sup: &[f64], fits: &[f64]) -> BoVerdict {
    if delta.iter().flatten().all(|d| d.abs() < 1e-12) {
        return BoVerdict::Zero;
    }
    let settled = fits.windows(2).all(|w| {
        let scale = w[0].abs().max(w[1].abs());
        scale > 0.0 && (w[1] - w[0]).abs() <= CURVATURE_SETTLED * scale
    });
    if settled && fits.last().map_or(false, |a| a.abs() > 1e-12) {
        return BoVerdict::ConvergesNonzero;
    }
    if sup.windows(2).all(|w| w[1] < w[0]) {
        return BoVerdict::Decreasing;
    }
    BoVerdict::Inconclusive
}

impl BoSweep {
    /// Long-format table: one row per (κ, x).
    pub fn to_table(&self) -> SweepTable {
        let mut t = SweepTable::new(
            vec![
                Column::new("kappa", ""),
                Column::new("x", ""),
                Column::new("delta_e0", "hbar*omega_r'"),
                Column::new("delta_e0_over_kappa2", "hbar*omega_r'"),
            ],
            serde_json::json!({
                "operation": "bo_effective_potential",
                "xi": self.xi,
                "lambda_j": self.lambda_j,
                "kappas": self.kappas,
                "xs": self.xs,
            }),
        );
        for (i, k) in self.kappas.iter().enumerate() {
            for (j, x) in self.xs.iter().enumerate() {
                let d = self.delta[i][j];
                t.push(vec![Cell::from(*k), (*x).into(), d.into(), (d / (k * k)).into()]);
            }
        }
        for (i, k) in self.kappas.iter().enumerate() {
            t.notes.push(format!(
                "kappa={k:e} sup_norm={:e} curvature_fit={:e}",
                self.sup_norms[i], self.curvature_fits[i]
            ));
        }
        t.notes.push(format!("verdict={}", self.verdict.label()));
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_fast_oscillator_is_exactly_one_half() {
        let p = PotentialModel::cosine();
        let g0 = bo_fast_ground(0.5, 10.0, 0.0, &p, 0.0, None).unwrap();
        for x in [-2.0, 0.7, 3.0] {
            let g = bo_fast_ground(0.5, 10.0, 0.0, &p, x, None).unwrap();
            assert_eq!(g.e0, g0.e0);
        }
        assert!((g0.e0 - 0.5).abs() < 1e-8, "{}", g0.e0);
    }

    #[test]
    fn quadratic_shift_is_exact() {
        // ½s² + ½β(κx + s)² has ground energy ½√(1+β) + ½βκ²x²/(1+β).
        let p = PotentialModel::quadratic();
        let (kappa, xi, lj) = (0.4, 2.0, 1.0);
        let beta = lj / (xi * xi);
        for x in [0.0, 1.5] {
            let g = bo_fast_ground(kappa, xi, lj, &p, x, None).unwrap();
            let exact = 0.5 * (1.0 + beta).sqrt() + 0.5 * beta * kappa * kappa * x * x / (1.0 + beta);
            assert!((g.e0 - exact).abs() < 1e-8, "{} vs {exact}", g.e0);
        }
    }

    #[test]
    fn narrow_grid_widens_then_fails() {
        let p = PotentialModel::cosine();
        let g = bo_fast_ground(0.5, 10.0, 1.0, &p, 0.0, Some(BoxGrid::new(5.0, 500))).unwrap();
        assert!(g.grid.half_width > 5.0);
        let err = bo_fast_ground(0.5, 10.0, 1.0, &p, 0.0, Some(BoxGrid::new(3.0, 300))).unwrap_err();
        assert!(matches!(err, Error::GridInsufficient { .. }));
    }

    #[test]
    fn ladder_preconditions() {
        let p = PotentialModel::cosine();
        assert!(bo_effective_potential(&[0.5, 0.4], &[1.0], 10.0, 5.0, &p).is_err());
        assert!(bo_effective_potential(&[0.5, 0.6, 0.3], &[1.0], 10.0, 5.0, &p).is_err());
    }

    #[test]
    fn verdict_rules() {
        let z = vec![vec![0.0; 3]; 3];
        assert_eq!(classify(&z, &[0.0; 3], &[0.0; 3]), BoVerdict::Zero);
        let d = vec![vec![1.0]; 3];
        assert_eq!(classify(&d, &[3.0, 2.0, 1.0], &[1.0, 1.05, 1.1]), BoVerdict::ConvergesNonzero);
        assert_eq!(classify(&d, &[3.0, 2.0, 1.0], &[1.0, 0.5, 0.1]), BoVerdict::Decreasing);
        assert_eq!(classify(&d, &[3.0, 4.0, 1.0], &[1.0, 0.5, 0.1]), BoVerdict::Inconclusive);
    }
}
