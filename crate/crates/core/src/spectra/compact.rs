//! Compact-phase reductions: the naive adiabatic slow ladder and the
//! transmon capacitance-convention comparison.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{lowest_eigenvalues, BoxGrid, Convention, HamiltonianSpec, Potential1D};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveAdiabatic {
    pub kappa: f64,
    pub xi: f64,
    pub ng: f64,
    /// κ⁴ ξ √(2c) (k + ½), units of E′_C = E_C/κ⁴.
    pub formula: Vec<f64>,
    /// Lowest levels of κ⁴[c n² + ½ξ²(φ − π)²] on a grid, units of E′_C.
    pub numerical: Vec<f64>,
    /// Energy left out of both ladders: the fast charging ground
    /// c·min_n (n − n_g)² plus the flat-state average κ⁴ ξ² π²/6 of
    /// ½ξ²(φ − φ_c)² about its mean.
    pub offset: f64,
    pub convention: Convention,
}

/// Slow-level ladder of the compact circuit when the fast phase sits in
/// its flat charge ground state ψ₀ = 1/√(2π) on φ_c ∈ [0, 2π).
///
/// Averaging over ψ₀ leaves κ⁴[c n² + ½ξ²(φ − π)²] (in E′_C units), a
/// displaced oscillator whose levels do not involve λ_J. Refuses inside
/// the charge-degeneracy window |n_g − ½| ≤ κ².
pub fn naive_compact_adiabatic(
    kappa: f64,
    xi: f64,
    ng: f64,
    k: usize,
    convention: Convention,
) -> Result<NaiveAdiabatic> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::invalid("kappa", format!("must be > 0, got {kappa}")));
    }
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::invalid("xi", format!("must be > 0, got {xi}")));
    }
    if !(0.0..1.0).contains(&ng) {
        return Err(Error::invalid("ng", format!("must lie in [0, 1), got {ng}")));
    }
    if k == 0 {
        return Err(Error::invalid("k", "need at least one level"));
    }
    let window = kappa * kappa;
    let distance = (ng - 0.5).abs();
    if distance <= window {
        return Err(Error::DegenerateFastGround { distance, window });
    }
    let c = convention.charge_coefficient();
    let k4 = kappa.powi(4);
    let formula = (0..k)
        .map(|j| k4 * xi * (2.0 * c).sqrt() * (j as f64 + 0.5))
        .collect();

    // Oscillator length (c/ξ²)^(1/4); the box spans enough of it for the
    // requested levels.
    let length = (c / (xi * xi)).powf(0.25);
    let half_width = length * (2.0 * (2 * k + 1) as f64).sqrt().max(1.0) * 4.0 + 6.0 * length;
    let points = (4 * k).max(1200);
    let spec = HamiltonianSpec::Extended1D {
        kinetic: c,
        potential: Potential1D::Harmonic {
            curvature: xi * xi,
            center: PI,
        },
        grid: BoxGrid::new(half_width, points).centered_at(PI),
    };
    let numerical = lowest_eigenvalues(&spec, k)?
        .eigenvalues
        .into_iter()
        .map(|e| k4 * e)
        .collect();
    let fast_ground = c * ng.min(1.0 - ng).powi(2);
    Ok(NaiveAdiabatic {
        kappa,
        xi,
        ng,
        formula,
        numerical,
        offset: fast_ground + k4 * 0.5 * xi * xi * PI * PI / 3.0,
        convention,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmonComparison {
    pub lambda_j: f64,
    pub ng: f64,
    /// C_J / C.
    pub ratio: f64,
    /// Levels with charging energy set by C alone, units of E_C.
    pub levels_series: Vec<f64>,
    /// Levels with charging energy set by C + C_J, same units.
    pub levels_shunted: Vec<f64>,
    /// (gap_series − gap_shunted)/gap_series for each excitation E_k − E_0.
    pub relative_gap_shifts: Vec<f64>,
}

impl TransmonComparison {
    pub fn lowest_gap_shift(&self) -> f64 {
        self.relative_gap_shifts[0]
    }
}

/// Compares the charge-basis transmon c(n − n_g)² − λ_J cos φ with the
/// same operator whose charging coefficient is divided by 1 + C_J/C.
pub fn transmon_limit_check(
    lambda_j: f64,
    ng: f64,
    ratio: f64,
    levels: usize,
    convention: Convention,
) -> Result<TransmonComparison> {
    if !(lambda_j >= 10.0 && lambda_j.is_finite()) {
        return Err(Error::invalid("lambda_j", format!("must be >= 10, got {lambda_j}")));
    }
    if !(ratio >= 0.0 && ratio.is_finite()) {
        return Err(Error::invalid("ratio", format!("must be >= 0, got {ratio}")));
    }
    if levels < 2 {
        return Err(Error::invalid("levels", "need at least two levels"));
    }
    let c = convention.charge_coefficient();
    let series = lowest_eigenvalues(&HamiltonianSpec::compact_1d(c, lambda_j, ng), levels)?.eigenvalues;
    let shunted =
        lowest_eigenvalues(&HamiltonianSpec::compact_1d(c / (1.0 + ratio), lambda_j, ng), levels)?.eigenvalues;
    let relative_gap_shifts = (1..levels)
        .map(|j| {
            let a = series[j] - series[0];
            let b = shunted[j] - shunted[0];
            (a - b) / a
        })
        .collect();
    Ok(TransmonComparison {
        lambda_j,
        ng,
        ratio,
        levels_series: series,
        levels_shunted: shunted,
        relative_gap_shifts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_value_and_ladder() {
        let r = naive_compact_adiabatic(0.1, 10.0, 0.0, 4, Convention::default()).unwrap();
        assert!((r.formula[0] - 7.0711e-4).abs() < 1e-8);
        assert!((r.formula[1] / r.formula[0] - 3.0).abs() < 1e-12);
        for (a, b) in r.formula.iter().zip(&r.numerical) {
            assert!((a - b).abs() / a < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn degeneracy_window_refused() {
        let err = naive_compact_adiabatic(0.3, 10.0, 0.45, 2, Convention::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateFastGround { .. }));
        assert!(naive_compact_adiabatic(0.3, 10.0, 0.35, 2, Convention::default()).is_ok());
    }

    #[test]
    fn zero_shunt_is_identical() {
        let r = transmon_limit_check(20.0, 0.1, 0.0, 4, Convention::default()).unwrap();
        assert_eq!(r.levels_series, r.levels_shunted);
        assert!(r.relative_gap_shifts.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn small_lambda_refused() {
        assert!(transmon_limit_check(5.0, 0.0, 0.01, 3, Convention::default()).is_err());
    }
}
