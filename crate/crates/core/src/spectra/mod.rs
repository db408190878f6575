//! Discretized Hamiltonians and their lowest eigenvalues.
//!
//! Energies are in E_C units except for the fast Born–Oppenheimer operator,
//! which is in units of ħω′_r (the regularized oscillator quantum).

mod assemble;
pub mod bo;
pub mod compact;
pub mod sweep;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lowest_eigenpairs, tridiagonal_eigen, LanczosOptions};
use crate::params::ReducedCircuit;
use crate::potentials::PotentialModel;
use crate::reduction::{effective_point, Basis};

pub use assemble::phase_nodes;

/// Coefficient convention for charge kinetic terms.
///
/// By default the compact Hamiltonian carries n² with unit coefficient in
/// units of its charging energy; `charge_half_factor` switches to the ½
/// that follows from Q²/2C with E_C = 4e²/C.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convention {
    pub charge_half_factor: bool,
}

impl Convention {
    pub fn charge_coefficient(self) -> f64 {
        if self.charge_half_factor {
            0.5
        } else {
            1.0
        }
    }
}

/// Uniform Dirichlet grid of `points` interior nodes on
/// `(center − half_width, center + half_width)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxGrid {
    pub center: f64,
    pub half_width: f64,
    pub points: usize,
}

impl BoxGrid {
    pub fn new(half_width: f64, points: usize) -> Self {
        Self {
            center: 0.0,
            half_width,
            points,
        }
    }

    /// Grid with node spacing close to `h`.
    pub fn with_spacing(half_width: f64, h: f64) -> Self {
        let points = ((2.0 * half_width / h).round() as usize).max(2) - 1;
        Self::new(half_width, points)
    }

    pub fn centered_at(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points + 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        // Mirror-symmetric construction keeps the grid exactly symmetric.
        (0..self.points)
            .map(|i| {
                let k = i as f64 - 0.5 * (self.points - 1) as f64;
                self.center + k * h
            })
            .collect()
    }

    fn validate(&self, field: &'static str, min_points: usize) -> Result<()> {
        if !(self.half_width > 0.0 && self.half_width.is_finite() && self.center.is_finite()) {
            return Err(Error::invalid(field, "half_width must be positive and finite"));
        }
        if self.points < min_points {
            return Err(Error::invalid(
                field,
                format!("need at least {min_points} points, got {}", self.points),
            ));
        }
        Ok(())
    }
}

/// Potential of a one-dimensional extended Hamiltonian, in E_C units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential1D {
    /// Free particle.
    Zero,
    /// ½ k (q − q₀)².
    Harmonic { curvature: f64, center: f64 },
    /// λ_J u(q).
    Bare { potential: PotentialModel, lambda_j: f64 },
    /// Effective potential of the classically reduced circuit in the phase
    /// coordinate, continued over the real line.
    Effective { potential: PotentialModel, circuit: ReducedCircuit },
    /// Born–Oppenheimer slow potential (ξ/κ²)(e0(√ξ q; κ) − e0(0; κ)) of
    /// the extended two-coordinate circuit, in the phase coordinate.
    BornOppenheimer { potential: PotentialModel, circuit: ReducedCircuit },
}

impl Potential1D {
    pub fn values(&self, q: &[f64]) -> Result<Vec<f64>> {
        match self {
            Potential1D::Zero => Ok(vec![0.0; q.len()]),
            Potential1D::Harmonic { curvature, center } => Ok(q
                .iter()
                .map(|x| 0.5 * curvature * (x - center) * (x - center))
                .collect()),
            Potential1D::Bare { potential, lambda_j } => {
                q.iter().map(|&x| Ok(lambda_j * potential.u(x)?)).collect()
            }
            Potential1D::Effective { potential, circuit } => {
                let sx = circuit.xi.sqrt();
                q.iter()
                    .map(|&x| Ok(effective_point(potential, circuit, Basis::ExtendedX, x * sx)?.v))
                    .collect()
            }
            Potential1D::BornOppenheimer { potential, circuit } => {
                let (kappa, xi, lj) = (circuit.kappa, circuit.xi, circuit.lambda_j);
                let sx = xi.sqrt();
                let ground = |x: f64| bo::bo_fast_ground(kappa, xi, lj, potential, x, None).map(|g| g.e0);
                let base = ground(0.0)?;
                let to_ec = xi / (kappa * kappa);
                q.par_iter().map(|&x| Ok((ground(x * sx)? - base) * to_ec)).collect()
            }
        }
    }
}

/// Discretization of the fast coordinate in the two-dimensional problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FastAxis {
    /// Extended y on a Dirichlet box.
    Box(BoxGrid),
    /// Compact φ_c ∈ [−π, π) on an odd number of equispaced nodes.
    Circle { points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YBasis {
    Extended,
    Compact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum HamiltonianSpec {
    /// c p² + V(q) on a box, fourth-order finite differences.
    Extended1D {
        kinetic: f64,
        potential: Potential1D,
        grid: BoxGrid,
    },
    /// c (n − n_g)² − λ_J cos φ in the charge basis n ∈ {−n_max, …, n_max}.
    Compact1D {
        kinetic: f64,
        lambda_j: f64,
        ng: f64,
        n_max: usize,
    },
    /// The same operator on an equispaced periodic phase grid with the
    /// exact truncated-Fourier kinetic term.
    CompactPhaseGrid {
        kinetic: f64,
        lambda_j: f64,
        ng: f64,
        points: usize,
    },
    /// c(n − n_g)² + V(θ) for a 2π-periodic V on an odd number of
    /// equispaced phase nodes.
    PeriodicGrid {
        kinetic: f64,
        ng: f64,
        potential: Potential1D,
        points: usize,
    },
    /// Two-degree-of-freedom regularized circuit. With an extended fast axis
    /// the operator is κ²p_x²/2 + p_y²/2 + ½(y − κx)² + κ²(λ_J/ξ)u(y/(κ√ξ))
    /// (reported in E_C units); with a compact fast axis it is
    /// c(n_c − n_g)²/κ⁴ + c n² + ½ξ²(φ − φ_c)² + λ_J u(φ_c).
    Regularized2D {
        circuit: ReducedCircuit,
        potential: PotentialModel,
        slow: BoxGrid,
        fast: FastAxis,
        convention: Convention,
    },
    /// Fast operator ½p_y² + ½(y − κx)² + κ²(λ_J/ξ)u(y/(κ√ξ)) at frozen x;
    /// the grid is in s = y − κx.
    FastAtX {
        kappa: f64,
        xi: f64,
        lambda_j: f64,
        potential: PotentialModel,
        x: f64,
        grid: BoxGrid,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Units {
    #[serde(rename = "E_C")]
    ChargingEnergy,
    #[serde(rename = "hbar*omega_r'")]
    RegularizedQuantum,
}

impl Units {
    pub fn label(self) -> &'static str {
        match self {
            Units::ChargingEnergy => "E_C",
            Units::RegularizedQuantum => "hbar*omega_r'",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub k: usize,
    /// ‖H v − E v‖ for unit v, in the same units as the eigenvalues.
    pub residual_norms: Vec<f64>,
    /// ‖H‖∞ of the discretized operator, same units.
    pub spectral_scale: f64,
    pub units: Units,
    pub dimension: usize,
    pub method: String,
    pub spec: HamiltonianSpec,
}

/// Smallest allowed n_max for a charge basis at this λ_J.
pub fn min_charge_cutoff(lambda_j: f64) -> usize {
    (3.0 * lambda_j.max(0.0).sqrt() + 10.0).ceil() as usize
}

impl HamiltonianSpec {
    /// Charge-basis operator with the smallest admissible cutoff.
    pub fn compact_1d(kinetic: f64, lambda_j: f64, ng: f64) -> Self {
        HamiltonianSpec::Compact1D {
            kinetic,
            lambda_j,
            ng,
            n_max: min_charge_cutoff(lambda_j),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            HamiltonianSpec::Extended1D {
                kinetic,
                grid,
                potential,
            } => {
                positive("kinetic", *kinetic)?;
                if let Potential1D::BornOppenheimer { circuit, .. } = potential {
                    positive("kappa", circuit.kappa)?;
                }
                grid.validate("grid", 128)
            }
            HamiltonianSpec::Compact1D {
                kinetic,
                lambda_j,
                ng,
                n_max,
            } => {
                positive("kinetic", *kinetic)?;
                nonnegative("lambda_j", *lambda_j)?;
                crate::error::finite("ng", *ng)?;
                let need = min_charge_cutoff(*lambda_j);
                if *n_max < need {
                    return Err(Error::invalid(
                        "n_max",
                        format!("need n_max >= 3 sqrt(lambda_j) + 10 = {need}, got {n_max}"),
                    ));
                }
                Ok(())
            }
            HamiltonianSpec::CompactPhaseGrid {
                kinetic,
                lambda_j,
                ng,
                points,
            } => {
                positive("kinetic", *kinetic)?;
                nonnegative("lambda_j", *lambda_j)?;
                crate::error::finite("ng", *ng)?;
                if points % 2 == 0 || *points < 2 * min_charge_cutoff(*lambda_j) + 1 {
                    return Err(Error::invalid(
                        "points",
                        format!(
                            "need an odd count >= {}, got {points}",
                            2 * min_charge_cutoff(*lambda_j) + 1
                        ),
                    ));
                }
                Ok(())
            }
            HamiltonianSpec::PeriodicGrid {
                kinetic,
                ng,
                potential,
                points,
            } => {
                positive("kinetic", *kinetic)?;
                crate::error::finite("ng", *ng)?;
                if points % 2 == 0 || *points < 65 {
                    return Err(Error::invalid(
                        "points",
                        format!("need an odd count >= 65, got {points}"),
                    ));
                }
                let periodic = match potential {
                    Potential1D::Zero => true,
                    Potential1D::Harmonic { .. } => false,
                    Potential1D::Bare { potential, .. } | Potential1D::Effective { potential, .. } => {
                        potential.is_periodic()
                    }
                    Potential1D::BornOppenheimer { potential, circuit } => {
                        positive("kappa", circuit.kappa)?;
                        potential.is_periodic()
                    }
                };
                if !periodic {
                    return Err(Error::invalid("potential", "must be 2π-periodic on a phase grid"));
                }
                Ok(())
            }
            HamiltonianSpec::Regularized2D {
                circuit, slow, fast, ..
            } => {
                positive("kappa", circuit.kappa)?;
                slow.validate("slow", 64)?;
                match fast {
                    FastAxis::Box(g) => g.validate("fast", 64),
                    FastAxis::Circle { points } => {
                        if points % 2 == 0 || *points < 65 {
                            return Err(Error::invalid(
                                "fast",
                                format!("need an odd point count >= 65, got {points}"),
                            ));
                        }
                        if circuit.ng != 0.0 {
                            return Err(Error::invalid(
                                "ng",
                                "the compact two-dimensional operator is real only for ng = 0",
                            ));
                        }
                        Ok(())
                    }
                }
            }
            HamiltonianSpec::FastAtX {
                kappa,
                xi,
                lambda_j,
                x,
                grid,
                ..
            } => {
                positive("kappa", *kappa)?;
                positive("xi", *xi)?;
                nonnegative("lambda_j", *lambda_j)?;
                crate::error::finite("x", *x)?;
                grid.validate("grid", 128)
            }
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            HamiltonianSpec::Extended1D { grid, .. } | HamiltonianSpec::FastAtX { grid, .. } => {
                grid.points
            }
            HamiltonianSpec::Compact1D { n_max, .. } => 2 * n_max + 1,
            HamiltonianSpec::CompactPhaseGrid { points, .. }
            | HamiltonianSpec::PeriodicGrid { points, .. } => *points,
            HamiltonianSpec::Regularized2D { slow, fast, .. } => {
                slow.points
                    * match fast {
                        FastAxis::Box(g) => g.points,
                        FastAxis::Circle { points } => *points,
                    }
            }
        }
    }

    pub fn units(&self) -> Units {
        match self {
            HamiltonianSpec::FastAtX { .. } => Units::RegularizedQuantum,
            _ => Units::ChargingEnergy,
        }
    }

    /// Factor converting eigenvalues of the assembled matrix to the reported
    /// units.
    fn output_scale(&self) -> f64 {
        match self {
            HamiltonianSpec::Regularized2D {
                circuit,
                fast: FastAxis::Box(_),
                ..
            } => circuit.xi / (circuit.kappa * circuit.kappa),
            _ => 1.0,
        }
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive and finite, got {v}")))
    }
}

fn nonnegative(field: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and >= 0, got {v}")))
    }
}

/// Eigenvalues before unit conversion.
pub(crate) struct RawSpectrum {
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub scale: f64,
    pub method: &'static str,
}

pub(crate) fn solve_raw(spec: &HamiltonianSpec, k: usize) -> Result<RawSpectrum> {
    spec.validate()?;
    let dim = spec.dimension();
    if k == 0 || k > dim / 4 {
        return Err(Error::invalid(
            "k",
            format!("need 1 <= k <= dimension/4 = {}, got {k}", dim / 4),
        ));
    }
    match assemble::assemble(spec)? {
        assemble::Operator::Banded { matrix, floor } => {
            let scale = matrix.norm_inf();
            let shift = floor - 1e-6 * (1.0 + floor.abs());
            let pairs = lowest_eigenpairs(&matrix, k, shift, LanczosOptions::default())?;
            Ok(RawSpectrum {
                values: pairs.values,
                residuals: pairs.residuals,
                scale,
                method: "shift-invert Lanczos, banded Cholesky, full reorthogonalization",
            })
        }
        assemble::Operator::Tridiagonal { diag, off } => {
            let (vals, vecs) = tridiagonal_eigen(&diag, &off, true)?;
            let vecs = vecs.expect("vectors requested");
            let n = diag.len();
            let scale = (0..n)
                .map(|i| {
                    diag[i].abs()
                        + if i > 0 { off[i - 1].abs() } else { 0.0 }
                        + if i + 1 < n { off[i].abs() } else { 0.0 }
                })
                .fold(0.0, f64::max);
            let mut values = Vec::with_capacity(k);
            let mut residuals = Vec::with_capacity(k);
            for j in 0..k {
                let v = vecs[j * n..(j + 1) * n].to_vec();
                let mut r2 = 0.0;
                for i in 0..n {
                    let mut hv = diag[i] * v[i];
                    if i > 0 {
                        hv += off[i - 1] * v[i - 1];
                    }
                    if i + 1 < n {
                        hv += off[i] * v[i + 1];
                    }
                    r2 += (hv - vals[j] * v[i]).powi(2);
                }
                values.push(vals[j]);
                residuals.push(r2.sqrt());
            }
            Ok(RawSpectrum {
                values,
                residuals,
                scale,
                method: "implicit QL on the symmetric tridiagonal charge-basis matrix",
            })
        }
        assemble::Operator::DenseHermitian(h) => {
            let n = h.nrows();
            let scale = (0..n)
                .map(|i| (0..n).map(|j| h[(i, j)].norm()).sum::<f64>())
                .fold(0.0, f64::max);
            let eig = h.clone().symmetric_eigen();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let mut values = Vec::with_capacity(k);
            let mut residuals = Vec::with_capacity(k);
            for &j in order.iter().take(k) {
                let lambda = eig.eigenvalues[j];
                let v = eig.eigenvectors.column(j);
                let r = &h * v - v * nalgebra::Complex::new(lambda, 0.0);
                values.push(lambda);
                residuals.push(r.norm());
            }
            Ok(RawSpectrum {
                values,
                residuals,
                scale,
                method: "dense Hermitian eigendecomposition",
            })
        }
    }
}

/// The `k` lowest eigenvalues of `spec`, ascending, with residual norms.
pub fn lowest_eigenvalues(spec: &HamiltonianSpec, k: usize) -> Result<SpectrumResult> {
    let raw = solve_raw(spec, k)?;
    let s = spec.output_scale();
    Ok(SpectrumResult {
        eigenvalues: raw.values.iter().map(|v| v * s).collect(),
        k,
        residual_norms: raw.residuals.iter().map(|v| v * s).collect(),
        spectral_scale: raw.scale * s,
        units: spec.units(),
        dimension: spec.dimension(),
        method: raw.method.to_string(),
        spec: spec.clone(),
    })
}

/// Every eigenvalue of a one-dimensional extended operator inside
/// `[lo, hi)`, found by inertia counting and bisection.
pub fn eigenvalues_in_window(spec: &HamiltonianSpec, lo: f64, hi: f64) -> Result<Vec<f64>> {
    spec.validate()?;
    if !matches!(
        spec,
        HamiltonianSpec::Extended1D { .. } | HamiltonianSpec::FastAtX { .. }
    ) {
        return Err(Error::invalid(
            "spec",
            "window slicing is implemented for one-dimensional grid operators",
        ));
    }
    if !(lo < hi) {
        return Err(Error::invalid("window", format!("need lo < hi, got [{lo}, {hi})")));
    }
    match assemble::assemble(spec)? {
        assemble::Operator::Banded { matrix, .. } => Ok(matrix.eigenvalues_in(lo, hi, 1e-13)),
        _ => unreachable!("one-dimensional grid operators are banded"),
    }
}

/// Consecutive level spacings.
pub fn spacings(levels: &[f64]) -> Vec<f64> {
    levels.windows(2).map(|w| w[1] - w[0]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(points: usize) -> HamiltonianSpec {
        HamiltonianSpec::Extended1D {
            kinetic: 0.5,
            potential: Potential1D::Harmonic {
                curvature: 1.0,
                center: 0.0,
            },
            grid: BoxGrid::new(12.0, points),
        }
    }

    #[test]
    fn harmonic_ladder() {
        let r = lowest_eigenvalues(&harmonic(1000), 5).unwrap();
        for (k, e) in r.eigenvalues.iter().enumerate() {
            let exact = k as f64 + 0.5;
            assert!((e - exact).abs() / exact < 1e-4, "{k}: {e}");
        }
        for res in &r.residual_norms {
            assert!(*res < 1e-8 * r.spectral_scale);
        }
    }

    #[test]
    fn resolution_doubling_is_stable() {
        let a = lowest_eigenvalues(&harmonic(1200), 4).unwrap();
        let b = lowest_eigenvalues(&harmonic(2401), 4).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() / y < 1e-6);
        }
    }

    #[test]
    fn grid_is_symmetric() {
        for n in [128, 129] {
            let nodes = BoxGrid::new(5.0, n).nodes();
            for i in 0..n {
                assert_eq!(nodes[i], -nodes[n - 1 - i]);
            }
            assert!((nodes[1] - nodes[0] - BoxGrid::new(5.0, n).spacing()).abs() < 1e-14);
        }
    }

    #[test]
    fn window_slicing_matches_lanczos() {
        let spec = harmonic(800);
        let low = lowest_eigenvalues(&spec, 6).unwrap().eigenvalues;
        let win = eigenvalues_in_window(&spec, 1.0, 5.0).unwrap();
        assert_eq!(win.len(), 4);
        for (w, l) in win.iter().zip(&low[1..5]) {
            assert!((w - l).abs() < 1e-9);
        }
    }

    #[test]
    fn preconditions() {
        assert!(lowest_eigenvalues(&harmonic(100), 2).is_err());
        assert!(lowest_eigenvalues(&harmonic(200), 51).is_err());
        let bad = HamiltonianSpec::Compact1D {
            kinetic: 1.0,
            lambda_j: 50.0,
            ng: 0.0,
            n_max: 20,
        };
        assert!(matches!(bad.validate(), Err(Error::Validation { field: "n_max", .. })));
    }

    #[test]
    fn spec_serializes_with_variant_tag() {
        let s = serde_json::to_value(HamiltonianSpec::compact_1d(1.0, 4.0, 0.0)).unwrap();
        assert_eq!(s["variant"], "compact1_d");
    }
}
