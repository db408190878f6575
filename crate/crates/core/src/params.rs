//! Circuit parameters and the SI → adimensional reduction.
//!
//! Solvers only ever see a [`ReducedCircuit`]: the capacitance ratio
//! `kappa = (C'/C)^(1/4)`, `xi = hbar*omega_C / E_C`, `lambda_j = E_J / E_C`
//! and the gate charge. SI quantities stop at this module.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::Constants;
use crate::error::{finite, Error, Result};
use crate::potentials::{PotentialModel, PotentialSpec};

/// Series C–L–(nonlinear inductor ∥ C') loop in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SICircuit {
    /// Series capacitance C, farads.
    pub capacitance: f64,
    /// Parasitic capacitance C' across the junction, farads. Zero means fully reduced.
    pub parasitic_capacitance: f64,
    /// Loop inductance L, henries.
    pub inductance: f64,
    /// Josephson energy E_J, joules.
    pub josephson_energy: f64,
    /// Gate charge n_g in [0, 1).
    pub gate_charge: f64,
}

impl SICircuit {
    pub fn validate(&self) -> Result<()> {
        let c = finite("capacitance", self.capacitance)?;
        let cp = finite("parasitic_capacitance", self.parasitic_capacitance)?;
        let l = finite("inductance", self.inductance)?;
        let ej = finite("josephson_energy", self.josephson_energy)?;
        let ng = finite("gate_charge", self.gate_charge)?;
        if c <= 0.0 {
            return Err(Error::invalid("capacitance", format!("must be > 0, got {c}")));
        }
        if cp < 0.0 {
            return Err(Error::invalid(
                "parasitic_capacitance",
                format!("must be >= 0, got {cp}"),
            ));
        }
        if l <= 0.0 {
            return Err(Error::invalid("inductance", format!("must be > 0, got {l}")));
        }
        if ej < 0.0 {
            return Err(Error::invalid(
                "josephson_energy",
                format!("must be >= 0, got {ej}"),
            ));
        }
        if !(0.0..1.0).contains(&ng) {
            return Err(Error::invalid("gate_charge", format!("must lie in [0, 1), got {ng}")));
        }
        Ok(())
    }

    pub fn is_reduced(&self) -> bool {
        self.parasitic_capacitance == 0.0
    }
}

/// Adimensional parameter set shared by every solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedCircuit {
    pub kappa: f64,
    pub xi: f64,
    pub lambda_j: f64,
    pub beta: f64,
    pub ng: f64,
    /// True when C' = 0 (kappa = 0): the directly reduced circuit.
    pub reduced: bool,
}

impl ReducedCircuit {
    /// Builds the set from ratios; `beta` follows as `lambda_j / xi^2`.
    pub fn from_ratios(kappa: f64, xi: f64, lambda_j: f64, ng: f64) -> Result<Self> {
        finite("kappa", kappa)?;
        finite("xi", xi)?;
        finite("lambda_j", lambda_j)?;
        finite("ng", ng)?;
        if kappa < 0.0 {
            return Err(Error::invalid("kappa", format!("must be >= 0, got {kappa}")));
        }
        if xi <= 0.0 {
            return Err(Error::invalid("xi", format!("must be > 0, got {xi}")));
        }
        if lambda_j < 0.0 {
            return Err(Error::invalid("lambda_j", format!("must be >= 0, got {lambda_j}")));
        }
        if !(0.0..1.0).contains(&ng) {
            return Err(Error::invalid("ng", format!("must lie in [0, 1), got {ng}")));
        }
        Ok(Self {
            kappa,
            xi,
            lambda_j,
            beta: lambda_j / (xi * xi),
            ng,
            reduced: kappa == 0.0,
        })
    }

    /// Same circuit with a different capacitance ratio.
    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::from_ratios(kappa, self.xi, self.lambda_j, self.ng)
    }
}

/// Dimensionful scales implied by an [`SICircuit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScales {
    /// 1/sqrt(LC), rad/s.
    pub omega_c: f64,
    /// 1/sqrt(LC'), rad/s; `None` for the reduced circuit.
    pub omega_r_prime: Option<f64>,
    /// (hbar^2 L / C)^(1/4), Wb.
    pub phi_c: f64,
    /// (hbar^2 L / C')^(1/4), Wb; `None` for the reduced circuit.
    pub phi_zpf: Option<f64>,
    /// 4 e^2 / C, J.
    pub e_c: f64,
    /// 4 e^2 / C', J; `None` for the reduced circuit.
    pub e_cp: Option<f64>,
    /// 1/sqrt(hbar omega_C), J^(-1/2).
    pub epsilon_c: f64,
}

/// Screening parameter `L E_J (2 pi / Phi_Q)^2` with the built-in constants.
pub fn beta_of(si: &SICircuit) -> Result<f64> {
    beta_of_with(si, &Constants::CODATA)
}

pub fn beta_of_with(si: &SICircuit, k: &Constants) -> Result<f64> {
    si.validate()?;
    let phase_per_flux = 2.0 * std::f64::consts::PI / k.flux_quantum;
    Ok(si.inductance * si.josephson_energy * phase_per_flux * phase_per_flux)
}

pub fn reduce(si: &SICircuit) -> Result<(ReducedCircuit, DerivedScales)> {
    reduce_with(si, &Constants::CODATA)
}

pub fn reduce_with(si: &SICircuit, k: &Constants) -> Result<(ReducedCircuit, DerivedScales)> {
    si.validate()?;
    let (c, cp, l) = (si.capacitance, si.parasitic_capacitance, si.inductance);
    let reduced = si.is_reduced();

    let omega_c = 1.0 / (l * c).sqrt();
    let e_c = 4.0 * k.e * k.e / c;
    let scales = DerivedScales {
        omega_c,
        omega_r_prime: (!reduced).then(|| 1.0 / (l * cp).sqrt()),
        phi_c: (k.hbar * k.hbar * l / c).powf(0.25),
        phi_zpf: (!reduced).then(|| (k.hbar * k.hbar * l / cp).powf(0.25)),
        e_c,
        e_cp: (!reduced).then(|| 4.0 * k.e * k.e / cp),
        epsilon_c: 1.0 / (k.hbar * omega_c).sqrt(),
    };

    let circuit = ReducedCircuit {
        kappa: (cp / c).powf(0.25),
        xi: k.hbar * omega_c / e_c,
        lambda_j: si.josephson_energy / e_c,
        beta: beta_of_with(si, k)?,
        ng: si.gate_charge,
        reduced,
    };
    Ok((circuit, scales))
}

/// JSON circuit descriptor read by the command-line front end.
///
/// ```json
/// {"C_F": 1e-13, "Cp_F": 1e-15, "L_H": 1e-9, "EJ_GHz": 10.0, "ng": 0.0,
///  "potential": {"kind": "cosine"}}
/// ```
///
/// Exactly one of `EJ_J` and `EJ_GHz` must be present; `EJ_GHz` is converted
/// with `E_J = h * f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitDescriptor {
    #[serde(rename = "C_F")]
    pub c_farad: f64,
    #[serde(rename = "Cp_F", default)]
    pub cp_farad: f64,
    #[serde(rename = "L_H")]
    pub l_henry: f64,
    #[serde(rename = "EJ_J", default, skip_serializing_if = "Option::is_none")]
    pub ej_joule: Option<f64>,
    #[serde(rename = "EJ_GHz", default, skip_serializing_if = "Option::is_none")]
    pub ej_ghz: Option<f64>,
    #[serde(default)]
    pub ng: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSpec>,
}

impl CircuitDescriptor {
    pub fn from_json_str(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(Error::invalid("circuit", "descriptor is empty"));
        }
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_si(&self, k: &Constants) -> Result<SICircuit> {
        let ej = match (self.ej_joule, self.ej_ghz) {
            (Some(j), None) => j,
            (None, Some(ghz)) => k.h * ghz * 1e9,
            (Some(_), Some(_)) => {
                return Err(Error::invalid("EJ_J", "give either EJ_J or EJ_GHz, not both"))
            }
            (None, None) => return Err(Error::invalid("EJ_J", "missing EJ_J or EJ_GHz")),
        };
        let si = SICircuit {
            capacitance: self.c_farad,
            parasitic_capacitance: self.cp_farad,
            inductance: self.l_henry,
            josephson_energy: ej,
            gate_charge: self.ng,
        };
        si.validate()?;
        Ok(si)
    }

    /// Potential named in the descriptor (cosine when absent). Relative CSV
    /// paths resolve against `base_dir`.
    pub fn potential_model(&self, base_dir: Option<&Path>) -> Result<PotentialModel> {
        match &self.potential {
            None => Ok(PotentialModel::cosine()),
            Some(spec) => spec.build(base_dir),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample() -> SICircuit {
        SICircuit {
            capacitance: 80e-15,
            parasitic_capacitance: 2e-15,
            inductance: 1.2e-9,
            josephson_energy: 6.62607015e-34 * 12e9,
            gate_charge: 0.0,
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn equal_capacitances_give_unit_kappa() {
        let mut si = sample();
        si.parasitic_capacitance = si.capacitance;
        let (rc, _) = reduce(&si).unwrap();
        assert_eq!(rc.kappa, 1.0);
    }

    #[test]
    fn zero_parasitic_capacitance_is_flagged_not_infinite() {
        let mut si = sample();
        si.parasitic_capacitance = 0.0;
        let (rc, scales) = reduce(&si).unwrap();
        assert_eq!(rc.kappa, 0.0);
        assert!(rc.reduced);
        assert!(scales.omega_r_prime.is_none());
        assert!(scales.phi_zpf.is_none());
        assert!(scales.e_cp.is_none());
    }

    #[test]
    fn critical_screening_gives_unit_beta() {
        let k = Constants::CODATA;
        let mut si = sample();
        let s = 2.0 * PI / k.flux_quantum;
        si.josephson_energy = 1.0 / (si.inductance * s * s);
        assert!(rel(beta_of(&si).unwrap(), 1.0) < 1e-12);
        let (rc, _) = reduce(&si).unwrap();
        assert!(rel(rc.beta, 1.0) < 1e-12);
    }

    #[test]
    fn beta_dual_formula() {
        let si = sample();
        let (rc, _) = reduce(&si).unwrap();
        assert!(rel(rc.beta, rc.lambda_j / (rc.xi * rc.xi)) < 1e-12);
    }

    #[test]
    fn beta_linear_in_inductance_and_zero_without_junction() {
        let si = sample();
        let mut doubled = si;
        doubled.inductance *= 2.0;
        assert!(rel(beta_of(&doubled).unwrap(), 2.0 * beta_of(&si).unwrap()) < 1e-14);
        let mut open = si;
        open.josephson_energy = 0.0;
        assert_eq!(beta_of(&open).unwrap(), 0.0);
    }

    #[test]
    fn transmon_like_regime_has_small_beta() {
        // 10 pH stray loop inductance, E_J/h = 15 GHz.
        let si = SICircuit {
            capacitance: 70e-15,
            parasitic_capacitance: 1e-15,
            inductance: 10e-12,
            josephson_energy: 6.62607015e-34 * 15e9,
            gate_charge: 0.0,
        };
        let beta = beta_of(&si).unwrap();
        assert!(beta < 0.05, "beta = {beta}");
        let (rc, _) = reduce(&si).unwrap();
        assert!(rel(beta, rc.lambda_j / (rc.xi * rc.xi)) < 1e-12);
    }

    #[test]
    fn charging_energy_ratio_is_kappa_to_the_fourth() {
        let (rc, scales) = reduce(&sample()).unwrap();
        let ecp = scales.e_cp.unwrap();
        assert!(rel(scales.e_c, rc.kappa.powi(4) * ecp) < 1e-12);
        assert!(rel(scales.phi_zpf.unwrap(), scales.phi_c / rc.kappa) < 1e-12);
    }

    #[test]
    fn validation_names_the_field() {
        let mut si = sample();
        si.inductance = -1.0;
        match reduce(&si) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "inductance"),
            other => panic!("unexpected {other:?}"),
        }
        let mut si = sample();
        si.capacitance = f64::NAN;
        assert!(matches!(
            reduce(&si),
            Err(Error::Validation { field: "capacitance", .. })
        ));
        let mut si = sample();
        si.gate_charge = 1.0;
        assert!(matches!(
            reduce(&si),
            Err(Error::Validation { field: "gate_charge", .. })
        ));
    }

    #[test]
    fn descriptor_accepts_ghz_and_rejects_both() {
        let d = CircuitDescriptor::from_json_str(
            r#"{"C_F": 8e-14, "Cp_F": 2e-15, "L_H": 1.2e-9, "EJ_GHz": 12.0, "ng": 0.1}"#,
        )
        .unwrap();
        let si = d.to_si(&Constants::CODATA).unwrap();
        assert!(rel(si.josephson_energy, 6.62607015e-34 * 12e9) < 1e-15);

        let both = CircuitDescriptor::from_json_str(
            r#"{"C_F": 8e-14, "L_H": 1e-9, "EJ_GHz": 1.0, "EJ_J": 1e-24}"#,
        )
        .unwrap();
        assert!(both.to_si(&Constants::CODATA).is_err());
        assert!(CircuitDescriptor::from_json_str("  \n").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn si_strategy() -> impl Strategy<Value = SICircuit> {
            (
                -15.0f64..-11.0,
                0.0f64..1.0,
                -12.0f64..-7.0,
                0.0f64..12.0,
                0.0f64..1.0,
            )
                .prop_map(|(lc, frac, ll, ghz, ng)| SICircuit {
                    capacitance: 10f64.powf(lc),
                    parasitic_capacitance: frac * 10f64.powf(lc),
                    inductance: 10f64.powf(ll),
                    josephson_energy: 6.62607015e-34 * ghz * 1e9,
                    gate_charge: ng * 0.999,
                })
        }

        proptest! {
            #[test]
            fn beta_identity_holds(si in si_strategy()) {
                let (rc, _) = reduce(&si).unwrap();
                let alt = rc.lambda_j / (rc.xi * rc.xi);
                prop_assert!((rc.beta - alt).abs() <= 1e-12 * rc.beta.abs().max(1e-300));
            }

            #[test]
            fn kappa_is_scale_invariant(si in si_strategy(), factor in 0.1f64..10.0) {
                let (a, _) = reduce(&si).unwrap();
                let mut scaled = si;
                scaled.capacitance *= factor;
                scaled.parasitic_capacitance *= factor;
                let (b, _) = reduce(&scaled).unwrap();
                prop_assert!((a.kappa - b.kappa).abs() <= 1e-12 * a.kappa.max(1e-300));
            }

            #[test]
            fn charging_energies_scale(si in si_strategy()) {
                prop_assume!(si.parasitic_capacitance > 0.0);
                let (rc, s) = reduce(&si).unwrap();
                let ecp = s.e_cp.unwrap();
                prop_assert!((s.e_c - rc.kappa.powi(4) * ecp).abs() <= 1e-12 * s.e_c);
            }
        }
    }
}
