//! Physical constants (SI, exact 2019 definitions).
//!
//! Every conversion in the crate reads from a [`Constants`] table. The flux
//! quantum is stored, not derived, so there is one place to audit it.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Environment variable naming a JSON file that replaces the built-in table.
pub const CONSTANTS_ENV: &str = "CIRCADIA_CONSTANTS";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Elementary charge, C.
    pub e: f64,
    /// Planck constant, J s.
    pub h: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Superconducting flux quantum h/2e, Wb.
    pub flux_quantum: f64,
}

impl Constants {
    pub const CODATA: Constants = Constants {
        e: 1.602176634e-19,
        h: 6.62607015e-34,
        hbar: 1.054571817646156391e-34,
        flux_quantum: 2.067833848461929323e-15,
    };

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// The built-in table, unless [`CONSTANTS_ENV`] points at an override.
    pub fn load() -> Result<Self> {
        match std::env::var_os(CONSTANTS_ENV) {
            Some(path) => Self::from_json_file(path),
            None => Ok(Self::CODATA),
        }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::CODATA
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stored_values_are_mutually_consistent() {
        let c = Constants::CODATA;
        let phi_q = c.h / (2.0 * c.e);
        assert!((phi_q - c.flux_quantum).abs() / c.flux_quantum < 1e-15);
        let hbar = c.h / (2.0 * std::f64::consts::PI);
        assert!((hbar - c.hbar).abs() / c.hbar < 1e-15);
    }

    #[test]
    fn override_file_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, serde_json::to_string(&Constants::CODATA).unwrap()).unwrap();
        assert_eq!(Constants::from_json_file(&path).unwrap(), Constants::CODATA);
    }
}
