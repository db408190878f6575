//! Nonlinear inductive potentials u(φ) with exact first and second
//! derivatives, plus a sampled asymptotic classification.

mod classify;
mod spline;

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};

pub use classify::{classify_asymptotics, AsymptoticReport};
pub use spline::Tabulated;

/// Asymptotic growth class of u(φ) on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassTag {
    /// Symmetric and sublinear: |u|/|φ|^γ → 0 for some γ < 2.
    Sublinear1a,
    /// Sublinear without the symmetry, which needs γ < 1.
    Sublinear1b,
    /// Grows faster than φ².
    Superlinear2,
    /// u/φ² tends to a positive constant, with a sublinear remainder.
    QuasilinearL,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    /// u = −cos φ.
    Cosine,
    /// u = −cos(φ − φ_ext).
    BiasedCosine { phi_ext: f64 },
    /// u = Σ coeffs[k] φ^{2k}.
    PolynomialEven { coeffs: Vec<f64> },
    /// Natural cubic spline through tabulated samples.
    Custom(Tabulated),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialModel {
    #[serde(flatten)]
    kind: PotentialKind,
    class_tag: ClassTag,
}

impl PotentialModel {
    /// Wraps `kind` with its default class tag.
    pub fn new(kind: PotentialKind) -> Result<Self> {
        match &kind {
            PotentialKind::Cosine | PotentialKind::Custom(_) => {}
            PotentialKind::BiasedCosine { phi_ext } => {
                finite("phi_ext", *phi_ext)?;
            }
            PotentialKind::PolynomialEven { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::invalid("coeffs", "need at least one coefficient"));
                }
                for &c in coeffs {
                    finite("coeffs", c)?;
                }
            }
        }
        let class_tag = default_tag(&kind);
        Ok(Self { kind, class_tag })
    }

    pub fn cosine() -> Self {
        Self {
            kind: PotentialKind::Cosine,
            class_tag: ClassTag::Sublinear1a,
        }
    }

    pub fn biased_cosine(phi_ext: f64) -> Result<Self> {
        Self::new(PotentialKind::BiasedCosine { phi_ext })
    }

    pub fn polynomial_even(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(PotentialKind::PolynomialEven { coeffs })
    }

    /// φ²/2, the linear inductor.
    pub fn quadratic() -> Self {
        Self::polynomial_even(vec![0.0, 0.5]).expect("valid coefficients")
    }

    pub fn tabulated(table: Tabulated) -> Self {
        Self {
            kind: PotentialKind::Custom(table),
            class_tag: ClassTag::Unclassified,
        }
    }

    /// Overrides the class tag. Structural invariants are enforced; a
    /// disagreement with the sampled classification is only logged.
    pub fn with_tag(mut self, tag: ClassTag) -> Result<Self> {
        if tag == ClassTag::Sublinear1a && !self.is_symmetric() {
            return Err(Error::invalid(
                "class_tag",
                "sublinear_1a requires u(phi) = u(-phi)",
            ));
        }
        if !matches!(self.kind, PotentialKind::Custom(_)) {
            if let Ok(report) = classify_asymptotics(&self, 1.0, 1e4) {
                if report.tag != tag {
                    log::warn!(
                        "class tag {tag:?} disagrees with sampled classification {:?}",
                        report.tag
                    );
                }
            }
        }
        self.class_tag = tag;
        Ok(self)
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn class_tag(&self) -> ClassTag {
        self.class_tag
    }

    /// u (order 0), u′ (order 1) or u″ (order 2) at `phi`.
    pub fn eval(&self, phi: f64, order: u8) -> Result<f64> {
        if order > 2 {
            return Err(Error::invalid("order", format!("must be 0, 1 or 2, got {order}")));
        }
        Ok(match &self.kind {
            PotentialKind::Cosine => cosine_derivative(phi, order),
            PotentialKind::BiasedCosine { phi_ext } => cosine_derivative(phi - phi_ext, order),
            PotentialKind::PolynomialEven { coeffs } => polynomial_derivative(coeffs, phi, order),
            PotentialKind::Custom(t) => return t.eval(phi, order),
        })
    }

    pub fn u(&self, phi: f64) -> Result<f64> {
        self.eval(phi, 0)
    }

    pub fn du(&self, phi: f64) -> Result<f64> {
        self.eval(phi, 1)
    }

    pub fn d2u(&self, phi: f64) -> Result<f64> {
        self.eval(phi, 2)
    }

    /// True for the 2π-periodic kinds.
    pub fn is_periodic(&self) -> bool {
        matches!(
            self.kind,
            PotentialKind::Cosine | PotentialKind::BiasedCosine { .. }
        )
    }

    /// Argument range over which `eval` is defined.
    pub fn domain(&self) -> (f64, f64) {
        match &self.kind {
            PotentialKind::Custom(t) => t.range(),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// sup |u′| when it is known in closed form.
    pub fn slope_bound(&self) -> Option<f64> {
        match &self.kind {
            PotentialKind::Cosine | PotentialKind::BiasedCosine { .. } => Some(1.0),
            PotentialKind::PolynomialEven { coeffs } if coeffs.iter().skip(1).all(|&c| c == 0.0) => {
                Some(0.0)
            }
            _ => None,
        }
    }

    /// Checks u(φ) = u(−φ) on a sample of points inside the domain.
    pub fn is_symmetric(&self) -> bool {
        match &self.kind {
            PotentialKind::Cosine | PotentialKind::PolynomialEven { .. } => true,
            PotentialKind::BiasedCosine { phi_ext } => {
                let r = phi_ext.rem_euclid(PI);
                r < 1e-12 || PI - r < 1e-12
            }
            PotentialKind::Custom(t) => {
                let (lo, hi) = t.range();
                let reach = hi.min(-lo);
                if reach <= 0.0 {
                    return false;
                }
                let scale = t.knots().1.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
                (1..=256).all(|i| {
                    let p = reach * i as f64 / 256.0;
                    match (t.eval(p, 0), t.eval(-p, 0)) {
                        (Ok(a), Ok(b)) => (a - b).abs() <= 1e-9 * scale,
                        _ => false,
                    }
                })
            }
        }
    }
}

impl Default for PotentialModel {
    fn default() -> Self {
        Self::cosine()
    }
}

fn cosine_derivative(t: f64, order: u8) -> f64 {
    match order {
        0 => -t.cos(),
        1 => t.sin(),
        _ => t.cos(),
    }
}

fn polynomial_derivative(coeffs: &[f64], phi: f64, order: u8) -> f64 {
    // Horner in z = φ²: d/dφ φ^{2k} = φ·2k·z^{k−1}, d²/dφ² φ^{2k} = 2k(2k−1)·z^{k−1}.
    let z = phi * phi;
    let skip = if order == 0 { 0 } else { 1 };
    let mut acc = 0.0;
    for (k, &c) in coeffs.iter().enumerate().skip(skip).rev() {
        let n = (2 * k) as f64;
        let factor = match order {
            0 => 1.0,
            1 => n,
            _ => n * (n - 1.0),
        };
        acc = acc * z + c * factor;
    }
    if order == 1 {
        acc * phi
    } else {
        acc
    }
}

fn default_tag(kind: &PotentialKind) -> ClassTag {
    match kind {
        PotentialKind::Cosine => ClassTag::Sublinear1a,
        PotentialKind::BiasedCosine { phi_ext } => {
            let r = phi_ext.rem_euclid(PI);
            if r < 1e-12 || PI - r < 1e-12 {
                ClassTag::Sublinear1a
            } else {
                ClassTag::Sublinear1b
            }
        }
        PotentialKind::PolynomialEven { coeffs } => {
            match coeffs.iter().rposition(|&c| c != 0.0) {
                None | Some(0) => ClassTag::Sublinear1a,
                Some(1) if coeffs[1] > 0.0 => ClassTag::QuasilinearL,
                Some(k) if k >= 2 && coeffs[k] > 0.0 => ClassTag::Superlinear2,
                _ => ClassTag::Unclassified,
            }
        }
        PotentialKind::Custom(_) => ClassTag::Unclassified,
    }
}

/// Potential as written in a circuit descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub source: PotentialSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_tag: Option<ClassTag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSource {
    Cosine,
    BiasedCosine { phi_ext: f64 },
    PolynomialEven { coeffs: Vec<f64> },
    /// Two-column `phi,u` CSV.
    Custom { csv: PathBuf },
}

impl PotentialSpec {
    pub fn build(&self, base_dir: Option<&Path>) -> Result<PotentialModel> {
        let model = match &self.source {
            PotentialSource::Cosine => PotentialModel::cosine(),
            PotentialSource::BiasedCosine { phi_ext } => PotentialModel::biased_cosine(*phi_ext)?,
            PotentialSource::PolynomialEven { coeffs } => {
                PotentialModel::polynomial_even(coeffs.clone())?
            }
            PotentialSource::Custom { csv } => {
                let path = match base_dir {
                    Some(dir) if csv.is_relative() => dir.join(csv),
                    _ => csv.clone(),
                };
                PotentialModel::tabulated(Tabulated::from_csv_path(path)?)
            }
        };
        match self.class_tag {
            Some(tag) => model.with_tag(tag),
            None => Ok(model),
        }
    }
}

/// Reduces `phi` into `[lo, lo + 2π)`.
pub fn wrap_phase(phi: f64, lo: f64) -> f64 {
    let w = lo + (phi - lo).rem_euclid(TAU);
    if w >= lo + TAU {
        lo
    } else {
        w
    }
}
