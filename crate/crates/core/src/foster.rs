//! Lossless one-port admittances in Foster form:
//! Y(s) = C_∞ s + 1/(L₀ s) + Σ_k (s/L_k)/(s² + Ω_k²).

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative distance to a pole below which evaluation is refused.
pub const POLE_MARGIN: f64 = 1e-9;

/// Largest |Re Y|/|Y| accepted as lossless input.
pub const LOSS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    /// 1/L_k, inverse henries.
    pub inverse_inductance: f64,
    /// Ω_k, rad/s.
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FosterModel {
    /// Pole at infinity, farads.
    pub c_inf: f64,
    /// Pole at zero, henries.
    pub l_zero: Option<f64>,
    /// Finite poles, Ω strictly increasing.
    pub resonances: Vec<Resonance>,
}

impl FosterModel {
    pub fn new(c_inf: f64, l_zero: Option<f64>, mut resonances: Vec<Resonance>) -> Result<Self> {
        resonances.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        let m = Self {
            c_inf,
            l_zero,
            resonances,
        };
        m.validate()?;
        Ok(m)
    }

    /// Positive-real structure: nonnegative c_inf, positive L₀ and
    /// residues, distinct increasing resonance frequencies.
    pub fn validate(&self) -> Result<()> {
        if !(self.c_inf >= 0.0 && self.c_inf.is_finite()) {
            return Err(Error::NotPositiveReal(format!("c_inf = {}", self.c_inf)));
        }
        if let Some(l) = self.l_zero {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::NotPositiveReal(format!("l_zero = {l}")));
            }
        }
        for r in &self.resonances {
            if !(r.inverse_inductance > 0.0 && r.inverse_inductance.is_finite()) {
                return Err(Error::NotPositiveReal(format!(
                    "residue 1/L = {} at omega = {}",
                    r.inverse_inductance, r.omega
                )));
            }
            if !(r.omega > 0.0 && r.omega.is_finite()) {
                return Err(Error::NotPositiveReal(format!("resonance omega = {}", r.omega)));
            }
        }
        if self.resonances.windows(2).any(|w| !(w[0].omega < w[1].omega)) {
            return Err(Error::NotPositiveReal("resonance frequencies must be distinct".into()));
        }
        Ok(())
    }

    fn check_pole(&self, omega: f64) -> Result<()> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::invalid("omega", format!("must be positive and finite, got {omega}")));
        }
        for r in &self.resonances {
            if (omega - r.omega).abs() <= POLE_MARGIN * r.omega {
                return Err(Error::PoleProximity {
                    omega,
                    pole: r.omega,
                });
            }
        }
        Ok(())
    }

    /// Im Y(iω) = C_∞ω − 1/(L₀ω) + Σ_k ω/(L_k(Ω_k² − ω²)).
    pub fn susceptance(&self, omega: f64) -> Result<f64> {
        self.check_pole(omega)?;
        Ok(basis_row(omega, self.l_zero.is_some(), &poles(self))
            .iter()
            .zip(self.coefficients())
            .map(|(b, c)| b * c)
            .sum())
    }

    /// d(Im Y)/dω, positive wherever defined for a positive-real model.
    pub fn susceptance_slope(&self, omega: f64) -> Result<f64> {
        self.check_pole(omega)?;
        let w2 = omega * omega;
        let mut s = self.c_inf;
        if let Some(l) = self.l_zero {
            s += 1.0 / (l * w2);
        }
        for r in &self.resonances {
            let o2 = r.omega * r.omega;
            s += r.inverse_inductance * (o2 + w2) / ((o2 - w2) * (o2 - w2));
        }
        Ok(s)
    }

    fn coefficients(&self) -> Vec<f64> {
        let mut c = vec![self.c_inf];
        if let Some(l) = self.l_zero {
            c.push(1.0 / l);
        }
        c.extend(self.resonances.iter().map(|r| r.inverse_inductance));
        c
    }
}

fn poles(m: &FosterModel) -> Vec<f64> {
    m.resonances.iter().map(|r| r.omega).collect()
}

/// Model terms at ω: [ω, −1/ω (if L₀), ω/(Ω_k² − ω²)...].
fn basis_row(omega: f64, l_zero: bool, poles: &[f64]) -> Vec<f64> {
    let mut row = vec![omega];
    if l_zero {
        row.push(-1.0 / omega);
    }
    row.extend(poles.iter().map(|o| omega / (o * o - omega * omega)));
    row
}

/// Im Y(iω) on each frequency; the real part of a Foster admittance on
/// the imaginary axis is identically zero.
pub fn eval_admittance(m: &FosterModel, omegas: &[f64]) -> Result<Vec<f64>> {
    omegas.iter().map(|&w| m.susceptance(w)).collect()
}

/// One measured point of Y(iω).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmittanceSample {
    pub omega: f64,
    pub im: f64,
    #[serde(default)]
    pub re: f64,
}

impl AdmittanceSample {
    pub fn lossless(omega: f64, im: f64) -> Self {
        Self { omega, im, re: 0.0 }
    }
}

/// Reads `omega,ImY[,ReY]` rows; a non-numeric first row is a header and
/// `#` lines are comments.
pub fn read_samples_csv(path: impl AsRef<Path>) -> Result<Vec<AdmittanceSample>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let nums: Vec<Option<f64>> = rec.iter().map(|f| f.parse().ok()).collect();
        if i == 0 && nums.iter().any(Option::is_none) {
            continue;
        }
        match nums.as_slice() {
            [Some(w), Some(im)] => out.push(AdmittanceSample::lossless(*w, *im)),
            [Some(w), Some(im), Some(re)] => out.push(AdmittanceSample {
                omega: *w,
                im: *im,
                re: *re,
            }),
            _ => {
                return Err(Error::invalid(
                    "samples",
                    format!("row {} is not `omega,ImY[,ReY]`", i + 1),
                ))
            }
        }
    }
    if out.is_empty() {
        return Err(Error::invalid("samples", "no data rows"));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FosterFit {
    pub model: FosterModel,
    /// Root-mean-square residual of Im Y, siemens.
    pub rms: f64,
    /// Standard-error proxy rms·√diag((AᵀA)⁻¹) for [c_inf, 1/L₀?, 1/L_k...].
    pub parameter_sigma: Vec<f64>,
    /// Sample intervals in which a pole was detected.
    pub pole_brackets: Vec<(f64, f64)>,
    pub samples: usize,
}

/// Fits a Foster model with `n_resonances` finite poles to lossless
/// susceptance samples.
///
/// Poles are bracketed where the sampled susceptance decreases (it rises
/// strictly between poles), then each is refined by golden-section search
/// on the residual while the linear coefficients are re-solved by least
/// squares. L₀ is included when the susceptance is negative at the
/// lowest frequency.
pub fn fit_foster(samples: &[AdmittanceSample], n_resonances: usize) -> Result<FosterFit> {
    let need = 3 * (1 + 2 * n_resonances);
    if samples.len() < need {
        return Err(Error::invalid(
            "samples",
            format!("need at least {need} samples for {n_resonances} resonances, got {}", samples.len()),
        ));
    }
    let mut data = samples.to_vec();
    for s in &data {
        if !(s.omega > 0.0 && s.omega.is_finite() && s.im.is_finite() && s.re.is_finite()) {
            return Err(Error::invalid("samples", format!("non-finite or non-positive entry {s:?}")));
        }
        let mag = s.re.hypot(s.im);
        if s.re.abs() > LOSS_TOLERANCE * mag {
            return Err(Error::Lossy {
                omega: s.omega,
                re: s.re,
            });
        }
    }
    data.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    if data.windows(2).any(|w| w[0].omega == w[1].omega) {
        return Err(Error::invalid("samples", "duplicate frequencies"));
    }
    let w: Vec<f64> = data.iter().map(|s| s.omega).collect();
    let b: Vec<f64> = data.iter().map(|s| s.im).collect();

    let brackets: Vec<(f64, f64)> = (0..w.len() - 1)
        .filter(|&i| b[i + 1] < b[i])
        .map(|i| (w[i], w[i + 1]))
        .collect();
    if brackets.len() != n_resonances {
        return Err(Error::StructuralMismatch {
            expected: n_resonances,
            detected: brackets.iter().map(|(a, c)| 0.5 * (a + c)).collect(),
        });
    }
    let l_zero = b[0] < 0.0;

    let mut poles: Vec<f64> = brackets.iter().map(|(a, c)| 0.5 * (a + c)).collect();
    let objective = |poles: &[f64]| -> f64 { linear_solve(&w, &b, l_zero, poles).map_or(f64::INFINITY, |s| s.1) };
    let mut best = objective(&poles);
    for _sweep in 0..50 {
        let before = best;
        for k in 0..poles.len() {
            let (lo, hi) = brackets[k];
            let mut trial = poles.clone();
            let pk = golden_section(lo, hi, |x| {
                trial[k] = x;
                objective(&trial)
            });
            poles[k] = pk;
            best = objective(&poles);
        }
        if poles.len() <= 1 || (before - best).abs() <= 1e-15 * before.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let (coef, rms, sigma) = linear_solve(&w, &b, l_zero, &poles)?;
    let mut idx = 0;
    let c_inf = coef[idx];
    idx += 1;
    let l0 = if l_zero {
        idx += 1;
        Some(1.0 / coef[1])
    } else {
        None
    };
    let resonances = poles
        .iter()
        .zip(&coef[idx..])
        .map(|(o, r)| Resonance {
            inverse_inductance: *r,
            omega: *o,
        })
        .collect();
    // Round-off may leave an absent capacitance a hair below zero.
    let scale = coef.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let c_inf = if c_inf < 0.0 && c_inf.abs() <= 1e-12 * scale { 0.0 } else { c_inf };
    let model = FosterModel {
        c_inf,
        l_zero: l0,
        resonances,
    };
    model.validate()?;
    Ok(FosterFit {
        model,
        rms,
        parameter_sigma: sigma,
        pole_brackets: brackets,
        samples: data.len(),
    })
}

/// Linear least squares for the coefficients given the poles:
/// (coefficients, rms, sigma proxy).
fn linear_solve(w: &[f64], b: &[f64], l_zero: bool, poles: &[f64]) -> Result<(Vec<f64>, f64, Vec<f64>)> {
    let n = w.len();
    let p = 1 + usize::from(l_zero) + poles.len();
    let mut a = DMatrix::<f64>::zeros(n, p);
    for (i, &wi) in w.iter().enumerate() {
        for (j, v) in basis_row(wi, l_zero, poles).into_iter().enumerate() {
            a[(i, j)] = v;
        }
    }
    // Column scaling keeps the normal matrix well conditioned.
    let norms: Vec<f64> = (0..p).map(|j| a.column(j).norm().max(f64::MIN_POSITIVE)).collect();
    for j in 0..p {
        let nj = norms[j];
        a.column_mut(j).iter_mut().for_each(|v| *v /= nj);
    }
    let rhs = DVector::from_column_slice(b);
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::invalid("samples", format!("least squares failed: {e}")))?;
    let resid = &a * &x - &rhs;
    let rms = (resid.norm_squared() / n as f64).sqrt();
    let coef: Vec<f64> = (0..p).map(|j| x[j] / norms[j]).collect();
    let sigma = match (a.transpose() * &a).try_inverse() {
        Some(inv) => (0..p).map(|j| rms * inv[(j, j)].max(0.0).sqrt() / norms[j]).collect(),
        None => vec![f64::INFINITY; p],
    };
    Ok((coef, rms, sigma))
}

fn golden_section(mut a: f64, mut b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}
