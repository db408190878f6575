use serde::Serialize;

use super::{ClassTag, PotentialKind, PotentialModel};
use crate::error::{Error, Result};

const BINS_PER_DECADE: usize = 8;
const SAMPLES_PER_BIN: usize = 1024;

/// Outcome of [`classify_asymptotics`]: the inferred tag, the sampled
/// envelope of |u(φ)|/|φ|^γ per geometric bin, and human-readable notes.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticReport {
    pub tag: ClassTag,
    pub gamma: f64,
    /// `(bin upper edge, max over the bin of |u(±φ)| / φ^γ)`.
    pub envelope: Vec<(f64, f64)>,
    pub diagnostics: Vec<String>,
}

/// Estimates the large-|φ| growth class of `p` by sampling up to `phi_max`.
///
/// A tag other than `Unclassified` is returned only when the relevant ratio
/// decays monotonically across the last decade of the geometric grid.
pub fn classify_asymptotics(p: &PotentialModel, gamma: f64, phi_max: f64) -> Result<AsymptoticReport> {
    if !(phi_max >= 1e3) {
        return Err(Error::invalid("phi_max", format!("must be >= 1e3, got {phi_max}")));
    }
    if !(gamma > 0.0 && gamma <= 2.0) {
        return Err(Error::invalid("gamma", format!("must lie in (0, 2], got {gamma}")));
    }
    let mut report = AsymptoticReport {
        tag: ClassTag::Unclassified,
        gamma,
        envelope: Vec::new(),
        diagnostics: Vec::new(),
    };
    if let PotentialKind::Custom(t) = p.kind() {
        let (lo, hi) = t.range();
        report.diagnostics.push(format!(
            "compact-domain: classification inapplicable (table covers [{lo}, {hi}])"
        ));
        return Ok(report);
    }

    let u = |x: f64| p.u(x).expect("analytic kinds evaluate everywhere");
    let symmetric = p.is_symmetric();
    let edges = geometric_edges(phi_max);
    let last_decade = edges.iter().position(|&e| e >= phi_max / 10.0).unwrap_or(0);

    // |u(±φ)| / φ^γ, maximized over each bin.
    report.envelope = bin_max(&edges, |x| u(x).abs().max(u(-x).abs()) / x.powf(gamma));
    let env_tail: Vec<f64> = report.envelope[last_decade..].iter().map(|e| e.1).collect();
    if strictly_decreasing(&env_tail) {
        if symmetric && gamma < 2.0 {
            report.tag = ClassTag::Sublinear1a;
        } else if !symmetric && gamma < 1.0 {
            report.tag = ClassTag::Sublinear1b;
        } else if !symmetric {
            report
                .diagnostics
                .push("asymmetric potential: sublinear class needs a probe gamma < 1".into());
        }
        if report.tag != ClassTag::Unclassified {
            report
                .diagnostics
                .push(format!("|u|/phi^{gamma} decays over the last decade"));
        }
        return Ok(report);
    }

    // Quasilinear: u/φ² settles to a positive constant with a remainder that
    // is sublinear at the probe exponent.
    let tail_edges = &edges[last_decade..];
    let ratio: Vec<f64> = tail_edges.iter().map(|&x| 0.5 * (u(x) + u(-x)) / (x * x)).collect();
    let r_inf = *ratio.last().unwrap_or(&0.0);
    let spread = ratio.iter().fold(0.0f64, |m, &r| m.max((r - r_inf).abs()));
    if r_inf > 0.0 && spread <= 1e-2 * r_inf {
        let rem = bin_max(&edges, |x| {
            (u(x) - r_inf * x * x).abs().max((u(-x) - r_inf * x * x).abs()) / x.powf(gamma.min(1.99))
        });
        let rem_tail: Vec<f64> = rem[last_decade..].iter().map(|e| e.1).collect();
        let scale = r_inf * phi_max * phi_max;
        if strictly_decreasing(&rem_tail) || rem_tail.iter().all(|&v| v <= 1e-12 * scale) {
            report.tag = ClassTag::QuasilinearL;
            report
                .diagnostics
                .push(format!("u/phi^2 -> {r_inf:.6} with sublinear remainder"));
            return Ok(report);
        }
    }

    // Superlinear: φ²/u decays.
    let inv: Vec<f64> = tail_edges
        .iter()
        .map(|&x| {
            let m = u(x).min(u(-x));
            if m > 0.0 {
                x * x / m
            } else {
                f64::INFINITY
            }
        })
        .collect();
    if inv.iter().all(|v| v.is_finite()) && strictly_decreasing(&inv) {
        report.tag = ClassTag::Superlinear2;
        report
            .diagnostics
            .push("phi^2/u decays over the last decade".into());
        return Ok(report);
    }

    report
        .diagnostics
        .push("no monotone decay over the last decade".into());
    Ok(report)
}

fn geometric_edges(phi_max: f64) -> Vec<f64> {
    let decades = phi_max.log10();
    let n = (decades * BINS_PER_DECADE as f64).ceil() as usize;
    (0..=n)
        .map(|i| 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

fn bin_max(edges: &[f64], f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    edges
        .windows(2)
        .map(|w| {
            let m = (0..=SAMPLES_PER_BIN)
                .map(|j| f(w[0] + (w[1] - w[0]) * j as f64 / SAMPLES_PER_BIN as f64))
                .fold(0.0f64, f64::max);
            (w[1], m)
        })
        .collect()
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.len() >= 2 && v.windows(2).all(|w| w[1] < w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::Tabulated;
    use std::f64::consts::PI;

    #[test]
    fn cosine_is_sublinear_symmetric() {
        let r = classify_asymptotics(&PotentialModel::cosine(), 1.0, 1e3).unwrap();
        assert_eq!(r.tag, ClassTag::Sublinear1a);
    }

    #[test]
    fn quartic_is_superlinear() {
        let p = PotentialModel::polynomial_even(vec![0.0, 0.5, 0.1]).unwrap();
        let r = classify_asymptotics(&p, 2.0, 1e3).unwrap();
        assert_eq!(r.tag, ClassTag::Superlinear2);
    }

    #[test]
    fn quadratic_is_quasilinear() {
        let r = classify_asymptotics(&PotentialModel::quadratic(), 1.0, 1e3).unwrap();
        assert_eq!(r.tag, ClassTag::QuasilinearL);
    }

    #[test]
    fn biased_cosine_needs_small_gamma() {
        let p = PotentialModel::biased_cosine(PI / 3.0).unwrap();
        assert_eq!(classify_asymptotics(&p, 0.5, 1e3).unwrap().tag, ClassTag::Sublinear1b);
        assert_eq!(classify_asymptotics(&p, 1.5, 1e3).unwrap().tag, ClassTag::Unclassified);
    }

    #[test]
    fn custom_table_is_compact_domain() {
        let phi: Vec<f64> = (0..100).map(|i| 2.0 * PI * i as f64 / 99.0).collect();
        let u: Vec<f64> = phi.iter().map(|p| -p.cos()).collect();
        let p = PotentialModel::tabulated(Tabulated::new(phi, u).unwrap());
        let r = classify_asymptotics(&p, 1.0, 1e3).unwrap();
        assert_eq!(r.tag, ClassTag::Unclassified);
        assert!(r.diagnostics[0].starts_with("compact-domain"));
    }

    #[test]
    fn short_range_rejected() {
        assert!(classify_asymptotics(&PotentialModel::cosine(), 1.0, 10.0).is_err());
    }
}
