//! Classical reduction of the singular circuit: roots of the consistency
//! equation φ = φ_c + β u′(φ_c), the invertibility threshold, and the
//! resulting effective potential in the extended (x) and compact (φ) bases.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ReducedCircuit;
use crate::potentials::{wrap_phase, PotentialKind, PotentialModel};

/// Grid intervals used for sign-change bracketing.
pub const SCAN_INTERVALS: usize = 4096;
/// Largest accepted |φ − φ_c − β u′(φ_c)| for a returned root.
pub const ROOT_RESIDUAL: f64 = 1e-12;

/// Search interval for φ_c. A periodic window always spans one period
/// starting at `lo` and roots are understood modulo 2π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl Window {
    /// `[0, 2π)` with roots taken modulo 2π.
    pub const FUNDAMENTAL: Window = Window {
        lo: 0.0,
        hi: TAU,
        periodic: true,
    };

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid("window", format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self {
            lo,
            hi,
            periodic: false,
        })
    }

    pub fn periodic_from(lo: f64) -> Self {
        Self {
            lo,
            hi: lo + TAU,
            periodic: true,
        }
    }
}

/// All roots of the consistency equation at one drive value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSolution {
    pub drive: f64,
    pub beta: f64,
    /// Root closest to the drive first, the rest ascending.
    pub roots: Vec<f64>,
    pub residuals: Vec<f64>,
    pub invertible: bool,
    /// Minimum of 1 + β u″ over the window.
    pub jacobian_min: f64,
}

/// Default search window for drive `phi`: the fundamental period for
/// periodic potentials, the table range for tabulated ones, otherwise an
/// interval grown until it brackets the drive.
pub fn default_window(p: &PotentialModel, beta: f64, phi: f64) -> Result<Window> {
    if p.is_periodic() {
        return Ok(Window::FUNDAMENTAL);
    }
    if let PotentialKind::Custom(t) = p.kind() {
        let (lo, hi) = t.range();
        return Window::interval(lo, hi);
    }
    let f = |s: f64| -> Result<f64> { Ok(s + beta * p.du(s)? - phi) };
    let mut r = phi.abs() + 8.0;
    for _ in 0..64 {
        if f(-r)? < 0.0 && f(r)? > 0.0 {
            return Window::interval(-r, r);
        }
        r *= 2.0;
    }
    Err(Error::NoRoot {
        drive: phi,
        lo: -r,
        hi: r,
    })
}

/// Solves φ = φ_c + β u′(φ_c) for every φ_c in `window`.
///
/// Roots are bracketed by sign changes on a uniform grid of
/// [`SCAN_INTERVALS`] intervals and refined by bisection. Grid intervals
/// where 1 + β u″ changes sign are split at the fold so that root pairs
/// closer than the grid spacing are still separated.
pub fn solve_consistency(
    p: &PotentialModel,
    beta: f64,
    phi: f64,
    window: Window,
) -> Result<BranchSolution> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::invalid("beta", format!("must be finite and >= 0, got {beta}")));
    }
    crate::error::finite("phi", phi)?;
    let (lo, hi) = if window.periodic {
        (window.lo, window.lo + TAU)
    } else {
        (window.lo, window.hi)
    };
    if !(lo < hi) {
        return Err(Error::invalid("window", "empty interval"));
    }

    let eval = |s: f64| -> Result<(f64, f64)> {
        Ok((s + beta * p.du(s)?, 1.0 + beta * p.d2u(s)?))
    };
    let n = SCAN_INTERVALS;
    let mut xs = Vec::with_capacity(n + 1);
    let mut fs = Vec::with_capacity(n + 1);
    let mut js = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let s = if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 };
        let (f, j) = eval(s)?;
        xs.push(s);
        fs.push(f);
        js.push(j);
    }
    let jacobian_min = js.iter().cloned().fold(f64::INFINITY, f64::min);

    // Periodic windows: one target φ + 2πm per reachable branch offset m.
    let targets: Vec<f64> = if window.periodic {
        let fmin = fs.iter().cloned().fold(f64::INFINITY, f64::min);
        let fmax = fs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let m_lo = ((fmin - phi) / TAU).ceil() as i64 - 1;
        let m_hi = ((fmax - phi) / TAU).floor() as i64 + 1;
        (m_lo..=m_hi).map(|m| phi + TAU * m as f64).collect()
    } else {
        vec![phi]
    };

    let mut roots = Vec::new();
    for &target in &targets {
        let g = |s: f64| -> Result<f64> { Ok(eval(s)?.0 - target) };
        for i in 0..n {
            let (a, b) = (xs[i], xs[i + 1]);
            let (ga, gb) = (fs[i] - target, fs[i + 1] - target);
            if ga == 0.0 {
                roots.push(a);
            }
            if js[i] * js[i + 1] < 0.0 {
                // g has an extremum inside: bracket each monotone piece.
                let fold = bisect(|s| Ok(eval(s)?.1), a, b, js[i])?;
                let gf = g(fold)?;
                if gf == 0.0 {
                    roots.push(fold);
                    continue;
                }
                let mut found = false;
                for (l, r, gl, gr) in [(a, fold, ga, gf), (fold, b, gf, gb)] {
                    if gl * gr < 0.0 {
                        roots.push(bisect(&g, l, r, gl)?);
                        found = true;
                    }
                }
                if !found && gf.abs() <= ROOT_RESIDUAL * (1.0 + target.abs()) {
                    return Err(Error::UnresolvedCluster {
                        drive: phi,
                        lo: a,
                        hi: b,
                    });
                }
            } else if ga * gb < 0.0 {
                roots.push(bisect(&g, a, b, ga)?);
            }
        }
        if !window.periodic && fs[n] - target == 0.0 {
            roots.push(xs[n]);
        }
    }

    if window.periodic {
        roots.retain(|&r| r < hi);
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * (1.0 + b.abs()));

    let distance = |r: f64| {
        if window.periodic {
            wrap_phase(r - phi, -PI).abs()
        } else {
            (r - phi).abs()
        }
    };
    if let Some(k) = (0..roots.len()).min_by(|&i, &j| distance(roots[i]).total_cmp(&distance(roots[j]))) {
        let first = roots.remove(k);
        roots.insert(0, first);
    }

    let residuals = roots
        .iter()
        .map(|&r| -> Result<f64> {
            let raw = phi - r - beta * p.du(r)?;
            Ok(if window.periodic {
                wrap_phase(raw, -PI).abs()
            } else {
                raw.abs()
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(BranchSolution {
        drive: phi,
        beta,
        roots,
        residuals,
        invertible: jacobian_min > 0.0,
        jacobian_min,
    })
}

/// Bisection on a bracket whose left value is `fa`; returns the endpoint of
/// the final bracket with the smaller |f|.
fn bisect(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    let mut fb = f(b)?;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}

/// sup{β : 1 + β u″ > 0 everywhere} = 1 / max(−u″), infinite when u″ ≥ 0.
pub fn invertibility_threshold(p: &PotentialModel) -> f64 {
    let neg_curv = |s: f64| -p.d2u(s).unwrap_or(f64::NEG_INFINITY);
    let (lo, hi) = match p.kind() {
        PotentialKind::Cosine | PotentialKind::BiasedCosine { .. } => (0.0, TAU),
        PotentialKind::PolynomialEven { coeffs } => {
            // u″ is unbounded below when the leading term is negative.
            match coeffs.iter().rposition(|&c| c != 0.0) {
                Some(k) if k >= 1 && coeffs[k] < 0.0 => return 0.0,
                _ => (0.0, polynomial_reach(coeffs)),
            }
        }
        PotentialKind::Custom(t) => t.range(),
    };
    let n = 20_000;
    let h = (hi - lo) / n as f64;
    let (mut best_x, mut best) = (lo, neg_curv(lo));
    for i in 1..=n {
        let x = lo + h * i as f64;
        let v = neg_curv(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let refined = golden_max(&neg_curv, (best_x - h).max(lo), (best_x + h).min(hi));
    let best = best.max(neg_curv(refined));
    if best <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / best
    }
}

/// Radius beyond which the leading even term of u″ dominates all others.
fn polynomial_reach(coeffs: &[f64]) -> f64 {
    let k = coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0);
    if k <= 1 {
        return 1.0;
    }
    let lead = coeffs[k].abs();
    let ratio = coeffs[1..k].iter().fold(0.0f64, |m, c| m.max(c.abs() / lead));
    2.0 * (1.0 + ratio).sqrt() + 1.0
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
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
    0.5 * (a + b)
}

/// Unique φ_c on the single-valued branch, lifted to the copy nearest `phi`.
pub fn branch_root(p: &PotentialModel, beta: f64, phi: f64) -> Result<f64> {
    let sol = solve_consistency(p, beta, phi, default_window(p, beta, phi)?)?;
    let root = *sol.roots.first().ok_or(Error::NoRoot {
        drive: phi,
        lo: f64::NAN,
        hi: f64::NAN,
    })?;
    if p.is_periodic() {
        Ok(phi + wrap_phase(root - phi, -PI))
    } else {
        Ok(root)
    }
}

/// η₁(x): the root of x = η + (λ_J/ξ^{3/2}) u′(η/√ξ), found by bracketed
/// bisection. The map is increasing whenever β is subcritical.
pub fn eta1(p: &PotentialModel, rc: &ReducedCircuit, x: f64) -> Result<f64> {
    let sx = rc.xi.sqrt();
    let a = rc.lambda_j / (rc.xi * sx);
    let g = |eta: f64| -> Result<f64> { Ok(eta + a * p.du(eta / sx)? - x) };
    let mut half = match p.slope_bound() {
        Some(s) => a * s + 1.0,
        None => x.abs() + 8.0 * sx,
    };
    let (dlo, dhi) = p.domain();
    for _ in 0..64 {
        let lo = (x - half).max(dlo * sx);
        let hi = (x + half).min(dhi * sx);
        let (glo, ghi) = (g(lo)?, g(hi)?);
        if glo == 0.0 {
            return Ok(lo);
        }
        if ghi == 0.0 {
            return Ok(hi);
        }
        if glo < 0.0 && ghi > 0.0 {
            return bisect(&g, lo, hi, glo);
        }
        if lo <= dlo * sx && hi >= dhi * sx {
            break;
        }
        half *= 2.0;
    }
    Err(Error::NoRoot {
        drive: x,
        lo: x - half,
        hi: x + half,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Extended flux coordinate x = √ξ φ.
    ExtendedX,
    /// Phase coordinate φ.
    CompactPhi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSample {
    pub coordinate: f64,
    pub v: f64,
    pub vp: f64,
    pub vpp: f64,
    pub branch_count: usize,
}

/// Effective potential of the reduced circuit in E_C units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivePotential {
    pub basis: Basis,
    pub samples: Vec<PotentialSample>,
    /// `(location, curvature)` of each minimum.
    pub minima: Vec<(f64, f64)>,
}

impl EffectivePotential {
    pub fn coordinates(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.coordinate).collect()
    }
}

/// Value, slope and curvature of the effective potential at one coordinate.
pub fn effective_point(
    p: &PotentialModel,
    rc: &ReducedCircuit,
    basis: Basis,
    coordinate: f64,
) -> Result<PotentialSample> {
    let lj = rc.lambda_j;
    match basis {
        Basis::CompactPhi => {
            let sol = solve_consistency(p, rc.beta, coordinate, default_window(p, rc.beta, coordinate)?)?;
            let pc = *sol.roots.first().ok_or(Error::NoRoot {
                drive: coordinate,
                lo: f64::NAN,
                hi: f64::NAN,
            })?;
            let (u, du, d2u) = (p.u(pc)?, p.du(pc)?, p.d2u(pc)?);
            Ok(PotentialSample {
                coordinate,
                v: lj * (u + 0.5 * rc.beta * du * du),
                vp: lj * du,
                vpp: lj * d2u / (1.0 + rc.beta * d2u),
                branch_count: sol.roots.len(),
            })
        }
        Basis::ExtendedX => {
            let sx = rc.xi.sqrt();
            let eta = eta1(p, rc, coordinate)?;
            let d2u = p.d2u(eta / sx)?;
            let stretch = coordinate - eta;
            Ok(PotentialSample {
                coordinate,
                v: lj * p.u(eta / sx)? + 0.5 * rc.xi * stretch * stretch,
                vp: rc.xi * stretch,
                vpp: rc.xi * rc.beta * d2u / (1.0 + rc.beta * d2u),
                branch_count: 1,
            })
        }
    }
}

/// Builds V, V′ and V″ on `grid` and locates the minima of V.
///
/// Refuses with [`Error::MultivaluedRegime`] when β ≥ β_crit.
pub fn effective_potential(
    p: &PotentialModel,
    rc: &ReducedCircuit,
    basis: Basis,
    grid: &[f64],
) -> Result<EffectivePotential> {
    let beta_crit = invertibility_threshold(p);
    if rc.beta >= beta_crit {
        return Err(Error::MultivaluedRegime {
            beta: rc.beta,
            beta_crit,
        });
    }
    if grid.is_empty() {
        return Err(Error::invalid("grid", "empty"));
    }
    let samples = grid
        .iter()
        .map(|&c| effective_point(p, rc, basis, c))
        .collect::<Result<Vec<_>>>()?;

    let mut minima = Vec::new();
    let slope = |c: f64| -> Result<f64> { Ok(effective_point(p, rc, basis, c)?.vp) };
    for (i, s) in samples.iter().enumerate() {
        if s.vp == 0.0 && s.vpp > 0.0 {
            minima.push((s.coordinate, s.vpp));
        }
        if let Some(t) = samples.get(i + 1) {
            if s.vp < 0.0 && t.vp > 0.0 {
                let c = bisect(&slope, s.coordinate, t.coordinate, s.vp)?;
                minima.push((c, effective_point(p, rc, basis, c)?.vpp));
            }
        }
    }
    let period = match basis {
        Basis::CompactPhi => TAU,
        Basis::ExtendedX => TAU * rc.xi.sqrt(),
    };
    if p.is_periodic() {
        // Close the period when the grid spans it, then merge copies.
        let (first, last) = (samples[0], samples[samples.len() - 1]);
        let spacing = if samples.len() > 1 {
            (last.coordinate - first.coordinate) / (samples.len() - 1) as f64
        } else {
            0.0
        };
        if last.coordinate - first.coordinate >= period - 1.5 * spacing
            && last.vp < 0.0
            && first.vp > 0.0
        {
            let c = bisect(&slope, last.coordinate, first.coordinate + period, last.vp)?;
            minima.push((c, effective_point(p, rc, basis, c)?.vpp));
        }
        let lo = first.coordinate;
        let mut canon: Vec<(f64, f64)> = Vec::new();
        for (c, k) in minima {
            let w = lo + (c - lo).rem_euclid(period);
            let dup = canon.iter().any(|(d, _)| {
                let gap = (w - d).rem_euclid(period);
                gap.min(period - gap) < 1e-9 * period
            });
            if !dup {
                canon.push((w, k));
            }
        }
        canon.sort_by(|a, b| a.0.total_cmp(&b.0));
        minima = canon;
    }
    Ok(EffectivePotential {
        basis,
        samples,
        minima,
    })
}

/// Samples of the consistency roots for a supercritical β, for export.
pub fn branch_scan(p: &PotentialModel, beta: f64, drives: &[f64]) -> Result<Vec<BranchSolution>> {
    drives
        .iter()
        .map(|&phi| solve_consistency(p, beta, phi, default_window(p, beta, phi)?))
        .collect()
}

/// Maximum |V_x(√ξ φ) − V_φ(φ)| in E_C units over the overlap window, where
/// V_x comes from the extended-coordinate route and V_φ from the compact one.
pub fn crosscheck_bases(p: &PotentialModel, rc: &ReducedCircuit) -> Result<f64> {
    let (lo, hi) = match p.kind() {
        PotentialKind::Cosine | PotentialKind::BiasedCosine { .. } => (0.0, TAU),
        PotentialKind::PolynomialEven { .. } => (-2.0, 2.0),
        PotentialKind::Custom(t) => {
            let (a, b) = t.range();
            let margin = 0.25 * (b - a);
            (a + margin, b - margin)
        }
    };
    let n = 513;
    let phis: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let sx = rc.xi.sqrt();
    let xs: Vec<f64> = phis.iter().map(|f| f * sx).collect();
    let compact = effective_potential(p, rc, Basis::CompactPhi, &phis)?;
    let extended = effective_potential(p, rc, Basis::ExtendedX, &xs)?;
    Ok(compact
        .samples
        .iter()
        .zip(&extended.samples)
        .map(|(c, e)| (c.v - e.v).abs())
        .fold(0.0, f64::max))
}
