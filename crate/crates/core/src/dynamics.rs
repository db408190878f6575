//! Classical motion of the regularized two-coordinate circuit.
//!
//! Time is in units of 1/ω′_r and the Hamiltonian is
//! ½κ²p_x² + ½p_y² + ½(y − κx)² + κ²(λ_J/ξ) u(y/(κ√ξ)).

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ReducedCircuit;
use crate::potentials::PotentialModel;
use crate::reduction::{effective_point, eta1, invertibility_threshold, Basis};

/// Largest step accepted by [`integrate`].
pub const MAX_DT: f64 = 0.05;

/// Step that keeps the Verlet energy oscillation of a unit-frequency
/// oscillator near 1e-9 of the energy scale.
pub const DEFAULT_DT: f64 = 1e-4;

/// Default bound on |E(t) − E(0)| relative to the energy scale.
pub const DEFAULT_DRIFT_TOLERANCE: f64 = 1e-8;

/// Fast periods skipped before residuals are measured.
pub const TRANSIENT_PERIODS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub px: f64,
    pub y: f64,
    pub py: f64,
}

impl State {
    pub fn as_array(&self) -> [f64; 4] {
        [self.x, self.px, self.y, self.py]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions {
    pub dt: f64,
    /// Keep every n-th step in the record (the last step is always kept).
    pub record_every: usize,
    pub drift_tolerance: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            record_every: 100,
            drift_tolerance: DEFAULT_DRIFT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub energy: Vec<f64>,
    pub kappa: f64,
    pub xi: f64,
    pub lambda_j: f64,
    pub dt: f64,
    /// max |E(t) − E(0)| / energy scale over every step, not only the
    /// recorded ones.
    pub max_drift: f64,
    /// |T| + |V_quad| + |V_nl| at t = 0.
    pub energy_scale: f64,
}

impl TrajectoryRecord {
    pub fn last(&self) -> State {
        *self.states.last().expect("record holds the initial state")
    }

    /// CSV with columns t, x, p_x, y, p_y, E.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t [1/omega_r']", "x", "p_x", "y", "p_y", "E [hbar*omega_r']"])?;
        for ((t, s), e) in self.times.iter().zip(&self.states).zip(&self.energy) {
            w.write_record([t, &s.x, &s.px, &s.y, &s.py, e].map(|v| format!("{v:e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Forces and energy pieces of the regularized circuit.
struct Model<'a> {
    kappa: f64,
    /// κ²λ_J/ξ, the nonlinear prefactor.
    a: f64,
    /// κ√ξ, the phase scale of y.
    scale: f64,
    p: &'a PotentialModel,
}

impl<'a> Model<'a> {
    fn new(rc: &ReducedCircuit, p: &'a PotentialModel) -> Self {
        let kappa = rc.kappa;
        Self {
            kappa,
            // At κ = 0 the nonlinear term drops out of both the energy and
            // the force for any potential with bounded slope.
            a: if kappa == 0.0 { 0.0 } else { kappa * kappa * rc.lambda_j / rc.xi },
            scale: kappa * rc.xi.sqrt(),
            p,
        }
    }

    fn forces(&self, s: &State) -> Result<(f64, f64)> {
        let stretch = s.y - self.kappa * s.x;
        let nl = if self.a == 0.0 {
            0.0
        } else {
            self.a / self.scale * self.p.du(s.y / self.scale)?
        };
        Ok((self.kappa * stretch, -stretch - nl))
    }

    /// (kinetic, quadratic, nonlinear) energies.
    fn energies(&self, s: &State) -> Result<(f64, f64, f64)> {
        let k2 = self.kappa * self.kappa;
        let stretch = s.y - self.kappa * s.x;
        let nl = if self.a == 0.0 { 0.0 } else { self.a * self.p.u(s.y / self.scale)? };
        Ok((0.5 * k2 * s.px * s.px + 0.5 * s.py * s.py, 0.5 * stretch * stretch, nl))
    }
}

fn check_circuit(rc: &ReducedCircuit) -> Result<()> {
    if !(rc.kappa >= 0.0 && rc.kappa.is_finite()) {
        return Err(Error::invalid("kappa", format!("must be >= 0, got {}", rc.kappa)));
    }
    Ok(())
}

/// Velocity-Verlet trajectory from `initial` to `t_end`.
///
/// Fails with [`Error::StepTooLarge`] (carrying a smaller suggested step)
/// when the energy drifts beyond the tolerance.
pub fn integrate(
    rc: &ReducedCircuit,
    p: &PotentialModel,
    initial: State,
    t_end: f64,
    opts: IntegrateOptions,
) -> Result<TrajectoryRecord> {
    check_circuit(rc)?;
    let dt = opts.dt;
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(Error::invalid("dt", format!("must lie in (0, {MAX_DT}], got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::invalid("t_end", format!("must be finite and >= 0, got {t_end}")));
    }
    if opts.record_every == 0 {
        return Err(Error::invalid("record_every", "must be >= 1"));
    }
    for (f, v) in [("x", initial.x), ("px", initial.px), ("y", initial.y), ("py", initial.py)] {
        crate::error::finite(f, v)?;
    }
    let m = Model::new(rc, p);
    let k2 = rc.kappa * rc.kappa;
    // Shrink the step slightly so the run ends exactly at t_end.
    let steps = (t_end / dt).ceil() as usize;
    let dt = if steps == 0 { dt } else { t_end / steps as f64 };

    let (t0, q0, n0) = m.energies(&initial)?;
    let e0 = t0 + q0 + n0;
    let scale = (t0.abs() + q0.abs() + n0.abs()).max(f64::MIN_POSITIVE);
    let mut rec = TrajectoryRecord {
        times: vec![0.0],
        states: vec![initial],
        energy: vec![e0],
        kappa: rc.kappa,
        xi: rc.xi,
        lambda_j: rc.lambda_j,
        dt,
        max_drift: 0.0,
        energy_scale: scale,
    };
    let mut s = initial;
    let (mut fx, mut fy) = m.forces(&s)?;
    for n in 1..=steps {
        s.px += 0.5 * dt * fx;
        s.py += 0.5 * dt * fy;
        s.x += dt * k2 * s.px;
        s.y += dt * s.py;
        (fx, fy) = m.forces(&s)?;
        s.px += 0.5 * dt * fx;
        s.py += 0.5 * dt * fy;
        let (t, q, nl) = m.energies(&s)?;
        let e = t + q + nl;
        rec.max_drift = rec.max_drift.max((e - e0).abs() / scale);
        if n % opts.record_every == 0 || n == steps {
            rec.times.push(n as f64 * dt);
            rec.states.push(s);
            rec.energy.push(e);
        }
    }
    if rec.max_drift > opts.drift_tolerance {
        // Verlet energy error scales as dt².
        let drift = rec.max_drift;
        return Err(Error::StepTooLarge {
            drift,
            tolerance: opts.drift_tolerance,
            suggested_dt: 0.5 * dt * (opts.drift_tolerance / drift).sqrt(),
        });
    }
    Ok(rec)
}

fn require_single_valued(rc: &ReducedCircuit, p: &PotentialModel) -> Result<()> {
    let beta_crit = invertibility_threshold(p);
    if rc.beta >= beta_crit {
        return Err(Error::MultivaluedRegime {
            beta: rc.beta,
            beta_crit,
        });
    }
    Ok(())
}

/// Curvature of the slow potential V(x)/ξ at `x`, in units where the slow
/// Hamiltonian is ½κ²p_x² + κ² V/ξ.
fn slow_curvature(rc: &ReducedCircuit, p: &PotentialModel, x: f64) -> Result<f64> {
    Ok(effective_point(p, rc, Basis::ExtendedX, x)?.vpp / rc.xi)
}

/// Period, in slow time s = κ²t, of small oscillations about x = 0.
pub fn slow_period(rc: &ReducedCircuit, p: &PotentialModel) -> Result<f64> {
    let c = slow_curvature(rc, p, 0.0)?;
    if !(c > 0.0) {
        return Err(Error::invalid(
            "potential",
            format!("slow curvature at x = 0 is {c}; no oscillation period"),
        ));
    }
    Ok(2.0 * PI / c.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldResidual {
    pub kappa: f64,
    /// max |y − κη₁(x)| after the transient.
    pub y_residual: f64,
    /// max |p_y| after the transient.
    pub py_residual: f64,
    pub t_end: f64,
}

/// Starts on the leading-order slow manifold y₀ = κη₁(x₀), p_y = p_x = 0
/// and reports how far the trajectory strays from it, ignoring the first
/// [`TRANSIENT_PERIODS`] fast periods.
pub fn slow_manifold_residual(
    rc: &ReducedCircuit,
    p: &PotentialModel,
    x0: f64,
    t_end: f64,
    opts: IntegrateOptions,
) -> Result<ManifoldResidual> {
    require_single_valued(rc, p)?;
    let transient = TRANSIENT_PERIODS * 2.0 * PI;
    if !(t_end > transient) {
        return Err(Error::invalid(
            "t_end",
            format!("must exceed the transient window {transient}, got {t_end}"),
        ));
    }
    let kappa = rc.kappa;
    let y0 = kappa * eta1(p, rc, x0)?;
    let rec = integrate(
        rc,
        p,
        State {
            x: x0,
            px: 0.0,
            y: y0,
            py: 0.0,
        },
        t_end,
        IntegrateOptions {
            record_every: opts.record_every.min(20),
            ..opts
        },
    )?;
    let mut y_res: f64 = 0.0;
    let mut py_res: f64 = 0.0;
    for (t, s) in rec.times.iter().zip(&rec.states) {
        if *t < transient {
            continue;
        }
        y_res = y_res.max((s.y - kappa * eta1(p, rc, s.x)?).abs());
        py_res = py_res.max(s.py.abs());
    }
    Ok(ManifoldResidual {
        kappa,
        y_residual: y_res,
        py_residual: py_res,
        t_end,
    })
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("samples", "need two or more paired points"));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::invalid("samples", "log-log fit needs positive values"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowReport {
    pub kappa: f64,
    /// Slow-time samples s = κ²t.
    pub slow_times: Vec<f64>,
    pub x_full: Vec<f64>,
    pub x_reduced: Vec<f64>,
    pub max_deviation: f64,
}

/// Runs the full system from the slow manifold (positions and momenta) and
/// the reduced system
/// ½κ²p_x² + κ²V(x)/ξ from the same (x₀, p_x₀), comparing x on the slow
/// clock up to `s_end` (slow time).
pub fn shadow_reduced_dynamics(
    rc: &ReducedCircuit,
    p: &PotentialModel,
    x0: f64,
    px0: f64,
    s_end: f64,
    opts: IntegrateOptions,
) -> Result<ShadowReport> {
    require_single_valued(rc, p)?;
    let kappa = rc.kappa;
    if !(kappa > 0.0) {
        return Err(Error::invalid("kappa", "the slow clock needs kappa > 0"));
    }
    let k2 = kappa * kappa;
    let t_end = s_end / k2;
    // On the manifold p_y = ẏ = κη₁′(x)ẋ, with η₁′ = 1/(1 + β u″(η₁/√ξ)).
    let eta0 = eta1(p, rc, x0)?;
    let slope = 1.0 / (1.0 + rc.beta * p.d2u(eta0 / rc.xi.sqrt())?);
    let full = integrate(
        rc,
        p,
        State {
            x: x0,
            px: px0,
            y: kappa * eta0,
            py: kappa * k2 * slope * px0,
        },
        t_end,
        opts,
    )?;

    // Reduced motion in slow time: dx/ds = p_x, dp_x/ds = −(x − η₁(x)).
    let force = |x: f64| -> Result<f64> { Ok(-(x - eta1(p, rc, x)?)) };
    let ds = k2 * full.dt;
    let mut x = x0;
    let mut px = px0;
    let mut f = force(x)?;
    let mut x_reduced = vec![x0];
    let mut step = 0usize;
    for t in full.times.iter().skip(1) {
        let target = (t / full.dt).round() as usize;
        while step < target {
            px += 0.5 * ds * f;
            x += ds * px;
            f = force(x)?;
            px += 0.5 * ds * f;
            step += 1;
        }
        x_reduced.push(x);
    }
    let x_full: Vec<f64> = full.states.iter().map(|s| s.x).collect();
    let max_deviation = x_full
        .iter()
        .zip(&x_reduced)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(ShadowReport {
        kappa,
        slow_times: full.times.iter().map(|t| t * k2).collect(),
        x_full,
        x_reduced,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circuit(kappa: f64, xi: f64, lj: f64) -> ReducedCircuit {
        ReducedCircuit::from_ratios(kappa, xi, lj, 0.0).unwrap()
    }

    #[test]
    fn decoupled_limit_is_unit_oscillator() {
        let rc = circuit(0.0, 1.0, 0.5);
        let p = PotentialModel::cosine();
        let init = State {
            x: 0.3,
            px: 0.2,
            y: 1.0,
            py: 0.0,
        };
        let rec = integrate(&rc, &p, init, 2.0 * PI, IntegrateOptions::default()).unwrap();
        let end = rec.last();
        assert_eq!((end.x, end.px), (0.3, 0.2));
        assert!((end.y - 1.0).abs() < 1e-6 && end.py.abs() < 1e-6);
    }

    #[test]
    fn linear_case_conserves_energy() {
        let rc = circuit(0.3, 1.0, 0.0);
        let p = PotentialModel::cosine();
        let init = State {
            x: 1.0,
            px: 0.5,
            y: 0.1,
            py: -0.2,
        };
        let rec = integrate(&rc, &p, init, 50.0, IntegrateOptions::default()).unwrap();
        assert!(rec.max_drift < 1e-8);
    }

    #[test]
    fn oversized_step_suggests_smaller() {
        let rc = circuit(0.3, 1.0, 0.5);
        let p = PotentialModel::cosine();
        let init = State {
            x: 1.0,
            px: 0.0,
            y: 0.5,
            py: 0.0,
        };
        let opts = IntegrateOptions {
            dt: 0.05,
            ..Default::default()
        };
        match integrate(&rc, &p, init, 20.0, opts) {
            Err(Error::StepTooLarge { suggested_dt, .. }) => {
                assert!(suggested_dt < 0.05);
                let retry = IntegrateOptions {
                    dt: suggested_dt,
                    ..opts
                };
                assert!(integrate(&rc, &p, init, 20.0, retry).is_ok());
            }
            other => panic!("expected StepTooLarge, got {other:?}"),
        }
        assert!(integrate(&rc, &p, init, 1.0, IntegrateOptions { dt: 0.1, ..opts }).is_err());
    }

    #[test]
    fn linear_manifold_is_exact() {
        let rc = circuit(0.2, 1.0, 0.0);
        let p = PotentialModel::cosine();
        let r = slow_manifold_residual(&rc, &p, 1.0, 40.0, IntegrateOptions::default()).unwrap();
        assert!(r.y_residual < 1e-12 && r.py_residual < 1e-12);
    }

    #[test]
    fn supercritical_refused() {
        let rc = circuit(0.1, 1.0, 1.2);
        let p = PotentialModel::cosine();
        let err = shadow_reduced_dynamics(&rc, &p, 1.0, 0.0, 1.0, IntegrateOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MultivaluedRegime { .. }));
    }

    #[test]
    fn slope_of_power_law() {
        let x = [0.2, 0.1, 0.05];
        let y: Vec<f64> = x.iter().map(|v: &f64| 7.0 * v.powi(3)).collect();
        assert!((loglog_slope(&x, &y).unwrap() - 3.0).abs() < 1e-12);
    }
}
