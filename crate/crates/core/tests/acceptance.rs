//! Acceptance suite: one pass/fail line per criterion, with timings.
//!
//! Runs as a plain binary (`harness = false`) so that every criterion is
//! reported even when an earlier one fails; the process exits nonzero if
//! any criterion fails.

use std::f64::consts::TAU;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use circadia::dynamics::{
    shadow_reduced_dynamics, slow_manifold_residual, slow_period, IntegrateOptions,
};
use circadia::foster::{fit_foster, AdmittanceSample, FosterModel, Resonance};
use circadia::params::ReducedCircuit;
use circadia::potentials::PotentialModel;
use circadia::reduction::{
    crosscheck_bases, effective_point, effective_potential, invertibility_threshold, solve_consistency, Basis,
    Window,
};
use circadia::spectra::bo::{bo_effective_potential, BoVerdict};
use circadia::spectra::compact::{naive_compact_adiabatic, transmon_limit_check};
use circadia::spectra::{eigenvalues_in_window, lowest_eigenvalues, BoxGrid, Convention, HamiltonianSpec, Potential1D};
use circadia::Error;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bifurcation_threshold() -> Outcome {
    let p = PotentialModel::cosine();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let drives: Vec<f64> = (0..100).map(|_| rng.gen_range(0.0..TAU)).collect();
    for beta in [0.5, 0.9, 0.99] {
        for &phi in &drives {
            let s = solve_consistency(&p, beta, phi, Window::FUNDAMENTAL).map_err(|e| e.to_string())?;
            if s.roots.len() != 1 {
                return Err(format!("beta={beta} phi={phi}: {} roots", s.roots.len()));
            }
        }
    }
    for beta in [1.1, 2.0] {
        let most = (0..2000)
            .map(|i| TAU * i as f64 / 2000.0)
            .map(|phi| solve_consistency(&p, beta, phi, Window::FUNDAMENTAL).map(|s| s.roots.len()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?
            .into_iter()
            .max()
            .unwrap_or(0);
        if most < 3 {
            return Err(format!("beta={beta}: at most {most} roots"));
        }
    }
    let t = invertibility_threshold(&p);
    check((t - 1.0).abs() <= 1e-10, format!("beta_crit = {t:.12}, supercritical drives reach >= 3 roots"))
}

/// Five-point first and second differences.
fn d1(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

fn d2(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h)
}

fn effective_identities() -> Outcome {
    let p = PotentialModel::cosine();
    let lj = 50.0;
    let xi = (lj / 0.5f64).sqrt();
    let rc = ReducedCircuit::from_ratios(0.0, xi, lj, 0.0).map_err(|e| e.to_string())?;
    let v = |phi: f64| effective_point(&p, &rc, Basis::CompactPhi, phi).unwrap().v;
    let grid: Vec<f64> = (0..400).map(|i| TAU * i as f64 / 400.0).collect();
    let ep = effective_potential(&p, &rc, Basis::CompactPhi, &grid).map_err(|e| e.to_string())?;
    let (mut e1, mut e2) = (0.0f64, 0.0f64);
    for s in &ep.samples {
        e1 = e1.max((s.vp - d1(&v, s.coordinate, 1e-3)).abs());
        e2 = e2.max((s.vpp - d2(&v, s.coordinate, 2e-3)).abs());
    }
    let vpp0 = ep.samples[0].vpp;
    let want = lj / 1.5;
    let detail = format!(
        "max|V'-FD| = {e1:.2e}, max|V''-FD| = {e2:.2e}, |V''(0) - lambda_J/(1+beta)| = {:.2e}, minima = {}",
        (vpp0 - want).abs(),
        ep.minima.len()
    );
    check(e1 <= 1e-6 && e2 <= 1e-5 && (vpp0 - want).abs() <= 1e-8 && ep.minima.len() == 1, detail)
}

fn kepler_equivalence() -> Outcome {
    let p = PotentialModel::cosine();
    let mut worst = 0.0f64;
    for beta in [0.1, 0.5, 0.9] {
        for xi in [1.0, 10.0] {
            let rc = ReducedCircuit::from_ratios(0.0, xi, beta * xi * xi, 0.0).map_err(|e| e.to_string())?;
            worst = worst.max(crosscheck_bases(&p, &rc).map_err(|e| e.to_string())?);
        }
    }
    check(worst < 1e-8, format!("max basis deviation = {worst:.2e} E_C"))
}

fn bo_trend() -> Outcome {
    let kappas = [0.6, 0.45, 0.3];
    let xs: Vec<f64> = (0..21).map(|i| -3.0 + 0.3 * i as f64).collect();
    let cos = bo_effective_potential(&kappas, &xs, 10.0, 5.0, &PotentialModel::cosine()).map_err(|e| e.to_string())?;
    let decreasing = cos.sup_norms.windows(2).all(|w| w[1] < w[0]);
    let quad =
        bo_effective_potential(&kappas, &xs, 10.0, 5.0, &PotentialModel::quadratic()).map_err(|e| e.to_string())?;
    let a = &quad.curvature_fits;
    let settled = a.windows(2).all(|w| (w[1] - w[0]).abs() <= 0.1 * w[0].abs().max(w[1].abs()));
    let nonzero = a.iter().all(|v| v.abs() > 1e-6);
    let detail = format!(
        "cosine sup = {:?} ({}), quadratic curvature = {:?} ({})",
        cos.sup_norms.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>(),
        cos.verdict.label(),
        a.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>(),
        quad.verdict.label()
    );
    check(
        decreasing && cos.verdict == BoVerdict::Decreasing && settled && nonzero
            && quad.verdict == BoVerdict::ConvergesNonzero,
        detail,
    )
}

fn naive_adiabatic() -> Outcome {
    let (kappa, xi) = (0.1, 10.0);
    let r = naive_compact_adiabatic(kappa, xi, 0.0, 4, Convention::default()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (k, e) in r.numerical.iter().enumerate() {
        let formula = 2f64.sqrt() * kappa.powi(4) * xi * (k as f64 + 0.5);
        worst = worst.max((e - formula).abs() / formula);
    }
    let inside = naive_compact_adiabatic(kappa, xi, 0.5 + 0.5 * kappa * kappa, 2, Convention::default());
    let refused = matches!(inside, Err(Error::DegenerateFastGround { .. }));
    check(
        worst <= 0.01 && refused,
        format!("max relative deviation k<=3 = {worst:.2e}, degeneracy window refused = {refused}"),
    )
}

fn basis_duality() -> Outcome {
    let mut worst = 0.0f64;
    for lj in [1.0, 10.0, 50.0] {
        for ng in [0.0, 0.25] {
            let charge = HamiltonianSpec::compact_1d(1.0, lj, ng);
            let n_max = match charge {
                HamiltonianSpec::Compact1D { n_max, .. } => n_max,
                _ => unreachable!(),
            };
            let grid = HamiltonianSpec::CompactPhaseGrid {
                kinetic: 1.0,
                lambda_j: lj,
                ng,
                points: 2 * n_max + 1,
            };
            let a = lowest_eigenvalues(&charge, 5).map_err(|e| e.to_string())?.eigenvalues;
            let b = lowest_eigenvalues(&grid, 5).map_err(|e| e.to_string())?.eigenvalues;
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((x - y).abs() / x.abs().max(y.abs()));
            }
        }
    }
    check(worst <= 1e-6, format!("max relative deviation = {worst:.2e}"))
}

fn continuum_proxy() -> Outcome {
    let potential = PotentialModel::cosine();
    let circuit = ReducedCircuit::from_ratios(0.0, 1.0, 0.5, 0.0).map_err(|e| e.to_string())?;
    let (lo, hi) = (1.2, 2.0);
    let mut spacing = Vec::new();
    for periods in [32.0, 64.0] {
        let half = 0.5 * periods * TAU;
        let spec = HamiltonianSpec::Extended1D {
            kinetic: 1.0,
            potential: Potential1D::Effective {
                potential: potential.clone(),
                circuit,
            },
            grid: BoxGrid::with_spacing(half, 0.1),
        };
        let levels = eigenvalues_in_window(&spec, lo, hi).map_err(|e| e.to_string())?;
        if levels.len() < 3 {
            return Err(format!("only {} levels in window", levels.len()));
        }
        let mean = (levels[levels.len() - 1] - levels[0]) / (levels.len() - 1) as f64;
        spacing.push((levels.len(), mean));
    }
    let ratio = spacing[0].1 / spacing[1].1;
    check(
        (ratio - 2.0).abs() <= 0.2,
        format!(
            "levels {} -> {}, mean spacing {:.4e} -> {:.4e}, ratio {ratio:.3}",
            spacing[0].0, spacing[1].0, spacing[0].1, spacing[1].1
        ),
    )
}

fn slow_manifold_orders() -> Outcome {
    let p = PotentialModel::cosine();
    let kappas = [0.2, 0.1, 0.05];
    let opts = IntegrateOptions::default();
    let (mut ys, mut pys) = (Vec::new(), Vec::new());
    for &k in &kappas {
        let rc = ReducedCircuit::from_ratios(k, 1.0, 0.5, 0.0).map_err(|e| e.to_string())?;
        let t_end = 2.0 * slow_period(&rc, &p).map_err(|e| e.to_string())? / (k * k);
        let r = slow_manifold_residual(&rc, &p, 1.0, t_end, opts).map_err(|e| e.to_string())?;
        ys.push(r.y_residual);
        pys.push(r.py_residual);
    }
    let slope = |v: &[f64]| {
        let lx: Vec<f64> = kappas.iter().map(|k| k.ln()).collect();
        let ly: Vec<f64> = v.iter().map(|k| k.ln()).collect();
        let mx = lx.iter().sum::<f64>() / 3.0;
        let my = ly.iter().sum::<f64>() / 3.0;
        lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
            / lx.iter().map(|a| (a - mx) * (a - mx)).sum::<f64>()
    };
    let (sy, spy) = (slope(&ys), slope(&pys));
    let rc = ReducedCircuit::from_ratios(0.1, 1.0, 0.5, 0.0).map_err(|e| e.to_string())?;
    let period = slow_period(&rc, &p).map_err(|e| e.to_string())?;
    let shadow = shadow_reduced_dynamics(&rc, &p, 1.0, 0.0, period, opts).map_err(|e| e.to_string())?;
    check(
        (spy - 3.0).abs() <= 0.5 && sy >= 2.0 && shadow.max_deviation < 0.05,
        format!(
            "p_y exponent {spy:.3}, y exponent {sy:.3}, full-vs-reduced max |dx| = {:.2e}",
            shadow.max_deviation
        ),
    )
}

fn foster_round_trip() -> Outcome {
    let truth = FosterModel::new(
        1.0,
        None,
        vec![Resonance {
            inverse_inductance: 1.0 / 0.5,
            omega: 3.0,
        }],
    )
    .map_err(|e| e.to_string())?;
    // Independent evaluation of C s + (s/L)/(s² + Ω²) at s = iω.
    let reference = |w: f64| w * 1.0 + (w / 0.5) / (9.0 - w * w);
    let samples: Vec<AdmittanceSample> = (0..200)
        .map(|i| 0.1 + 9.9 * i as f64 / 199.0)
        .filter(|w| (w - 3.0).abs() > 0.05)
        .map(|w| AdmittanceSample::lossless(w, reference(w)))
        .collect();
    let fit = fit_foster(&samples, 1).map_err(|e| e.to_string())?;
    let m = &fit.model;
    let r = m.resonances[0];
    let errs = [
        (m.c_inf - truth.c_inf).abs() / truth.c_inf,
        (1.0 / r.inverse_inductance - 0.5).abs() / 0.5,
        (r.omega - 3.0).abs() / 3.0,
    ];
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    // Reactance slope by central differences on 10⁴ points away from the pole.
    let mut negative = 0;
    let mut tested = 0;
    for i in 0..10_000 {
        let w = 0.05 + 12.0 * i as f64 / 9_999.0;
        let h = 1e-6 * w;
        if (w - r.omega).abs() < 1e3 * h {
            continue;
        }
        let (a, b) = match (m.susceptance(w - h), m.susceptance(w + h)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        tested += 1;
        if (b - a) / (2.0 * h) <= 0.0 {
            negative += 1;
        }
    }
    check(
        worst <= 1e-6 && negative == 0 && tested >= 9_900,
        format!(
            "{} samples, max relative parameter error {worst:.2e}, rms {:.2e}, slope <= 0 at {negative}/{tested} points",
            samples.len(),
            fit.rms
        ),
    )
}

fn transmon_contrast() -> Outcome {
    let r = 0.01;
    let cmp = transmon_limit_check(50.0, 0.0, r, 3, Convention::default()).map_err(|e| e.to_string())?;
    let shift = cmp.lowest_gap_shift();
    let rel = shift / (0.5 * r);
    check(
        (rel - 1.0).abs() <= 0.2,
        format!("lowest-gap relative shift {shift:.4e} = {rel:.3} x (C_J/C)/2"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, f64); 10] = [
        ("1 bifurcation threshold", bifurcation_threshold, 10.0),
        ("2 effective-potential identities", effective_identities, 10.0),
        ("3 Kepler-form equivalence of reductions", kepler_equivalence, 10.0),
        ("4 Born-Oppenheimer trend", bo_trend, 300.0),
        ("5 compact naive adiabatic ladder", naive_adiabatic, 30.0),
        ("6 charge/phase basis duality", basis_duality, 60.0),
        ("7 continuum proxy", continuum_proxy, 120.0),
        ("8 slow-manifold orders", slow_manifold_orders, 180.0),
        ("9 Foster round trip", foster_round_trip, 10.0),
        ("10 transmon convention contrast", transmon_contrast, 30.0),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let over = secs > budget;
        let (tag, detail) = match &outcome {
            Ok(d) if !over => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; took {secs:.1} s > {budget} s budget")),
            Err(d) => ("FAIL", d.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("[{tag}] {name} ({secs:.2} s): {detail}");
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
