use circadia::dynamics::{
    integrate, loglog_slope, shadow_reduced_dynamics, slow_manifold_residual, slow_period,
    IntegrateOptions, ManifoldResidual, ShadowReport, State,
};
use circadia::reduction::eta1;
use circadia::table::{Cell, Column, SweepTable};
use rayon::prelude::*;

use super::{check_ladder, load_circuit};
use crate::args::DynamicsArgs;
use crate::failure::Failure;
use crate::output::Run;
use crate::svg::{line_plot, Series};

pub fn run(args: &DynamicsArgs, run: &mut Run) -> Result<(), Failure> {
    let c = load_circuit(run, &args.circuit)?;
    let kappas = args.kappa_ladder.clone().unwrap_or_else(|| vec![c.rc.kappa]);
    check_ladder(&kappas)?;
    if !(args.slow_periods >= 0.0 && args.slow_periods.is_finite()) {
        return Err(Failure::Usage("--slow-periods must be finite and >= 0".into()));
    }
    let opts = IntegrateOptions {
        dt: args.dt,
        drift_tolerance: args.drift_tolerance,
        ..IntegrateOptions::default()
    };
    let p = &c.potential;
    let circuits = kappas
        .iter()
        .map(|&k| c.rc.with_kappa(k))
        .collect::<circadia::Result<Vec<_>>>()?;

    // Trajectory from the slow manifold at the first κ.
    let rc0 = circuits[0];
    let start = State {
        x: args.x0,
        px: 0.0,
        y: rc0.kappa * eta1(p, &rc0, args.x0)?,
        py: 0.0,
    };
    let rec = integrate(&rc0, p, start, args.t_end, opts)?;
    let spec = serde_json::json!({
        "operation": "integrate",
        "circuit": rc0,
        "potential": p,
        "initial": start.as_array(),
        "t_end": args.t_end,
        "dt": rec.dt,
    });
    run.trajectory("trajectory.csv", &rec, &spec)?;
    println!(
        "trajectory: kappa={} steps={} max relative energy drift={:.3e}",
        rc0.kappa,
        (args.t_end / rec.dt).round(),
        rec.max_drift
    );

    let per_kappa: Vec<circadia::Result<(ManifoldResidual, Option<ShadowReport>)>> = circuits
        .par_iter()
        .map(|rc| {
            let r = slow_manifold_residual(rc, p, args.x0, args.t_end, opts)?;
            let s = if args.slow_periods > 0.0 {
                let s_end = args.slow_periods * slow_period(rc, p)?;
                Some(shadow_reduced_dynamics(rc, p, args.x0, 0.0, s_end, opts)?)
            } else {
                None
            };
            Ok((r, s))
        })
        .collect();
    let per_kappa = per_kappa.into_iter().collect::<circadia::Result<Vec<_>>>()?;

    let mut table = SweepTable::new(
        vec![
            Column::new("kappa", ""),
            Column::new("y_residual", ""),
            Column::new("py_residual", ""),
            Column::new("shadow_max_dx", ""),
        ],
        serde_json::json!({
            "operation": "slow_manifold_residual",
            "circuit": c.rc,
            "potential": p,
            "kappas": kappas,
            "x0": args.x0,
            "t_end": args.t_end,
            "dt": args.dt,
            "slow_periods": args.slow_periods,
        }),
    );
    for (r, s) in &per_kappa {
        table.push(vec![
            r.kappa.into(),
            r.y_residual.into(),
            r.py_residual.into(),
            s.as_ref().map_or(Cell::Missing, |s| s.max_deviation.into()),
        ]);
        println!(
            "kappa={} max|y - kappa eta1|={:.3e} max|p_y|={:.3e}{}",
            r.kappa,
            r.y_residual,
            r.py_residual,
            s.as_ref()
                .map_or(String::new(), |s| format!(" shadow max|dx|={:.3e}", s.max_deviation))
        );
    }
    if kappas.len() >= 2 {
        let ys: Vec<f64> = per_kappa.iter().map(|(r, _)| r.y_residual).collect();
        let ps: Vec<f64> = per_kappa.iter().map(|(r, _)| r.py_residual).collect();
        for (name, v) in [("y_residual", ys), ("py_residual", ps)] {
            match loglog_slope(&kappas, &v) {
                Ok(e) => {
                    println!("{name} exponent: {e:.3}");
                    table.notes.push(format!("{name}_exponent={e:e}"));
                }
                Err(e) => println!("{name} exponent: {e}"),
            }
        }
    }
    run.table("residuals.csv", &table)?;

    if args.slow_periods > 0.0 {
        let mut t = SweepTable::new(
            vec![
                Column::new("kappa", ""),
                Column::new("s", "slow time"),
                Column::new("x_full", ""),
                Column::new("x_reduced", ""),
            ],
            serde_json::json!({"operation": "shadow_reduced_dynamics", "x0": args.x0, "px0": 0.0}),
        );
        let mut series = Vec::new();
        for (_, s) in &per_kappa {
            let s = s.as_ref().expect("shadow runs requested");
            for i in 0..s.slow_times.len() {
                t.push(vec![s.kappa.into(), s.slow_times[i].into(), s.x_full[i].into(), s.x_reduced[i].into()]);
            }
            series.push(Series {
                label: format!("full kappa={}", s.kappa),
                points: s.slow_times.iter().copied().zip(s.x_full.iter().copied()).collect(),
            });
        }
        if let Some((_, Some(s))) = per_kappa.first() {
            series.push(Series {
                label: "reduced".into(),
                points: s.slow_times.iter().copied().zip(s.x_reduced.iter().copied()).collect(),
            });
        }
        run.table("shadow.csv", &t)?;
        run.svg("shadow.svg", line_plot("Full versus reduced slow motion", "s = kappa^2 t", "x", &series))?;
    }

    if args.step_halving {
        step_halving(args, run, &rc0, p, start, opts)?;
    }
    Ok(())
}

fn step_halving(
    args: &DynamicsArgs,
    run: &mut Run,
    rc: &circadia::params::ReducedCircuit,
    p: &circadia::potentials::PotentialModel,
    on_manifold: State,
    opts: IntegrateOptions,
) -> Result<(), Failure> {
    // Kick the fast pair so the comparison exercises both timescales.
    let start = State {
        py: on_manifold.py + 0.2,
        ..on_manifold
    };
    let dts = [args.dt, args.dt / 2.0, args.dt / 4.0];
    let ends = dts
        .par_iter()
        .map(|&dt| {
            integrate(rc, p, start, args.t_end, IntegrateOptions { dt, ..opts }).map(|r| r.last())
        })
        .collect::<circadia::Result<Vec<_>>>()?;
    let dist = |a: State, b: State| {
        a.as_array()
            .iter()
            .zip(b.as_array())
            .map(|(u, v)| (u - v) * (u - v))
            .sum::<f64>()
            .sqrt()
    };
    let (d1, d2) = (dist(ends[0], ends[1]), dist(ends[1], ends[2]));
    let ratio = d1 / d2;
    let mut t = SweepTable::new(
        vec![
            Column::new("dt", "1/omega_r'"),
            Column::new("x", ""),
            Column::new("p_x", ""),
            Column::new("y", ""),
            Column::new("p_y", ""),
        ],
        serde_json::json!({"operation": "step_halving", "initial": start.as_array(), "t_end": args.t_end}),
    );
    for (dt, s) in dts.iter().zip(&ends) {
        t.push(vec![(*dt).into(), s.x.into(), s.px.into(), s.y.into(), s.py.into()]);
    }
    t.notes.push(format!("error_ratio={ratio:e}"));
    run.table("step_halving.csv", &t)?;
    println!("step halving: |s(dt)-s(dt/2)|={d1:.3e} |s(dt/2)-s(dt/4)|={d2:.3e} ratio={ratio:.3}");
    Ok(())
}
