use std::f64::consts::TAU;

use circadia::potentials::PotentialKind;
use circadia::reduction::{branch_scan, effective_potential, invertibility_threshold, Basis};
use circadia::table::{Cell, Column, SweepTable};
use circadia::Error;
use serde::Serialize;

use super::{linspace, load_circuit};
use crate::args::ReduceArgs;
use crate::failure::Failure;
use crate::output::Run;
use crate::svg::{line_plot, Series};

#[derive(Serialize)]
struct Report {
    verdict: &'static str,
    beta: f64,
    beta_crit: f64,
    kappa: f64,
    xi: f64,
    lambda_j: f64,
    ng: f64,
    reduced: bool,
    scales: circadia::params::DerivedScales,
    max_branch_count: usize,
    /// (φ, V″) at each minimum of V, E_C units.
    minima: Vec<(f64, f64)>,
}

pub fn run(args: &ReduceArgs, run: &mut Run) -> Result<(), Failure> {
    if args.grid < 2 {
        return Err(Failure::Usage("--grid needs at least 2 drive samples".into()));
    }
    let c = load_circuit(run, &args.circuit)?;
    let (rc, p) = (c.rc, &c.potential);
    let drives: Vec<f64> = if p.is_periodic() {
        (0..args.grid).map(|i| TAU * i as f64 / args.grid as f64).collect()
    } else if let PotentialKind::Custom(t) = p.kind() {
        let (lo, hi) = t.range();
        linspace(lo, hi, args.grid)
    } else {
        linspace(-TAU, TAU, args.grid)
    };

    let branches = branch_scan(p, rc.beta, &drives)?;
    let mut table = SweepTable::new(
        vec![
            Column::new("phi", "rad"),
            Column::new("branch_count", ""),
            Column::new("root_index", ""),
            Column::new("phi_c", "rad"),
            Column::new("jacobian", ""),
        ],
        serde_json::json!({"operation": "solve_consistency", "beta": rc.beta, "drives": args.grid}),
    );
    for b in &branches {
        for (i, r) in b.roots.iter().enumerate() {
            table.push(vec![
                Cell::from(b.drive),
                b.roots.len().into(),
                i.into(),
                (*r).into(),
                (1.0 + rc.beta * p.d2u(*r)?).into(),
            ]);
        }
    }
    run.table("branches.csv", &table)?;
    let max_branch_count = branches.iter().map(|b| b.roots.len()).max().unwrap_or(0);
    let mut by_index: Vec<Series> = (0..max_branch_count)
        .map(|i| Series {
            label: format!("root {i}"),
            points: vec![],
        })
        .collect();
    for b in &branches {
        for (s, series) in by_index.iter_mut().enumerate() {
            let y = b.roots.get(s).copied().unwrap_or(f64::NAN);
            series.points.push((b.drive, y));
        }
    }
    run.svg(
        "branches.svg",
        line_plot("Consistency roots", "phi [rad]", "phi_c [rad]", &by_index),
    )?;

    let beta_crit = invertibility_threshold(p);
    let single = rc.beta < beta_crit;
    let mut minima = vec![];
    if single {
        let v = effective_potential(p, &rc, Basis::CompactPhi, &drives)?;
        let mut t = SweepTable::new(
            vec![
                Column::new("phi", "rad"),
                Column::new("V", "E_C"),
                Column::new("dV", "E_C"),
                Column::new("d2V", "E_C"),
            ],
            serde_json::json!({"operation": "effective_potential", "basis": "compact_phi", "circuit": rc}),
        );
        for s in &v.samples {
            t.push(vec![s.coordinate.into(), s.v.into(), s.vp.into(), s.vpp.into()]);
        }
        run.table("potential.csv", &t)?;
        let curve = Series {
            label: "V".into(),
            points: v.samples.iter().map(|s| (s.coordinate, s.v)).collect(),
        };
        run.svg(
            "potential.svg",
            line_plot("Effective potential", "phi [rad]", "V [E_C]", &[curve]),
        )?;
        minima = v.minima;
    }
    let report = Report {
        verdict: if single { "single-valued" } else { "multivalued" },
        beta: rc.beta,
        beta_crit,
        kappa: rc.kappa,
        xi: rc.xi,
        lambda_j: rc.lambda_j,
        ng: rc.ng,
        reduced: rc.reduced,
        scales: c.scales,
        max_branch_count,
        minima,
    };
    run.json("report.json", &report)?;
    println!(
        "kappa={:.6e} xi={:.6e} lambda_j={:.6e} beta={:.6e} beta_crit={:.6e}",
        rc.kappa, rc.xi, rc.lambda_j, rc.beta, beta_crit
    );
    println!("up to {max_branch_count} consistency root(s) per drive");
    if single {
        println!("verdict: single-valued");
        for (phi, k) in &report.minima {
            println!("minimum at phi={phi:.6} with V''={k:.6e} E_C");
        }
        Ok(())
    } else {
        println!("verdict: multivalued (beta >= beta_crit = {beta_crit})");
        Err(Error::MultivaluedRegime {
            beta: rc.beta,
            beta_crit,
        }
        .into())
    }
}
