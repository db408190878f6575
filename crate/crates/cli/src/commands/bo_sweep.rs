use circadia::spectra::bo::bo_effective_potential;

use super::{check_ladder, linspace, load_circuit};
use crate::args::BoSweepArgs;
use crate::failure::Failure;
use crate::output::Run;
use crate::svg::{line_plot, Series};

pub fn run(args: &BoSweepArgs, run: &mut Run) -> Result<(), Failure> {
    check_ladder(&args.kappa_ladder)?;
    if args.grid < 1 || !(args.x_max > 0.0 && args.x_max.is_finite()) {
        return Err(Failure::Usage("--grid must be >= 1 and --x-max positive".into()));
    }
    let c = load_circuit(run, &args.circuit)?;
    let xs = linspace(-args.x_max, args.x_max, args.grid);
    let sweep = bo_effective_potential(&args.kappa_ladder, &xs, c.rc.xi, c.rc.lambda_j, &c.potential)?;
    run.table("bo_sweep.csv", &sweep.to_table())?;
    let series: Vec<Series> = sweep
        .kappas
        .iter()
        .zip(&sweep.delta)
        .map(|(k, row)| Series {
            label: format!("kappa={k}"),
            points: xs.iter().copied().zip(row.iter().copied()).collect(),
        })
        .collect();
    run.svg(
        "bo_sweep.svg",
        line_plot(
            "Born-Oppenheimer slow potential",
            "x",
            "e0(x) - e0(0) [hbar*omega_r']",
            &series,
        ),
    )?;
    for (i, k) in sweep.kappas.iter().enumerate() {
        println!(
            "kappa={k} sup|delta e0|={:.6e} curvature_fit={:.6e}",
            sweep.sup_norms[i], sweep.curvature_fits[i]
        );
    }
    println!("verdict: {}", sweep.verdict.label());
    Ok(())
}
