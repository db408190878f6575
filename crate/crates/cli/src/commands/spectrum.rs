use circadia::spectra::sweep::{spectrum_vs_kappa, SweepGrids};
use circadia::spectra::{Convention, YBasis};
use circadia::table::Cell;

use super::{check_ladder, load_circuit};
use crate::args::{BasisArg, SpectrumArgs};
use crate::failure::Failure;
use crate::output::Run;
use crate::svg::{line_plot, Series};

pub fn run(args: &SpectrumArgs, run: &mut Run) -> Result<(), Failure> {
    check_ladder(&args.kappa_ladder)?;
    if args.levels < 2 {
        return Err(Failure::Usage("--levels must be at least 2".into()));
    }
    let c = load_circuit(run, &args.circuit)?;
    let bases: Vec<YBasis> = match args.basis {
        Some(BasisArg::Extended) => vec![YBasis::Extended],
        Some(BasisArg::Compact) => vec![YBasis::Compact],
        None => vec![YBasis::Extended, YBasis::Compact],
    };
    let grids = SweepGrids {
        points: args.grid,
        ..SweepGrids::default()
    };
    let convention = Convention {
        charge_half_factor: args.charge_half_factor,
    };
    let table = spectrum_vs_kappa(
        &c.rc,
        &c.potential,
        &args.kappa_ladder,
        &bases,
        args.levels,
        grids,
        convention,
    )?;
    run.table("spectrum.csv", &table)?;

    let col = |name: &str| table.column_index(name).expect("sweep column");
    let (ik, ib, is, e0, e1) = (col("kappa"), col("basis"), col("status"), col("e0"), col("e1"));
    let mut series: Vec<Series> = Vec::new();
    for row in &table.rows {
        let Cell::Text(basis) = &row[ib] else { continue };
        let label = format!("{basis} e1-e0");
        let gap = match (row[e0].as_f64(), row[e1].as_f64()) {
            (Some(a), Some(b)) => b - a,
            _ => f64::NAN,
        };
        let kappa = row[ik].as_f64().unwrap_or(f64::NAN);
        match series.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push((kappa, gap)),
            None => series.push(Series {
                label,
                points: vec![(kappa, gap)],
            }),
        }
        println!("kappa={kappa} basis={basis} gap={gap:.6e} E_C status={}", match &row[is] {
            Cell::Text(t) => t.as_str(),
            _ => "",
        });
    }
    run.svg(
        "spectrum.svg",
        line_plot("Lowest gap along the kappa ladder", "kappa", "e1 - e0 [E_C]", &series),
    )?;
    Ok(())
}
