use circadia::params::ReducedCircuit;
use circadia::potentials::PotentialModel;
use circadia::spectra::compact::naive_compact_adiabatic;
use circadia::spectra::{
    lowest_eigenvalues, spacings, BoxGrid, Convention, HamiltonianSpec, Potential1D,
};
use circadia::table::{Cell, Column, SweepTable};
use rayon::prelude::*;

use super::{check_ladder, load_circuit};
use crate::args::CompareArgs;
use crate::failure::Failure;
use crate::output::Run;
use crate::svg::{line_plot, Series};

/// One ladder of the comparison.
#[derive(Debug, Clone)]
enum Ladder {
    /// c n² + V(φ) on an extended phase box.
    ReducedExtended,
    /// c n² + V_BO(φ) from the extended two-coordinate circuit at κ.
    BornOppenheimer(f64),
    /// c (n − n_g)² + V(φ) on the periodic phase grid.
    ReducedCompact,
    /// Flat fast-phase ladder of the compact circuit at κ.
    NaiveAdiabatic(f64),
}

impl Ladder {
    fn model(&self) -> &'static str {
        match self {
            Ladder::ReducedExtended | Ladder::ReducedCompact => "reduced-classical",
            Ladder::BornOppenheimer(_) => "born-oppenheimer",
            Ladder::NaiveAdiabatic(_) => "naive-adiabatic",
        }
    }

    fn basis(&self) -> &'static str {
        match self {
            Ladder::ReducedExtended | Ladder::BornOppenheimer(_) => "extended",
            Ladder::ReducedCompact | Ladder::NaiveAdiabatic(_) => "compact",
        }
    }

    fn kappa(&self) -> Cell {
        match self {
            Ladder::BornOppenheimer(k) | Ladder::NaiveAdiabatic(k) => (*k).into(),
            _ => Cell::Missing,
        }
    }
}

struct Setup<'a> {
    rc: ReducedCircuit,
    p: &'a PotentialModel,
    args: &'a CompareArgs,
    convention: Convention,
}

impl Setup<'_> {
    fn levels(&self, col: &Ladder) -> circadia::Result<Vec<f64>> {
        let c = self.convention.charge_coefficient();
        let k = self.args.levels;
        let grid = BoxGrid::new(self.args.box_half_width, self.args.grid);
        let spec = match col {
            Ladder::ReducedExtended => HamiltonianSpec::Extended1D {
                kinetic: c,
                potential: Potential1D::Effective {
                    potential: self.p.clone(),
                    circuit: self.rc,
                },
                grid,
            },
            Ladder::BornOppenheimer(kappa) => HamiltonianSpec::Extended1D {
                kinetic: c,
                potential: Potential1D::BornOppenheimer {
                    potential: self.p.clone(),
                    circuit: self.rc.with_kappa(*kappa)?,
                },
                grid,
            },
            Ladder::ReducedCompact => HamiltonianSpec::PeriodicGrid {
                kinetic: c,
                ng: self.rc.ng,
                potential: Potential1D::Effective {
                    potential: self.p.clone(),
                    circuit: self.rc,
                },
                points: self.args.phase_points,
            },
            Ladder::NaiveAdiabatic(kappa) => {
                // Reported in E_C: the ladder and offset are in E_C/κ⁴.
                let n = naive_compact_adiabatic(*kappa, self.rc.xi, self.rc.ng, k, self.convention)?;
                let k4 = kappa.powi(4);
                return Ok(n.numerical.iter().map(|e| (e + n.offset) / k4).collect());
            }
        };
        Ok(lowest_eigenvalues(&spec, k)?.eigenvalues)
    }
}

pub fn run(args: &CompareArgs, run: &mut Run) -> Result<(), Failure> {
    if args.levels < 2 {
        return Err(Failure::Usage("--levels must be at least 2".into()));
    }
    let c = load_circuit(run, &args.circuit)?;
    let kappas = args.kappa_ladder.clone().unwrap_or_else(|| vec![c.rc.kappa]);
    check_ladder(&kappas).map_err(|_| {
        Failure::Usage("the Born-Oppenheimer and naive columns need kappa > 0; pass --kappa-ladder".into())
    })?;
    let setup = Setup {
        rc: c.rc,
        p: &c.potential,
        args,
        convention: Convention {
            charge_half_factor: args.charge_half_factor,
        },
    };
    let mut columns = vec![Ladder::ReducedExtended];
    columns.extend(kappas.iter().map(|&k| Ladder::BornOppenheimer(k)));
    columns.push(Ladder::ReducedCompact);
    columns.extend(kappas.iter().map(|&k| Ladder::NaiveAdiabatic(k)));
    let results: Vec<circadia::Result<Vec<f64>>> =
        columns.par_iter().map(|col| setup.levels(col)).collect();

    let k = args.levels;
    let mut header = vec![
        Column::new("model", ""),
        Column::new("basis", ""),
        Column::new("kappa", ""),
    ];
    header.extend((0..k).map(|j| Column::new(format!("e{j}"), "E_C")));
    header.push(Column::new("mean_spacing", "E_C"));
    header.push(Column::new("spacing_std", "E_C"));
    header.push(Column::new("status", ""));
    let mut table = SweepTable::new(
        header,
        serde_json::json!({
            "operation": "compare",
            "circuit": c.rc,
            "potential": c.potential,
            "kappas": kappas,
            "levels": k,
            "grid": args.grid,
            "box_half_width": args.box_half_width,
            "phase_points": args.phase_points,
            "convention": setup.convention,
        }),
    );
    let mut series = Vec::new();
    for (col, res) in columns.iter().zip(results) {
        let mut row = vec![col.model().into(), col.basis().into(), col.kappa()];
        let label = match col.kappa() {
            Cell::Num(kp) => format!("{} {} kappa={kp}", col.model(), col.basis()),
            _ => format!("{} {}", col.model(), col.basis()),
        };
        match res {
            Ok(levels) => {
                let sp = spacings(&levels);
                let mean = sp.iter().sum::<f64>() / sp.len() as f64;
                let var = sp.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / sp.len() as f64;
                println!("{label}: mean spacing {mean:.6e} E_C");
                series.push(Series {
                    label,
                    points: levels.iter().enumerate().map(|(j, e)| (j as f64, *e)).collect(),
                });
                row.extend(levels.into_iter().map(Cell::from));
                row.push(mean.into());
                row.push(var.sqrt().into());
                row.push("ok".into());
            }
            Err(e) => {
                println!("{label}: {e}");
                row.extend((0..k + 2).map(|_| Cell::Missing));
                row.push(format!("error: {e}").into());
            }
        }
        table.push(row);
    }
    run.table("compare.csv", &table)?;
    run.svg(
        "compare.svg",
        line_plot("Lowest levels", "level index", "E [E_C]", &series),
    )?;
    Ok(())
}
