use circadia::foster::{eval_admittance, fit_foster, read_samples_csv, FosterFit};
use circadia::table::{Column, SweepTable};

use crate::args::FosterArgs;
use crate::failure::Failure;
use crate::output::Run;
use crate::svg::{line_plot, Series};

pub fn run(args: &FosterArgs, run: &mut Run) -> Result<(), Failure> {
    let bytes = run.read_input("samples", &args.samples)?;
    if bytes.iter().all(|b| b.is_ascii_whitespace()) {
        return Err(Failure::Usage(format!("{} is empty", args.samples.display())));
    }
    let samples = read_samples_csv(&args.samples)?;
    let fit: FosterFit = fit_foster(&samples, args.resonances)?;
    run.json("foster_fit.json", &fit)?;

    let omegas: Vec<f64> = samples.iter().map(|s| s.omega).collect();
    let model = eval_admittance(&fit.model, &omegas)?;
    let mut t = SweepTable::new(
        vec![
            Column::new("omega", "rad/s"),
            Column::new("ImY_data", "S"),
            Column::new("ImY_fit", "S"),
            Column::new("residual", "S"),
        ],
        serde_json::json!({"operation": "fit_foster", "resonances": args.resonances, "samples": samples.len()}),
    );
    for (s, m) in samples.iter().zip(&model) {
        t.push(vec![s.omega.into(), s.im.into(), (*m).into(), (s.im - m).into()]);
    }
    run.table("foster_eval.csv", &t)?;
    let data = Series {
        label: "data".into(),
        points: samples.iter().map(|s| (s.omega, s.im)).collect(),
    };
    let curve = Series {
        label: "fit".into(),
        points: omegas.iter().copied().zip(model.iter().copied()).collect(),
    };
    run.svg("foster.svg", line_plot("Foster fit", "omega", "Im Y", &[data, curve]))?;

    let m = &fit.model;
    println!("c_inf={:.12e}", m.c_inf);
    match m.l_zero {
        Some(l) => println!("l_zero={l:.12e}"),
        None => println!("l_zero=none"),
    }
    for (k, r) in m.resonances.iter().enumerate() {
        println!("resonance {k}: omega={:.12e} 1/L={:.12e}", r.omega, r.inverse_inductance);
    }
    println!("rms={:.3e}", fit.rms);
    Ok(())
}
