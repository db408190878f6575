pub mod bo_sweep;
pub mod compare;
pub mod dynamics;
pub mod foster;
pub mod reduce;
pub mod spectrum;

use std::path::Path;

use circadia::constants::Constants;
use circadia::params::{reduce_with, CircuitDescriptor, DerivedScales, ReducedCircuit};
use circadia::potentials::{PotentialModel, PotentialSource};

use crate::failure::Failure;
use crate::output::Run;

pub struct Circuit {
    pub rc: ReducedCircuit,
    pub scales: DerivedScales,
    pub potential: PotentialModel,
}

/// Loads and reduces a circuit descriptor, recording every file it reads.
pub fn load_circuit(run: &mut Run, path: &Path) -> Result<Circuit, Failure> {
    let bytes = run.read_input("circuit", path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::Usage(format!("{} is not UTF-8", path.display())))?;
    let desc = CircuitDescriptor::from_json_str(&text)?;
    let constants = Constants::load()?;
    run.record_input("constants", &serde_json::to_vec(&constants)?);
    let base = path.parent();
    if let Some(spec) = &desc.potential {
        if let PotentialSource::Custom { csv } = &spec.source {
            let full = match base {
                Some(dir) if csv.is_relative() => dir.join(csv),
                _ => csv.clone(),
            };
            run.read_input("potential_csv", &full)?;
        }
    }
    let potential = desc.potential_model(base)?;
    let si = desc.to_si(&constants)?;
    let (rc, scales) = reduce_with(&si, &constants)?;
    log::info!(
        "circuit: kappa={:e} xi={:e} lambda_j={:e} beta={:e}",
        rc.kappa,
        rc.xi,
        rc.lambda_j,
        rc.beta
    );
    Ok(Circuit {
        rc,
        scales,
        potential,
    })
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub fn check_ladder(kappas: &[f64]) -> Result<(), Failure> {
    if kappas.is_empty() || kappas.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
        return Err(Failure::Usage(format!(
            "--kappa-ladder needs positive finite values, got {kappas:?}"
        )));
    }
    Ok(())
}
