use std::io::Write;

use circadia::foster::{
    eval_admittance, fit_foster, read_samples_csv, AdmittanceSample, FosterModel, Resonance,
};
use circadia::Error;
use proptest::prelude::*;

fn composite() -> FosterModel {
    FosterModel::new(
        0.7,
        Some(2.5),
        vec![
            Resonance {
                inverse_inductance: 1.3,
                omega: 2.0,
            },
            Resonance {
                inverse_inductance: 0.4,
                omega: 5.5,
            },
        ],
    )
    .unwrap()
}

/// Im Y as a single rational function N(ω)/D(ω), with N and D expanded as
/// polynomial coefficient lists and evaluated by Horner's rule.
fn rational_oracle(c: f64, l0: f64, res: &[(f64, f64)], w: f64) -> f64 {
    fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }
    fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
        let n = a.len().max(b.len());
        (0..n)
            .map(|i| a.get(i).copied().unwrap_or(0.0) + b.get(i).copied().unwrap_or(0.0))
            .collect()
    }
    fn horner(p: &[f64], w: f64) -> f64 {
        p.iter().rev().fold(0.0, |acc, c| acc * w + c)
    }
    // Terms as (numerator, denominator) in ascending powers of ω.
    let mut terms: Vec<(Vec<f64>, Vec<f64>)> = vec![
        (vec![0.0, c], vec![1.0]),
        (vec![-1.0 / l0], vec![0.0, 1.0]),
    ];
    for &(inv_l, om) in res {
        terms.push((vec![0.0, inv_l], vec![om * om, 0.0, -1.0]));
    }
    let (mut num, mut den) = (vec![0.0], vec![1.0]);
    for (n, d) in terms {
        num = add(&mul(&num, &d), &mul(&n, &den));
        den = mul(&den, &d);
    }
    horner(&num, w) / horner(&den, w)
}

#[test]
fn composite_model_matches_rational_oracle() {
    let m = composite();
    let omegas: Vec<f64> = (0..50).map(|i| 0.15 + 0.173 * i as f64).collect();
    let got = eval_admittance(&m, &omegas).unwrap();
    for (w, g) in omegas.iter().zip(got) {
        let want = rational_oracle(0.7, 2.5, &[(1.3, 2.0), (0.4, 5.5)], *w);
        assert!((g - want).abs() <= 1e-12 * want.abs().max(1.0), "ω={w}: {g} vs {want}");
    }
}

#[test]
fn capacitor_only_is_linear() {
    let m = FosterModel::new(2.0, None, vec![]).unwrap();
    let v = eval_admittance(&m, &[0.5, 1.0, 3.0]).unwrap();
    assert_eq!(v, vec![1.0, 2.0, 6.0]);
}

#[test]
fn resonance_adds_low_frequency_capacitance() {
    let m = FosterModel::new(
        1.0,
        None,
        vec![Resonance {
            inverse_inductance: 2.0,
            omega: 4.0,
        }],
    )
    .unwrap();
    let w = 1e-4;
    let slope = eval_admittance(&m, &[w]).unwrap()[0] / w;
    assert!((slope - (1.0 + 2.0 / 16.0)).abs() < 1e-8);
}

#[test]
fn evaluation_at_pole_is_refused() {
    let m = composite();
    let err = eval_admittance(&m, &[2.0 * (1.0 + 1e-12)]).unwrap_err();
    assert!(matches!(err, Error::PoleProximity { .. }));
}

#[test]
fn capacitor_data_fits_without_resonances() {
    let samples: Vec<AdmittanceSample> = (1..=20)
        .map(|i| {
            let w = 0.5 * i as f64;
            AdmittanceSample::lossless(w, 3.25 * w)
        })
        .collect();
    let fit = fit_foster(&samples, 0).unwrap();
    assert!((fit.model.c_inf - 3.25).abs() < 1e-12);
    assert!(fit.model.l_zero.is_none() && fit.model.resonances.is_empty());
    assert!(fit.rms < 1e-12);
}

#[test]
fn underspecified_structure_reports_asymptotes() {
    let m = composite();
    let samples: Vec<AdmittanceSample> = (0..300)
        .map(|i| 0.1 + 0.03 * i as f64)
        .filter(|w| (w - 2.0f64).abs() > 0.05 && (w - 5.5f64).abs() > 0.05)
        .map(|w| AdmittanceSample::lossless(w, eval_admittance(&m, &[w]).unwrap()[0]))
        .collect();
    match fit_foster(&samples, 1) {
        Err(Error::StructuralMismatch { expected, detected }) => {
            assert_eq!(expected, 1);
            assert_eq!(detected.len(), 2);
            assert!((detected[0] - 2.0).abs() < 0.1 && (detected[1] - 5.5).abs() < 0.1);
        }
        other => panic!("expected StructuralMismatch, got {other:?}"),
    }
}

#[test]
fn round_trip_reproduces_samples() {
    let m = composite();
    let omegas: Vec<f64> = (0..240)
        .map(|i| 0.2 + 0.03 * i as f64)
        .filter(|w| (w - 2.0f64).abs() > 0.04 && (w - 5.5f64).abs() > 0.04)
        .collect();
    let im = eval_admittance(&m, &omegas).unwrap();
    let samples: Vec<AdmittanceSample> =
        omegas.iter().zip(&im).map(|(w, y)| AdmittanceSample::lossless(*w, *y)).collect();
    let fit = fit_foster(&samples, 2).unwrap();
    let again = eval_admittance(&fit.model, &omegas).unwrap();
    let rms = (im.iter().zip(&again).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
        / im.len() as f64)
        .sqrt();
    assert!(rms < 1e-9, "rms {rms}");
    assert!(fit.model.l_zero.is_some());
}

#[test]
fn lossy_input_rejected() {
    let samples: Vec<AdmittanceSample> = (1..=10)
        .map(|i| AdmittanceSample {
            omega: i as f64,
            im: i as f64,
            re: if i == 4 { 1e-3 } else { 0.0 },
        })
        .collect();
    assert!(matches!(fit_foster(&samples, 0), Err(Error::Lossy { .. })));
}

#[test]
fn samples_load_from_csv() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "omega,ImY").unwrap();
    for i in 1..=12 {
        let w = 0.25 * i as f64;
        writeln!(f, "{w},{}", 1.5 * w).unwrap();
    }
    f.flush().unwrap();
    let samples = read_samples_csv(f.path()).unwrap();
    assert_eq!(samples.len(), 12);
    let fit = fit_foster(&samples, 0).unwrap();
    assert!((fit.model.c_inf - 1.5).abs() < 1e-12);
}

proptest! {
    #[test]
    fn susceptance_rises_between_poles(
        c in 0.0f64..3.0,
        inv_l0 in 0.0f64..2.0,
        r1 in 0.05f64..2.0,
        o1 in 0.5f64..3.0,
        r2 in 0.05f64..2.0,
        gap in 0.2f64..4.0,
        w in 0.05f64..10.0,
    ) {
        let l_zero = (inv_l0 > 0.0).then(|| 1.0 / inv_l0);
        let m = FosterModel::new(c, l_zero, vec![
            Resonance { inverse_inductance: r1, omega: o1 },
            Resonance { inverse_inductance: r2, omega: o1 + gap },
        ]).unwrap();
        if let Ok(s) = m.susceptance_slope(w) {
            prop_assert!(s > 0.0);
        }
    }
}
