//! Scenario runners behind each subcommand. Each returns a finished
//! [`OverlapReport`]; the caller decides where it goes.

use std::f64::consts::PI;
use std::io::Write;

use ontic_core::composite::{local_mermin_max, local_mermin_min, strategy_mermin, LocalStrategy};
use ontic_core::nogo::{
    general_pair_check, half_overlap_pairs, lp_sweep, max_overlap_lp, run_thought_experiment_with,
    solve_required_overlap, sweep_targets, JointForm, OverlapLP, OverlapLpOutcome, RequiredOverlap,
    ThoughtExperimentReport, ToyConfig, HALF_OVERLAP, LP_TOLERANCE, QUANTUM_MERMIN,
};
use ontic_core::ontology::{
    born_residual_quantum, ks_model, omega, overlap_mass, Measurement, OntologicalModel,
    Preparation, OMEGA_TOLERANCE,
};
use ontic_core::qcore::{
    ghz_state, machine_unitary, mermin_value, tensor, Ket, MerminSettings, TOLERANCE,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cli::{Grid, Sweep};
use crate::error::CliError;
use crate::report::{
    BornEntry, LpEntry, MerminEntry, OmegaEntry, OverlapReport, SweepEntry, Verdict,
};

/// Minimum improvement factor when the grid spacing is halved.
pub const CONVERGENCE_RATIO: f64 = 3.0;

pub fn pauli_bases() -> Vec<Measurement> {
    vec![
        Measurement::computational(),
        Measurement::hadamard(),
        Measurement::circular(),
    ]
}

fn ket(index: usize) -> Ket {
    Ket::basis(8, index).expect("index below 8")
}

pub fn verify_quantum(settings: &MerminSettings, label: &str) -> Result<OverlapReport, CliError> {
    let mut report = OverlapReport::new("verify-quantum");
    let value = mermin_value(&ghz_state(), settings)?;
    report.mermin.push(MerminEntry {
        label: format!("GHZ [{label}]"),
        achieved: value,
        target: QUANTUM_MERMIN,
        verdict: None,
    });
    report.push(Verdict::eq("mermin(GHZ)", value, QUANTUM_MERMIN, TOLERANCE));

    let u = machine_unitary();
    report.push(Verdict::le(
        "unitarity_defect",
        u.unitarity_defect(),
        0.0,
        TOLERANCE,
    ));
    let cases = [
        ("U|000>", ket(0), ket(0)),
        ("U|100>", ket(4), ket(7)),
        (
            "U|+00>",
            tensor(&tensor(&Ket::plus(), &Ket::zero())?, &Ket::zero())?,
            ghz_state(),
        ),
    ];
    for (name, input, expected) in cases {
        let defect = u.apply(&input)?.max_abs_diff(&expected)?;
        report.push(Verdict::le(name, defect, 0.0, TOLERANCE));
    }
    Ok(report)
}

/// The 6 Pauli eigenstates against the 3 Pauli bases.
pub fn born_battery(model: &OntologicalModel) -> Result<Vec<BornEntry>, CliError> {
    let mut out = Vec::new();
    for prep in Preparation::pauli_eigenstates() {
        for meas in pauli_bases() {
            out.push(BornEntry {
                residual: born_residual_quantum(model, &prep.label, meas.label())?,
                preparation: prep.label.clone(),
                measurement: meas.label().to_string(),
            });
        }
    }
    Ok(out)
}

fn max_residual(entries: &[BornEntry]) -> f64 {
    entries.iter().map(|b| b.residual).fold(0.0, f64::max)
}

/// Haar-random qubit: uniform Bloch direction.
pub fn random_qubit(rng: &mut impl Rng) -> Ket {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    Ket::qubit(z.acos(), phi)
}

pub fn random_pairs(count: usize, seed: u64) -> Vec<(Preparation, Preparation)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            (
                Preparation::new(format!("r{i}a"), random_qubit(&mut rng)),
                Preparation::new(format!("r{i}b"), random_qubit(&mut rng)),
            )
        })
        .collect()
}

pub fn ks_model_report(
    grid: Grid,
    tolerance: f64,
    pairs: usize,
    seed: u64,
) -> Result<OverlapReport, CliError> {
    let mut report = OverlapReport::new("ks-model");
    let random = random_pairs(pairs, seed);
    let mut preps = Preparation::pauli_eigenstates();
    for (a, b) in &random {
        preps.push(a.clone());
        preps.push(b.clone());
    }
    let model = ks_model(grid.polar, grid.azimuthal, &preps, &pauli_bases())?;
    report.born_residuals = born_battery(&model)?;
    let coarse = max_residual(&report.born_residuals);
    report.push(Verdict::le("max_born_residual", coarse, tolerance, 0.0));

    let doubled = ks_model(
        2 * grid.polar,
        2 * grid.azimuthal,
        &Preparation::pauli_eigenstates(),
        &pauli_bases(),
    )?;
    let fine = max_residual(&born_battery(&doubled)?);
    report
        .push(Verdict::le("max_born_residual_doubled_grid", fine, tolerance, 0.0).informational());
    report.push(
        Verdict::ge("convergence_ratio", coarse / fine, CONVERGENCE_RATIO, 0.0).informational(),
    );

    let mass = overlap_mass(&model, "0", "+")?;
    let w = omega(&model, "0", "+", HALF_OVERLAP)?;
    report.omega.push(OmegaEntry {
        label: "omega(0,+)".into(),
        value: w.value,
    });
    report.push(
        Verdict::eq(
            "overlap_mass(0,+)",
            mass,
            HALF_OVERLAP,
            OMEGA_TOLERANCE / 2.0,
        )
        .informational(),
    );
    report.push(Verdict::eq("omega(0,+)", w.raw, 1.0, OMEGA_TOLERANCE).informational());

    let mut excess = f64::NEG_INFINITY;
    for (a, b) in &random {
        let q = a.state.overlap(&b.state)?;
        excess = excess.max(overlap_mass(&model, &a.label, &b.label)? - q);
    }
    if !random.is_empty() {
        report.push(
            Verdict::le(
                "overlap_inequality_max_excess",
                excess,
                0.0,
                OMEGA_TOLERANCE,
            )
            .informational(),
        );
    }
    Ok(report)
}

fn toy_entry(r: &ThoughtExperimentReport) -> MerminEntry {
    MerminEntry {
        label: format!("toy w={}", r.w),
        achieved: r.achieved_mermin,
        target: r.quantum_mermin,
        verdict: Some(
            if r.reproduces_quantum {
                "reproduces"
            } else {
                "does not reproduce"
            }
            .into(),
        ),
    }
}

pub fn nogo_report(ws: &[f64], sweep: &Sweep) -> Result<OverlapReport, CliError> {
    let mut report = OverlapReport::new("nogo");

    let forced = match solve_required_overlap(QUANTUM_MERMIN, HALF_OVERLAP)? {
        RequiredOverlap::Forced(v) => v,
        RequiredOverlap::Infeasible { .. } => f64::NAN,
    };
    report.omega.push(OmegaEntry {
        label: "forced omega(0,+)".into(),
        value: forced,
    });
    report.push(Verdict::eq("forced_omega(0,+)", forced, 0.0, LP_TOLERANCE));

    for &w in ws {
        let r = run_thought_experiment_with(w, ToyConfig::default(), JointForm::Product)?;
        report.mermin.push(toy_entry(&r));
        report.push(Verdict::eq(
            format!("toy_achieved[w={w}]"),
            r.achieved_mermin,
            r.budget,
            TOLERANCE,
        ));
        report.push(Verdict::flag(
            format!("toy_reproduces[w={w}]"),
            r.reproduces_quantum,
            w == 0.0,
        ));
        report.push(Verdict::le(
            format!("toy_born_residual[w={w}]"),
            r.max_born_residual,
            0.0,
            TOLERANCE,
        ));
    }

    let config = ToyConfig::default();
    let targets = sweep_targets(sweep.from, sweep.to, sweep.step)?;
    let rows = lp_sweep(&config, &targets)?;
    let mut worst = 0.0_f64;
    for row in &rows {
        let diff = match (row.lp_overlap_mass, row.closed_form_mass) {
            (Some(a), Some(b)) => (a - b).abs(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        worst = worst.max(diff);
        report.sweep.push(SweepEntry {
            target_mermin: row.target_mermin,
            lp_overlap_mass: row.lp_overlap_mass,
            closed_form_mass: row.closed_form_mass,
        });
    }
    report.push(Verdict::le(
        "lp_vs_closed_form_max_diff",
        worst,
        0.0,
        LP_TOLERANCE,
    ));

    let mut certificate_residual = 0.0_f64;
    for &t in &targets {
        let outcome = max_overlap_lp(&OverlapLP::from_regions(config.zero_region(), t)?)?;
        let entry = match outcome {
            OverlapLpOutcome::Optimal {
                overlap_mass,
                certificate,
            } => {
                certificate_residual = certificate_residual
                    .max(certificate.expectation_residual)
                    .max(certificate.normalization_residual);
                LpEntry {
                    target_mermin: t,
                    overlap_mass: Some(overlap_mass),
                    masses: certificate.masses,
                    contributions: certificate.contributions,
                }
            }
            OverlapLpOutcome::Infeasible => LpEntry {
                target_mermin: t,
                overlap_mass: None,
                masses: Vec::new(),
                contributions: Vec::new(),
            },
        };
        report.lp_certificates.push(entry);
    }
    report.push(Verdict::le(
        "lp_certificate_residual",
        certificate_residual,
        0.0,
        LP_TOLERANCE,
    ));

    let checks = general_pair_check(&half_overlap_pairs(10));
    let mut worst_pair = 0.0_f64;
    for (i, check) in checks.iter().enumerate() {
        let value = check.required_omega.as_ref().copied().unwrap_or(f64::NAN);
        report.omega.push(OmegaEntry {
            label: format!("required omega, pair {i}"),
            value,
        });
        worst_pair = if value.is_nan() {
            f64::NAN
        } else {
            worst_pair.max(value.abs())
        };
    }
    report.push(Verdict::eq(
        "general_pairs_max_required_omega",
        worst_pair,
        0.0,
        LP_TOLERANCE,
    ));
    report.push(Verdict::ge(
        "general_pairs_count",
        checks.len() as f64,
        10.0,
        0.0,
    ));
    Ok(report)
}

/// Tab-separated dump of the KS model over the six Pauli eigenstates.
pub fn export_model<W: Write>(grid: Grid, mut out: W) -> Result<(), CliError> {
    let preps = Preparation::pauli_eigenstates();
    let model = ks_model(grid.polar, grid.azimuthal, &preps, &[])?;
    writeln!(out, "# ontic export-model: Kochen-Specker qubit model")?;
    writeln!(
        out,
        "# grid {} x {} (polar x azimuthal), weights in steradians",
        grid.polar, grid.azimuthal
    )?;
    writeln!(
        out,
        "# mu[p] is the density of preparation p with respect to weight"
    )?;
    let mut header = vec!["index", "x", "y", "z", "weight"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    header.extend(preps.iter().map(|p| format!("mu[{}]", p.label)));
    writeln!(out, "{}", header.join("\t"))?;
    let densities = preps
        .iter()
        .map(|p| model.preparation(&p.label).map(|e| e.density()))
        .collect::<Result<Vec<_>, _>>()?;
    for (i, point) in model.space().points().iter().enumerate() {
        let [x, y, z] = point.direction.unwrap_or([f64::NAN; 3]);
        let mut row = vec![
            i.to_string(),
            x.to_string(),
            y.to_string(),
            z.to_string(),
            point.weight.to_string(),
        ];
        row.extend(densities.iter().map(|d| d[i].to_string()));
        writeln!(out, "{}", row.join("\t"))?;
    }
    out.flush()?;
    Ok(())
}

/// Mermin values of all deterministic local strategies, as
/// `(count, min, max, count at +2)`.
pub fn local_strategy_summary() -> (usize, i32, i32, usize) {
    let values: Vec<i32> = LocalStrategy::all().map(|s| strategy_mermin(&s)).collect();
    debug_assert_eq!(values.iter().copied().max(), Some(local_mermin_max()));
    debug_assert_eq!(values.iter().copied().min(), Some(local_mermin_min()));
    (
        values.len(),
        values.iter().copied().min().unwrap_or(0),
        values.iter().copied().max().unwrap_or(0),
        values.iter().filter(|&&v| v == 2).count(),
    )
}
