//! Acceptance gate: one PASS/FAIL line per criterion. Runs without the
//! libtest harness, so the lines always reach the terminal and a failing
//! criterion makes the process exit nonzero.

use std::f64::consts::PI;
use std::process::ExitCode;

use ontic_core::composite::{strategy_mermin, LocalStrategy};
use ontic_core::nogo::{
    closed_form_overlap_mass, general_pair_check, half_overlap_pairs, lp_sweep,
    run_thought_experiment, run_thought_experiment_with, solve_required_overlap, sweep_targets,
    JointForm, RequiredOverlap, ToyConfig,
};
use ontic_core::ontology::{
    born_residual_quantum, ks_model, omega, overlap_mass, Measurement, Preparation,
};
use ontic_core::qcore::{ghz_state, machine_unitary, mermin_value, tensor, Ket, MerminSettings};
use rand::{Rng, SeedableRng};

type Check = fn() -> (bool, String);

struct Gate {
    failures: Vec<usize>,
}

impl Gate {
    fn record(&mut self, number: usize, title: &str, pass: bool, detail: String) {
        println!(
            "{} criterion {number}: {title} ({detail})",
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            self.failures.push(number);
        }
    }
}

fn bases() -> Vec<Measurement> {
    vec![
        Measurement::computational(),
        Measurement::hadamard(),
        Measurement::circular(),
    ]
}

fn battery_max(polar: usize, azimuthal: usize) -> (usize, f64) {
    let preps = Preparation::pauli_eigenstates();
    let model = ks_model(polar, azimuthal, &preps, &bases()).unwrap();
    let mut count = 0;
    let mut worst = 0.0_f64;
    for p in &preps {
        for m in bases() {
            worst = worst.max(born_residual_quantum(&model, &p.label, m.label()).unwrap());
            count += 1;
        }
    }
    (count, worst)
}

fn criterion_1() -> (bool, String) {
    let m = mermin_value(&ghz_state(), &MerminSettings::canonical()).unwrap();
    let input = tensor(&tensor(&Ket::plus(), &Ket::zero()).unwrap(), &Ket::zero()).unwrap();
    let out = machine_unitary().apply(&input).unwrap();
    // Independent oracle: amplitudes 1/√2 at |000⟩ and |111⟩, zero elsewhere.
    let h = 1.0 / 2f64.sqrt();
    let defect = out
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let want = if i == 0 || i == 7 { h } else { 0.0 };
            (a.re - want).abs().max(a.im.abs())
        })
        .fold(0.0, f64::max);
    (
        (m - 4.0).abs() <= 1e-12 && defect <= 1e-12,
        format!("M = {m}, |U|+00> - GHZ| = {defect:e}"),
    )
}

fn criterion_2() -> (bool, String) {
    let values: Vec<i32> = LocalStrategy::all().map(|s| strategy_mermin(&s)).collect();
    let exact = values.iter().all(|v| *v == 2 || *v == -2);
    let max = values.iter().copied().max().unwrap();
    (
        values.len() == 64 && exact && max == 2,
        format!("{} strategies, max {max}", values.len()),
    )
}

fn criterion_3() -> (bool, String) {
    let forced = solve_required_overlap(4.0, 0.5).unwrap();
    let forced_ok = matches!(forced, RequiredOverlap::Forced(v) if v.abs() <= 1e-9);
    let mut ok = forced_ok;
    let mut seen = Vec::new();
    for w in [0.0, 0.1, 0.25, 0.5] {
        let r = run_thought_experiment(w).unwrap();
        ok &= (r.achieved_mermin - (4.0 - 2.0 * w)).abs() <= 1e-12;
        ok &= r.reproduces_quantum == (w == 0.0);
        ok &= r.gamma_violations == 0;
        seen.push(r.achieved_mermin);
    }
    (ok, format!("{forced:?}, achieved {seen:?}"))
}

fn criterion_4() -> (bool, String) {
    let targets = sweep_targets(2.0, 4.0, 0.05).unwrap();
    let rows = lp_sweep(&ToyConfig::default(), &targets).unwrap();
    let worst = rows
        .iter()
        .map(|r| {
            let want = ((4.0 - r.target_mermin) / 2.0).min(1.0);
            let lp = r
                .lp_overlap_mass
                .map_or(f64::INFINITY, |m| (m - want).abs());
            let cf = closed_form_overlap_mass(r.target_mermin)
                .map_or(f64::INFINITY, |m| (m - want).abs());
            lp.max(cf)
        })
        .fold(0.0, f64::max);
    (
        rows.len() == 41 && worst <= 1e-9,
        format!("{} targets, max deviation {worst:e}", rows.len()),
    )
}

fn criterion_5() -> (bool, String) {
    let (count, fine) = battery_max(200, 400);
    let (_, coarse) = battery_max(100, 200);
    let model = ks_model(200, 400, &Preparation::pauli_eigenstates(), &[]).unwrap();
    let w = omega(&model, "0", "+", 0.5).unwrap();
    let ratio = coarse / fine;
    (
        count >= 12 && fine < 1e-3 && (w.raw - 1.0).abs() <= 2e-3 && ratio >= 3.0,
        format!(
            "{count} pairs, residual {fine:.3e}, omega {:.6}, ratio {ratio:.3}",
            w.raw
        ),
    )
}

fn criterion_6() -> (bool, String) {
    let checks = general_pair_check(&half_overlap_pairs(10));
    let complex = checks
        .iter()
        .filter(|c| {
            c.psi
                .amplitudes()
                .iter()
                .chain(c.phi.amplitudes())
                .any(|a| a.im.abs() > 1e-6)
        })
        .count();
    let ok = checks.iter().all(|c| {
        (c.quantum_overlap - 0.5).abs() <= 1e-12
            && matches!(c.required_omega, Ok(v) if v.abs() <= 1e-9)
    });
    (
        ok && checks.len() >= 10 && complex > 0,
        format!("{} pairs ({complex} with complex amplitudes)", checks.len()),
    )
}

fn criterion_7() -> (bool, String) {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let mut qubit = || {
        let z: f64 = rng.random_range(-1.0..1.0);
        let phi: f64 = rng.random_range(0.0..2.0 * PI);
        Ket::qubit(z.acos(), phi)
    };
    let preps: Vec<Preparation> = (0..40)
        .map(|i| Preparation::new(format!("p{i}"), qubit()))
        .collect();
    let model = ks_model(200, 400, &preps, &[]).unwrap();
    let mut worst = f64::NEG_INFINITY;
    for pair in preps.chunks(2) {
        let q = pair[0].state.overlap(&pair[1].state).unwrap();
        worst = worst.max(overlap_mass(&model, &pair[0].label, &pair[1].label).unwrap() - q);
    }
    (worst <= 2e-3, format!("20 pairs, max excess {worst:.3e}"))
}

fn criterion_8() -> (bool, String) {
    let mut ok = true;
    for w in [0.0, 0.1, 0.25, 0.5] {
        let p = run_thought_experiment_with(w, ToyConfig::default(), JointForm::Product).unwrap();
        let c =
            run_thought_experiment_with(w, ToyConfig::default(), JointForm::PerfectlyCorrelated)
                .unwrap();
        ok &= p == c && c.marginals_consistent;
    }
    (ok, "w in {0, 0.1, 0.25, 0.5}".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("quantum maximal violation", criterion_1),
        ("local bound", criterion_2),
        ("forced zero overlap", criterion_3),
        ("LP / closed-form equivalence", criterion_4),
        ("KS model fidelity", criterion_5),
        ("general-pair conclusion", criterion_6),
        ("overlap inequality", criterion_7),
        ("correlated-joint robustness", criterion_8),
    ];
    let mut gate = Gate {
        failures: Vec::new(),
    };
    for (i, (title, check)) in criteria.iter().enumerate() {
        let (pass, detail) = check();
        gate.record(i + 1, title, pass, detail);
    }
    if gate.failures.is_empty() {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {:?}", gate.failures);
        ExitCode::FAILURE
    }
}
