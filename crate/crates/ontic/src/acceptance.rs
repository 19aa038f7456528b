//! The eight acceptance criteria, evaluated in-process.

use ontic_core::nogo::{
    closed_form_overlap_mass, run_thought_experiment_with, JointForm, ToyConfig, LP_TOLERANCE,
};
use ontic_core::ontology::{
    ks_model, omega, overlap_mass, Preparation, GRID_BORN_TOLERANCE, OMEGA_TOLERANCE,
};
use ontic_core::qcore::MerminSettings;

use crate::cli::{Grid, Sweep};
use crate::commands::{
    born_battery, local_strategy_summary, nogo_report, pauli_bases, random_pairs, verify_quantum,
    CONVERGENCE_RATIO,
};
use crate::error::CliError;
use crate::report::{OverlapReport, Verdict};

pub const TOY_WS: [f64; 4] = [0.0, 0.1, 0.25, 0.5];
pub const RANDOM_PAIRS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionResult {
    pub number: usize,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {}: {} ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.number,
            self.title,
            self.detail
        )
    }
}

fn verdict<'a>(report: &'a OverlapReport, name: &str) -> Option<&'a Verdict> {
    report.verdicts.iter().find(|v| v.name == name)
}

fn quantum() -> Result<CriterionResult, CliError> {
    let r = verify_quantum(&MerminSettings::canonical(), "canonical")?;
    let ghz = verdict(&r, "mermin(GHZ)").is_some_and(|v| v.pass);
    let u = verdict(&r, "U|+00>").is_some_and(|v| v.pass);
    Ok(CriterionResult {
        number: 1,
        title: "quantum maximal violation",
        pass: ghz && u,
        detail: format!("M(GHZ) = {}", r.mermin[0].achieved),
    })
}

fn local_bound() -> CriterionResult {
    let (count, min, max, at_two) = local_strategy_summary();
    CriterionResult {
        number: 2,
        title: "local bound",
        pass: count == 64 && min == -2 && max == 2 && at_two == 32,
        detail: format!("{count} strategies, values in [{min}, {max}], {at_two} at +2"),
    }
}

fn forced_zero() -> Result<CriterionResult, CliError> {
    let sweep = Sweep {
        from: 4.0,
        to: 4.0,
        step: 0.05,
    };
    let r = nogo_report(&TOY_WS, &sweep)?;
    let forced = verdict(&r, "forced_omega(0,+)").is_some_and(|v| v.pass);
    let toys = TOY_WS.iter().all(|w| {
        let achieved = r.mermin.iter().find(|m| m.label == format!("toy w={w}"));
        let reproduces = verdict(&r, &format!("toy_reproduces[w={w}]")).is_some_and(|v| v.pass);
        reproduces && achieved.is_some_and(|m| (m.achieved - (4.0 - 2.0 * w)).abs() <= 1e-12)
    });
    let achieved: Vec<String> = r.mermin.iter().map(|m| format!("{}", m.achieved)).collect();
    Ok(CriterionResult {
        number: 3,
        title: "forced zero overlap",
        pass: forced && toys,
        detail: format!(
            "Ω = {}, toy values [{}]",
            r.omega[0].value,
            achieved.join(", ")
        ),
    })
}

fn lp_equivalence() -> Result<CriterionResult, CliError> {
    let sweep = Sweep {
        from: 2.0,
        to: 4.0,
        step: 0.05,
    };
    let r = nogo_report(&[], &sweep)?;
    let mut worst = 0.0_f64;
    for row in &r.sweep {
        let expected = (4.0 - row.target_mermin) / 2.0;
        let expected = expected.min(1.0);
        worst = worst.max(
            row.lp_overlap_mass
                .map_or(f64::INFINITY, |m| (m - expected).abs()),
        );
        worst = worst.max(
            closed_form_overlap_mass(row.target_mermin)
                .map_or(f64::INFINITY, |m| (m - expected).abs()),
        );
    }
    Ok(CriterionResult {
        number: 4,
        title: "LP / closed-form equivalence",
        pass: r.sweep.len() == 41 && worst <= LP_TOLERANCE,
        detail: format!("{} targets, max deviation {worst:e}", r.sweep.len()),
    })
}

fn ks_fidelity() -> Result<CriterionResult, CliError> {
    let grid = Grid {
        polar: 200,
        azimuthal: 400,
    };
    let preps = Preparation::pauli_eigenstates();
    let model = ks_model(grid.polar, grid.azimuthal, &preps, &pauli_bases())?;
    let battery = born_battery(&model)?;
    let fine = battery.iter().map(|b| b.residual).fold(0.0, f64::max);
    let coarse_model = ks_model(grid.polar / 2, grid.azimuthal / 2, &preps, &pauli_bases())?;
    let coarse = born_battery(&coarse_model)?
        .iter()
        .map(|b| b.residual)
        .fold(0.0, f64::max);
    let ratio = coarse / fine;
    let w = omega(&model, "0", "+", 0.5)?;
    Ok(CriterionResult {
        number: 5,
        title: "KS model fidelity",
        pass: battery.len() >= 12
            && fine < GRID_BORN_TOLERANCE
            && (w.raw - 1.0).abs() <= OMEGA_TOLERANCE
            && ratio >= CONVERGENCE_RATIO,
        detail: format!(
            "{} pairs, max residual {fine:.3e}, Ω(0,+) = {:.6}, ratio {ratio:.3}",
            battery.len(),
            w.raw
        ),
    })
}

fn general_pairs() -> Result<CriterionResult, CliError> {
    let r = nogo_report(
        &[],
        &Sweep {
            from: 4.0,
            to: 4.0,
            step: 1.0,
        },
    )?;
    let pairs: Vec<f64> = r
        .omega
        .iter()
        .filter(|o| o.label.starts_with("required omega"))
        .map(|o| o.value)
        .collect();
    let worst = pairs.iter().fold(
        0.0_f64,
        |a, v| if v.is_nan() { f64::NAN } else { a.max(v.abs()) },
    );
    Ok(CriterionResult {
        number: 6,
        title: "general-pair conclusion",
        pass: pairs.len() >= 10 && worst <= LP_TOLERANCE,
        detail: format!("{} pairs, max required Ω {worst:e}", pairs.len()),
    })
}

fn overlap_inequality(seed: u64) -> Result<CriterionResult, CliError> {
    let pairs = random_pairs(RANDOM_PAIRS, seed);
    let preps: Vec<Preparation> = pairs
        .iter()
        .flat_map(|(a, b)| [a.clone(), b.clone()])
        .collect();
    let model = ks_model(200, 400, &preps, &[])?;
    let mut excess = f64::NEG_INFINITY;
    for (a, b) in &pairs {
        let q = a.state.overlap(&b.state)?;
        excess = excess.max(overlap_mass(&model, &a.label, &b.label)? - q);
    }
    Ok(CriterionResult {
        number: 7,
        title: "overlap inequality",
        pass: pairs.len() >= 20 && excess <= OMEGA_TOLERANCE,
        detail: format!("{} seeded pairs, max excess {excess:.3e}", pairs.len()),
    })
}

fn correlated_joint() -> Result<CriterionResult, CliError> {
    let mut identical = true;
    for w in TOY_WS {
        let product = run_thought_experiment_with(w, ToyConfig::default(), JointForm::Product)?;
        let correlated =
            run_thought_experiment_with(w, ToyConfig::default(), JointForm::PerfectlyCorrelated)?;
        identical &= product == correlated && product.marginals_consistent;
    }
    Ok(CriterionResult {
        number: 8,
        title: "correlated-joint robustness",
        pass: identical,
        detail: format!("{} values of w compared", TOY_WS.len()),
    })
}

/// Evaluates every criterion, in order. Computation errors count as
/// failures of the criterion that raised them.
pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    let failed = |number, title, e: CliError| CriterionResult {
        number,
        title,
        pass: false,
        detail: e.to_string(),
    };
    vec![
        quantum().unwrap_or_else(|e| failed(1, "quantum maximal violation", e)),
        local_bound(),
        forced_zero().unwrap_or_else(|e| failed(3, "forced zero overlap", e)),
        lp_equivalence().unwrap_or_else(|e| failed(4, "LP / closed-form equivalence", e)),
        ks_fidelity().unwrap_or_else(|e| failed(5, "KS model fidelity", e)),
        general_pairs().unwrap_or_else(|e| failed(6, "general-pair conclusion", e)),
        overlap_inequality(seed).unwrap_or_else(|e| failed(7, "overlap inequality", e)),
        correlated_joint().unwrap_or_else(|e| failed(8, "correlated-joint robustness", e)),
    ]
}

pub fn report(results: &[CriterionResult]) -> OverlapReport {
    let mut report = OverlapReport::new("acceptance");
    for r in results {
        report.push(Verdict::flag(
            format!("criterion {}: {}", r.number, r.title),
            r.pass,
            true,
        ));
    }
    report
}
