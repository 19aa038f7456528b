//! Mermin budget of the copying-machine experiment and the overlap it forces.
//!
//! Feeding `|+⟩` into the machine splits the ontic states of A into those
//! inside the support of `|0⟩` (whose outputs are local, Mermin value at most
//! the local bound) and the rest (at most the algebraic maximum). With
//! `Ω·q` of the mass inside, the best achievable Mermin expectation is
//! `local·Ω·q + max·(1 − Ω·q)`, which equals the quantum value 4 only at
//! `Ω = 0`.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::composite::{
    check_gamma, composite_mermin, local_mermin_max, CompositeOnticState, LocalResponses,
    MachineDynamics, NonlocalAssignment, NonlocalTag, PartyResponse, PartySupports, ALGEBRAIC_MAX,
};
use crate::error::{Error, Result};
use crate::ontology::{
    born_residual_quantum, omega, support, EpistemicState, Measurement, OnticSpace,
    OntologicalModel, ResponseFunction, DEFAULT_SUPPORT_THRESHOLD,
};
use crate::qcore::{Ket, TOLERANCE};
use crate::simplex::{LinearProgram, LpFailure, Relation};
use crate::sum::neumaier;

/// Mermin bound for local ontic states.
pub const LOCAL_BOUND: f64 = 2.0;
/// `⟨GHZ|M|GHZ⟩` with the canonical settings.
pub const QUANTUM_MERMIN: f64 = 4.0;
/// `|⟨0|+⟩|²`
pub const HALF_OVERLAP: f64 = 0.5;
/// Allowed deviation of a joint-input marginal from its epistemic state.
pub const MARGINAL_TOLERANCE: f64 = 1e-12;
/// Feasibility and optimality tolerance for the overlap LP.
pub const LP_TOLERANCE: f64 = 1e-9;

/// A candidate overlap and the Mermin bounds of the two regions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BudgetScenario {
    pub omega: f64,
    pub q_overlap: f64,
    pub local_bound: f64,
    pub algebraic_max: f64,
}

impl BudgetScenario {
    /// Scenario with local bound 2 and algebraic maximum 4.
    pub fn new(omega: f64, q_overlap: f64) -> Result<Self> {
        Self::with_bounds(omega, q_overlap, LOCAL_BOUND, ALGEBRAIC_MAX)
    }

    pub fn with_bounds(
        omega: f64,
        q_overlap: f64,
        local_bound: f64,
        algebraic_max: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&omega) {
            return Err(Error::InvalidScenario("omega must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&q_overlap) {
            return Err(Error::InvalidScenario("quantum overlap must lie in [0, 1]"));
        }
        if !(local_bound < algebraic_max) {
            return Err(Error::InvalidScenario(
                "local bound must be below the algebraic maximum",
            ));
        }
        Ok(Self {
            omega,
            q_overlap,
            local_bound,
            algebraic_max,
        })
    }
}

/// Largest Mermin expectation compatible with the scenario's overlap:
/// `local·Ω·q + max·(1 − Ω·q)`.
pub fn mermin_budget(s: &BudgetScenario) -> f64 {
    let inside = s.omega * s.q_overlap;
    s.local_bound * inside + s.algebraic_max * (1.0 - inside)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RequiredOverlap {
    /// The unique Ω in `[0, 1]` whose budget equals the target.
    Forced(f64),
    /// The Ω solving the budget equation lies outside `[0, 1]`.
    Infeasible { omega: f64 },
}

impl RequiredOverlap {
    pub fn value(self) -> Option<f64> {
        match self {
            Self::Forced(v) => Some(v),
            Self::Infeasible { .. } => None,
        }
    }
}

/// Inverts [`mermin_budget`] at the default bounds:
/// `Ω = (4 − target) / (2q)`.
pub fn solve_required_overlap(target: f64, q_overlap: f64) -> Result<RequiredOverlap> {
    solve_required_overlap_with(target, q_overlap, LOCAL_BOUND, ALGEBRAIC_MAX)
}

pub fn solve_required_overlap_with(
    target: f64,
    q_overlap: f64,
    local_bound: f64,
    algebraic_max: f64,
) -> Result<RequiredOverlap> {
    if !target.is_finite() {
        return Err(Error::InvalidScenario("target must be finite"));
    }
    if !(q_overlap.is_finite() && (0.0..=1.0).contains(&q_overlap)) {
        return Err(Error::InvalidScenario("quantum overlap must lie in [0, 1]"));
    }
    if q_overlap <= TOLERANCE {
        return Err(Error::ZeroQuantumOverlap);
    }
    if !(local_bound < algebraic_max) {
        return Err(Error::InvalidScenario(
            "local bound must be below the algebraic maximum",
        ));
    }
    let omega = (algebraic_max - target) / ((algebraic_max - local_bound) * q_overlap);
    if (-TOLERANCE..=1.0 + TOLERANCE).contains(&omega) {
        Ok(RequiredOverlap::Forced(omega.clamp(0.0, 1.0)))
    } else {
        Ok(RequiredOverlap::Infeasible { omega })
    }
}

/// Largest mass that can sit on points bounded by `local_bound` while the
/// Mermin expectation reaches `target`: `min(1, (max − |target|)/(max − local))`.
/// `None` when `|target|` exceeds the algebraic maximum.
pub fn closed_form_overlap_mass(target: f64) -> Option<f64> {
    if !target.is_finite() || libm::fabs(target) > ALGEBRAIC_MAX + LP_TOLERANCE {
        return None;
    }
    let mass = (ALGEBRAIC_MAX - libm::fabs(target)) / (ALGEBRAIC_MAX - LOCAL_BOUND);
    Some(mass.clamp(0.0, 1.0))
}

/// Mass placement over a finite `Λ^A` maximizing the mass inside the
/// support of `|0⟩` while the Mermin expectation meets a target.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapLP {
    inside: Vec<bool>,
    bounds: Vec<f64>,
    target: f64,
}

impl OverlapLP {
    /// Bounds follow the region labels: the local bound inside, the
    /// algebraic maximum outside.
    pub fn from_regions(inside: Vec<bool>, target: f64) -> Result<Self> {
        let bounds = inside
            .iter()
            .map(|&i| if i { LOCAL_BOUND } else { ALGEBRAIC_MAX })
            .collect();
        Self::new(inside, bounds, target)
    }

    pub fn new(inside: Vec<bool>, bounds: Vec<f64>, target: f64) -> Result<Self> {
        if inside.is_empty() {
            return Err(Error::InvalidProgram("no ontic points"));
        }
        if inside.len() != bounds.len() {
            return Err(Error::DimensionMismatch {
                expected: inside.len(),
                found: bounds.len(),
            });
        }
        if !bounds.iter().all(|b| b.is_finite() && *b >= 0.0) {
            return Err(Error::InvalidProgram(
                "contribution bounds must be finite and nonnegative",
            ));
        }
        if !target.is_finite() {
            return Err(Error::InvalidProgram("target must be finite"));
        }
        Ok(Self {
            inside,
            bounds,
            target,
        })
    }

    pub fn len(&self) -> usize {
        self.inside.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inside.is_empty()
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    /// Variables `m_i ≥ 0` (mass) and `u_i ≥ 0` with contribution
    /// `c_i = u_i/m_i − b_i`, so `|c_i| ≤ b_i` becomes `u_i ≤ 2 b_i m_i` and
    /// `Σ m_i c_i = target` becomes `Σ (u_i − b_i m_i) = target`.
    fn program(&self) -> LinearProgram {
        let n = self.len();
        let mut objective = vec![0.0; 2 * n];
        for (i, &inside) in self.inside.iter().enumerate() {
            if inside {
                objective[i] = 1.0;
            }
        }
        let mut lp = LinearProgram::new(objective);
        for i in 0..n {
            let mut row = vec![0.0; 2 * n];
            row[i] = -2.0 * self.bounds[i];
            row[n + i] = 1.0;
            lp.constrain(row, Relation::LessEq, 0.0);
        }
        let mut expectation = vec![0.0; 2 * n];
        for i in 0..n {
            expectation[i] = -self.bounds[i];
            expectation[n + i] = 1.0;
        }
        lp.constrain(expectation, Relation::Equal, self.target);
        let mut total = vec![0.0; 2 * n];
        total[..n].fill(1.0);
        lp.constrain(total, Relation::Equal, 1.0);
        lp
    }
}

/// Optimal per-point masses and the Mermin contribution of each.
#[derive(Clone, Debug, PartialEq)]
pub struct LpCertificate {
    pub masses: Vec<f64>,
    pub contributions: Vec<f64>,
    /// `|Σ m_i c_i − target|`
    pub expectation_residual: f64,
    /// `|Σ m_i − 1|`
    pub normalization_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum OverlapLpOutcome {
    Optimal {
        overlap_mass: f64,
        certificate: LpCertificate,
    },
    Infeasible,
}

impl OverlapLpOutcome {
    pub fn overlap_mass(&self) -> Option<f64> {
        match self {
            Self::Optimal { overlap_mass, .. } => Some(*overlap_mass),
            Self::Infeasible => None,
        }
    }
}

pub fn max_overlap_lp(lp: &OverlapLP) -> Result<OverlapLpOutcome> {
    let n = lp.len();
    let solution = match lp.program().solve()? {
        Ok(s) => s,
        Err(LpFailure::Infeasible) => return Ok(OverlapLpOutcome::Infeasible),
        Err(LpFailure::Unbounded) => {
            return Err(Error::InvalidProgram("overlap program cannot be unbounded"))
        }
        Err(LpFailure::IterationLimit) => return Err(Error::InvalidProgram("pivot limit reached")),
    };
    let masses: Vec<f64> = solution.x[..n].to_vec();
    let contributions: Vec<f64> = (0..n)
        .map(|i| {
            let m = masses[i];
            if m > 0.0 {
                (solution.x[n + i] / m - lp.bounds[i]).clamp(-lp.bounds[i], lp.bounds[i])
            } else {
                0.0
            }
        })
        .collect();
    let expectation = neumaier(masses.iter().zip(&contributions).map(|(m, c)| m * c));
    let overlap_mass = neumaier(
        masses
            .iter()
            .zip(&lp.inside)
            .filter(|(_, inside)| **inside)
            .map(|(m, _)| *m),
    );
    Ok(OverlapLpOutcome::Optimal {
        overlap_mass,
        certificate: LpCertificate {
            expectation_residual: libm::fabs(expectation - lp.target),
            normalization_residual: libm::fabs(neumaier(masses.iter().copied()) - 1.0),
            masses,
            contributions,
        },
    })
}

/// One row of the LP-versus-closed-form sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub target_mermin: f64,
    pub lp_overlap_mass: Option<f64>,
    pub closed_form_mass: Option<f64>,
}

impl SweepRow {
    pub fn agrees(&self, tolerance: f64) -> bool {
        match (self.lp_overlap_mass, self.closed_form_mass) {
            (Some(a), Some(b)) => libm::fabs(a - b) <= tolerance,
            (None, None) => true,
            _ => false,
        }
    }
}

/// Targets `from, from + step, …` up to `to` (inclusive within half a step).
pub fn sweep_targets(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) || !(step > 0.0) || to < from {
        return Err(Error::InvalidScenario(
            "sweep range must satisfy from ≤ to with step > 0",
        ));
    }
    let count = libm::floor((to - from) / step + 0.5) as usize + 1;
    Ok((0..count).map(|i| from + i as f64 * step).collect())
}

/// Solves the overlap LP on the toy `Λ^A` regions at every target.
pub fn lp_sweep(config: &ToyConfig, targets: &[f64]) -> Result<Vec<SweepRow>> {
    let inside = config.zero_region();
    targets
        .iter()
        .map(|&t| {
            let outcome = max_overlap_lp(&OverlapLP::from_regions(inside.clone(), t)?)?;
            Ok(SweepRow {
                target_mermin: t,
                lp_overlap_mass: outcome.overlap_mass(),
                closed_form_mass: closed_form_overlap_mass(t),
            })
        })
        .collect()
}

/// Layout of the toy single-qubit ontic space: `overlap` points shared by
/// the supports of `|0⟩` and `|+⟩`, then equally many points exclusive to
/// `|+⟩` and to `|0⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToyConfig {
    pub points: usize,
    pub overlap: usize,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            points: 16,
            overlap: 4,
        }
    }
}

impl ToyConfig {
    fn validate(&self) -> Result<()> {
        if self.overlap == 0 || self.overlap >= self.points {
            return Err(Error::InvalidToyModel(
                "overlap block must be nonempty and proper",
            ));
        }
        if !(self.points - self.overlap).is_multiple_of(2) {
            return Err(Error::InvalidToyModel(
                "points outside the overlap block must split evenly",
            ));
        }
        Ok(())
    }

    fn exclusive(&self) -> usize {
        (self.points - self.overlap) / 2
    }

    fn plus_only(&self) -> core::ops::Range<usize> {
        self.overlap..self.overlap + self.exclusive()
    }

    fn zero_only(&self) -> core::ops::Range<usize> {
        self.overlap + self.exclusive()..self.points
    }

    /// `true` for points in the support of `|0⟩`.
    pub fn zero_region(&self) -> Vec<bool> {
        (0..self.points)
            .map(|i| !self.plus_only().contains(&i))
            .collect()
    }
}

/// Single-qubit toy model with `w` of the mass of `μ(·|+)` on the support
/// of `|0⟩`.
///
/// - `μ(·|+)`: `w` spread over the overlap block, `1 − w` over the `+`-only block.
/// - `μ(·|0)`: `1/2` over the overlap block, `1/2` over the `0`-only block.
/// - `ξ(0|λ) = 1` off the `+`-only block and `(1/2 − w)/(1 − w)` on it.
/// - `ξ(+|λ) = 1` off the `0`-only block and `0` on it.
///
/// Both Born probabilities `P(0|+)` and `P(+|0)` come out as exactly 1/2.
pub fn toy_single_model(w: f64, config: &ToyConfig) -> Result<OntologicalModel> {
    config.validate()?;
    if !(0.0..=HALF_OVERLAP).contains(&w) {
        return Err(Error::InvalidToyModel("w must lie in [0, 1/2]"));
    }
    let n = config.points;
    let k = config.overlap as f64;
    let e = config.exclusive() as f64;
    let mut plus = vec![0.0; n];
    let mut zero = vec![0.0; n];
    let mut xi_zero = vec![1.0; n];
    let mut xi_plus = vec![1.0; n];
    for i in 0..config.overlap {
        plus[i] = w / k;
        zero[i] = 0.5 / k;
    }
    for i in config.plus_only() {
        plus[i] = (1.0 - w) / e;
        xi_zero[i] = (0.5 - w) / (1.0 - w);
    }
    for i in config.zero_only() {
        zero[i] = 0.5 / e;
        xi_plus[i] = 0.0;
    }
    let complement = |v: &[f64]| v.iter().map(|x| 1.0 - x).collect::<Vec<_>>();

    let mut model = OntologicalModel::new(OnticSpace::discrete(n));
    model.insert_preparation(EpistemicState::new("0", Ket::zero(), zero)?)?;
    model.insert_preparation(EpistemicState::new("+", Ket::plus(), plus)?)?;
    let z_table = vec![xi_zero.clone(), complement(&xi_zero)];
    let x_table = vec![xi_plus.clone(), complement(&xi_plus)];
    model.insert_measurement(ResponseFunction::new(
        Measurement::computational(),
        z_table,
    )?)?;
    model.insert_measurement(ResponseFunction::new(Measurement::hadamard(), x_table)?)?;
    Ok(model)
}

/// How the three input parties are jointly distributed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JointForm {
    /// `μ(λA|+)·μ(λB|0)·μ(λC|0)`
    Product,
    /// `λC = λB`, and `(λA, λB)` coupled by the northwest-corner rule; all
    /// three marginals are still the single-party epistemic states.
    PerfectlyCorrelated,
}

/// A finitely supported joint distribution over local input triples.
#[derive(Clone, Debug, PartialEq)]
pub struct JointInput {
    pub entries: Vec<(CompositeOnticState, f64)>,
}

impl JointInput {
    pub fn new(form: JointForm, plus_a: &[f64], reference: &[f64]) -> Self {
        let positive = |v: &[f64]| -> Vec<(usize, f64)> {
            v.iter()
                .copied()
                .enumerate()
                .filter(|(_, m)| *m > 0.0)
                .collect()
        };
        let a = positive(plus_a);
        let r = positive(reference);
        let mut entries = Vec::new();
        match form {
            JointForm::Product => {
                for &(ia, ma) in &a {
                    for &(ib, mb) in &r {
                        for &(ic, mc) in &r {
                            entries.push((CompositeOnticState::local(ia, ib, ic), ma * mb * mc));
                        }
                    }
                }
            }
            JointForm::PerfectlyCorrelated => {
                let (mut i, mut j) = (0, 0);
                let (mut left_a, mut left_r) = (
                    a.first().map_or(0.0, |x| x.1),
                    r.first().map_or(0.0, |x| x.1),
                );
                while i < a.len() && j < r.len() {
                    let m = left_a.min(left_r);
                    if m > 0.0 {
                        entries.push((CompositeOnticState::local(a[i].0, r[j].0, r[j].0), m));
                    }
                    left_a -= m;
                    left_r -= m;
                    if left_a <= 1e-15 {
                        i += 1;
                        left_a = a.get(i).map_or(0.0, |x| x.1);
                    }
                    if left_r <= 1e-15 {
                        j += 1;
                        left_r = r.get(j).map_or(0.0, |x| x.1);
                    }
                }
            }
        }
        Self { entries }
    }

    /// Marginal of one party (0 = A, 1 = B, 2 = C) over `n` points.
    pub fn marginal(&self, party: usize, n: usize) -> Vec<f64> {
        let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); n];
        for (state, p) in &self.entries {
            if let CompositeOnticState::Local { a, b, c } = *state {
                let idx = [a, b, c][party];
                if idx < n {
                    buckets[idx].push(*p);
                }
            }
        }
        buckets.into_iter().map(neumaier).collect()
    }
}

/// Toy composite experiment: the single-qubit model for all three parties,
/// Γ-compliant machine dynamics, all-`+1` local responses (each local output
/// reaches the local bound 2) and Mermin value 4 on every nonlocal output.
#[derive(Clone, Debug, PartialEq)]
pub struct ToyExperiment {
    pub w: f64,
    pub config: ToyConfig,
    pub single: OntologicalModel,
    pub dynamics: MachineDynamics,
    pub responses: LocalResponses,
    pub assignment: NonlocalAssignment,
}

impl ToyExperiment {
    pub fn new(w: f64, config: ToyConfig) -> Result<Self> {
        let single = toy_single_model(w, &config)?;
        let n = config.points;
        let zero: BTreeSet<usize> = support(single.preparation("0")?, DEFAULT_SUPPORT_THRESHOLD)
            .into_iter()
            .collect();
        let plus: BTreeSet<usize> = support(single.preparation("+")?, DEFAULT_SUPPORT_THRESHOLD)
            .into_iter()
            .collect();
        let anchor = *zero
            .first()
            .ok_or(Error::InvalidToyModel("empty support of |0⟩"))?;
        let into_zero = |x: usize| if zero.contains(&x) { x } else { anchor };

        let mut dynamics = MachineDynamics {
            party_sizes: [n; 3],
            map: Default::default(),
            zero_support: PartySupports {
                a: zero.clone(),
                b: zero.clone(),
                c: zero.clone(),
            },
            plus_support_a: plus,
        };
        let mut assignment = NonlocalAssignment::new();
        let inputs: Vec<_> = dynamics.local_inputs().collect();
        for input in inputs {
            let CompositeOnticState::Local { a, b, c } = input else {
                continue;
            };
            let output = if zero.contains(&a) {
                CompositeOnticState::local(a, into_zero(b), into_zero(c))
            } else {
                let tag = NonlocalTag(a);
                assignment.assign(tag, ALGEBRAIC_MAX)?;
                CompositeOnticState::Nonlocal(tag)
            };
            dynamics.map.insert(input, output);
        }
        Ok(Self {
            w,
            config,
            single,
            dynamics,
            responses: LocalResponses::uniform([n; 3], PartyResponse::PLUS),
            assignment,
        })
    }

    /// Largest deviation of any party marginal of `joint` from its
    /// single-party epistemic state (`|+⟩` for A, `|0⟩` for B and C).
    pub fn marginal_defect(&self, joint: &JointInput) -> Result<f64> {
        let n = self.config.points;
        let plus = self.single.preparation("+")?.density();
        let zero = self.single.preparation("0")?.density();
        let mut defect = 0.0_f64;
        for (party, expected) in [(0, plus), (1, zero), (2, zero)] {
            for (m, e) in joint.marginal(party, n).iter().zip(expected) {
                defect = defect.max(libm::fabs(m - e));
            }
        }
        Ok(defect)
    }

    pub fn joint_input(&self, form: JointForm) -> Result<JointInput> {
        Ok(JointInput::new(
            form,
            self.single.preparation("+")?.density(),
            self.single.preparation("0")?.density(),
        ))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BornCheck {
    pub preparation: String,
    pub measurement: String,
    pub residual: f64,
}

/// Outcome of one run of the toy thought experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ThoughtExperimentReport {
    pub w: f64,
    pub q_overlap: f64,
    /// `Ω(0,+)` of the toy single-qubit model.
    pub omega: f64,
    /// `Σ μ(input|+rr)·M(machine(input))` by full iteration.
    pub achieved_mermin: f64,
    /// [`mermin_budget`] at `omega`.
    pub budget: f64,
    pub quantum_mermin: f64,
    pub born: Vec<BornCheck>,
    pub max_born_residual: f64,
    pub gamma_violations: usize,
    /// Every party marginal of the joint input matches its single-party
    /// epistemic state within [`MARGINAL_TOLERANCE`].
    pub marginals_consistent: bool,
    pub reproduces_quantum: bool,
}

/// Runs the toy experiment at the default layout with a product-form joint.
pub fn run_thought_experiment(w: f64) -> Result<ThoughtExperimentReport> {
    run_thought_experiment_with(w, ToyConfig::default(), JointForm::Product)
}

pub fn run_thought_experiment_with(
    w: f64,
    config: ToyConfig,
    form: JointForm,
) -> Result<ThoughtExperimentReport> {
    let toy = ToyExperiment::new(w, config)?;
    let violations = check_gamma(&toy.dynamics);
    if !violations.is_empty() {
        return Err(Error::GammaViolated(violations.len()));
    }
    debug_assert_eq!(local_mermin_max(), 2);

    let joint = toy.joint_input(form)?;
    let mut terms = Vec::with_capacity(joint.entries.len());
    for (input, p) in &joint.entries {
        let output = toy.dynamics.apply(input).ok_or(Error::InvalidToyModel(
            "joint input outside the machine's domain",
        ))?;
        terms.push(p * composite_mermin(&output, &toy.responses, &toy.assignment)?);
    }
    let achieved = neumaier(terms);

    let marginal_defect = toy.marginal_defect(&joint)?;

    let mut born = Vec::new();
    for prep in ["0", "+"] {
        for meas in ["Z", "X"] {
            born.push(BornCheck {
                preparation: prep.to_string(),
                measurement: meas.to_string(),
                residual: born_residual_quantum(&toy.single, prep, meas)?,
            });
        }
    }
    let max_born_residual = born.iter().map(|b| b.residual).fold(0.0, f64::max);

    let omega = omega(&toy.single, "+", "0", HALF_OVERLAP)?.value;
    let budget = mermin_budget(&BudgetScenario::new(omega, HALF_OVERLAP)?);
    Ok(ThoughtExperimentReport {
        w,
        q_overlap: HALF_OVERLAP,
        omega,
        achieved_mermin: achieved,
        budget,
        quantum_mermin: QUANTUM_MERMIN,
        born,
        max_born_residual,
        gamma_violations: violations.len(),
        marginals_consistent: marginal_defect <= MARGINAL_TOLERANCE,
        reproduces_quantum: libm::fabs(achieved - QUANTUM_MERMIN) <= TOLERANCE,
    })
}

/// Required Ω for one pair with `|⟨ψ|φ⟩|² = 1/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairCheck {
    pub psi: Ket,
    pub phi: Ket,
    pub quantum_overlap: f64,
    pub required_omega: Result<f64>,
}

/// For every pair verified to have quantum overlap 1/2, the Ω forced by a
/// quantum Mermin value of 4. Pairs failing the check carry
/// [`Error::PairOverlapMismatch`].
pub fn general_pair_check(pairs: &[(Ket, Ket)]) -> Vec<PairCheck> {
    pairs
        .iter()
        .map(|(psi, phi)| {
            let overlap = psi.overlap(phi);
            let quantum_overlap = overlap.as_ref().copied().unwrap_or(f64::NAN);
            let required_omega = overlap.and_then(|q| {
                if libm::fabs(q - HALF_OVERLAP) > TOLERANCE {
                    return Err(Error::PairOverlapMismatch { overlap: q });
                }
                solve_required_overlap(QUANTUM_MERMIN, q)?
                    .value()
                    .ok_or(Error::InvalidScenario("no feasible overlap"))
            });
            PairCheck {
                psi: psi.clone(),
                phi: phi.clone(),
                quantum_overlap,
                required_omega,
            }
        })
        .collect()
}

/// Qubit pairs with `|⟨ψ|φ⟩|² = 1/2`: the axis pairs `(0,+)`, `(1,−)`,
/// `(0,+i)`, `(+,+i)`, `(−i,1)`, then `extra` pairs whose Bloch vectors
/// are orthogonal at generic angles (complex amplitudes throughout).
pub fn half_overlap_pairs(extra: usize) -> Vec<(Ket, Ket)> {
    let mut pairs = vec![
        (Ket::zero(), Ket::plus()),
        (Ket::one(), Ket::minus()),
        (Ket::zero(), Ket::plus_i()),
        (Ket::plus(), Ket::plus_i()),
        (Ket::minus_i(), Ket::one()),
    ];
    for k in 0..extra {
        let t = k as f64 + 1.0;
        let theta = 0.37 * t % core::f64::consts::PI;
        let phi = 1.13 * t;
        let alpha = 2.71 * t;
        let psi = Ket::qubit(theta, phi);
        let n = psi.bloch_vector().expect("qubit");
        // Orthonormal frame (e1, e2) perpendicular to n.
        let helper = if libm::fabs(n[2]) < 0.9 {
            [0.0, 0.0, 1.0]
        } else {
            [1.0, 0.0, 0.0]
        };
        let e1 = normalize(cross(n, helper));
        let e2 = cross(n, e1);
        let (s, c) = (libm::sin(alpha), libm::cos(alpha));
        let m = [
            c * e1[0] + s * e2[0],
            c * e1[1] + s * e2[1],
            c * e1[2] + s * e2[2],
        ];
        pairs.push((psi, Ket::from_bloch(m).expect("nonzero direction")));
    }
    pairs
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let r = libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    [v[0] / r, v[1] / r, v[2] / r]
}
