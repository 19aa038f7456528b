//! Single-system ontological models.
//!
//! A model is a finite ontic space (each point with a measure weight), one
//! epistemic density per preparation and one response table per
//! measurement. Continuum models are discretized onto a sphere grid, so every
//! integral below is a weighted sum over points.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qcore::{born_probabilities, Ket, TOLERANCE};
use crate::sum::neumaier;

/// Density floor below which a point is outside a support.
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-12;
/// Allowed deviation of `Σ density·weight` from 1 on discrete spaces.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;
/// Allowed deviation of `Σ density·weight` from 1 on sphere grids, where the
/// sum is a quadrature of a continuum density.
pub const GRID_NORMALIZATION_TOLERANCE: f64 = 1e-3;
/// Allowed deviation of `Σ_outcomes ξ` from 1 at any point.
pub const RESPONSE_SUM_TOLERANCE: f64 = 1e-9;
/// Allowed deviation of `ξ(ψ|λ)` from 1 on the support of `ψ`.
pub const CORE_TOLERANCE: f64 = 1e-6;
/// Slack on `Ω ≤ 1` before the model is flagged inconsistent.
pub const OMEGA_TOLERANCE: f64 = 2e-3;
/// Born residual tolerance for exact (finite, unweighted) models.
pub const EXACT_BORN_TOLERANCE: f64 = 1e-9;
/// Born residual tolerance for sphere-grid models at 200×400.
pub const GRID_BORN_TOLERANCE: f64 = 1e-3;
/// Smallest accepted step count along either sphere-grid axis.
pub const MIN_GRID_STEPS: usize = 8;

/// One ontic state: an optional Bloch direction and its measure weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OnticPoint {
    pub direction: Option<[f64; 3]>,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// Unit-weight points with no geometry.
    Discrete,
    /// Equal-angle polar × azimuthal grid on the unit sphere.
    SphereGrid { polar: usize, azimuthal: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OnticSpace {
    kind: SpaceKind,
    points: Vec<OnticPoint>,
}

impl OnticSpace {
    /// `n` unit-weight points.
    pub fn discrete(n: usize) -> Self {
        Self::discrete_with_directions(vec![None; n])
    }

    pub fn discrete_with_directions(directions: Vec<Option<[f64; 3]>>) -> Self {
        Self {
            kind: SpaceKind::Discrete,
            points: directions
                .into_iter()
                .map(|direction| OnticPoint {
                    direction,
                    weight: 1.0,
                })
                .collect(),
        }
    }

    /// Midpoint grid on the sphere. Cell `(i, j)` spans
    /// `θ ∈ [iΔθ, (i+1)Δθ]`, `φ ∈ [jΔφ, (j+1)Δφ]`; its node is the cell's
    /// angular midpoint and its weight the exact solid angle
    /// `(cos θ_i − cos θ_{i+1})·Δφ`, so the weights sum to 4π.
    pub fn sphere_grid(polar: usize, azimuthal: usize) -> Result<Self> {
        if polar < MIN_GRID_STEPS || azimuthal < MIN_GRID_STEPS {
            return Err(Error::DegenerateGrid { polar, azimuthal });
        }
        let d_theta = PI / polar as f64;
        let d_phi = 2.0 * PI / azimuthal as f64;
        let mut points = Vec::with_capacity(polar * azimuthal);
        for i in 0..polar {
            let lo = i as f64 * d_theta;
            let hi = (i + 1) as f64 * d_theta;
            let theta = (i as f64 + 0.5) * d_theta;
            let weight = (libm::cos(lo) - libm::cos(hi)) * d_phi;
            let (st, ct) = (libm::sin(theta), libm::cos(theta));
            for j in 0..azimuthal {
                let phi = (j as f64 + 0.5) * d_phi;
                points.push(OnticPoint {
                    direction: Some([st * libm::cos(phi), st * libm::sin(phi), ct]),
                    weight,
                });
            }
        }
        Ok(Self {
            kind: SpaceKind::SphereGrid { polar, azimuthal },
            points,
        })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[OnticPoint] {
        &self.points
    }

    pub fn total_measure(&self) -> f64 {
        neumaier(self.points.iter().map(|p| p.weight))
    }
}

/// `μ(λ|ψ)` as a density per point with respect to the point weights.
#[derive(Clone, Debug, PartialEq)]
pub struct EpistemicState {
    label: String,
    state: Ket,
    density: Vec<f64>,
}

impl EpistemicState {
    pub fn new(label: impl Into<String>, state: Ket, density: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if let Some(bad) = density.iter().find(|d| !(**d >= 0.0) || !d.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "preparation `{label}` has invalid density {bad}"
            )));
        }
        Ok(Self {
            label,
            state,
            density,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn state(&self) -> &Ket {
        &self.state
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// `Σ density·weight`
    pub fn mass(&self, space: &OnticSpace) -> f64 {
        neumaier(
            self.density
                .iter()
                .zip(space.points())
                .map(|(d, p)| d * p.weight),
        )
    }
}

/// A rank-1 projective outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub state: Ket,
}

impl Outcome {
    pub fn new(label: impl Into<String>, state: Ket) -> Self {
        Self {
            label: label.into(),
            state,
        }
    }
}

/// An orthonormal qubit basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    label: String,
    outcomes: Vec<Outcome>,
}

impl Measurement {
    pub fn new(label: impl Into<String>, outcomes: Vec<Outcome>) -> Result<Self> {
        let label = label.into();
        let dim = outcomes.first().map_or(0, |o| o.state.dim());
        if outcomes.len() != dim || dim == 0 {
            return Err(Error::InvalidModel(format!(
                "measurement `{label}` needs one outcome per basis vector"
            )));
        }
        for (i, a) in outcomes.iter().enumerate() {
            for b in &outcomes[i + 1..] {
                if a.state.overlap(&b.state)? > TOLERANCE {
                    return Err(Error::InvalidModel(format!(
                        "measurement `{label}` outcomes `{}` and `{}` are not orthogonal",
                        a.label, b.label
                    )));
                }
            }
        }
        Ok(Self { label, outcomes })
    }

    /// `{|τ⟩, |τ⊥⟩}` for a qubit state `|τ⟩`.
    pub fn from_state(label: impl Into<String>, state: &Ket) -> Result<Self> {
        let [x, y, z] = state.bloch_vector()?;
        let label = label.into();
        Self::new(
            label.clone(),
            vec![
                Outcome::new(format!("{label}+"), state.clone()),
                Outcome::new(format!("{label}-"), Ket::from_bloch([-x, -y, -z])?),
            ],
        )
    }

    pub fn computational() -> Self {
        Self {
            label: "Z".to_string(),
            outcomes: vec![
                Outcome::new("0", Ket::zero()),
                Outcome::new("1", Ket::one()),
            ],
        }
    }

    pub fn hadamard() -> Self {
        Self {
            label: "X".to_string(),
            outcomes: vec![
                Outcome::new("+", Ket::plus()),
                Outcome::new("-", Ket::minus()),
            ],
        }
    }

    pub fn circular() -> Self {
        Self {
            label: "Y".to_string(),
            outcomes: vec![
                Outcome::new("+i", Ket::plus_i()),
                Outcome::new("-i", Ket::minus_i()),
            ],
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn states(&self) -> Vec<Ket> {
        self.outcomes.iter().map(|o| o.state.clone()).collect()
    }
}

/// A labelled quantum preparation.
#[derive(Clone, Debug, PartialEq)]
pub struct Preparation {
    pub label: String,
    pub state: Ket,
}

impl Preparation {
    pub fn new(label: impl Into<String>, state: Ket) -> Self {
        Self {
            label: label.into(),
            state,
        }
    }

    /// The six Pauli eigenstates `0, 1, +, -, +i, -i`.
    pub fn pauli_eigenstates() -> Vec<Self> {
        vec![
            Self::new("0", Ket::zero()),
            Self::new("1", Ket::one()),
            Self::new("+", Ket::plus()),
            Self::new("-", Ket::minus()),
            Self::new("+i", Ket::plus_i()),
            Self::new("-i", Ket::minus_i()),
        ]
    }
}

/// `ξ(τ|λ)` for every outcome `τ` of one measurement, indexed
/// `[outcome][point]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResponseFunction {
    measurement: Measurement,
    table: Vec<Vec<f64>>,
}

impl ResponseFunction {
    /// Checks the table shape and that every entry lies in `[0, 1]`.
    /// Normalization across outcomes is a model invariant, reported by
    /// [`OntologicalModel::invariant_issues`].
    pub fn new(measurement: Measurement, table: Vec<Vec<f64>>) -> Result<Self> {
        if table.len() != measurement.outcomes.len() {
            return Err(Error::OutcomeCount {
                expected: measurement.outcomes.len(),
                found: table.len(),
            });
        }
        let width = table.first().map_or(0, Vec::len);
        for row in &table {
            if row.len() != width {
                return Err(Error::InvalidModel(format!(
                    "response table of `{}` is ragged",
                    measurement.label
                )));
            }
            if let Some(bad) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::InvalidModel(format!(
                    "response {bad} of `{}` lies outside [0, 1]",
                    measurement.label
                )));
            }
        }
        Ok(Self { measurement, table })
    }

    pub fn measurement(&self) -> &Measurement {
        &self.measurement
    }

    pub fn label(&self) -> &str {
        &self.measurement.label
    }

    pub fn table(&self) -> &[Vec<f64>] {
        &self.table
    }

    pub fn response(&self, outcome: usize, point: usize) -> f64 {
        self.table[outcome][point]
    }

    /// `max_λ |Σ_τ ξ(τ|λ) − 1|`
    pub fn normalization_defect(&self) -> f64 {
        let width = self.table.first().map_or(0, Vec::len);
        (0..width)
            .map(|p| libm::fabs(neumaier(self.table.iter().map(|row| row[p])) - 1.0))
            .fold(0.0, f64::max)
    }
}

/// A broken model invariant, as data.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelIssue {
    Unnormalized {
        preparation: String,
        mass: f64,
    },
    ResponseSum {
        measurement: String,
        defect: f64,
    },
    CoreViolation {
        preparation: String,
        measurement: String,
        point: usize,
        response: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OntologicalModel {
    space: OnticSpace,
    preparations: BTreeMap<String, EpistemicState>,
    measurements: BTreeMap<String, ResponseFunction>,
}

impl OntologicalModel {
    pub fn new(space: OnticSpace) -> Self {
        Self {
            space,
            preparations: BTreeMap::new(),
            measurements: BTreeMap::new(),
        }
    }

    pub fn space(&self) -> &OnticSpace {
        &self.space
    }

    /// Adds or replaces a preparation.
    pub fn insert_preparation(&mut self, eps: EpistemicState) -> Result<()> {
        if eps.density.len() != self.space.len() {
            return Err(Error::DimensionMismatch {
                expected: self.space.len(),
                found: eps.density.len(),
            });
        }
        self.preparations.insert(eps.label.clone(), eps);
        Ok(())
    }

    /// Adds or replaces a measurement.
    pub fn insert_measurement(&mut self, response: ResponseFunction) -> Result<()> {
        let width = response.table.first().map_or(0, Vec::len);
        if width != self.space.len() {
            return Err(Error::DimensionMismatch {
                expected: self.space.len(),
                found: width,
            });
        }
        self.measurements
            .insert(response.measurement.label.clone(), response);
        Ok(())
    }

    pub fn preparation(&self, label: &str) -> Result<&EpistemicState> {
        self.preparations
            .get(label)
            .ok_or_else(|| Error::UnknownPreparation(label.to_string()))
    }

    pub fn measurement(&self, label: &str) -> Result<&ResponseFunction> {
        self.measurements
            .get(label)
            .ok_or_else(|| Error::UnknownMeasurement(label.to_string()))
    }

    pub fn preparations(&self) -> impl Iterator<Item = &EpistemicState> {
        self.preparations.values()
    }

    pub fn measurements(&self) -> impl Iterator<Item = &ResponseFunction> {
        self.measurements.values()
    }

    /// `Σ_λ ξ(τ|λ)·μ(λ|prep)·w(λ)` for every outcome of `meas`.
    pub fn outcome_probabilities(&self, prep: &str, meas: &str) -> Result<Vec<f64>> {
        let eps = self.preparation(prep)?;
        let response = self.measurement(meas)?;
        Ok(response
            .table
            .iter()
            .map(|row| {
                neumaier(
                    row.iter()
                        .zip(&eps.density)
                        .zip(self.space.points())
                        .map(|((xi, mu), p)| xi * mu * p.weight),
                )
            })
            .collect())
    }

    /// Every broken invariant: normalization of each preparation, outcome
    /// sums of each response, and the core containment
    /// `support(ψ) ⊆ Core[ξ(ψ|·)]` for every measurement that has `ψ` as an
    /// outcome.
    pub fn invariant_issues(&self) -> Vec<ModelIssue> {
        let mut issues = Vec::new();
        let tolerance = match self.space.kind {
            SpaceKind::Discrete => NORMALIZATION_TOLERANCE,
            SpaceKind::SphereGrid { .. } => GRID_NORMALIZATION_TOLERANCE,
        };
        for eps in self.preparations.values() {
            let mass = eps.mass(&self.space);
            if libm::fabs(mass - 1.0) > tolerance {
                issues.push(ModelIssue::Unnormalized {
                    preparation: eps.label.clone(),
                    mass,
                });
            }
        }
        for r in self.measurements.values() {
            let defect = r.normalization_defect();
            if defect > RESPONSE_SUM_TOLERANCE {
                issues.push(ModelIssue::ResponseSum {
                    measurement: r.label().to_string(),
                    defect,
                });
            }
        }
        for eps in self.preparations.values() {
            let supp = support(eps, DEFAULT_SUPPORT_THRESHOLD);
            for r in self.measurements.values() {
                for (k, outcome) in r.measurement.outcomes.iter().enumerate() {
                    let same = outcome
                        .state
                        .overlap(&eps.state)
                        .is_ok_and(|o| o >= 1.0 - TOLERANCE);
                    if !same {
                        continue;
                    }
                    if let Some(&point) =
                        supp.iter().find(|&&p| r.table[k][p] < 1.0 - CORE_TOLERANCE)
                    {
                        issues.push(ModelIssue::CoreViolation {
                            preparation: eps.label.clone(),
                            measurement: r.label().to_string(),
                            point,
                            response: r.table[k][point],
                        });
                    }
                }
            }
        }
        issues
    }
}

/// `max_τ |Σ_λ ξ(τ|λ)·μ(λ|prep)·w(λ) − quantum_prob(τ)|`
pub fn born_residual(
    model: &OntologicalModel,
    prep: &str,
    meas: &str,
    quantum_prob: &[f64],
) -> Result<f64> {
    let model_prob = model.outcome_probabilities(prep, meas)?;
    if model_prob.len() != quantum_prob.len() {
        return Err(Error::OutcomeCount {
            expected: model_prob.len(),
            found: quantum_prob.len(),
        });
    }
    Ok(model_prob
        .iter()
        .zip(quantum_prob)
        .map(|(m, q)| libm::fabs(m - q))
        .fold(0.0, f64::max))
}

/// [`born_residual`] against the quantum probabilities of the stored kets.
pub fn born_residual_quantum(model: &OntologicalModel, prep: &str, meas: &str) -> Result<f64> {
    let state = model.preparation(prep)?.state.clone();
    let basis = model.measurement(meas)?.measurement.states();
    born_residual(model, prep, meas, &born_probabilities(&state, &basis)?)
}

/// Indices with density strictly above `threshold`.
pub fn support(eps: &EpistemicState, threshold: f64) -> Vec<usize> {
    eps.density
        .iter()
        .enumerate()
        .filter(|(_, d)| **d > threshold)
        .map(|(i, _)| i)
        .collect()
}

/// `∫_{support(φ)} μ(λ|ψ) dλ`
pub fn overlap_mass(model: &OntologicalModel, psi: &str, phi: &str) -> Result<f64> {
    let mu_psi = model.preparation(psi)?;
    let mu_phi = model.preparation(phi)?;
    let points = model.space.points();
    Ok(neumaier(
        support(mu_phi, DEFAULT_SUPPORT_THRESHOLD)
            .into_iter()
            .map(|i| mu_psi.density[i] * points[i].weight),
    ))
}

/// `|⟨φ|ψ⟩|²` of the stored kets.
pub fn quantum_overlap(model: &OntologicalModel, psi: &str, phi: &str) -> Result<f64> {
    model
        .preparation(phi)?
        .state
        .overlap(&model.preparation(psi)?.state)
}

/// An overlap fraction together with its consistency flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Omega {
    /// `overlap_mass / quantum_overlap` before clamping.
    pub raw: f64,
    /// `raw` clamped to `[0, 1]`.
    pub value: f64,
    /// `raw` exceeded `1 + OMEGA_TOLERANCE`: the model puts more mass on the
    /// support of `φ` than the Born rule allows.
    pub inconsistent: bool,
}

/// Overlap fraction: `overlap_mass(ψ, φ) / |⟨φ|ψ⟩|²`.
pub fn omega(
    model: &OntologicalModel,
    psi: &str,
    phi: &str,
    quantum_overlap: f64,
) -> Result<Omega> {
    if !quantum_overlap.is_finite() || !(0.0..=1.0 + TOLERANCE).contains(&quantum_overlap) {
        return Err(Error::InvalidOverlap(quantum_overlap));
    }
    if quantum_overlap <= TOLERANCE {
        return Err(Error::OrthogonalPair);
    }
    let raw = overlap_mass(model, psi, phi)? / quantum_overlap;
    Ok(Omega {
        raw,
        value: raw.clamp(0.0, 1.0),
        inconsistent: raw > 1.0 + OMEGA_TOLERANCE,
    })
}

/// Kochen–Specker qubit model on a `polar × azimuthal` sphere grid:
/// `μ_ψ(λ) = (1/π)(n̂_ψ·λ̂)` where `n̂_ψ·λ̂ > 0` (zero elsewhere) and
/// `ξ(φ|λ) = [n̂_φ·λ̂ ≥ 0]`.
///
/// Two-outcome bases have antipodal Bloch vectors, so a point exactly on the
/// boundary great circle answers 1 to both outcomes. Such points only occur
/// when a grid node lands on the circle to rounding precision; the response
/// is then split 1/2 each so the outcome sum stays 1.
pub fn ks_model(
    polar_steps: usize,
    azimuthal_steps: usize,
    preparations: &[Preparation],
    measurements: &[Measurement],
) -> Result<OntologicalModel> {
    let space = OnticSpace::sphere_grid(polar_steps, azimuthal_steps)?;
    let directions: Vec<[f64; 3]> = space
        .points()
        .iter()
        .map(|p| p.direction.expect("sphere grid points carry directions"))
        .collect();
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];

    let mut model = OntologicalModel::new(space);
    for prep in preparations {
        let n = prep.state.bloch_vector()?;
        let density = directions
            .iter()
            .map(|l| {
                let c = dot(&n, l);
                if c > 0.0 {
                    c / PI
                } else {
                    0.0
                }
            })
            .collect();
        model.insert_preparation(EpistemicState::new(
            prep.label.clone(),
            prep.state.clone(),
            density,
        )?)?;
    }
    for meas in measurements {
        let normals = meas
            .outcomes()
            .iter()
            .map(|o| o.state.bloch_vector())
            .collect::<Result<Vec<_>>>()?;
        let mut table = vec![Vec::with_capacity(directions.len()); normals.len()];
        for l in &directions {
            let hits: Vec<bool> = normals.iter().map(|n| dot(n, l) >= 0.0).collect();
            let count = hits.iter().filter(|h| **h).count().max(1) as f64;
            for (row, hit) in table.iter_mut().zip(&hits) {
                row.push(if *hit { 1.0 / count } else { 0.0 });
            }
        }
        model.insert_measurement(ResponseFunction::new(meas.clone(), table)?)?;
    }
    Ok(model)
}

/// ψ-ontic baseline: one unit-weight point per distinct preparation (up to
/// global phase), density 1 on its own point, and
/// `ξ(τ|λ_χ) = |⟨τ|χ⟩|²`.
pub fn psi_ontic_model(
    preparations: &[Preparation],
    measurements: &[Measurement],
) -> Result<OntologicalModel> {
    let mut representatives: Vec<Ket> = Vec::new();
    let mut owner = Vec::with_capacity(preparations.len());
    for prep in preparations {
        let mut found = None;
        for (i, rep) in representatives.iter().enumerate() {
            if rep.overlap(&prep.state)? >= 1.0 - TOLERANCE {
                found = Some(i);
                break;
            }
        }
        let index = match found {
            Some(i) => i,
            None => {
                representatives.push(prep.state.clone());
                representatives.len() - 1
            }
        };
        owner.push(index);
    }
    let directions = representatives
        .iter()
        .map(|k| k.bloch_vector().ok())
        .collect();
    let mut model = OntologicalModel::new(OnticSpace::discrete_with_directions(directions));
    for (prep, &index) in preparations.iter().zip(&owner) {
        let mut density = vec![0.0; representatives.len()];
        density[index] = 1.0;
        model.insert_preparation(EpistemicState::new(
            prep.label.clone(),
            prep.state.clone(),
            density,
        )?)?;
    }
    for meas in measurements {
        let table = meas
            .outcomes()
            .iter()
            .map(|o| {
                representatives
                    .iter()
                    .map(|chi| o.state.overlap(chi).map(|p| p.clamp(0.0, 1.0)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        model.insert_measurement(ResponseFunction::new(meas.clone(), table)?)?;
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn pauli_bases() -> Vec<Measurement> {
        vec![
            Measurement::computational(),
            Measurement::hadamard(),
            Measurement::circular(),
        ]
    }

    fn ks_default() -> OntologicalModel {
        ks_model(200, 400, &Preparation::pauli_eigenstates(), &pauli_bases()).unwrap()
    }

    fn max_battery_residual(model: &OntologicalModel) -> f64 {
        let mut worst = 0.0_f64;
        for p in Preparation::pauli_eigenstates() {
            for m in pauli_bases() {
                worst = worst.max(born_residual_quantum(model, &p.label, m.label()).unwrap());
            }
        }
        worst
    }

    #[test]
    fn sphere_grid_weights_cover_the_sphere() {
        for (p, a) in [(8, 16), (200, 400), (33, 17)] {
            let space = OnticSpace::sphere_grid(p, a).unwrap();
            assert_eq!(space.len(), p * a);
            assert!((space.total_measure() - 4.0 * PI).abs() < 1e-9);
            assert!(space.points().iter().all(|pt| pt.weight > 0.0));
        }
    }

    #[test]
    fn degenerate_grid_is_rejected() {
        assert_eq!(
            OnticSpace::sphere_grid(4, 400),
            Err(Error::DegenerateGrid {
                polar: 4,
                azimuthal: 400
            })
        );
        assert!(ks_model(200, 7, &[], &[]).is_err());
    }

    #[test]
    fn support_edge_cases() {
        let uniform = EpistemicState::new("u", Ket::zero(), vec![0.25; 4]).unwrap();
        assert_eq!(
            support(&uniform, DEFAULT_SUPPORT_THRESHOLD),
            vec![0, 1, 2, 3]
        );
        let spike = EpistemicState::new("s", Ket::zero(), vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(support(&spike, DEFAULT_SUPPORT_THRESHOLD), vec![2]);
        assert!(EpistemicState::new("n", Ket::zero(), vec![-0.1, 1.1]).is_err());
    }

    #[test]
    fn ks_support_of_zero_is_the_open_upper_hemisphere() {
        let model = ks_model(16, 32, &[Preparation::new("0", Ket::zero())], &[]).unwrap();
        let supp = support(model.preparation("0").unwrap(), DEFAULT_SUPPORT_THRESHOLD);
        let expected: Vec<usize> = model
            .space()
            .points()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.direction.unwrap()[2] > 0.0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(supp, expected);
        assert_eq!(supp.len(), 8 * 32);
    }

    #[test]
    fn ks_normalization_and_born_rule() {
        let model = ks_default();
        let mass = model.preparation("0").unwrap().mass(model.space());
        assert!((mass - 1.0).abs() < 1e-3);
        assert!(born_residual(&model, "0", "Z", &[1.0, 0.0]).unwrap() < GRID_BORN_TOLERANCE);
        assert!(born_residual(&model, "+", "Z", &[0.5, 0.5]).unwrap() < GRID_BORN_TOLERANCE);
        assert!(max_battery_residual(&model) < GRID_BORN_TOLERANCE);
        assert!(
            model.invariant_issues().is_empty(),
            "{:?}",
            model.invariant_issues()
        );
    }

    // Independent oracle: composite Simpson rule over θ ∈ [0, π/2] of
    // (1/π)·cos θ·sin θ, times the azimuthal extent π of the half-lune x > 0.
    fn half_lune_mass_oracle() -> f64 {
        let n = 2000;
        let h = (PI / 2.0) / n as f64;
        let f = |t: f64| t.cos() * t.sin() / PI;
        let mut s = f(0.0) + f(PI / 2.0);
        for k in 1..n {
            s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0 * PI
    }

    #[test]
    fn ks_overlap_of_zero_and_plus() {
        let oracle = half_lune_mass_oracle();
        assert!((oracle - 0.5).abs() < 1e-9);
        let model = ks_default();
        let mass = overlap_mass(&model, "0", "+").unwrap();
        assert!((mass - oracle).abs() < 1e-3, "{mass}");
        assert!((overlap_mass(&model, "0", "0").unwrap() - 1.0).abs() < 1e-3);
        let w = omega(&model, "0", "+", 0.5).unwrap();
        assert!((w.value - 1.0).abs() < 2e-3);
        assert!(!w.inconsistent);
    }

    #[test]
    fn omega_of_a_state_with_itself_is_one() {
        let preps = Preparation::pauli_eigenstates();
        let exact = psi_ontic_model(&preps, &pauli_bases()).unwrap();
        assert_eq!(omega(&exact, "+i", "+i", 1.0).unwrap().value, 1.0);
        let ks = ks_model(100, 200, &preps, &pauli_bases()).unwrap();
        assert!((omega(&ks, "-", "-", 1.0).unwrap().value - 1.0).abs() < 2e-3);
    }

    #[test]
    fn omega_rejects_orthogonal_pairs() {
        let model = psi_ontic_model(&Preparation::pauli_eigenstates(), &[]).unwrap();
        assert_eq!(omega(&model, "0", "1", 0.0), Err(Error::OrthogonalPair));
        assert!(matches!(
            omega(&model, "0", "1", -0.5),
            Err(Error::InvalidOverlap(_))
        ));
        assert!(matches!(
            omega(&model, "0", "nope", 0.5),
            Err(Error::UnknownPreparation(_))
        ));
    }

    #[test]
    fn omega_flags_excess_overlap() {
        let model = ks_default();
        // Claiming a quantum overlap of 1/4 for a pair whose epistemic
        // overlap is 1/2 makes the raw ratio 2.
        let w = omega(&model, "0", "+", 0.25).unwrap();
        assert!(w.inconsistent);
        assert_eq!(w.value, 1.0);
        assert!((w.raw - 2.0).abs() < 1e-2);
    }

    #[test]
    fn psi_ontic_baseline() {
        let preps = Preparation::pauli_eigenstates();
        let model = psi_ontic_model(&preps, &pauli_bases()).unwrap();
        assert_eq!(model.space().len(), 6);
        for a in &preps {
            for b in &preps {
                if a.label != b.label {
                    assert_eq!(overlap_mass(&model, &a.label, &b.label).unwrap(), 0.0);
                }
            }
            for m in pauli_bases() {
                assert!(born_residual_quantum(&model, &a.label, m.label()).unwrap() < 1e-12);
            }
        }
        assert!(born_residual(&model, "0", "Z", &[1.0, 0.0]).unwrap() < EXACT_BORN_TOLERANCE);
        assert_eq!(omega(&model, "0", "+", 0.5).unwrap().value, 0.0);
        assert!(model.invariant_issues().is_empty());
    }

    #[test]
    fn psi_ontic_merges_states_equal_up_to_phase() {
        let phased = Ket::new(vec![
            crate::qcore::C64::new(0.0, 1.0),
            crate::qcore::C64::new(0.0, 0.0),
        ])
        .unwrap();
        let preps = vec![
            Preparation::new("0", Ket::zero()),
            Preparation::new("i0", phased),
        ];
        let model = psi_ontic_model(&preps, &[]).unwrap();
        assert_eq!(model.space().len(), 1);
    }

    #[test]
    fn corrupted_response_shows_up_in_residual() {
        let mut model =
            ks_model(50, 100, &Preparation::pauli_eigenstates(), &pauli_bases()).unwrap();
        let n = model.space().len();
        let corrupted = ResponseFunction::new(
            Measurement::computational(),
            vec![vec![1.0; n], vec![0.0; n]],
        )
        .unwrap();
        model.insert_measurement(corrupted).unwrap();
        let residual = born_residual(&model, "+", "Z", &[0.5, 0.5]).unwrap();
        assert!(residual > 0.1);
        assert!((residual - 0.5).abs() < 1e-2);
        let mut bad = model.clone();
        let lopsided = ResponseFunction::new(
            Measurement::computational(),
            vec![vec![1.0; n], vec![1.0; n]],
        )
        .unwrap();
        bad.insert_measurement(lopsided).unwrap();
        assert!(bad
            .invariant_issues()
            .iter()
            .any(|i| matches!(i, ModelIssue::ResponseSum { .. })));
    }

    #[test]
    fn core_violation_is_reported() {
        let preps = vec![Preparation::new("0", Ket::zero())];
        let mut model = psi_ontic_model(&preps, &[]).unwrap();
        let flipped =
            ResponseFunction::new(Measurement::computational(), vec![vec![0.0], vec![1.0]])
                .unwrap();
        model.insert_measurement(flipped).unwrap();
        assert!(matches!(
            model.invariant_issues().as_slice(),
            [ModelIssue::CoreViolation { .. }]
        ));
    }

    #[test]
    fn label_and_shape_errors() {
        let model = ks_model(8, 16, &Preparation::pauli_eigenstates(), &pauli_bases()).unwrap();
        assert!(matches!(
            born_residual(&model, "0", "W", &[1.0, 0.0]),
            Err(Error::UnknownMeasurement(_))
        ));
        assert!(matches!(
            born_residual(&model, "0", "Z", &[1.0]),
            Err(Error::OutcomeCount { .. })
        ));
        let mut m = model.clone();
        assert!(m
            .insert_preparation(EpistemicState::new("x", Ket::zero(), vec![1.0]).unwrap())
            .is_err());
        assert!(Measurement::new(
            "bad",
            vec![
                Outcome::new("a", Ket::zero()),
                Outcome::new("b", Ket::plus())
            ]
        )
        .is_err());
    }

    // Residual on the Pauli battery should fall like Δ²: halving the spacing
    // divides it by roughly four.
    #[test]
    fn grid_residual_converges_quadratically() {
        let residual = |p, a| {
            max_battery_residual(
                &ks_model(p, a, &Preparation::pauli_eigenstates(), &pauli_bases()).unwrap(),
            )
        };
        let coarse = residual(16, 32);
        let fine = residual(32, 64);
        let finer = residual(64, 128);
        assert!(coarse / fine >= 3.0, "{coarse} / {fine}");
        assert!(fine / finer >= 3.0, "{fine} / {finer}");
    }

    fn random_qubit(rng: &mut impl Rng) -> Ket {
        let z: f64 = rng.random_range(-1.0..1.0);
        let phi: f64 = rng.random_range(0.0..2.0 * PI);
        Ket::qubit(z.acos(), phi)
    }

    #[test]
    fn ks_overlap_bounded_by_quantum_overlap_and_symmetric() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let preps: Vec<Preparation> = (0..48)
            .map(|i| Preparation::new(format!("r{i}"), random_qubit(&mut rng)))
            .collect();
        let model = ks_model(200, 400, &preps, &[]).unwrap();
        for pair in preps.chunks(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let q = a.state.overlap(&b.state).unwrap();
            let ab = overlap_mass(&model, &a.label, &b.label).unwrap();
            let ba = overlap_mass(&model, &b.label, &a.label).unwrap();
            assert!(ab <= q + OMEGA_TOLERANCE, "{ab} > {q}");
            assert!((ab - ba).abs() <= OMEGA_TOLERANCE);
            if q > 0.25 {
                let w = omega(&model, &a.label, &b.label, q).unwrap();
                assert!(w.raw <= 1.0 + OMEGA_TOLERANCE && !w.inconsistent);
            }
        }
    }
}
