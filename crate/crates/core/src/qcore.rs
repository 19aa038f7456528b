//! State vectors and operators over qubit registers of at most three qubits.
//!
//! Basis index convention: for a three-qubit register `|a b c⟩` the index is
//! `4a + 2b + c`, so party A is the most significant qubit.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sum::neumaier;

pub type C64 = Complex64;

/// Absolute tolerance for every exact linear-algebra comparison.
pub const TOLERANCE: f64 = 1e-12;

/// Largest register dimension handled here (three qubits).
pub const MAX_DIM: usize = 8;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

fn check_dim(dim: usize) -> Result<()> {
    if (2..=MAX_DIM).contains(&dim) && dim.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidDimension(dim))
    }
}

fn norm_sqr(amplitudes: &[C64]) -> f64 {
    neumaier(amplitudes.iter().map(|a| a.norm_sqr()))
}

/// A normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amplitudes: Vec<C64>,
}

impl Ket {
    /// Accepts `amplitudes` as a state if the dimension is 2, 4 or 8 and the
    /// squared norm is 1 within [`TOLERANCE`].
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let n = norm_sqr(&amplitudes);
        if libm::fabs(n - 1.0) > TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let n = norm_sqr(&amplitudes);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        let scale = 1.0 / libm::sqrt(n);
        for a in &mut amplitudes {
            *a *= scale;
        }
        Self::new(amplitudes)
    }

    /// Computational basis state `|index⟩` of a `dim`-dimensional register.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index,
            });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self { amplitudes })
    }

    pub fn zero() -> Self {
        Self {
            amplitudes: vec![ONE, ZERO],
        }
    }

    pub fn one() -> Self {
        Self {
            amplitudes: vec![ZERO, ONE],
        }
    }

    /// `(|0⟩ + |1⟩)/√2`
    pub fn plus() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            amplitudes: vec![h, h],
        }
    }

    /// `(|0⟩ − |1⟩)/√2`
    pub fn minus() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            amplitudes: vec![h, -h],
        }
    }

    /// `(|0⟩ + i|1⟩)/√2`
    pub fn plus_i() -> Self {
        Self {
            amplitudes: vec![C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2)],
        }
    }

    /// `(|0⟩ − i|1⟩)/√2`
    pub fn minus_i() -> Self {
        Self {
            amplitudes: vec![C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, -FRAC_1_SQRT_2)],
        }
    }

    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`
    pub fn qubit(theta: f64, phi: f64) -> Self {
        let c = libm::cos(theta / 2.0);
        let s = libm::sin(theta / 2.0);
        Self {
            amplitudes: vec![
                C64::new(c, 0.0),
                C64::new(s * libm::cos(phi), s * libm::sin(phi)),
            ],
        }
    }

    /// Qubit state with the given Bloch direction. The vector need not be
    /// normalized but must be nonzero.
    pub fn from_bloch(direction: [f64; 3]) -> Result<Self> {
        let [x, y, z] = direction;
        let r = libm::sqrt(x * x + y * y + z * z);
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: r * r });
        }
        let theta = libm::acos((z / r).clamp(-1.0, 1.0));
        let phi = libm::atan2(y, x);
        Ok(Self::qubit(theta, phi))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let terms = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b);
        let re = neumaier(terms.clone().map(|t| t.re));
        let im = neumaier(terms.map(|t| t.im));
        Ok(C64::new(re, im))
    }

    /// `|⟨self|other⟩|²`
    pub fn overlap(&self, other: &Ket) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Bloch vector `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of a qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            });
        }
        let (a, b) = (self.amplitudes[0], self.amplitudes[1]);
        let cross = a.conj() * b;
        Ok([2.0 * cross.re, 2.0 * cross.im, a.norm_sqr() - b.norm_sqr()])
    }

    /// Largest per-amplitude modulus difference.
    pub fn max_abs_diff(&self, other: &Ket) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Kronecker product `a ⊗ b`.
///
/// The product of two states is again normalized; the only failure is a
/// result wider than [`MAX_DIM`].
pub fn tensor(a: &Ket, b: &Ket) -> Result<Ket> {
    let dim = a.dim() * b.dim();
    check_dim(dim)?;
    let amplitudes = a
        .amplitudes
        .iter()
        .flat_map(|x| b.amplitudes.iter().map(move |y| x * y))
        .collect();
    Ok(Ket { amplitudes })
}

/// A dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>,
}

impl Operator {
    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        Ok(Self { dim, entries })
    }

    pub fn pauli_x() -> Self {
        Self {
            dim: 2,
            entries: vec![ZERO, ONE, ONE, ZERO],
        }
    }

    pub fn pauli_y() -> Self {
        Self {
            dim: 2,
            entries: vec![ZERO, -I, I, ZERO],
        }
    }

    pub fn pauli_z() -> Self {
        Self {
            dim: 2,
            entries: vec![ONE, ZERO, ZERO, -ONE],
        }
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(state: &Ket) -> Self {
        let dim = state.dim();
        let a = &state.amplitudes;
        let entries = (0..dim * dim)
            .map(|k| a[k / dim] * a[k % dim].conj())
            .collect();
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        Self {
            dim: d,
            entries: (0..d * d)
                .map(|k| self.entries[(k % d) * d + k / d].conj())
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Operator) -> Result<Self> {
        self.same_dim(other)?;
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                entries[r * d + c] = (0..d).map(|k| self.entry(r, k) * other.entry(k, c)).sum();
            }
        }
        Ok(Self { dim: d, entries })
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Operator) -> Result<Self> {
        let d = self.dim * other.dim;
        check_dim(d)?;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                entries[r * d + c] = self.entry(r / other.dim, c / other.dim)
                    * other.entry(r % other.dim, c % other.dim);
            }
        }
        Ok(Self { dim: d, entries })
    }

    /// Raw matrix-vector product; the result is not renormalized.
    pub fn apply_to(&self, amplitudes: &[C64]) -> Result<Vec<C64>> {
        if amplitudes.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: amplitudes.len(),
            });
        }
        Ok((0..self.dim)
            .map(|r| {
                (0..self.dim)
                    .map(|c| self.entry(r, c) * amplitudes[c])
                    .sum()
            })
            .collect())
    }

    /// Applies a norm-preserving operator to a state.
    pub fn apply(&self, state: &Ket) -> Result<Ket> {
        Ket::new(self.apply_to(&state.amplitudes)?)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.same_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest entrywise deviation from `A = A†`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint()).unwrap_or(f64::INFINITY)
    }

    /// Largest entrywise deviation from `U†U = I`.
    pub fn unitarity_defect(&self) -> f64 {
        let product = self.adjoint().matmul(self).expect("square operator");
        let id = Operator::identity(self.dim).expect("valid dimension");
        product.max_abs_diff(&id).expect("same dimension")
    }

    /// Largest entrywise deviation from `A² = I`.
    pub fn involution_defect(&self) -> f64 {
        let square = self.matmul(self).expect("square operator");
        let id = Operator::identity(self.dim).expect("valid dimension");
        square.max_abs_diff(&id).expect("same dimension")
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= TOLERANCE
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= TOLERANCE
    }

    fn same_dim(&self, other: &Operator) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            })
        }
    }
}

fn real_part(value: C64) -> Result<f64> {
    if libm::fabs(value.im) > TOLERANCE {
        return Err(Error::ComplexExpectation { residue: value.im });
    }
    Ok(value.re)
}

fn require_hermitian(obs: &Operator) -> Result<()> {
    let deviation = obs.hermiticity_defect();
    if deviation > TOLERANCE {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// `⟨state|obs|state⟩` for a Hermitian observable.
pub fn expectation(state: &Ket, obs: &Operator) -> Result<f64> {
    require_hermitian(obs)?;
    let image = obs.apply_to(&state.amplitudes)?;
    let terms = state
        .amplitudes
        .iter()
        .zip(&image)
        .map(|(a, b)| a.conj() * b);
    let re = neumaier(terms.clone().map(|t| t.re));
    let im = neumaier(terms.map(|t| t.im));
    real_part(C64::new(re, im))
}

/// `Tr(ρ·obs)` for a density operator `ρ`.
pub fn expectation_density(rho: &Operator, obs: &Operator) -> Result<f64> {
    require_hermitian(obs)?;
    let product = rho.matmul(obs)?;
    let d = rho.dim();
    let re = neumaier((0..d).map(|k| product.entry(k, k).re));
    let im = neumaier((0..d).map(|k| product.entry(k, k).im));
    real_part(C64::new(re, im))
}

/// Outcome probabilities `|⟨τ_k|ψ⟩|²` for a measurement basis.
pub fn born_probabilities(state: &Ket, basis: &[Ket]) -> Result<Vec<f64>> {
    basis.iter().map(|tau| tau.overlap(state)).collect()
}

/// The machine unitary on `A ⊗ B ⊗ C` with reference state `|r⟩ = |0⟩`.
///
/// Realized as a controlled flip from A onto B followed by a controlled flip
/// from A onto C, so `|0 0 0⟩ ↦ |000⟩` and `|1 0 0⟩ ↦ |111⟩`.
pub fn machine_unitary() -> Operator {
    let mut entries = vec![ZERO; MAX_DIM * MAX_DIM];
    for input in 0..MAX_DIM {
        let a = (input >> 2) & 1;
        let b = ((input >> 1) & 1) ^ a;
        let c = (input & 1) ^ a;
        let output = (a << 2) | (b << 1) | c;
        entries[output * MAX_DIM + input] = ONE;
    }
    Operator {
        dim: MAX_DIM,
        entries,
    }
}

/// `(|000⟩ + |111⟩)/√2`
pub fn ghz_state() -> Ket {
    let mut amplitudes = vec![ZERO; MAX_DIM];
    amplitudes[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    amplitudes[7] = C64::new(FRAC_1_SQRT_2, 0.0);
    Ket { amplitudes }
}

/// Six single-qubit ±1-valued observables, two per party.
#[derive(Clone, Debug, PartialEq)]
pub struct MerminSettings {
    pub a0: Operator,
    pub a1: Operator,
    pub b0: Operator,
    pub b1: Operator,
    pub c0: Operator,
    pub c1: Operator,
}

impl MerminSettings {
    /// Validates that every observable is a Hermitian qubit involution.
    pub fn new(
        a0: Operator,
        a1: Operator,
        b0: Operator,
        b1: Operator,
        c0: Operator,
        c1: Operator,
    ) -> Result<Self> {
        for obs in [&a0, &a1, &b0, &b1, &c0, &c1] {
            if obs.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: obs.dim(),
                });
            }
            require_hermitian(obs)?;
            let deviation = obs.involution_defect();
            if deviation > TOLERANCE {
                return Err(Error::NotDichotomic { deviation });
            }
        }
        Ok(Self {
            a0,
            a1,
            b0,
            b1,
            c0,
            c1,
        })
    }

    /// `a0 = X, a1 = Y, b0 = X, b1 = Y, c0 = −Y, c1 = X`, which reaches 4 on
    /// `(|000⟩ + |111⟩)/√2`.
    pub fn canonical() -> Self {
        let x = Operator::pauli_x();
        let y = Operator::pauli_y();
        Self {
            a0: x.clone(),
            a1: y.clone(),
            b0: x.clone(),
            b1: y.clone(),
            c0: y.scale(-ONE),
            c1: x,
        }
    }

    /// The same observable for every setting.
    pub fn uniform(obs: Operator) -> Result<Self> {
        Self::new(
            obs.clone(),
            obs.clone(),
            obs.clone(),
            obs.clone(),
            obs.clone(),
            obs,
        )
    }

    /// The four three-party correlator observables in the order
    /// `a0b0c1, a0b1c0, a1b0c0, a1b1c1`.
    pub fn correlators(&self) -> [Operator; 4] {
        let triple = |a: &Operator, b: &Operator, c: &Operator| {
            a.kron(b)
                .and_then(|ab| ab.kron(c))
                .expect("qubit observables")
        };
        [
            triple(&self.a0, &self.b0, &self.c1),
            triple(&self.a0, &self.b1, &self.c0),
            triple(&self.a1, &self.b0, &self.c0),
            triple(&self.a1, &self.b1, &self.c1),
        ]
    }
}

/// Mermin sign pattern applied to the four correlators.
pub const MERMIN_SIGNS: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

fn require_three_qubits(dim: usize) -> Result<()> {
    if dim != MAX_DIM {
        return Err(Error::DimensionMismatch {
            expected: MAX_DIM,
            found: dim,
        });
    }
    Ok(())
}

/// `⟨a0b0c1⟩ + ⟨a0b1c0⟩ + ⟨a1b0c0⟩ − ⟨a1b1c1⟩` on a three-qubit state.
pub fn mermin_value(state: &Ket, settings: &MerminSettings) -> Result<f64> {
    require_three_qubits(state.dim())?;
    let mut terms = [0.0; 4];
    for (term, (obs, sign)) in terms
        .iter_mut()
        .zip(settings.correlators().iter().zip(MERMIN_SIGNS))
    {
        *term = sign * expectation(state, obs)?;
    }
    Ok(neumaier(terms))
}

/// Mermin value of a density operator, term by term through `Tr(ρ·O)`.
pub fn mermin_value_density(rho: &Operator, settings: &MerminSettings) -> Result<f64> {
    require_three_qubits(rho.dim())?;
    let mut terms = [0.0; 4];
    for (term, (obs, sign)) in terms
        .iter_mut()
        .zip(settings.correlators().iter().zip(MERMIN_SIGNS))
    {
        *term = sign * expectation_density(rho, obs)?;
    }
    Ok(neumaier(terms))
}
