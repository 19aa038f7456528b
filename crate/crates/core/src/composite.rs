//! Tripartite ontic states, local strategies and machine dynamics.
//!
//! A composite ontic state is either a local triple `(λA, λB, λC)` or an
//! element of the nonlocal sector, which has no per-party decomposition and
//! is identified only by an opaque tag.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest Mermin value any assignment may give a nonlocal state.
pub const ALGEBRAIC_MAX: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NonlocalTag(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CompositeOnticState {
    Local { a: usize, b: usize, c: usize },
    Nonlocal(NonlocalTag),
}

impl CompositeOnticState {
    pub fn local(a: usize, b: usize, c: usize) -> Self {
        Self::Local { a, b, c }
    }

    pub fn is_local(&self) -> bool {
        matches!(self, Self::Local { .. })
    }
}

/// A ±1 outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dichotomic {
    Plus,
    Minus,
}

impl Dichotomic {
    pub fn value(self) -> i32 {
        match self {
            Self::Plus => 1,
            Self::Minus => -1,
        }
    }

    fn from_bit(bit: bool) -> Self {
        if bit {
            Self::Minus
        } else {
            Self::Plus
        }
    }
}

/// Deterministic outcomes for both settings of all three parties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalStrategy {
    pub a0: Dichotomic,
    pub a1: Dichotomic,
    pub b0: Dichotomic,
    pub b1: Dichotomic,
    pub c0: Dichotomic,
    pub c1: Dichotomic,
}

impl LocalStrategy {
    pub const COUNT: usize = 64;

    /// Bit `k` of `index` set means the `k`-th setting (in field order)
    /// answers −1.
    pub fn from_index(index: usize) -> Option<Self> {
        if index >= Self::COUNT {
            return None;
        }
        let bit = |k: usize| Dichotomic::from_bit(index >> k & 1 == 1);
        Some(Self {
            a0: bit(0),
            a1: bit(1),
            b0: bit(2),
            b1: bit(3),
            c0: bit(4),
            c1: bit(5),
        })
    }

    pub fn from_parties(a: PartyResponse, b: PartyResponse, c: PartyResponse) -> Self {
        Self {
            a0: a.setting0,
            a1: a.setting1,
            b0: b.setting0,
            b1: b.setting1,
            c0: c.setting0,
            c1: c.setting1,
        }
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (0..Self::COUNT).filter_map(Self::from_index)
    }
}

/// `a0·b0·c1 + a0·b1·c0 + a1·b0·c0 − a1·b1·c1`
pub fn strategy_mermin(s: &LocalStrategy) -> i32 {
    let (a0, a1) = (s.a0.value(), s.a1.value());
    let (b0, b1) = (s.b0.value(), s.b1.value());
    let (c0, c1) = (s.c0.value(), s.c1.value());
    a0 * b0 * c1 + a0 * b1 * c0 + a1 * b0 * c0 - a1 * b1 * c1
}

/// Largest Mermin value over every deterministic local strategy.
pub fn local_mermin_max() -> i32 {
    LocalStrategy::all()
        .map(|s| strategy_mermin(&s))
        .max()
        .expect("64 strategies")
}

/// Smallest Mermin value over every deterministic local strategy.
pub fn local_mermin_min() -> i32 {
    LocalStrategy::all()
        .map(|s| strategy_mermin(&s))
        .min()
        .expect("64 strategies")
}

/// Deterministic answers of one party's ontic state to its two settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartyResponse {
    pub setting0: Dichotomic,
    pub setting1: Dichotomic,
}

impl PartyResponse {
    pub const PLUS: Self = Self {
        setting0: Dichotomic::Plus,
        setting1: Dichotomic::Plus,
    };
}

/// Per-party response tables indexed by local ontic state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalResponses {
    pub a: Vec<PartyResponse>,
    pub b: Vec<PartyResponse>,
    pub c: Vec<PartyResponse>,
}

impl LocalResponses {
    /// Every ontic state of every party answers `response`.
    pub fn uniform(sizes: [usize; 3], response: PartyResponse) -> Self {
        Self {
            a: alloc::vec![response; sizes[0]],
            b: alloc::vec![response; sizes[1]],
            c: alloc::vec![response; sizes[2]],
        }
    }

    pub fn induced_strategy(&self, a: usize, b: usize, c: usize) -> Result<LocalStrategy> {
        let lookup = |table: &[PartyResponse], i: usize| {
            table.get(i).copied().ok_or(Error::DimensionMismatch {
                expected: table.len(),
                found: i,
            })
        };
        Ok(LocalStrategy::from_parties(
            lookup(&self.a, a)?,
            lookup(&self.b, b)?,
            lookup(&self.c, c)?,
        ))
    }
}

/// Externally assigned Mermin values for nonlocal tags.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NonlocalAssignment {
    values: BTreeMap<NonlocalTag, f64>,
}

impl NonlocalAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(&mut self, tag: NonlocalTag, value: f64) -> Result<()> {
        if !(-ALGEBRAIC_MAX..=ALGEBRAIC_MAX).contains(&value) {
            return Err(Error::AssignmentOutOfRange(value));
        }
        self.values.insert(tag, value);
        Ok(())
    }

    pub fn get(&self, tag: NonlocalTag) -> Option<f64> {
        self.values.get(&tag).copied()
    }
}

/// Mermin value carried by a composite ontic state: the induced strategy's
/// value for a local triple, the assigned value for a nonlocal tag.
pub fn composite_mermin(
    state: &CompositeOnticState,
    responses: &LocalResponses,
    assignment: &NonlocalAssignment,
) -> Result<f64> {
    match *state {
        CompositeOnticState::Local { a, b, c } => Ok(f64::from(strategy_mermin(
            &responses.induced_strategy(a, b, c)?,
        ))),
        CompositeOnticState::Nonlocal(tag) => {
            assignment.get(tag).ok_or(Error::UnassignedNonlocal(tag.0))
        }
    }
}

/// Supports of one single-party preparation in each of the three local
/// ontic spaces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartySupports {
    pub a: BTreeSet<usize>,
    pub b: BTreeSet<usize>,
    pub c: BTreeSet<usize>,
}

impl PartySupports {
    pub fn contains(&self, a: usize, b: usize, c: usize) -> bool {
        self.a.contains(&a) && self.b.contains(&b) && self.c.contains(&c)
    }

    pub fn contains_state(&self, state: &CompositeOnticState) -> bool {
        match *state {
            CompositeOnticState::Local { a, b, c } => self.contains(a, b, c),
            CompositeOnticState::Nonlocal(_) => false,
        }
    }
}

/// Deterministic ontic action of the machine on a finite composite space.
#[derive(Clone, Debug, PartialEq)]
pub struct MachineDynamics {
    /// Sizes of `Λ^A`, `Λ^B`, `Λ^C`.
    pub party_sizes: [usize; 3],
    pub map: BTreeMap<CompositeOnticState, CompositeOnticState>,
    /// Supports of `|0⟩` in each local space.
    pub zero_support: PartySupports,
    /// Support of `|+⟩` in `Λ^A`.
    pub plus_support_a: BTreeSet<usize>,
}

impl MachineDynamics {
    pub fn apply(&self, input: &CompositeOnticState) -> Option<CompositeOnticState> {
        self.map.get(input).copied()
    }

    /// Every local triple of the finite composite space.
    pub fn local_inputs(&self) -> impl Iterator<Item = CompositeOnticState> + '_ {
        let [na, nb, nc] = self.party_sizes;
        (0..na).flat_map(move |a| {
            (0..nb).flat_map(move |b| (0..nc).map(move |c| CompositeOnticState::local(a, b, c)))
        })
    }

    /// `next ∘ self`, keeping the metadata of `self`. Inputs whose image is
    /// not mapped by `next` are dropped.
    pub fn then(&self, next: &MachineDynamics) -> MachineDynamics {
        let map = self
            .map
            .iter()
            .filter_map(|(input, mid)| next.apply(mid).map(|out| (*input, out)))
            .collect();
        MachineDynamics {
            party_sizes: self.party_sizes,
            map,
            zero_support: self.zero_support.clone(),
            plus_support_a: self.plus_support_a.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaViolation {
    /// The input has no image.
    Unmapped { input: CompositeOnticState },
    /// The image lies in the nonlocal sector.
    NonlocalOutput {
        input: CompositeOnticState,
        output: CompositeOnticState,
    },
    /// The image is local but some component leaves the support of `|0⟩`.
    OutsideSupport {
        input: CompositeOnticState,
        output: CompositeOnticState,
    },
}

impl GammaViolation {
    pub fn input(&self) -> CompositeOnticState {
        match *self {
            Self::Unmapped { input }
            | Self::NonlocalOutput { input, .. }
            | Self::OutsideSupport { input, .. } => input,
        }
    }
}

/// Every local input with `λA` in the support of `|0⟩` must map to a local
/// output inside `support(|0⟩)³`. Returns one entry per offending input, in
/// input order.
pub fn check_gamma(dynamics: &MachineDynamics) -> Vec<GammaViolation> {
    dynamics
        .local_inputs()
        .filter(|input| match input {
            CompositeOnticState::Local { a, .. } => dynamics.zero_support.a.contains(a),
            CompositeOnticState::Nonlocal(_) => false,
        })
        .filter_map(|input| match dynamics.apply(&input) {
            None => Some(GammaViolation::Unmapped { input }),
            Some(output @ CompositeOnticState::Nonlocal(_)) => {
                Some(GammaViolation::NonlocalOutput { input, output })
            }
            Some(output) if !dynamics.zero_support.contains_state(&output) => {
                Some(GammaViolation::OutsideSupport { input, output })
            }
            Some(_) => None,
        })
        .collect()
}
