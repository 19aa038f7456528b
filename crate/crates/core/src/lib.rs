//! Numerics for ontological (hidden-variable) models of qubits.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - [`qcore`]: exact small-dimension state-vector algebra, the copying
//!   machine unitary and Mermin expectation values;
//! - [`ontology`]: ontic spaces, epistemic states, response functions, the
//!   overlap fraction and two reference models (Kochen–Specker and a
//!   ψ-ontic baseline);
//! - [`composite`]: tripartite ontic states with a nonlocal sector, local
//!   strategy enumeration and machine dynamics;
//! - [`nogo`]: the Mermin budget, the overlap it forces, the overlap linear
//!   program and the toy thought-experiment model;
//! - [`simplex`]: the dense two-phase simplex solver behind the LP.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod composite;
pub mod error;
pub mod nogo;
pub mod ontology;
pub mod qcore;
pub mod simplex;
mod sum;

pub use error::{Error, Result};
