#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Finite-difference laboratory for the Dirichlet problem `−Δu + Vu = μ`
//! with singular nonnegative potentials `V : Ω → [0, +∞]`.

pub mod error;
pub mod green;
pub mod grid;
pub mod linsolve;
pub mod potential;
pub mod experiment;
pub mod principles;
pub mod schrodinger;
pub mod zeroset;

pub use error::{Error, Result};
