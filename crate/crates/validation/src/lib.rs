//! Oracles that share no code with the solvers they check.

pub mod dense;
pub mod fock;
pub mod hilbert;
pub mod random;
