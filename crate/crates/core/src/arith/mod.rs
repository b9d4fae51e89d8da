//! Exact arithmetic primitives.

pub mod cyclotomic;
pub mod integer;
pub mod linalg;
pub mod poly;
pub mod residue;
pub mod symbols;

pub use cyclotomic::CyclotomicInt;
pub use integer::{factorize, Integer, Rational};
pub use residue::ResidueInt;
pub use symbols::{hilbert_symbol, kronecker_symbol, Place};
