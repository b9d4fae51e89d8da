//! Quaternion algebras, lattices and reduction.

pub mod algebra;
pub mod lattice;
pub mod reduce;

pub use algebra::{QuatElement, QuaternionAlgebra};
pub use lattice::Lattice;
pub use reduce::ReducedForm;
