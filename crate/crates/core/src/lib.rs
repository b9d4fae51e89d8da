//! Exact arithmetic for weight-2 quaternionic modular forms on definite
//! quaternion algebras over Q.

pub mod arith;
pub mod brandt;
pub mod classes;
pub mod congruence;
pub mod error;
pub mod orders;
pub mod periods;
pub mod quadratic;
pub mod quat;

pub use error::{Error, Result};
