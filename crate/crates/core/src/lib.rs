//! Numerical verification of the product formula for leafwise meromorphic
//! functions on mapping tori of Möbius maps, together with the classical
//! product formula for the rationals and the Gaussian integers.

#![no_std]
// `num_traits::Float` goes unused whenever std is linked into the build
// (tests, dev-dependency features), as the inherent methods win.
#![allow(unused_imports)]

extern crate alloc;

pub mod arith;
pub mod error;
pub mod eta;
pub mod fibered;
pub mod leafwise;
pub mod orbits;
pub mod poly;
pub mod quadrature;
pub mod rational;
mod sampling;
pub mod scenario;
pub mod sphere;
pub mod verifier;
pub mod winding;

pub use error::{Error, Result};
pub use eta::Method;
pub use fibered::SpeedProfile;
pub use orbits::ClosedOrbitRecord;
pub use rational::RationalFunction;
pub use scenario::{MappingTorusScenario, ScenarioSpec};
pub use sphere::{MoebiusMap, PointCP1};
pub use verifier::{verify_all, verify_product_formula, VerificationReport};
