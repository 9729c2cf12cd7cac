//! Casimir–Lifshitz free energy between two weakly conducting dielectric
//! plates, its low-temperature asymptotics, and the tooling used to check
//! one against the other.

pub mod qd;
pub mod real;

pub use qd::Qd;
pub use real::{Precision, Real};
pub mod error;
pub mod quad;
pub mod special;
pub mod units;

pub use error::{Error, Result};
pub mod asymptotics;
pub mod diagnostics;
pub mod dielectric;
pub mod lifshitz;
