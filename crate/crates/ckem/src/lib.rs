//! Closed-form polytope integrals and critical-point search for the
//! volume functional of toric cKEM geometry, plus the ODE construction of
//! such metrics on projective line bundles.

pub mod bundle_ode;
pub mod critical;
pub mod error;
pub mod exec;
pub mod functional;
pub mod geometry;
pub mod integrals;
pub mod scalar;

pub use error::{CkemError, Result};
pub use exec::Exec;
