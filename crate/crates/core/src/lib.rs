//! Two-slit chordal Loewner evolution with symmetric combined driving
//! functions.
//!
//! The driving pair is `λ₁ = −λ₂`, zero on `[0, t₀)` and then either a
//! constant `A` or `A√(t − t₀)`. The crate provides
//!
//! * the exact maps `g(z, t)` ([`exact`]),
//! * the exact traces `Γ₀, Γ₁, Γ₂` with their asymptotics ([`traces`]),
//! * a generic adaptive integrator of the Loewner flow used as an independent
//!   oracle ([`ode`]),
//! * verification suites that bind them together ([`verify`]).
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`, which is what the default tolerances target.

// `!(x > 0)` is the idiom used throughout to reject NaN along with the range
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod error;
pub mod exact;
pub mod geometry;
pub mod ode;
pub mod scalar;
pub mod traces;
pub mod types;
pub mod verify;

pub use error::{LoewnerError, Result};
pub use scalar::{reflect, Cx, Real};
pub use types::{classify_case, eval_driving, CaseTag, DrivingMode, DrivingSchedule, Scenario, SolverConfig, Theorem};

/// A point of the closed upper half-plane.
pub type ComplexPoint = Cx<f64>;
pub type Schedule = DrivingSchedule<f64>;
pub type Scenario64 = Scenario<f64>;
pub type Config = SolverConfig<f64>;

pub type Trace = traces::TraceCurve<f64>;
pub type Report = verify::VerificationReport;
