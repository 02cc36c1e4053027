//! Direct numerical integration of the two-slit Loewner flow, used as an
//! oracle independent of the closed-form solutions.

mod flow;
pub mod integrator;

pub use flow::{capacity_check, capacity_residuals, evolve_forward, inverse_flow, trace_numeric, FlowResult, FlowStatus};
