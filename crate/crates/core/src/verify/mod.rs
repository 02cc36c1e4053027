//! Verification suites that bind the exact maps, the exact traces and the
//! flow integrator together and report each comparison as a check.

mod report;
mod suites;

pub use report::{Check, Provenance, VerificationReport, RECORD_ONLY};
pub use suites::{
    fit_asymptotics, probe_grid, run_suite, suite_asymptotics, suite_case3_adjudication, suite_geometry,
    suite_oracle_equivalence, AsymptoticFit, Suite,
};
