//! Exact evolution maps: the slit map on `[0, t₀]` and the implicit
//! solutions on `[t₀, T]`.

mod branch;
mod implicit;
mod slit;

pub use branch::BranchState;
pub use implicit::{certify, solve_map, thm1_residual, thm1_solve, thm2_residual, thm2_solve, ImplicitSolveResult};
pub use slit::{distance_to_slit, sqrt_map, sqrt_map_inverse};
