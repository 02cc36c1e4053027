use serde::{Deserialize, Serialize};

use crate::scalar::{upper_arg, wrap_angle, Cx, Real};

/// Unwrapped arguments that pin the sheets of `Log w²` and of powers of
/// `z² + 4t₀` along a continuation path. Both are zero when the underlying
/// quantity is positive real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchState<T> {
    /// Argument of `w²`.
    pub arg_w_accum: T,
    /// Argument of `z² + 4t₀`.
    pub arg_base_accum: T,
}

impl<T: Real> BranchState<T> {
    pub fn new(arg_w_accum: T, arg_base_accum: T) -> Self {
        Self { arg_w_accum, arg_base_accum }
    }

    /// State at the start of a continuation, where `w₀² = z² + 4t₀` and
    /// `w₀ = g(z, t₀)` lies in the closed upper half-plane.
    pub fn at_seed(w0: Cx<T>) -> Self {
        let a = upper_arg(w0) * T::lit(2.0);
        Self { arg_w_accum: a, arg_base_accum: a }
    }

    /// Branch read off directly from half-plane points: `arg w² = 2 arg w`
    /// with `arg w ∈ [0, π]`, and likewise for `seed = g(z, t₀)`.
    pub fn from_half_plane(w: Cx<T>, seed: Cx<T>) -> Self {
        Self {
            arg_w_accum: upper_arg(w) * T::lit(2.0),
            arg_base_accum: upper_arg(seed) * T::lit(2.0),
        }
    }

    /// Argument of `w²` on the sheet nearest to the tracked one.
    pub fn unwrap_w(&self, w: Cx<T>) -> T {
        unwrap_near((w * w).arg(), self.arg_w_accum)
    }
}

/// Representative of `raw + 2πk` closest to `reference`.
pub(crate) fn unwrap_near<T: Real>(raw: T, reference: T) -> T {
    reference + wrap_angle(raw - reference)
}
