//! Dormand–Prince 5(4) with PI step-size control for a single complex state.
//!
//! Every ODE in this crate is scalar complex, so the state is a bare
//! [`Cx<T>`] instead of a vector.

use crate::error::{LoewnerError, Result};
use crate::scalar::{Cx, Real};

/// Step-size controls for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct StepControl<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Smallest step the error controller may request before failing.
    pub min_step: T,
    pub max_step: T,
    pub max_steps: usize,
    /// Optional first trial step.
    pub initial_step: Option<T>,
}

impl<T: Real> StepControl<T> {
    pub fn new(rel_tol: T, abs_tol: T, min_step: T, max_step: T) -> Self {
        Self { rel_tol, abs_tol, min_step, max_step, max_steps: 2_000_000, initial_step: None }
    }

    pub fn with_initial_step(mut self, h: T) -> Self {
        self.initial_step = Some(h);
        self
    }
}

/// Result of one call to [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Outcome<T> {
    pub t: T,
    pub y: Cx<T>,
    pub steps: usize,
    pub rejected: usize,
    /// `true` when the `halt` predicate stopped the run before `t_end`.
    pub halted: bool,
    /// Last accepted step size, a good seed for a follow-up call.
    pub last_step: T,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

fn finite<T: Real>(z: Cx<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Integrates `y' = rhs(t, y)` from `t_start` to `t_end > t_start`.
///
/// `cap(t, y)` bounds each step from above (it may be smaller than
/// `min_step`; only the error controller triggers underflow). `halt(t, y)` is
/// consulted after every accepted step and ends the run early when it returns
/// `true`.
pub fn integrate<T, F, C, H>(
    mut rhs: F,
    t_start: T,
    y0: Cx<T>,
    t_end: T,
    ctl: &StepControl<T>,
    mut cap: C,
    mut halt: H,
) -> Result<Outcome<T>>
where
    T: Real,
    F: FnMut(T, Cx<T>) -> Cx<T>,
    C: FnMut(T, Cx<T>) -> T,
    H: FnMut(T, Cx<T>) -> bool,
{
    let l = T::lit;
    let mut t = t_start;
    let mut y = y0;
    let mut out = Outcome { t, y, steps: 0, rejected: 0, halted: false, last_step: T::zero() };
    if !(t_end > t_start) {
        return Ok(out);
    }
    let span = t_end - t_start;
    let mut k1 = rhs(t, y);
    if !finite(k1) {
        return Err(LoewnerError::Singularity(format!("non-finite vector field at t = {t}")));
    }
    let mut h = match ctl.initial_step {
        Some(h) => h,
        None => {
            let sc = ctl.abs_tol + ctl.rel_tol * y.norm();
            let d0 = y.norm() / sc;
            let d1 = k1.norm() / sc;
            if d0 < l(1e-5) || d1 < l(1e-5) {
                l(1e-6)
            } else {
                l(0.01) * d0 / d1
            }
        }
    };
    h = h.min(ctl.max_step).min(span);
    let mut fac_old = l(1e-4);
    let mut last_rejected = false;
    let expo = l(0.2 - 0.75 * BETA);
    let eps_t = T::epsilon() * l(16.0) * t_end.abs().max(T::one());

    while t_end - t > eps_t {
        if out.steps + out.rejected >= ctl.max_steps {
            return Err(LoewnerError::Singularity(format!(
                "step budget of {} exhausted at t = {t}",
                ctl.max_steps
            )));
        }
        let remaining = t_end - t;
        let limit = cap(t, y);
        let mut hs = h.min(ctl.max_step).min(limit);
        let mut lands = false;
        if hs >= remaining {
            hs = remaining;
            lands = true;
        } else if hs > remaining * l(0.5) && hs < remaining && limit >= remaining {
            // avoid leaving a sliver before t_end
            hs = remaining * l(0.5);
        }

        let k2 = rhs(t + hs * l(C2), y + k1 * (hs * l(A21)));
        let k3 = rhs(t + hs * l(C3), y + (k1 * l(A31) + k2 * l(A32)) * hs);
        let k4 = rhs(t + hs * l(C4), y + (k1 * l(A41) + k2 * l(A42) + k3 * l(A43)) * hs);
        let k5 = rhs(
            t + hs * l(C5),
            y + (k1 * l(A51) + k2 * l(A52) + k3 * l(A53) + k4 * l(A54)) * hs,
        );
        let t_new = if lands { t_end } else { t + hs };
        let k6 = rhs(
            t_new,
            y + (k1 * l(A61) + k2 * l(A62) + k3 * l(A63) + k4 * l(A64) + k5 * l(A65)) * hs,
        );
        let y_new = y + (k1 * l(A71) + k3 * l(A73) + k4 * l(A74) + k5 * l(A75) + k6 * l(A76)) * hs;
        let k7 = rhs(t_new, y_new);
        let stages_ok = [k2, k3, k4, k5, k6, k7, y_new].iter().all(|z| finite(*z));

        let err = if stages_ok {
            let e = (k1 * l(E1) + k3 * l(E3) + k4 * l(E4) + k5 * l(E5) + k6 * l(E6) + k7 * l(E7)) * hs;
            let sc = ctl.abs_tol + ctl.rel_tol * y.norm().max(y_new.norm());
            e.norm() / sc
        } else {
            T::infinity()
        };

        if err <= T::one() {
            let fac11 = err.max(l(1e-30)).powf(expo);
            let fac = (fac11 / fac_old.powf(l(BETA)) / l(SAFETY)).max(T::one() / l(FAC_MAX)).min(T::one() / l(FAC_MIN));
            let mut h_next = hs / fac;
            if last_rejected {
                h_next = h_next.min(hs);
            }
            fac_old = err.max(l(1e-4));
            last_rejected = false;
            t = t_new;
            y = y_new;
            k1 = k7;
            out.steps += 1;
            out.last_step = hs;
            // a step shortened by the cap or the landing rule says nothing about
            // what the controller would allow next
            h = if hs < h { h.max(h_next) } else { h_next };
            if halt(t, y) {
                out.halted = true;
                break;
            }
        } else {
            out.rejected += 1;
            last_rejected = true;
            h = if err.is_finite() {
                let fac11 = err.powf(expo);
                hs / (fac11 / l(SAFETY)).min(T::one() / l(FAC_MIN))
            } else {
                hs * l(0.25)
            };
            if h < ctl.min_step && remaining > ctl.min_step {
                return Err(LoewnerError::StepUnderflow { t: t.to_f64_lossy(), h: h.to_f64_lossy() });
            }
        }
    }
    out.t = t;
    out.y = y;
    Ok(out)
}
