//! Exact traces `Γ₀, Γ₁, Γ₂`.
//!
//! For piecewise constant driving the right-hand trace `Γ₂` solves
//! `A² − z² − A² log(A²/(z² + 4t₀)) = 4t`; it is computed by integrating the
//! differentiated form `(z²)' = 4(z² + 4t₀)/(A² − 4t₀ − z²)` (or its quartic
//! form in the degenerate case `A² = 4t₀`) so that the implicit equation stays
//! available as an independent check. For square-root driving `Γ₂` has a
//! closed form.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{LoewnerError, Result};
use crate::ode::integrator::{integrate, StepControl};
use crate::scalar::{reflect, Cx, Real};
use crate::types::{CaseTag, Scenario, SolverConfig, Theorem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TraceLabel {
    Gamma0,
    Gamma1,
    Gamma2,
}

impl TraceLabel {
    /// Short tag used in CSV output.
    pub fn tag(self) -> &'static str {
        match self {
            TraceLabel::Gamma0 => "G0",
            TraceLabel::Gamma1 => "G1",
            TraceLabel::Gamma2 => "G2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample<T> {
    pub t: T,
    pub z: Cx<T>,
}

/// A sampled trace with strictly increasing time stamps.
///
/// `Γ₀` is stamped with the time at which each point was reached by the
/// slit tip, `t = y²/4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceCurve<T> {
    pub samples: Vec<TraceSample<T>>,
    pub label: TraceLabel,
    pub scenario: Scenario<T>,
}

impl<T: Real> TraceCurve<T> {
    pub fn points(&self) -> impl Iterator<Item = Cx<T>> + '_ {
        self.samples.iter().map(|s| s.z)
    }

    pub fn times_strictly_increasing(&self) -> bool {
        self.samples.windows(2).all(|p| p[1].t > p[0].t)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// `z(t₀ + δ) ≈ base + coefficient · δ^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticExpansion<T> {
    pub base_point: Cx<T>,
    pub exponent: T,
    pub coefficient: Cx<T>,
}

impl<T: Real> AsymptoticExpansion<T> {
    pub fn eval(&self, delta: T) -> Cx<T> {
        self.base_point + self.coefficient * delta.powf(self.exponent)
    }
}

/// `n` uniform times on `[t₀, T]`.
pub fn uniform_times<T: Real>(t0: T, horizon: T, n: usize) -> Vec<T> {
    let n = n.max(2);
    let span = horizon - t0;
    (0..n)
        .map(|k| if k + 1 == n { horizon } else { t0 + span * T::lit(k as f64) / T::lit((n - 1) as f64) })
        .collect()
}

/// Uniform times plus `extra` geometrically spaced times in
/// `(t₀, t₀ + 0.01(T − t₀))`, where the trace speed diverges.
pub fn refined_times<T: Real>(t0: T, horizon: T, n: usize, extra: usize) -> Vec<T> {
    let span = horizon - t0;
    let mut times = uniform_times(t0, horizon, n);
    let top = span * T::lit(0.01);
    let bottom = span * T::lit(1e-8);
    if extra > 0 {
        let ratio = (top / bottom).ln();
        for k in 0..extra {
            let f = T::lit(k as f64) / T::lit(extra as f64);
            times.push(t0 + bottom * (ratio * f).exp());
        }
    }
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    times.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * horizon.abs() * T::lit(4.0));
    times
}

/// Starting point `z(t₀)` of `Γ₂`.
pub fn start_point<T: Real>(sc: &Scenario<T>) -> Cx<T> {
    match sc.theorem {
        Theorem::Two => Cx::new(T::zero(), sc.slit_height()),
        Theorem::One => {
            let gap = sc.a * sc.a - T::lit(4.0) * sc.t0;
            match sc.case_tag {
                Some(CaseTag::I) => Cx::new(gap.sqrt(), T::zero()),
                Some(CaseTag::II) => Cx::new(T::zero(), (-gap).sqrt()),
                _ => Cx::new(T::zero(), T::zero()),
            }
        }
    }
}

/// Leading-order expansion of `Γ₂` at `t₀` for piecewise constant driving.
pub fn thm1_trace_asymptotic<T: Real>(sc: &Scenario<T>) -> Result<AsymptoticExpansion<T>> {
    if sc.theorem != Theorem::One {
        return Err(LoewnerError::Domain("asymptotic expansion applies to piecewise constant driving".into()));
    }
    let two = T::lit(2.0);
    let gap = sc.a * sc.a - T::lit(4.0) * sc.t0;
    let base = start_point(sc);
    Ok(match sc.case_tag {
        Some(CaseTag::I) => AsymptoticExpansion {
            base_point: base,
            exponent: T::lit(0.5),
            coefficient: Cx::new(T::zero(), two.sqrt() * sc.a / gap.sqrt()),
        },
        Some(CaseTag::II) => AsymptoticExpansion {
            base_point: base,
            exponent: T::lit(0.5),
            coefficient: Cx::new(two.sqrt() * sc.a / (-gap).sqrt(), T::zero()),
        },
        _ => AsymptoticExpansion {
            base_point: base,
            exponent: T::lit(0.25),
            coefficient: Cx::from_polar(two * (two * sc.t0).powf(T::lit(0.25)), T::FRAC_PI_4()),
        },
    })
}

/// Residual of the implicit trace equation
/// `A² − z² − A² log(A²/(z² + 4t₀)) − 4t` (principal log, which is the
/// continuous branch along `Γ₂`).
pub fn thm1_trace_residual<T: Real>(z: Cx<T>, t: T, sc: &Scenario<T>) -> Result<Cx<T>> {
    let a2 = sc.a * sc.a;
    let base = z * z + T::lit(4.0) * sc.t0;
    if base.norm_sqr() == T::zero() {
        return Err(LoewnerError::Singularity("z² + 4t₀ = 0".into()));
    }
    Ok(Cx::from(a2) - z * z - (Cx::from(a2) / base).ln() * a2 - T::lit(4.0) * t)
}

/// Degenerate-case trace equation `z² + c·log(A²/(z² + 4t₀)) − (A² − 4t)`
/// with log coefficient `c`.
pub fn case3_log_form_residual<T: Real>(z: Cx<T>, t: T, a: T, t0: T, log_coeff: T) -> Result<Cx<T>> {
    let base = z * z + T::lit(4.0) * t0;
    if base.norm_sqr() == T::zero() {
        return Err(LoewnerError::Singularity("z² + 4t₀ = 0".into()));
    }
    Ok(z * z + (Cx::from(a * a) / base).ln() * log_coeff - Cx::from(a * a - T::lit(4.0) * t))
}

/// Degenerate-case (`A² = 4t₀`) trace equation obtained by integrating
/// `(z⁴)' = −8(z² + 4t₀)` from `z(t₀) = 0`:
/// `z² + 4t₀ log(A²/(z² + 4t₀)) = A² − 4t`.
pub fn thm1_case3_implicit_residual<T: Real>(z: Cx<T>, t: T, sc: &Scenario<T>) -> Result<Cx<T>> {
    if sc.case_tag != Some(CaseTag::III) {
        return Err(LoewnerError::Domain("degenerate trace equation needs A² = 4t₀".into()));
    }
    case3_log_form_residual(z, t, sc.a, sc.t0, T::lit(4.0) * sc.t0)
}

/// `s = z² − (A² − 4t₀)` near `t₀` as a series in `τ = √(t − t₀)`:
/// `s = c₁τ − (8/3)τ² + 16/(9c₁)τ³`, `c₁ = 2√2·A·i`, from `(s²)' = −8(s + A²)`.
fn shifted_square_series<T: Real>(a: T, delta: T) -> Cx<T> {
    let tau = delta.sqrt();
    let c1 = Cx::new(T::zero(), T::lit(2.0) * T::lit(2.0).sqrt() * a);
    c1 * tau - Cx::from(T::lit(8.0 / 3.0) * tau * tau) + c1.inv() * (T::lit(16.0 / 9.0) * tau * tau * tau)
}

fn nearest_root<T: Real>(q: Cx<T>, reference: Cx<T>) -> Cx<T> {
    let r = q.sqrt();
    if (r - reference).norm_sqr() <= (-r - reference).norm_sqr() {
        r
    } else {
        -r
    }
}

fn first_quadrant_root<T: Real>(q: Cx<T>) -> Cx<T> {
    let r = q.sqrt();
    if r.re < T::zero() || (r.re == T::zero() && r.im < T::zero()) {
        -r
    } else {
        r
    }
}

/// `Γ₂` for piecewise constant driving at the given times (sorted, within
/// `[t₀, T]`).
pub fn thm1_trace_at<T: Real>(sc: &Scenario<T>, cfg: &SolverConfig<T>, times: &[T]) -> Result<TraceCurve<T>> {
    if sc.theorem != Theorem::One {
        return Err(LoewnerError::Domain("thm1_trace needs piecewise constant driving".into()));
    }
    check_times(sc, times)?;
    let t0 = sc.t0;
    let a2 = sc.a * sc.a;
    let u0 = a2 - T::lit(4.0) * t0;
    let four_t0 = T::lit(4.0) * t0;
    let z_start = start_point(sc);
    let degenerate = sc.case_tag == Some(CaseTag::III);

    let first_after = times.iter().copied().find(|&t| t > t0);
    let mut h0 = (sc.horizon - t0) * T::lit(1e-6);
    if let Some(t1) = first_after {
        h0 = h0.min((t1 - t0) * T::lit(0.5));
    }

    let im_floor = -T::lit(1e-10);
    let mut samples = Vec::with_capacity(times.len());
    let mut z_prev = z_start;
    let mut u_prev = Cx::from(u0);

    let push = |samples: &mut Vec<TraceSample<T>>, t: T, u: Cx<T>, z_prev: &mut Cx<T>, u_prev: &mut Cx<T>| -> Result<()> {
        let z = if *z_prev == Cx::new(T::zero(), T::zero()) {
            first_quadrant_root(u)
        } else {
            nearest_root(u, *z_prev)
        };
        if z.im < im_floor {
            return Err(LoewnerError::Branch(format!("trace left the upper half-plane at t = {t}: {z}")));
        }
        *z_prev = z;
        *u_prev = u;
        samples.push(TraceSample { t, z });
        Ok(())
    };

    let ctl = StepControl::new(cfg.ode_rel_tol, cfg.ode_abs_tol, cfg.min_step.min(h0 * T::lit(1e-3)), cfg.max_step);
    // integrated state: u = z² (cases I, II) or q = (z² − u0)² (case III)
    let mut state: Option<(T, Cx<T>, T)> = None;

    for &t in times {
        if t <= t0 {
            samples.push(TraceSample { t, z: z_start });
            continue;
        }
        if t <= t0 + h0 && state.is_none() {
            let u = Cx::from(u0) + shifted_square_series(sc.a, t - t0);
            push(&mut samples, t, u, &mut z_prev, &mut u_prev)?;
            continue;
        }
        let (ts, ys, h_hint) = match state {
            Some(s) => s,
            None => {
                let s = shifted_square_series(sc.a, h0);
                let u = Cx::from(u0) + s;
                // align the branch tracking with the seed point
                z_prev = if z_prev == Cx::new(T::zero(), T::zero()) {
                    first_quadrant_root(u)
                } else {
                    nearest_root(u, z_prev)
                };
                u_prev = u;
                let y = if degenerate { s * s } else { u };
                (t0 + h0, y, h0 * T::lit(0.1))
            }
        };
        let mut singular = false;
        let ctl = ctl.with_initial_step(h_hint);
        let out = if degenerate {
            let s_ref = Cell::new(u_prev - u0);
            integrate(
                |_, q: Cx<T>| (nearest_root(q, s_ref.get()) + a2) * T::lit(-8.0),
                ts,
                ys,
                t,
                &ctl,
                |_, _| T::infinity(),
                |_, q| {
                    s_ref.set(nearest_root(q, s_ref.get()));
                    false
                },
            )?
        } else {
            integrate(
                |_, u: Cx<T>| (u + four_t0) * T::lit(4.0) / (Cx::from(u0) - u),
                ts,
                ys,
                t,
                &ctl,
                |_, _| T::infinity(),
                |_, u| {
                    singular = (Cx::from(u0) - u).norm() < T::lit(1e-14);
                    singular
                },
            )?
        };
        if singular {
            return Err(LoewnerError::Singularity(format!(
                "trace equation denominator vanished at t = {}",
                out.t
            )));
        }
        let u = if degenerate { Cx::from(u0) + nearest_root(out.y, u_prev - u0) } else { out.y };
        push(&mut samples, t, u, &mut z_prev, &mut u_prev)?;
        state = Some((t, out.y, out.last_step.max(h0 * T::lit(1e-3))));
    }
    Ok(TraceCurve { samples, label: TraceLabel::Gamma2, scenario: *sc })
}

/// `Γ₂` for piecewise constant driving on `n_samples` uniform times.
pub fn thm1_trace<T: Real>(sc: &Scenario<T>, cfg: &SolverConfig<T>, n_samples: usize) -> Result<TraceCurve<T>> {
    if n_samples < 2 {
        return Err(LoewnerError::Domain("at least two samples are required".into()));
    }
    thm1_trace_at(sc, cfg, &uniform_times(sc.t0, sc.horizon, n_samples))
}

/// Closed-form point of `Γ₂` for square-root driving:
/// `z(t) = [e^{4πi/(A²+4)} 2^{8/(A²+4)} A^{2A²/(A²+4)} (t − t₀) − 4t₀]^{1/2}`.
pub fn thm2_trace_point<T: Real>(sc: &Scenario<T>, t: T) -> Cx<T> {
    let a2 = sc.a * sc.a;
    let q = a2 + T::lit(4.0);
    let (segment, _) = thm2_angles(sc.a);
    let modulus = T::lit(2.0).powf(T::lit(8.0) / q) * sc.a.powf(T::lit(2.0) * a2 / q);
    let bracket = Cx::from_polar(modulus * (t - sc.t0), segment) - T::lit(4.0) * sc.t0;
    first_quadrant_root(bracket)
}

pub fn thm2_trace_at<T: Real>(sc: &Scenario<T>, times: &[T]) -> Result<TraceCurve<T>> {
    if sc.theorem != Theorem::Two {
        return Err(LoewnerError::Domain("thm2_trace needs square-root driving".into()));
    }
    check_times(sc, times)?;
    let samples = times.iter().map(|&t| TraceSample { t, z: thm2_trace_point(sc, t) }).collect();
    Ok(TraceCurve { samples, label: TraceLabel::Gamma2, scenario: *sc })
}

pub fn thm2_trace<T: Real>(sc: &Scenario<T>, n_samples: usize) -> Result<TraceCurve<T>> {
    if n_samples < 2 {
        return Err(LoewnerError::Domain("at least two samples are required".into()));
    }
    thm2_trace_at(sc, &uniform_times(sc.t0, sc.horizon, n_samples))
}

/// `Γ₂` at the given times for either theorem.
pub fn trace_at<T: Real>(sc: &Scenario<T>, cfg: &SolverConfig<T>, times: &[T]) -> Result<TraceCurve<T>> {
    match sc.theorem {
        Theorem::One => thm1_trace_at(sc, cfg, times),
        Theorem::Two => thm2_trace_at(sc, times),
    }
}

/// `(segment_angle, tangent_angle)` for square-root driving:
/// `z² + 4t₀` runs along the ray at `4π/(A²+4)`, and `Γ₂` leaves `2i√t₀`
/// at `π(4 − A²)/(2(A² + 4))` to the real axis.
pub fn thm2_angles<T: Real>(a: T) -> (T, T) {
    let q = a * a + T::lit(4.0);
    let segment = T::lit(4.0) * T::PI() / q;
    let tangent = T::PI() * (T::lit(4.0) - a * a) / (T::lit(2.0) * q);
    (segment, tangent)
}

/// `Γ₁` from `Γ₂` by reflection in the imaginary axis.
pub fn mirror<T: Real>(curve: &TraceCurve<T>) -> Result<TraceCurve<T>> {
    if curve.label != TraceLabel::Gamma2 {
        return Err(LoewnerError::Domain(format!("mirror expects Γ₂, got {:?}", curve.label)));
    }
    Ok(TraceCurve {
        samples: curve.samples.iter().map(|s| TraceSample { t: s.t, z: reflect(s.z) }).collect(),
        label: TraceLabel::Gamma1,
        scenario: curve.scenario,
    })
}

/// Uniform samples of the fixed segment `[0, i2√t₀]`.
pub fn gamma0<T: Real>(sc: &Scenario<T>, n_samples: usize) -> TraceCurve<T> {
    let n = n_samples.max(2);
    let height = sc.slit_height();
    let samples = (0..n)
        .map(|k| {
            let y = if k + 1 == n { height } else { height * T::lit(k as f64) / T::lit((n - 1) as f64) };
            TraceSample { t: y * y / T::lit(4.0), z: Cx::new(T::zero(), y) }
        })
        .collect();
    TraceCurve { samples, label: TraceLabel::Gamma0, scenario: *sc }
}

fn check_times<T: Real>(sc: &Scenario<T>, times: &[T]) -> Result<()> {
    if times.iter().any(|&t| !(t >= sc.t0 && t <= sc.horizon)) {
        return Err(LoewnerError::Domain(format!("trace times must lie in [{}, {}]", sc.t0, sc.horizon)));
    }
    if times.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(LoewnerError::Domain("trace times must be strictly increasing".into()));
    }
    Ok(())
}
