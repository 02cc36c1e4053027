use serde::{Deserialize, Serialize};

use super::integrator::{integrate, StepControl};
use crate::error::{LoewnerError, Result};
use crate::scalar::{Cx, Real};
use crate::types::{DrivingMode, DrivingSchedule, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowStatus {
    Completed,
    /// The point came within `liftoff_eps` of a driving point and was
    /// treated as absorbed by the hull.
    StoppedNearSingularity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowResult<T> {
    pub w: Cx<T>,
    /// Time reached; equals `t_end` when completed.
    pub t: T,
    pub steps_taken: usize,
    /// `min over the path of minₖ |w − λₖ|`.
    pub min_singularity_distance: T,
    pub status: FlowStatus,
}

/// `λ₂` on the post-switch branch, evaluated at `max(τ, t₀)` so rounding
/// never flips a phase boundary.
fn lambda_after<T: Real>(schedule: &DrivingSchedule<T>, tau: T) -> T {
    match schedule.mode() {
        DrivingMode::PiecewiseConstant { a } => a,
        DrivingMode::ConstantThenSqrt { a } => a * (tau - schedule.t0()).max(T::zero()).sqrt(),
    }
}

fn field<T: Real>(w: Cx<T>, lam2: T) -> Cx<T> {
    (w - lam2).inv() + (w + lam2).inv()
}

fn distance<T: Real>(w: Cx<T>, lam2: T) -> T {
    (w - lam2).norm().min((w + lam2).norm())
}

/// Integrates `∂ₜw = 1/(w − λ₁(t)) + 1/(w − λ₂(t))`, `w(0) = z`, up to
/// `t_end`, with a forced step boundary at `t₀`.
pub fn evolve_forward<T: Real>(
    z: Cx<T>,
    schedule: &DrivingSchedule<T>,
    t_end: T,
    cfg: &SolverConfig<T>,
) -> Result<FlowResult<T>> {
    if !(z.im > T::zero()) {
        return Err(LoewnerError::Domain(format!("{z} is not in the open upper half-plane")));
    }
    if !(t_end >= T::zero() && t_end <= schedule.horizon()) {
        return Err(LoewnerError::Domain(format!(
            "end time {t_end} outside [0, {}]",
            schedule.horizon()
        )));
    }
    let ctl = StepControl::new(cfg.ode_rel_tol, cfg.ode_abs_tol, cfg.min_step, cfg.max_step);
    let factor = cfg.singularity_factor;
    let eps = cfg.liftoff_eps;
    let t0 = schedule.t0();

    let mut min_dist = z.norm();
    let mut result = FlowResult {
        w: z,
        t: T::zero(),
        steps_taken: 0,
        min_singularity_distance: min_dist,
        status: FlowStatus::Completed,
    };
    if min_dist < eps {
        result.status = FlowStatus::StoppedNearSingularity;
        return Ok(result);
    }

    let first_end = t_end.min(t0);
    let out = integrate(
        |_, w: Cx<T>| w.inv() * T::lit(2.0),
        T::zero(),
        z,
        first_end,
        &ctl,
        |_, w: Cx<T>| factor * w.norm_sqr(),
        |_, w: Cx<T>| {
            min_dist = min_dist.min(w.norm());
            min_dist < eps
        },
    )?;
    result.w = out.y;
    result.t = out.t;
    result.steps_taken = out.steps;
    if out.halted {
        result.min_singularity_distance = min_dist;
        result.status = FlowStatus::StoppedNearSingularity;
        return Ok(result);
    }
    if t_end <= t0 {
        result.min_singularity_distance = min_dist;
        return Ok(result);
    }

    // driving jumps (or turns on) at t₀
    min_dist = min_dist.min(distance(out.y, lambda_after(schedule, t0)));
    if min_dist < eps {
        result.min_singularity_distance = min_dist;
        result.status = FlowStatus::StoppedNearSingularity;
        return Ok(result);
    }
    let out = integrate(
        |t, w| field(w, lambda_after(schedule, t)),
        t0,
        out.y,
        t_end,
        &ctl,
        |t, w| {
            let d = distance(w, lambda_after(schedule, t));
            factor * d * d
        },
        |t, w| {
            min_dist = min_dist.min(distance(w, lambda_after(schedule, t)));
            min_dist < eps
        },
    )?;
    result.w = out.y;
    result.t = out.t;
    result.steps_taken += out.steps;
    result.min_singularity_distance = min_dist;
    if out.halted {
        result.status = FlowStatus::StoppedNearSingularity;
    }
    Ok(result)
}

/// `g⁻¹(w_target, t)` by integrating the reversed flow
/// `∂ₛz = −[1/(z − λ₁(t − s)) + 1/(z − λ₂(t − s))]` for `s ∈ [0, t]`.
pub fn inverse_flow<T: Real>(
    w_target: Cx<T>,
    schedule: &DrivingSchedule<T>,
    t: T,
    cfg: &SolverConfig<T>,
) -> Result<Cx<T>> {
    if !(w_target.im > T::zero()) {
        return Err(LoewnerError::Domain(format!(
            "{w_target} is not in the open upper half-plane"
        )));
    }
    if !(t >= T::zero() && t <= schedule.horizon()) {
        return Err(LoewnerError::Domain(format!("time {t} outside [0, {}]", schedule.horizon())));
    }
    let t0 = schedule.t0();
    let factor = cfg.singularity_factor;
    let start_dist = if t > t0 { distance(w_target, lambda_after(schedule, t)) } else { w_target.norm() };
    // the reversed field pushes points away from ℝ, so tiny initial steps
    // near a driving point are legitimate
    let min_step = cfg.min_step.min(start_dist * start_dist * T::lit(1e-6));
    let ctl = StepControl::new(cfg.ode_rel_tol, cfg.ode_abs_tol, min_step, cfg.max_step);

    let mut z = w_target;
    let mut s = T::zero();
    if t > t0 {
        let span = t - t0;
        let out = integrate(
            |s, z| -field(z, lambda_after(schedule, t - s)),
            T::zero(),
            z,
            span,
            &ctl,
            |s, z| {
                let d = distance(z, lambda_after(schedule, t - s));
                factor * d * d
            },
            |_, _| false,
        )?;
        z = out.y;
        s = span;
    }
    let out = integrate(
        |_, z: Cx<T>| -(z.inv() * T::lit(2.0)),
        s,
        z,
        t,
        &ctl,
        |_, z: Cx<T>| factor * z.norm_sqr(),
        |_, _| false,
    )?;
    Ok(out.y)
}

/// Tip of `Γ₂` at time `t ∈ (t₀, T]`: preimage of `λ₂(t) + iε`, Richardson
/// extrapolated in `ε` from `ε` and `ε/2`.
///
/// Near a slit tip the map behaves like a square root, so the preimage of
/// `λ + iε` approaches the tip as `ε²`; the extrapolation removes that term.
pub fn trace_numeric<T: Real>(schedule: &DrivingSchedule<T>, t: T, cfg: &SolverConfig<T>) -> Result<Cx<T>> {
    let t0 = schedule.t0();
    if !(t > t0 && t <= schedule.horizon()) {
        return Err(LoewnerError::Domain(format!(
            "numeric trace needs t in ({t0}, {}], got {t}",
            schedule.horizon()
        )));
    }
    let eps = cfg.liftoff_eps;
    let lam = schedule.lambda2(t);
    let coarse = inverse_flow(Cx::new(lam, eps), schedule, t, cfg)?;
    let fine = inverse_flow(Cx::new(lam, eps * T::lit(0.5)), schedule, t, cfg)?;
    let extrapolated = (fine * T::lit(4.0) - coarse) / T::lit(3.0);
    let disagreement = (extrapolated - fine).norm();
    let limit = eps * T::lit(100.0);
    if !(disagreement <= limit) {
        return Err(LoewnerError::Extrapolation {
            disagreement: disagreement.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        });
    }
    Ok(extrapolated)
}

/// Residuals `|(g(z, t) − z)·z − 2t|` at `z = R e^{iθ}`, `θ ∈ {π/4, π/2, 3π/4}`,
/// maximized over `θ`, one entry per radius.
pub fn capacity_residuals<T: Real>(
    schedule: &DrivingSchedule<T>,
    t: T,
    radii: &[T],
    cfg: &SolverConfig<T>,
) -> Result<Vec<T>> {
    let angles = [T::FRAC_PI_4(), T::FRAC_PI_2(), T::FRAC_PI_4() * T::lit(3.0)];
    radii
        .iter()
        .map(|&r| {
            if !(r >= T::lit(10.0)) {
                return Err(LoewnerError::Domain(format!("probe radius {r} below 10")));
            }
            let mut worst = T::zero();
            for &th in &angles {
                let z = Cx::from_polar(r, th);
                let w = evolve_forward(z, schedule, t, cfg)?.w;
                worst = worst.max(((w - z) * z - T::lit(2.0) * t).norm());
            }
            Ok(worst)
        })
        .collect()
}

/// Largest hydrodynamic-normalization residual over all probe radii.
pub fn capacity_check<T: Real>(
    schedule: &DrivingSchedule<T>,
    t: T,
    radii: &[T],
    cfg: &SolverConfig<T>,
) -> Result<T> {
    Ok(capacity_residuals(schedule, t, radii, cfg)?
        .into_iter()
        .fold(T::zero(), |a, b| a.max(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{solve_map, sqrt_map};
    use crate::scalar::reflect;
    use crate::types::Scenario;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    fn cfg() -> SolverConfig<f64> {
        SolverConfig::default()
    }

    fn pc() -> DrivingSchedule<f64> {
        Scenario::theorem_one(2.5, 1.0, 3.0).unwrap().schedule()
    }

    fn cs() -> DrivingSchedule<f64> {
        Scenario::theorem_two(3.0, 1.0, 3.0).unwrap().schedule()
    }

    #[test]
    fn slit_phase_matches_sqrt_map() {
        let r = evolve_forward(c(0.0, 3.0), &pc(), 1.0, &cfg()).unwrap();
        assert_eq!(r.status, FlowStatus::Completed);
        assert!((r.w - c(0.0, 5f64.sqrt())).norm() < 1e-8);
        assert!((r.w - sqrt_map(c(0.0, 3.0), 1.0).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn far_field_normalization() {
        for sched in [pc(), cs()] {
            let z = Cx::from_polar(100.0, 1.1);
            let w = evolve_forward(z, &sched, 1.0, &cfg()).unwrap().w;
            assert!((w - z - 2.0 / z).norm() <= 1e-4);
        }
    }

    #[test]
    fn reflection_equivariance() {
        for sched in [pc(), cs()] {
            let z = c(1.3, 0.7);
            let a = evolve_forward(z, &sched, 2.4, &cfg()).unwrap().w;
            let b = evolve_forward(reflect(z), &sched, 2.4, &cfg()).unwrap().w;
            assert!((b - reflect(a)).norm() <= 1e-12);
        }
    }

    #[test]
    fn agrees_with_reference_values() {
        let w = evolve_forward(c(2.0, 2.0), &pc(), 1.5, &cfg()).unwrap().w;
        assert!((w - c(2.662_879_126_677_878_7, 1.187_110_131_658_34)).norm() < 1e-8);
        let w = evolve_forward(c(0.5, 2.0), &cs(), 2.0, &cfg()).unwrap().w;
        assert!((w - c(0.889_344_116_844_583_8, 0.331_871_552_805_101_33)).norm() < 1e-8);
    }

    #[test]
    fn imaginary_part_never_increases() {
        let sched = cs();
        let z = c(0.9, 2.2);
        let mut prev = z.im;
        for k in 1..=60 {
            let t = 3.0 * k as f64 / 60.0;
            let w = evolve_forward(z, &sched, t, &cfg()).unwrap().w;
            assert!(w.im <= prev + cfg().ode_abs_tol);
            prev = w.im;
        }
    }

    #[test]
    fn absorbed_points_are_flagged() {
        // a point next to the tip of Γ₀ is swallowed as the slit reaches it
        let z = c(1e-10, 2.0);
        let r = evolve_forward(z, &pc(), 1.0, &cfg()).unwrap();
        assert_eq!(r.status, FlowStatus::StoppedNearSingularity);
        assert!(r.t < 1.0);
        assert!(r.min_singularity_distance < cfg().liftoff_eps);
    }

    #[test]
    fn inverse_flow_round_trip() {
        let z = inverse_flow(c(0.0, 5f64.sqrt()), &pc(), 1.0, &cfg()).unwrap();
        assert!((z - c(0.0, 3.0)).norm() < 1e-8);
        assert_eq!(inverse_flow(c(0.4, 0.3), &pc(), 0.0, &cfg()).unwrap(), c(0.4, 0.3));
        for sched in [pc(), cs()] {
            let w = c(-0.8, 0.6);
            let z = inverse_flow(w, &sched, 2.7, &cfg()).unwrap();
            let back = evolve_forward(z, &sched, 2.7, &cfg()).unwrap().w;
            assert!((back - w).norm() < 1e-8);
            let zm = inverse_flow(reflect(w), &sched, 2.7, &cfg()).unwrap();
            assert!((zm - reflect(z)).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_flow_rejects_real_targets() {
        assert!(inverse_flow(c(1.0, 0.0), &pc(), 1.0, &cfg()).is_err());
    }

    #[test]
    fn forward_flow_agrees_with_implicit_map() {
        let sc = Scenario::theorem_one(1.5, 1.0, 3.0).unwrap();
        for z in [c(-2.0, 0.5), c(0.4, 3.1), c(3.0, 1.0)] {
            let exact = solve_map(z, 2.5, &sc, &cfg()).unwrap().w;
            let flow = evolve_forward(z, &sc.schedule(), 2.5, &cfg()).unwrap().w;
            assert!((exact - flow).norm() < 1e-7, "{z}: {}", (exact - flow).norm());
        }
    }

    #[test]
    fn numeric_trace_near_switch_approaches_slit_tip() {
        let z = trace_numeric(&cs(), 1.0 + 1e-6, &cfg()).unwrap();
        assert!((z - c(0.0, 2.0)).norm() < 0.05);
        assert!(trace_numeric(&cs(), 1.0, &cfg()).is_err());
    }

    #[test]
    fn extrapolation_has_second_order_error() {
        // observed order from ε, ε/2, ε/4
        let sched = cs();
        let t = 2.0;
        let lam = sched.lambda2(t);
        let at = |e: f64| inverse_flow(c(lam, e), &sched, t, &cfg()).unwrap();
        let (a, b, d) = (at(4e-4), at(2e-4), at(1e-4));
        let order = ((a - b).norm() / (b - d).norm()).log2();
        assert!((order - 2.0).abs() < 0.1, "observed order {order}");
    }

    #[test]
    fn capacity_residual_scaling() {
        let res = capacity_residuals(&cs(), 2.0, &[10.0, 100.0, 1000.0], &cfg()).unwrap();
        for (r, radius) in res.iter().zip([10.0, 100.0, 1000.0]) {
            assert!(*r <= 4.0 / radius, "{r} at R = {radius}");
        }
        assert_eq!(capacity_check(&cs(), 0.0, &[10.0], &cfg()).unwrap(), 0.0);
        assert!(capacity_check(&cs(), 1.0, &[5.0], &cfg()).is_err());
    }
}
