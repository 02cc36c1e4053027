//! Implicit solutions on `[t₀, T]`, resolved by Newton continuation in time.

use serde::{Deserialize, Serialize};

use super::branch::{unwrap_near, BranchState};
use super::slit::{distance_to_slit, sqrt_map};
use crate::error::{LoewnerError, Result};
use crate::scalar::{Cx, Real};
use crate::types::{Scenario, SolverConfig, Theorem};

/// Outcome of [`thm1_solve`] / [`thm2_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImplicitSolveResult<T> {
    pub w: Cx<T>,
    /// `|residual|` of the implicit equation at `w`.
    pub residual: T,
    /// Newton iterations summed over all continuation steps.
    pub iterations: usize,
    /// Accepted continuation steps.
    pub path_steps: usize,
    /// Branch at the final point.
    pub branch: BranchState<T>,
}

/// `Log` of `w²` and of `z² + 4t₀` on the tracked sheets.
struct Logs<T> {
    w2: Cx<T>,
    base: Cx<T>,
}

fn logs<T: Real>(w: Cx<T>, arg_w2: T, base: Cx<T>, arg_base: T) -> Result<Logs<T>> {
    if w.norm_sqr() == T::zero() {
        return Err(LoewnerError::Singularity("w = 0 is a logarithmic branch point".into()));
    }
    if base.norm_sqr() == T::zero() {
        return Err(LoewnerError::Singularity("z² + 4t₀ = 0 (slit tip)".into()));
    }
    Ok(Logs {
        w2: Cx::new(w.norm_sqr().ln(), arg_w2),
        base: Cx::new(base.norm().ln(), arg_base),
    })
}

fn base_of<T: Real>(z: Cx<T>, t0: T) -> Cx<T> {
    z * z + T::lit(4.0) * t0
}

/// Residual of the piecewise-constant implicit solution,
/// `w² − z² − A² Log(w² / (z² + 4t₀)) − 4t`, with the log sheet taken from `br`.
pub fn thm1_residual<T: Real>(
    w: Cx<T>,
    z: Cx<T>,
    t: T,
    sc: &Scenario<T>,
    br: &BranchState<T>,
) -> Result<Cx<T>> {
    expect_theorem(sc, Theorem::One)?;
    let base = base_of(z, sc.t0);
    let lg = logs(w, br.unwrap_w(w), base, br.arg_base_accum)?;
    Ok(residual_one(w, z, t, sc.a, &lg))
}

fn residual_one<T: Real>(w: Cx<T>, z: Cx<T>, t: T, a: T, lg: &Logs<T>) -> Cx<T> {
    w * w - z * z - (lg.w2 - lg.base) * (a * a) - T::lit(4.0) * t
}

/// Residual of the square-root-driving implicit solution,
/// `(t − t₀) − w²/(A²+4) + (z²+4t₀)^{A²/4+1} w^{−A²/2} / (A²+4)`.
pub fn thm2_residual<T: Real>(
    w: Cx<T>,
    z: Cx<T>,
    t: T,
    sc: &Scenario<T>,
    br: &BranchState<T>,
) -> Result<Cx<T>> {
    expect_theorem(sc, Theorem::Two)?;
    let base = base_of(z, sc.t0);
    let lg = logs(w, br.unwrap_w(w), base, br.arg_base_accum)?;
    Ok(residual_two(w, t, sc, &lg).0)
}

/// Returns the residual and the power term `(z²+4t₀)^{A²/4+1} w^{−A²/2}`.
fn residual_two<T: Real>(w: Cx<T>, t: T, sc: &Scenario<T>, lg: &Logs<T>) -> (Cx<T>, Cx<T>) {
    let a2 = sc.a * sc.a;
    let q = a2 + T::lit(4.0);
    let p = a2 / T::lit(4.0);
    let power = (lg.base * (p + T::one()) - lg.w2 * p).exp();
    let r = Cx::from(t - sc.t0) - w * w / q + power / q;
    (r, power)
}

fn expect_theorem<T: Real>(sc: &Scenario<T>, th: Theorem) -> Result<()> {
    if sc.theorem != th {
        return Err(LoewnerError::Domain(format!(
            "scenario belongs to theorem {:?}, expected {:?}",
            sc.theorem, th
        )));
    }
    Ok(())
}

/// Residual, its `w`-derivative and the time derivative `dw/dt` of the
/// reduced flow for the scenario's theorem.
struct Family<'a, T> {
    sc: &'a Scenario<T>,
    z: Cx<T>,
    base: Cx<T>,
}

impl<T: Real> Family<'_, T> {
    fn eval(&self, w: Cx<T>, t: T, arg_w2: T, arg_base: T) -> Result<(Cx<T>, Cx<T>)> {
        let lg = logs(w, arg_w2, self.base, arg_base)?;
        let a2 = self.sc.a * self.sc.a;
        Ok(match self.sc.theorem {
            Theorem::One => {
                let r = residual_one(w, self.z, t, self.sc.a, &lg);
                let d = (w - Cx::from(a2) / w) * T::lit(2.0);
                (r, d)
            }
            Theorem::Two => {
                let (r, power) = residual_two(w, t, self.sc, &lg);
                let q = a2 + T::lit(4.0);
                let d = -(w * T::lit(2.0)) / q - power * (a2 / T::lit(2.0)) / (w * q);
                (r, d)
            }
        })
    }

    /// Right-hand side of the reduced flow on `[t₀, T]`.
    fn velocity(&self, w: Cx<T>, t: T) -> Cx<T> {
        let a2 = self.sc.a * self.sc.a;
        let lam2 = match self.sc.theorem {
            Theorem::One => a2,
            Theorem::Two => a2 * (t - self.sc.t0).max(T::zero()),
        };
        w * T::lit(2.0) / (w * w - lam2)
    }
}

/// Checks the input point and returns the seed `g(z, t₀)`.
fn seed<T: Real>(z: Cx<T>, t: T, sc: &Scenario<T>, cfg: &SolverConfig<T>) -> Result<Cx<T>> {
    let slack = T::epsilon() * T::lit(16.0) * sc.horizon;
    if !(t >= sc.t0 - slack && t <= sc.horizon + slack) {
        return Err(LoewnerError::Domain(format!(
            "time {t} outside [{}, {}]",
            sc.t0, sc.horizon
        )));
    }
    if !(z.im > T::zero()) {
        return Err(LoewnerError::Domain(format!("{z} is not in the open upper half-plane")));
    }
    if distance_to_slit(z, sc.slit_height()) <= cfg.liftoff_eps {
        return Err(LoewnerError::OnSlit { re: z.re.to_f64_lossy(), im: z.im.to_f64_lossy() });
    }
    sqrt_map(z, sc.t0)
}

struct Newton<T> {
    w: Cx<T>,
    arg_w2: T,
    residual: T,
    iterations: usize,
}

fn newton<T: Real>(
    fam: &Family<'_, T>,
    guess: Cx<T>,
    t: T,
    br: &BranchState<T>,
    cfg: &SolverConfig<T>,
    strict: bool,
) -> Option<Newton<T>> {
    let max_jump = T::FRAC_PI_2();
    let mut w = guess;
    let mut arg = unwrap_near((w * w).arg(), br.arg_w_accum);
    if (arg - br.arg_w_accum).abs() > max_jump {
        return None;
    }
    let stall = T::epsilon() * T::lit(8.0);
    for it in 0..=cfg.newton_max_iter {
        let (r, d) = fam.eval(w, t, arg, br.arg_base_accum).ok()?;
        let res = r.norm();
        if !res.is_finite() {
            return None;
        }
        if res <= cfg.newton_tol {
            return Some(Newton { w, arg_w2: arg, residual: res, iterations: it });
        }
        if it == cfg.newton_max_iter || d.norm_sqr() == T::zero() {
            return None;
        }
        let dw = r / d;
        if dw.norm() <= stall * w.norm() {
            // rounding floor; intermediate path points may stop a little above tol
            return (!strict && res <= cfg.newton_tol * T::lit(1e3))
                .then_some(Newton { w, arg_w2: arg, residual: res, iterations: it });
        }
        w -= dw;
        arg = unwrap_near((w * w).arg(), arg);
        if (arg - br.arg_w_accum).abs() > max_jump {
            return None;
        }
    }
    None
}

fn continuation<T: Real>(
    z: Cx<T>,
    t: T,
    sc: &Scenario<T>,
    cfg: &SolverConfig<T>,
) -> Result<ImplicitSolveResult<T>> {
    let w0 = seed(z, t, sc, cfg)?;
    let t = t.max(sc.t0).min(sc.horizon);
    let fam = Family { sc, z, base: base_of(z, sc.t0) };
    let mut br = BranchState::at_seed(w0);
    if t <= sc.t0 {
        let (r, _) = fam.eval(w0, sc.t0, br.arg_w_accum, br.arg_base_accum)?;
        return Ok(ImplicitSolveResult { w: w0, residual: r.norm(), iterations: 0, path_steps: 0, branch: br });
    }

    let h_max = (sc.horizon - sc.t0) / T::lit(64.0);
    let im_floor = -T::lit(1e-12);
    let mut h = h_max;
    let mut s = sc.t0;
    let mut w = w0;
    let mut iterations = 0;
    let mut path_steps = 0;
    let mut residual = T::zero();
    while s < t {
        let last = s + h >= t;
        let step = if last { t - s } else { h };
        let s_new = if last { t } else { s + h };
        let predictor = w + fam.velocity(w, s) * step;
        match newton(&fam, predictor, s_new, &br, cfg, last) {
            Some(n) if n.w.im >= im_floor => {
                iterations += n.iterations;
                path_steps += 1;
                w = n.w;
                br.arg_w_accum = n.arg_w2;
                residual = n.residual;
                s = s_new;
                h = (h * T::lit(2.0)).min(h_max);
            }
            _ => {
                h = step * T::lit(0.5);
                if h < cfg.min_step {
                    return Err(LoewnerError::Continuation {
                        t: s.to_f64_lossy(),
                        reason: format!(
                            "Newton failed with step below {}; z = {z} is on or too near a trace",
                            cfg.min_step
                        ),
                    });
                }
            }
        }
    }
    Ok(ImplicitSolveResult { w, residual, iterations, path_steps, branch: br })
}

/// `g(z, t)` for piecewise constant driving, `t ∈ [t₀, T]`.
pub fn thm1_solve<T: Real>(
    z: Cx<T>,
    t: T,
    sc: &Scenario<T>,
    cfg: &SolverConfig<T>,
) -> Result<ImplicitSolveResult<T>> {
    expect_theorem(sc, Theorem::One)?;
    continuation(z, t, sc, cfg)
}

/// `g(z, t)` for constant-then-square-root driving, `t ∈ [t₀, T]`.
pub fn thm2_solve<T: Real>(
    z: Cx<T>,
    t: T,
    sc: &Scenario<T>,
    cfg: &SolverConfig<T>,
) -> Result<ImplicitSolveResult<T>> {
    expect_theorem(sc, Theorem::Two)?;
    continuation(z, t, sc, cfg)
}

/// `g(z, t)` for any `t ∈ [0, T]`: the slit map before `t₀`, the implicit
/// solution of the scenario's theorem afterwards.
pub fn solve_map<T: Real>(
    z: Cx<T>,
    t: T,
    sc: &Scenario<T>,
    cfg: &SolverConfig<T>,
) -> Result<ImplicitSolveResult<T>> {
    if t < sc.t0 {
        if distance_to_slit(z, T::lit(2.0) * t.max(T::zero()).sqrt()) <= cfg.liftoff_eps && t > T::zero() {
            return Err(LoewnerError::OnSlit { re: z.re.to_f64_lossy(), im: z.im.to_f64_lossy() });
        }
        let w = sqrt_map(z, t)?;
        let residual = (w * w - z * z - T::lit(4.0) * t).norm();
        return Ok(ImplicitSolveResult {
            w,
            residual,
            iterations: 0,
            path_steps: 0,
            branch: BranchState::at_seed(w),
        });
    }
    continuation(z, t, sc, cfg)
}

/// Re-evaluates the implicit equation at `w` from scratch, reading the
/// branch off the half-plane positions of `w` and `g(z, t₀)`.
pub fn certify<T: Real>(w: Cx<T>, z: Cx<T>, t: T, sc: &Scenario<T>) -> Result<T> {
    if t < sc.t0 {
        return Ok((w * w - z * z - T::lit(4.0) * t).norm());
    }
    let br = BranchState::from_half_plane(w, sqrt_map(z, sc.t0)?);
    let r = match sc.theorem {
        Theorem::One => thm1_residual(w, z, t, sc, &br)?,
        Theorem::Two => thm2_residual(w, z, t, sc, &br)?,
    };
    Ok(r.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::reflect;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    fn one(a: f64) -> Scenario<f64> {
        Scenario::theorem_one(a, 1.0, 3.0).unwrap()
    }

    fn two(a: f64) -> Scenario<f64> {
        Scenario::theorem_two(a, 1.0, 3.0).unwrap()
    }

    fn cfg() -> SolverConfig<f64> {
        SolverConfig::default()
    }

    #[test]
    fn residuals_vanish_at_seed() {
        for z in [c(0.7, 0.4), c(-2.0, 1.5), c(0.0, 3.0), c(4.0, 0.01)] {
            let w = sqrt_map(z, 1.0).unwrap();
            let br = BranchState::at_seed(w);
            assert!(thm1_residual(w, z, 1.0, &one(2.5), &br).unwrap().norm() < 1e-14);
            assert!(thm2_residual(w, z, 1.0, &two(3.0), &br).unwrap().norm() < 1e-13);
        }
    }

    #[test]
    fn residual_rejects_wrong_theorem_and_singular_points() {
        let br = BranchState::new(0.0, 0.0);
        assert!(thm1_residual(c(1.0, 1.0), c(1.0, 1.0), 1.5, &two(3.0), &br).is_err());
        assert!(matches!(
            thm1_residual(c(0.0, 0.0), c(1.0, 1.0), 1.5, &one(2.5), &br),
            Err(LoewnerError::Singularity(_))
        ));
        assert!(matches!(
            thm1_residual(c(1.0, 1.0), c(0.0, 2.0), 1.5, &one(2.5), &br),
            Err(LoewnerError::Singularity(_))
        ));
        assert!(matches!(
            thm2_residual(c(0.0, 0.0), c(1.0, 1.0), 1.5, &two(3.0), &br),
            Err(LoewnerError::Singularity(_))
        ));
    }

    #[test]
    fn trace_point_satisfies_thm1_equation() {
        // Γ₂ point at t = 1.5 for A = 2.5, t₀ = 1, from mpmath root finding
        // cross-checked by an independent regularized integration
        let z = c(1.717_814_426_224_372_6, 1.429_612_633_759_434_6);
        let br = BranchState::new(0.0, (z * z + 4.0).arg());
        let r = thm1_residual(c(2.5, 0.0), z, 1.5, &one(2.5), &br).unwrap();
        assert!(r.norm() < 1e-13, "{}", r.norm());
    }

    #[test]
    fn thm1_matches_reference_value() {
        // reference: DOP853 at rtol 1e-13 polished by mpmath findroot
        let res = thm1_solve(c(2.0, 2.0), 1.5, &one(2.5), &cfg()).unwrap();
        let reference = c(2.662_879_126_677_878_7, 1.187_110_131_658_34);
        assert!((res.w - reference).norm() < 1e-12, "{}", res.w);
        assert!(res.residual <= 1e-12);
        assert!(res.path_steps >= 1);
    }

    #[test]
    fn thm2_matches_reference_values() {
        let res = thm2_solve(c(1.0, 1.0), 1.3, &two(3.0), &cfg()).unwrap();
        let reference = c(2.390_537_888_898_532_6, 0.371_169_277_236_435_2);
        assert!((res.w - reference).norm() < 1e-12, "{}", res.w);
        let res = thm2_solve(c(0.5, 2.0), 2.0, &two(3.0), &cfg()).unwrap();
        let reference = c(0.889_344_116_844_583_8, 0.331_871_552_805_101_33);
        assert!((res.w - reference).norm() < 1e-12, "{}", res.w);
    }

    #[test]
    fn solve_at_t0_returns_seed() {
        let z = c(0.3, 0.8);
        let seed = sqrt_map(z, 1.0).unwrap();
        let r1 = thm1_solve(z, 1.0, &one(2.5), &cfg()).unwrap();
        let r2 = thm2_solve(z, 1.0, &two(3.0), &cfg()).unwrap();
        assert_eq!(r1.w, seed);
        assert_eq!(r2.w, seed);
        assert_eq!(r1.iterations, 0);
        assert_eq!(r1.path_steps, 0);
    }

    fn fd_check(sc: &Scenario<f64>, z: Cx<f64>, t: f64, lam2: f64) {
        let h = 1e-4;
        let wp = solve_map(z, t + h, sc, &cfg()).unwrap().w;
        let wm = solve_map(z, t - h, sc, &cfg()).unwrap().w;
        let w = solve_map(z, t, sc, &cfg()).unwrap().w;
        let fd = (wp - wm) / (2.0 * h);
        let rhs = 2.0 * w / (w * w - lam2);
        assert!((fd - rhs).norm() < 1e-6, "{}", (fd - rhs).norm());
    }

    #[test]
    fn thm1_derivative_matches_flow() {
        fd_check(&one(2.5), c(2.0, 2.0), 1.5, 6.25);
    }

    #[test]
    fn thm2_derivative_matches_flow() {
        fd_check(&two(3.0), c(0.5, 2.0), 2.0, 9.0);
    }

    #[test]
    fn rejects_slit_neighbourhood_and_bad_time() {
        assert!(matches!(thm1_solve(c(0.0, 1.0), 1.5, &one(2.5), &cfg()), Err(LoewnerError::OnSlit { .. })));
        assert!(matches!(thm1_solve(c(5e-5, 1.0), 1.5, &one(2.5), &cfg()), Err(LoewnerError::OnSlit { .. })));
        assert!(matches!(thm2_solve(c(1e-5, 2.0), 1.5, &two(3.0), &cfg()), Err(LoewnerError::OnSlit { .. })));
        assert!(thm1_solve(c(1.0, 1.0), 0.5, &one(2.5), &cfg()).is_err());
        assert!(thm1_solve(c(1.0, 1.0), 3.5, &one(2.5), &cfg()).is_err());
        assert!(thm2_solve(c(1.0, 1.0), 1.5, &one(2.5), &cfg()).is_err());
    }

    #[test]
    fn real_branch_for_large_positive_points() {
        // nearly real z far out on the positive axis: w stays essentially real and positive
        let res = thm1_solve(c(8.0, 1e-9), 2.0, &one(2.5), &cfg()).unwrap();
        assert!(res.w.re > 0.0 && res.w.im.abs() < 1e-8);
        assert!(res.branch.arg_w_accum.abs() < 1e-8);
    }

    #[test]
    fn certify_is_independent_of_tracked_branch() {
        let z = c(-1.5, 0.3);
        let sc = one(1.5);
        let res = thm1_solve(z, 2.5, &sc, &cfg()).unwrap();
        assert!(certify(res.w, z, 2.5, &sc).unwrap() <= 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn mirror_symmetry(re in 0.2f64..4.0, im in 0.2f64..4.0, frac in 0.0f64..1.0, thm_two: bool) {
            let sc = if thm_two { two(3.0) } else { one(2.5) };
            let t = 1.0 + 2.0 * frac;
            let z = c(re, im);
            let a = solve_map(z, t, &sc, &cfg()).unwrap();
            let b = solve_map(reflect(z), t, &sc, &cfg()).unwrap();
            prop_assert!((b.w - reflect(a.w)).norm() < 1e-12);
            prop_assert!(a.residual <= 1e-12 && b.residual <= 1e-12);
            prop_assert!(a.w.im >= -1e-12);
        }
    }
}
