use std::f64::consts::PI;
use std::time::Instant;

use super::report::{Provenance, VerificationReport, RECORD_ONLY};
use crate::error::{LoewnerError, Result};
use crate::exact::{certify, solve_map, sqrt_map, thm1_solve, thm2_residual, thm2_solve, BranchState};
use crate::geometry::count_contacts;
use crate::ode::{evolve_forward, trace_numeric, FlowStatus};
use crate::scalar::{reflect, Cx};
use crate::traces::{
    case3_log_form_residual, gamma0, mirror, refined_times, thm1_case3_implicit_residual, thm1_trace_asymptotic,
    thm1_trace_at, thm1_trace_residual, thm2_angles, trace_at, uniform_times,
};
use crate::types::{CaseTag, Scenario, SolverConfig, Theorem};

type C64 = Cx<f64>;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// The 10×10 probe grid `Re ∈ [−5, 5]`, `Im ∈ [0.2, 5]`; no node lies on
/// the imaginary axis.
pub fn probe_grid() -> Vec<C64> {
    let xs = linspace(-5.0, 5.0, 10);
    let ys = linspace(0.2, 5.0, 10);
    xs.iter().flat_map(|&x| ys.iter().map(move |&y| C64::new(x, y))).collect()
}

fn sibling(sc: &Scenario<f64>, theorem: Theorem, cfg: &SolverConfig<f64>) -> Result<Scenario<f64>> {
    Scenario::new(theorem, sc.a, sc.t0, sc.horizon, cfg)
}

/// Implicit Newton continuation against direct integration of the flow on
/// the probe grid at five times in `[t₀, T]`.
pub fn suite_oracle_equivalence(sc: &Scenario<f64>, cfg: &SolverConfig<f64>) -> Result<VerificationReport> {
    let clock = Instant::now();
    let mut report = VerificationReport::new("oracle");
    let schedule = sc.schedule();
    let times = uniform_times(sc.t0, sc.horizon, 5);
    let grid = probe_grid();

    let mut max_dw = 0.0f64;
    let mut max_residual = 0.0f64;
    let mut failures = 0usize;
    let mut min_im = f64::INFINITY;
    for &z in &grid {
        for &t in &times {
            let implicit = solve_map(z, t, sc, cfg);
            let flow = evolve_forward(z, &schedule, t, cfg);
            match (implicit, flow) {
                (Ok(exact), Ok(flow)) if flow.status == FlowStatus::Completed => {
                    max_dw = max_dw.max((exact.w - flow.w).norm());
                    max_residual = max_residual.max(certify(exact.w, z, t, sc)?);
                    min_im = min_im.min(exact.w.im);
                }
                _ => failures += 1,
            }
        }
    }
    report.check("oracle.failed_points", failures as f64, 0.0, Provenance::Derived);
    report.check("oracle.max_dw_ode_vs_implicit", max_dw, 1e-7, Provenance::Derived);
    report.check("oracle.max_implicit_residual", max_residual, cfg.newton_tol, Provenance::Derived);
    report.check("oracle.min_im_w", -min_im, 1e-12, Provenance::Trivial);

    // both implicit solvers start from the slit map at t₀
    let one = sibling(sc, Theorem::One, cfg)?;
    let two = sibling(sc, Theorem::Two, cfg)?;
    let mut splice = 0.0f64;
    for &z in &grid {
        let seed = sqrt_map(z, sc.t0)?;
        splice = splice.max((thm1_solve(z, sc.t0, &one, cfg)?.w - seed).norm());
        splice = splice.max((thm2_solve(z, sc.t0, &two, cfg)?.w - seed).norm());
    }
    report.check("oracle.splice_at_t0", splice, 1e-12, Provenance::Trivial);
    report.runtime_s = clock.elapsed().as_secs_f64();
    Ok(report)
}

/// Exponent and coefficient of `z(t₀ + δ) − z(t₀)` fitted on the exact trace.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticFit {
    pub exponent: f64,
    pub coefficient: C64,
}

/// Log-log slope of `|z − base|` against `δ`, then the coefficient as the
/// intercept of `(z − base)/δ^p = c + d·√δ` at the nominal exponent `p`.
pub fn fit_asymptotics(deltas: &[f64], offsets: &[C64], nominal_exponent: f64) -> Result<AsymptoticFit> {
    let usable: Vec<(f64, C64)> = deltas
        .iter()
        .zip(offsets)
        .filter(|(d, o)| **d > 0.0 && o.norm() > 0.0 && o.norm().is_finite())
        .map(|(d, o)| (*d, *o))
        .collect();
    if usable.len() < 4 {
        return Err(LoewnerError::InsufficientData(format!("{} usable samples, need 4", usable.len())));
    }
    let n = usable.len() as f64;
    let xs: Vec<f64> = usable.iter().map(|(d, _)| d.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|(_, o)| o.norm().ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let exponent = sxy / sxx;

    let us: Vec<f64> = usable.iter().map(|(d, _)| d.sqrt()).collect();
    let vs: Vec<C64> = usable.iter().map(|(d, o)| o / d.powf(nominal_exponent)).collect();
    let mu = us.iter().sum::<f64>() / n;
    let mv = vs.iter().sum::<C64>() / n;
    let suu: f64 = us.iter().map(|u| (u - mu) * (u - mu)).sum();
    let suv: C64 = us.iter().zip(&vs).map(|(u, v)| (v - mv) * (u - mu)).sum();
    let coefficient = mv - suv / suu * mu;
    Ok(AsymptoticFit { exponent, coefficient })
}

/// Regression of the exact trace near `t₀` against the leading-order
/// expansion, `δ ∈ [1e−6, 1e−3]`.
pub fn suite_asymptotics(sc: &Scenario<f64>, cfg: &SolverConfig<f64>) -> Result<VerificationReport> {
    let clock = Instant::now();
    if sc.theorem != Theorem::One {
        return Err(LoewnerError::Domain("asymptotics suite needs piecewise constant driving".into()));
    }
    let mut report = VerificationReport::new("asymptotics");
    let expansion = thm1_trace_asymptotic(sc)?;
    let deltas: Vec<f64> = (0..12).map(|k| 10f64.powf(-6.0 + 3.0 * k as f64 / 11.0)).collect();
    let mut times = vec![sc.t0];
    times.extend(deltas.iter().map(|d| sc.t0 + d));
    let trace = thm1_trace_at(sc, cfg, &times)?;
    let base = trace.samples[0].z;
    let offsets: Vec<C64> = trace.samples[1..].iter().map(|s| s.z - base).collect();
    let fit = fit_asymptotics(&deltas, &offsets, expansion.exponent)?;

    let case = sc.case_tag.expect("theorem one has a case tag");
    let target_arg = match case {
        CaseTag::I => PI / 2.0,
        CaseTag::II => 0.0,
        CaseTag::III => PI / 4.0,
    };
    let nominal = if case == CaseTag::III { 0.25 } else { 0.5 };
    report.check("asym.exponent", (fit.exponent - nominal).abs(), 0.02, Provenance::Derived);
    report.check(
        "asym.coefficient_modulus_rel",
        (fit.coefficient.norm() - expansion.coefficient.norm()).abs() / expansion.coefficient.norm(),
        0.01,
        Provenance::Derived,
    );
    report.check("asym.coefficient_arg", (fit.coefficient.arg() - target_arg).abs(), 0.01, Provenance::Paper);

    // a² = −2A²/(A² − 4t₀) or b⁴ = −32t₀
    let relation = match case {
        CaseTag::III => (expansion.coefficient.powi(4) + 32.0 * sc.t0).norm(),
        _ => {
            let a2 = sc.a * sc.a;
            (expansion.coefficient * expansion.coefficient + 2.0 * a2 / (a2 - 4.0 * sc.t0)).norm()
        }
    };
    report.check("asym.coefficient_relation", relation, 1e-10, Provenance::Paper);
    report.runtime_s = clock.elapsed().as_secs_f64();
    Ok(report)
}

/// Start points, departure angles, trace equations, rectilinearity,
/// symmetry, the fixed slit, and sampled simplicity of `Γ₀ ∪ Γ₁ ∪ Γ₂`.
pub fn suite_geometry(sc: &Scenario<f64>, cfg: &SolverConfig<f64>) -> Result<VerificationReport> {
    let clock = Instant::now();
    let mut report = VerificationReport::new("geometry");
    let (a, t0) = (sc.a, sc.t0);
    let a2 = a * a;
    let times = refined_times(t0, sc.horizon, 400, 100);
    let g2 = trace_at(sc, cfg, &times)?;
    let g1 = mirror(&g2)?;
    let g0 = gamma0(sc, 64);

    let expected_start = match (sc.theorem, sc.case_tag) {
        (Theorem::Two, _) => C64::new(0.0, 2.0 * t0.sqrt()),
        (_, Some(CaseTag::I)) => C64::new((a2 - 4.0 * t0).sqrt(), 0.0),
        (_, Some(CaseTag::II)) => C64::new(0.0, (4.0 * t0 - a2).sqrt()),
        _ => C64::new(0.0, 0.0),
    };
    report.check("geom.start_point", (g2.samples[0].z - expected_start).norm(), 1e-8, Provenance::Paper);

    let departure = 1e-8;
    let near = trace_at(sc, cfg, &[t0, t0 + departure])?;
    let direction = (near.samples[1].z - near.samples[0].z).arg();
    match (sc.theorem, sc.case_tag) {
        (Theorem::Two, _) => {
            let (segment, tangent) = thm2_angles(a);
            report.check("geom.tangent_angle", (direction - tangent).abs(), 1e-3, Provenance::Paper);
            // uniform samples: near the tip z² + 4t₀ loses all relative
            // precision to cancellation, so refined times would only measure rounding
            let uniform = trace_at(sc, cfg, &uniform_times(t0, sc.horizon, 400))?;
            let dev = uniform
                .samples
                .iter()
                .filter(|s| s.t > t0)
                .map(|s| ((s.z * s.z + 4.0 * t0).arg() - segment).abs())
                .fold(0.0, f64::max);
            report.check("geom.rectilinearity", dev, 1e-10, Provenance::Paper);
            let mut res = 0.0f64;
            for s in g2.samples.iter().filter(|s| s.t > t0) {
                let w = C64::new(a * (s.t - t0).sqrt(), 0.0);
                let br = BranchState::new(0.0, (s.z * s.z + 4.0 * t0).arg());
                res = res.max(thm2_residual(w, s.z, s.t, sc, &br)?.norm());
            }
            report.check("geom.trace_equation_max", res, 1e-10, Provenance::Paper);
        }
        (_, Some(case)) => {
            let (id, target) = match case {
                CaseTag::I => ("geom.departure_orthogonal_to_real_axis", PI / 2.0),
                CaseTag::II => ("geom.departure_orthogonal_to_imaginary_axis", 0.0),
                CaseTag::III => ("geom.departure_angle_pi_over_4", PI / 4.0),
            };
            report.check(id, (direction - target).abs(), 1e-3, Provenance::Paper);
            let res = g2
                .samples
                .iter()
                .map(|s| thm1_trace_residual(s.z, s.t, sc).map(|r| r.norm()))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            report.check("geom.trace_equation_max", res, 1e-8, Provenance::Paper);
            if case == CaseTag::III {
                let res = g2
                    .samples
                    .iter()
                    .map(|s| thm1_case3_implicit_residual(s.z, s.t, sc).map(|r| r.norm()))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(0.0, f64::max);
                report.check("geom.case3_equation_max", res, 1e-8, Provenance::Derived);
            }
        }
        _ => unreachable!("theorem one always carries a case tag"),
    }

    let mirror_err = g1
        .samples
        .iter()
        .zip(&g2.samples)
        .map(|(l, r)| (l.z - reflect(r.z)).norm() + (l.t - r.t).abs())
        .fold(0.0, f64::max);
    report.check("geom.mirror_identity", mirror_err, 1e-12, Provenance::Trivial);
    let wrong_side = g2.samples.iter().filter(|s| s.z.re < 0.0 || s.z.im < -1e-10).count()
        + g1.samples.iter().filter(|s| s.z.re > 0.0).count();
    report.check("geom.half_plane_sides", wrong_side as f64, 0.0, Provenance::Paper);
    let g0_ends = g0.samples[0].z.norm() + (g0.samples.last().unwrap().z - C64::new(0.0, 2.0 * t0.sqrt())).norm();
    report.check("geom.gamma0_endpoints", g0_ends, 1e-12, Provenance::Paper);
    let monotone = [&g0, &g1, &g2].iter().filter(|c| !c.times_strictly_increasing()).count();
    report.check("geom.time_monotone", monotone as f64, 0.0, Provenance::Trivial);

    let p0: Vec<C64> = g0.points().collect();
    let p1: Vec<C64> = g1.points().collect();
    let p2: Vec<C64> = g2.points().collect();
    let contacts = count_contacts(&[&p0, &p1, &p2], &[expected_start], 1e-9);
    report.check("geom.simplicity_contacts", contacts as f64, 0.0, Provenance::Derived);

    // numeric tip extraction against the exact trace
    let schedule = sc.schedule();
    let probe_times: Vec<f64> = (1..=10).map(|k| t0 + (sc.horizon - t0) * k as f64 / 10.0).collect();
    let exact = trace_at(sc, cfg, &probe_times)?;
    let mut worst = 0.0f64;
    for s in &exact.samples {
        let z = trace_numeric(&schedule, s.t, cfg)?;
        worst = worst.max((z - s.z).norm());
    }
    report.check("geom.numeric_trace_max_dev", worst, 1e-5, Provenance::Derived);

    report.runtime_s = clock.elapsed().as_secs_f64();
    Ok(report)
}

/// `z(t)` on the degenerate trace by classical RK4 in `σ = √(t − t₀)`, where
/// `u = z²` obeys the regular equation `du/dσ = −8σ(u + 4t₀)/u`.
fn degenerate_trace_oracle(t0: f64, times: &[f64]) -> Vec<C64> {
    let a = 2.0 * t0.sqrt();
    let f = |sigma: f64, u: C64| -(u + 4.0 * t0) * (8.0 * sigma) / u;
    let sigma0 = 1e-7;
    // leading behaviour u ≈ 2√2·A·i·σ
    let mut u = C64::new(0.0, 2.0 * 2f64.sqrt() * a) * sigma0;
    let mut sigma = sigma0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let target = (t - t0).sqrt();
        let n = (((target - sigma) / 2e-5).ceil() as usize).max(1);
        let h = (target - sigma) / n as f64;
        for _ in 0..n {
            let k1 = f(sigma, u);
            let k2 = f(sigma + h / 2.0, u + k1 * (h / 2.0));
            let k3 = f(sigma + h / 2.0, u + k2 * (h / 2.0));
            let k4 = f(sigma + h, u + k3 * h);
            u += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            sigma += h;
        }
        sigma = target;
        let z = u.sqrt();
        out.push(if z.re < 0.0 { -z } else { z });
    }
    out
}

/// Decides between the two candidate degenerate-case trace equations
/// (log coefficient `4t₀` versus `4`) with an independent integration of
/// `(z⁴)' = −8(z² + 4t₀)`. When the candidates coincide (`t₀ = 1`) the
/// distinguishing run `t₀ = 2.25` is added.
pub fn suite_case3_adjudication(t0: f64, cfg: &SolverConfig<f64>) -> Result<VerificationReport> {
    let clock = Instant::now();
    let mut report = VerificationReport::new("case3");
    let mut runs = vec![t0];
    if (4.0 * t0 - 4.0).abs() <= 1e-12 {
        runs.push(2.25);
    }
    for t0 in runs {
        let a = 2.0 * t0.sqrt();
        let times: Vec<f64> = (1..=10).map(|k| t0 + k as f64 / 10.0).collect();
        let oracle = degenerate_trace_oracle(t0, &times);
        let residual_max = |coeff: f64| -> Result<f64> {
            let mut worst = 0.0f64;
            for (z, &t) in oracle.iter().zip(&times) {
                worst = worst.max(case3_log_form_residual(*z, t, a, t0, coeff)?.norm());
            }
            Ok(worst)
        };
        let corrected = residual_max(4.0 * t0)?;
        let literal = residual_max(4.0)?;
        let tag = format!("case3.t0={t0}");
        report.check(format!("{tag}.corrected_form_residual"), corrected, 1e-8, Provenance::Derived);
        report.check(format!("{tag}.unit_log_form_residual"), literal, RECORD_ONLY, Provenance::Derived);
        let consistent = [corrected, literal].iter().filter(|r| **r <= 1e-8).count();
        if (4.0 * t0 - 4.0).abs() > 1e-12 {
            report.check(format!("{tag}.consistent_form_count_minus_one"), (consistent as f64 - 1.0).abs(), 0.0, Provenance::Derived);
            report.check(
                format!("{tag}.corrected_form_is_the_consistent_one"),
                if corrected <= 1e-8 && literal > 1e-8 { 0.0 } else { 1.0 },
                0.0,
                Provenance::Derived,
            );
        } else {
            report.check(format!("{tag}.forms_coincide"), (4.0 * t0 - 4.0).abs(), 1e-12, Provenance::Trivial);
        }

        // the trace module's own integration, checked against the same oracle
        let sc = Scenario::new(Theorem::One, a, t0, t0 + 1.0, cfg)?;
        let mut grid = vec![t0];
        grid.extend(&times);
        let traced = thm1_trace_at(&sc, cfg, &grid)?;
        let dev = traced.samples[1..]
            .iter()
            .zip(&oracle)
            .map(|(s, z)| (s.z - z).norm())
            .fold(0.0, f64::max);
        report.check(format!("{tag}.trace_module_vs_oracle"), dev, 1e-8, Provenance::Derived);
    }
    report.runtime_s = clock.elapsed().as_secs_f64();
    Ok(report)
}

/// Which suites to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Oracle,
    Asymptotics,
    Geometry,
    Case3,
    All,
}

/// Runs `suite`; `All` merges every applicable suite into one report
/// (asymptotics only for piecewise constant driving).
pub fn run_suite(suite: Suite, sc: &Scenario<f64>, cfg: &SolverConfig<f64>) -> Result<VerificationReport> {
    match suite {
        Suite::Oracle => suite_oracle_equivalence(sc, cfg),
        Suite::Asymptotics => suite_asymptotics(sc, cfg),
        Suite::Geometry => suite_geometry(sc, cfg),
        Suite::Case3 => suite_case3_adjudication(sc.t0, cfg),
        Suite::All => {
            let mut report = VerificationReport::new("all");
            report.absorb(suite_oracle_equivalence(sc, cfg)?);
            if sc.theorem == Theorem::One {
                report.absorb(suite_asymptotics(sc, cfg)?);
            }
            report.absorb(suite_geometry(sc, cfg)?);
            report.absorb(suite_case3_adjudication(sc.t0, cfg)?);
            Ok(report)
        }
    }
}
