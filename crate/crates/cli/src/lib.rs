//! Command-line front end for the symmetric two-slit Loewner evolution:
//! trace CSV, single-point solves, verification reports and SVG figures.

pub mod error;
pub mod figure;
pub mod parse;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use loewner::exact::{certify, distance_to_slit, solve_map};
use loewner::ode::{evolve_forward, trace_numeric, FlowStatus};
use loewner::traces::{gamma0, mirror, refined_times, start_point, trace_at, uniform_times, TraceCurve, TraceLabel, TraceSample};
use loewner::verify::{run_suite, Suite};
use loewner::{ComplexPoint, Config, LoewnerError, Scenario64, Theorem};
use serde::Serialize;

pub use error::{CliError, CliResult};
pub use figure::{render_svg, FigureSpec};
pub use parse::parse_complex;

#[derive(Debug, Parser)]
#[command(name = "loewner", version, about = "Exact and numerical traces of a symmetric two-slit Loewner evolution")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write Γ₀, Γ₁, Γ₂ as CSV (`t,re,im,curve`).
    Trace(TraceArgs),
    /// Evaluate g(z, t) at one point and print JSON.
    Solve(SolveArgs),
    /// Run verification suites and write a JSON report.
    Verify(VerifyArgs),
    /// Render the hull as SVG.
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// 1: piecewise constant driving, 2: square-root driving.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub theorem: u8,
    /// Driving amplitude.
    #[arg(long = "A", default_value_t = 2.5, allow_negative_numbers = true)]
    pub a: f64,
    /// Time at which the two slits start.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t0: f64,
    /// Time horizon.
    #[arg(long = "T", default_value_t = 3.0, allow_negative_numbers = true)]
    pub horizon: f64,
}

impl ScenarioArgs {
    pub fn scenario(&self, cfg: &Config) -> CliResult<Scenario64> {
        let theorem = if self.theorem == 1 { Theorem::One } else { Theorem::Two };
        Scenario64::new(theorem, self.a, self.t0, self.horizon, cfg).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, default_value_t = 400, value_parser = clap::value_parser!(u64).range(2..))]
    pub samples: u64,
    /// Extra samples refined toward t₀ (exact traces only).
    #[arg(long, default_value_t = 100)]
    pub refine: u64,
    /// Extract Γ₂ by inverse flow instead of the exact formulas.
    #[arg(long)]
    pub numeric: bool,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Implicit,
    Ode,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Point in the upper half-plane, `<re>+<im>i`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: ComplexPoint,
    #[arg(long)]
    pub t: f64,
    #[arg(long, value_enum, default_value_t = Method::Implicit)]
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Oracle,
    Asymptotics,
    Geometry,
    Case3,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Oracle => Suite::Oracle,
            SuiteArg::Asymptotics => Suite::Asymptotics,
            SuiteArg::Geometry => Suite::Geometry,
            SuiteArg::Case3 => Suite::Case3,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Caption parameters of one of the four figures; overrides the scenario flags.
    #[arg(long, value_parser = ["fig1", "fig2", "fig3", "fig4"])]
    pub preset: Option<String>,
    #[arg(long, default_value_t = 400, value_parser = clap::value_parser!(u64).range(16..))]
    pub samples: u64,
    #[arg(long, default_value_t = 100)]
    pub refine: u64,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Dispatches a parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    let cfg = Config::default();
    match cli.command {
        Command::Trace(args) => cmd_trace(&args, &cfg),
        Command::Solve(args) => cmd_solve(&args, &cfg),
        Command::Verify(args) => cmd_verify(&args, &cfg),
        Command::Figure(args) => cmd_figure(&args, &cfg),
    }
}

fn emit(out: Option<&Path>, body: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, body).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

/// `Γ₂` by inverse flow; the start point itself is closed form.
fn numeric_trace(sc: &Scenario64, cfg: &Config, n: usize) -> CliResult<TraceCurve<f64>> {
    let schedule = sc.schedule();
    let samples = uniform_times(sc.t0, sc.horizon, n)
        .into_iter()
        .map(|t| {
            let z = if t == sc.t0 { start_point(sc) } else { trace_numeric(&schedule, t, cfg)? };
            Ok(TraceSample { t, z })
        })
        .collect::<Result<Vec<_>, LoewnerError>>()?;
    Ok(TraceCurve { samples, label: TraceLabel::Gamma2, scenario: *sc })
}

/// CSV rows `t,re,im,curve` for `Γ₀`, `Γ₁`, `Γ₂`, 17 significant digits.
pub fn trace_csv(curves: &[TraceCurve<f64>]) -> String {
    let mut csv = String::from("t,re,im,curve\n");
    for curve in curves {
        for s in &curve.samples {
            // + 0.0 folds −0 into 0
            let _ = writeln!(
                csv,
                "{:.16e},{:.16e},{:.16e},{}",
                s.t + 0.0,
                s.z.re + 0.0,
                s.z.im + 0.0,
                curve.label.tag()
            );
        }
    }
    csv
}

pub fn cmd_trace(args: &TraceArgs, cfg: &Config) -> CliResult<()> {
    let sc = args.scenario.scenario(cfg)?;
    let n = args.samples as usize;
    let g2 = if args.numeric {
        numeric_trace(&sc, cfg, n)?
    } else {
        trace_at(&sc, cfg, &refined_times(sc.t0, sc.horizon, n, args.refine as usize))?
    };
    let g1 = mirror(&g2)?;
    let g0 = gamma0(&sc, n);
    emit(args.out.as_deref(), &trace_csv(&[g0, g1, g2]))
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveOutput {
    pub w_re: f64,
    pub w_im: f64,
    /// Implicit-equation residual re-evaluated at `w` with a fresh branch.
    pub residual: f64,
    pub method: &'static str,
}

pub fn solve_point(sc: &Scenario64, z: ComplexPoint, t: f64, method: Method, cfg: &Config) -> CliResult<SolveOutput> {
    if !(t >= 0.0 && t <= sc.horizon) {
        return Err(LoewnerError::Domain(format!("time {t} outside [0, {}]", sc.horizon)).into());
    }
    if z.im.is_nan() || z.im <= 0.0 {
        return Err(LoewnerError::Domain(format!("{z} is not in the open upper half-plane")).into());
    }
    if t > 0.0 && distance_to_slit(z, 2.0 * t.min(sc.t0).sqrt()) <= cfg.liftoff_eps {
        return Err(LoewnerError::OnSlit { re: z.re, im: z.im }.into());
    }
    let (w, name) = match method {
        Method::Implicit => (solve_map(z, t, sc, cfg)?.w, "implicit"),
        Method::Ode => {
            let flow = evolve_forward(z, &sc.schedule(), t, cfg)?;
            if flow.status != FlowStatus::Completed {
                return Err(LoewnerError::Continuation {
                    t: flow.t,
                    reason: "point absorbed by a growing slit".into(),
                }
                .into());
            }
            (flow.w, "ode")
        }
    };
    let residual = certify(w, z, t, sc)?;
    Ok(SolveOutput { w_re: w.re, w_im: w.im, residual, method: name })
}

pub fn cmd_solve(args: &SolveArgs, cfg: &Config) -> CliResult<()> {
    let sc = args.scenario.scenario(cfg)?;
    let out = solve_point(&sc, args.z, args.t, args.method, cfg)?;
    let json = serde_json::to_string(&out).expect("plain struct serializes");
    emit(None, &format!("{json}\n"))
}

pub fn cmd_verify(args: &VerifyArgs, cfg: &Config) -> CliResult<()> {
    let sc = args.scenario.scenario(cfg)?;
    let report = run_suite(args.suite.into(), &sc, cfg)?;
    for c in &report.checks {
        eprintln!("{} {} measured={:e} threshold={:e}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.measured, c.threshold);
    }
    let json = report.to_json();
    emit(args.json.as_deref(), &format!("{json}\n"))?;
    let failed = report.failures().count();
    if failed > 0 {
        return Err(CliError::ChecksFailed { failed, total: report.checks.len() });
    }
    Ok(())
}

pub fn cmd_figure(args: &FigureArgs, cfg: &Config) -> CliResult<()> {
    let mut spec = match &args.preset {
        Some(name) => FigureSpec::preset(name).ok_or_else(|| CliError::Usage(format!("unknown preset {name}")))?,
        None => FigureSpec::new(args.scenario.scenario(cfg)?),
    };
    spec.samples_per_curve = args.samples as usize;
    spec.refine = args.refine as usize;
    let svg = render_svg(&spec, cfg)?;
    emit(args.out.as_deref(), &svg)
}
