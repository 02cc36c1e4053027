//! Hand-emitted SVG of the hull `Γ₀ ∪ Γ₁ ∪ Γ₂`.

use std::fmt::Write;

use loewner::traces::{gamma0, mirror, refined_times, trace_at, TraceCurve, TraceLabel};
use loewner::{CaseTag, ComplexPoint, Config, Result, Scenario64, Theorem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas { width: 800.0, height: 440.0, margin: 40.0 }
    }
}

/// `[x_min, x_max] × [y_min, y_max]` in the `z`-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for AxisRange {
    fn default() -> Self {
        AxisRange { x_min: -4.0, x_max: 4.0, y_min: 0.0, y_max: 4.0 }
    }
}

impl AxisRange {
    fn contains(&self, z: ComplexPoint) -> bool {
        z.re >= self.x_min && z.re <= self.x_max && z.im >= self.y_min && z.im <= self.y_max
    }

    /// Smallest enlargement, in whole units, that contains every point.
    fn enclose<'a>(mut self, points: impl Iterator<Item = &'a ComplexPoint>) -> Self {
        for z in points {
            if !self.contains(*z) {
                self.x_min = self.x_min.min(z.re.floor());
                self.x_max = self.x_max.max(z.re.ceil());
                self.y_min = self.y_min.min(z.im.floor());
                self.y_max = self.y_max.max(z.im.ceil());
            }
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub scenario: Scenario64,
    pub curves: Vec<TraceLabel>,
    pub samples_per_curve: usize,
    /// Extra samples geometrically refined toward `t₀`.
    pub refine: usize,
    pub canvas: Canvas,
    pub axis_range: AxisRange,
}

impl FigureSpec {
    pub fn new(scenario: Scenario64) -> Self {
        FigureSpec {
            scenario,
            curves: vec![TraceLabel::Gamma0, TraceLabel::Gamma1, TraceLabel::Gamma2],
            samples_per_curve: 400,
            refine: 100,
            canvas: Canvas::default(),
            axis_range: AxisRange::default(),
        }
    }

    /// The caption presets: `t₀ = 1`, `T = 3` with `A = 2.5, 1.5, 2`
    /// (piecewise constant driving) and `A = 3` (square-root driving).
    pub fn preset(name: &str) -> Option<Self> {
        let (theorem, a) = match name {
            "fig1" => (Theorem::One, 2.5),
            "fig2" => (Theorem::One, 1.5),
            "fig3" => (Theorem::One, 2.0),
            "fig4" => (Theorem::Two, 3.0),
            _ => return None,
        };
        Scenario64::new(theorem, a, 1.0, 3.0, &Config::default()).ok().map(Self::new)
    }

    /// Affine map from the `z`-plane to canvas coordinates, `y` pointing down.
    pub fn to_canvas(&self, z: ComplexPoint) -> (f64, f64) {
        let Canvas { width, height, margin } = self.canvas;
        let r = &self.axis_range;
        let x = margin + (z.re - r.x_min) / (r.x_max - r.x_min) * (width - 2.0 * margin);
        let y = height - margin - (z.im - r.y_min) / (r.y_max - r.y_min) * (height - 2.0 * margin);
        (x, y)
    }
}

pub fn caption(sc: &Scenario64) -> String {
    let driving = match sc.theorem {
        Theorem::One => "piecewise constant driving".to_string(),
        Theorem::Two => "square-root driving".to_string(),
    };
    let case = match sc.case_tag {
        Some(CaseTag::I) => ", case (i)",
        Some(CaseTag::II) => ", case (ii)",
        Some(CaseTag::III) => ", case (iii)",
        None => "",
    };
    format!("{driving}{case}: t0={}, T={}, A={}", sc.t0, sc.horizon, sc.a)
}

fn dash(label: TraceLabel) -> &'static str {
    match label {
        TraceLabel::Gamma0 => " stroke-dasharray=\"2,4\"",
        TraceLabel::Gamma1 => " stroke-dasharray=\"10,5\"",
        TraceLabel::Gamma2 => "",
    }
}

/// Sampled curves of the figure, in the order of `spec.curves`.
pub fn figure_curves(spec: &FigureSpec, cfg: &Config) -> Result<Vec<TraceCurve<f64>>> {
    let sc = &spec.scenario;
    let times = refined_times(sc.t0, sc.horizon, spec.samples_per_curve.max(16), spec.refine);
    let g2 = trace_at(sc, cfg, &times)?;
    spec.curves
        .iter()
        .map(|label| match label {
            TraceLabel::Gamma0 => Ok(gamma0(sc, 2)),
            TraceLabel::Gamma1 => mirror(&g2),
            TraceLabel::Gamma2 => Ok(g2.clone()),
        })
        .collect()
}

/// Canvas coordinates rounded to the emitted precision, with consecutive
/// duplicates dropped.
pub fn polyline_points(spec: &FigureSpec, curve: &TraceCurve<f64>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(curve.len());
    for z in curve.points() {
        let (x, y) = spec.to_canvas(z);
        let p = (round6(x), round6(y));
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    out
}

fn round6(v: f64) -> f64 {
    // + 0.0 folds −0 into 0
    (v * 1e6).round() / 1e6 + 0.0
}

/// Renders the figure; the axis range grows if a sample falls outside it.
pub fn render_svg(spec: &FigureSpec, cfg: &Config) -> Result<String> {
    let curves = figure_curves(spec, cfg)?;
    let mut spec = spec.clone();
    spec.axis_range = spec.axis_range.enclose(curves.iter().flat_map(|c| c.samples.iter().map(|s| &s.z)));
    let Canvas { width, height, .. } = spec.canvas;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let r = spec.axis_range;
    let (x0, y0) = spec.to_canvas(ComplexPoint::new(r.x_min, 0.0));
    let (x1, _) = spec.to_canvas(ComplexPoint::new(r.x_max, 0.0));
    let _ = writeln!(
        svg,
        r#"<line id="baseline" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="gray" stroke-width="1"/>"#
    );
    for curve in &curves {
        let pts = polyline_points(&spec, curve)
            .iter()
            .map(|(x, y)| format!("{x},{y}"))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            svg,
            r#"<polyline id="{}" points="{pts}" fill="none" stroke="black" stroke-width="2"{}/>"#,
            curve.label.tag(),
            dash(curve.label)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text id="caption" x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        width / 2.0,
        height - 12.0,
        caption(&spec.scenario)
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}
