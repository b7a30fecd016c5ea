//! Minimal SVG 1.1 plots.

use shadowtrace::{ClosedCurve, CuspEvent, SweepPoint, Trajectory, Vec2};
use std::f64::consts::TAU;
use std::fmt::Write;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 30.0;
const MAX_POLYLINE: usize = 6000;

/// Maps data coordinates into the drawing square, keeping the aspect ratio
/// when `equal` is set and flipping y.
struct Frame {
    min: Vec2,
    sx: f64,
    sy: f64,
}

impl Frame {
    fn fit(points: &[Vec2], equal: bool) -> Self {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points.iter().filter(|p| p.x.is_finite() && p.y.is_finite()) {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if !lo.x.is_finite() {
            lo = Vec2::new(-1.0, -1.0);
            hi = Vec2::new(1.0, 1.0);
        }
        let span = |a: f64, b: f64| if b - a > 1e-12 { b - a } else { 1.0 };
        let inner = SIZE - 2.0 * MARGIN;
        let (mut sx, mut sy) = (inner / span(lo.x, hi.x), inner / span(lo.y, hi.y));
        if equal {
            sx = sx.min(sy);
            sy = sx;
        }
        Frame { min: lo, sx, sy }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        (MARGIN + (p.x - self.min.x) * self.sx, SIZE - MARGIN - (p.y - self.min.y) * self.sy)
    }
}

fn header() -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn polyline(out: &mut String, frame: &Frame, pts: &[Vec2], class: &str, stroke: &str) {
    if pts.len() < 2 {
        return;
    }
    let step = pts.len().div_ceil(MAX_POLYLINE).max(1);
    let mut coords = String::new();
    let last = pts.len() - 1;
    for (i, p) in pts.iter().enumerate() {
        if i % step == 0 || i == last {
            let (x, y) = frame.map(*p);
            let _ = write!(coords, "{x:.2},{y:.2} ");
        }
    }
    let _ = writeln!(
        out,
        "<polyline class=\"{class}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1\" points=\"{}\"/>",
        coords.trim_end()
    );
}

fn marker(out: &mut String, frame: &Frame, p: Vec2, class: &str, r: f64, fill: &str) {
    let (x, y) = frame.map(p);
    let _ = writeln!(out, "<circle class=\"{class}\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r}\" fill=\"{fill}\" stroke=\"black\"/>");
}

/// Escaping curve, shadowing curve, initial points and cusps.
pub fn trajectory_svg(curve: &ClosedCurve, trajectory: &Trajectory, cusps: &[CuspEvent]) -> String {
    let escaping: Vec<Vec2> = (0..=512).map(|i| curve.evaluate(TAU * i as f64 / 512.0)).collect();
    let shadowing: Vec<Vec2> = trajectory.samples.iter().map(|s| s.position).collect();
    let mut all = escaping.clone();
    all.extend(&shadowing);
    let frame = Frame::fit(&all, true);
    let mut out = header();
    polyline(&mut out, &frame, &escaping, "escaping", "#888888");
    polyline(&mut out, &frame, &shadowing, "shadowing", "#1f4e9c");
    let t0 = trajectory.first().t;
    marker(&mut out, &frame, curve.evaluate(t0), "initial", 4.0, "white");
    marker(&mut out, &frame, trajectory.first().position, "initial", 4.0, "white");
    for c in cusps {
        marker(&mut out, &frame, c.location, "cusp", 2.5, "#c0392b");
    }
    out.push_str("</svg>\n");
    out
}

/// `ρ` against `R`. Failed points are left out.
pub fn sweep_svg(points: &[SweepPoint]) -> String {
    let data: Vec<Vec2> = points
        .iter()
        .filter_map(|p| p.estimate.as_ref().ok().map(|e| Vec2::new(p.radius, e.value)))
        .collect();
    let frame = Frame::fit(&data, false);
    let mut out = header();
    let lo = frame.min;
    let hi = Vec2::new(lo.x + (SIZE - 2.0 * MARGIN) / frame.sx, lo.y + (SIZE - 2.0 * MARGIN) / frame.sy);
    polyline(&mut out, &frame, &[Vec2::new(lo.x, lo.y), Vec2::new(hi.x, lo.y)], "axis", "black");
    polyline(&mut out, &frame, &[Vec2::new(lo.x, lo.y), Vec2::new(lo.x, hi.y)], "axis", "black");
    for (label, anchor, p) in [("R", "end", Vec2::new(hi.x, lo.y)), ("rho", "start", Vec2::new(lo.x, hi.y))] {
        let (x, y) = frame.map(p);
        let _ = writeln!(out, "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"{anchor}\">{label}</text>", y + 16.0);
    }
    polyline(&mut out, &frame, &data, "rotation-number", "#1f4e9c");
    if data.len() < 2 {
        for p in &data {
            marker(&mut out, &frame, *p, "rotation-number", 3.0, "#1f4e9c");
        }
    }
    out.push_str("</svg>\n");
    out
}
