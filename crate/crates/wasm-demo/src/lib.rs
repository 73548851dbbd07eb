//! Browser bindings: each export returns a standalone SVG string.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::fmt::Write;

use bouncing_billiard::dynamics::{orbit, OrbitOptions};
use bouncing_billiard::io::{render_svg, SvgStyle};
use bouncing_billiard::segment_theory::{
    b_of, rho, rotation_number, state_on_ellipse, step_ellipse, to_ellipse_coords,
};
use bouncing_billiard::{PhasePoint, Shape, Vec2};
use wasm_bindgen::prelude::*;

const MAX_STEPS: usize = 2_000_000;
const MAX_DOTS: usize = 20_000;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub fn shape_from(kind: &str, param: f64) -> Result<Shape, String> {
    let shape = match kind {
        "segment" => Ok(Shape::segment()),
        "square" => Ok(Shape::square()),
        "disc" => Shape::disc(Vec2::ZERO, param),
        "ellipse" => Shape::ellipse(1.0, param),
        "parabola" => Shape::parabola(param),
        other => return Err(format!("unknown shape {other}")),
    };
    shape.map_err(|e| e.to_string())
}

/// Orbit from `(x, y)` launched at `offset` cone widths from the bisector.
pub fn orbit_figure(kind: &str, param: f64, x: f64, y: f64, offset: f64, steps: usize) -> Result<String, String> {
    let shape = shape_from(kind, param)?;
    let p = Vec2::new(x, y);
    if shape.contains(p) {
        return Err("start point lies in the shape".into());
    }
    if !(offset.abs() < 0.5) {
        return Err("offset must lie strictly inside (-0.5, 0.5)".into());
    }
    let cone = shape.visual_cone(p).map_err(|e| e.to_string())?;
    let start = PhasePoint::new(p, cone.bisector + offset * cone.width());
    let steps = steps.min(MAX_STEPS);
    let every = (steps / MAX_DOTS).max(1);
    let rec = orbit(&shape, &start, steps, every, OrbitOptions { restart_on_degenerate: true });
    let style = SvgStyle {
        dot_radius: 1.5,
        ..SvgStyle::default()
    };
    Ok(render_svg(&shape, &[rec], &style))
}

/// Maps data coordinates onto a square canvas with a 5% margin.
struct Canvas {
    lo: Vec2,
    hi: Vec2,
    size: f64,
    body: String,
}

impl Canvas {
    fn new(lo: Vec2, hi: Vec2, size: f64) -> Self {
        let pad = Vec2::new(0.05 * (hi.x - lo.x), 0.05 * (hi.y - lo.y));
        Self {
            lo: lo - pad,
            hi: hi + pad,
            size,
            body: String::new(),
        }
    }

    fn px(&self, p: Vec2) -> (f64, f64) {
        let x = (p.x - self.lo.x) / (self.hi.x - self.lo.x) * self.size;
        let y = (self.hi.y - p.y) / (self.hi.y - self.lo.y) * self.size;
        (x, y)
    }

    fn polyline(&mut self, pts: &[Vec2], stroke: &str, extra: &str) {
        let mut d = String::new();
        for (i, &p) in pts.iter().enumerate() {
            let (x, y) = self.px(p);
            let _ = write!(d, "{}{x:.2},{y:.2} ", if i == 0 { "M" } else { "L" });
        }
        let _ = writeln!(self.body, r#"<path d="{}" fill="none" stroke="{stroke}" {extra}/>"#, d.trim_end());
    }

    fn dots(&mut self, pts: &[Vec2], fill: &str, r: f64) {
        let _ = writeln!(self.body, r#"<g fill="{fill}">"#);
        for &p in pts {
            let (x, y) = self.px(p);
            let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}"/>"#);
        }
        self.body.push_str("</g>\n");
    }

    fn text(&mut self, p: Vec2, s: &str) {
        let (x, y) = self.px(p);
        let _ = writeln!(self.body, r#"<text x="{x:.1}" y="{y:.1}" font-size="13" font-family="sans-serif">{s}</text>"#);
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            s = self.size
        )
    }
}

/// Orbits of the segment at height `h` in `(w, d)` coordinates, over the closed-form
/// invariant ellipses.
pub fn ellipse_figure(h: f64, count: usize, iterations: usize) -> Result<String, String> {
    if !(h > 0.0 && h.is_finite()) {
        return Err("height must be positive".into());
    }
    let count = count.clamp(1, 12);
    let iterations = iterations.min(20_000);
    let semi: Vec<(f64, f64)> = (1..=count)
        .map(|i| {
            let a = i as f64 / (count + 1) as f64;
            (a, b_of(a, h))
        })
        .collect();
    let reach = semi.iter().fold(0.0f64, |m, &(a, b)| m.max(a).max(b));
    let mut canvas = Canvas::new(Vec2::new(-reach, -reach), Vec2::new(reach, reach), 560.0);
    canvas.polyline(&[Vec2::new(-reach, 0.0), Vec2::new(reach, 0.0)], "#bbbbbb", "");
    canvas.polyline(&[Vec2::new(0.0, -reach), Vec2::new(0.0, reach)], "#bbbbbb", "");
    for (i, &(a, b)) in semi.iter().enumerate() {
        let curve: Vec<Vec2> = (0..=200)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 200.0;
                Vec2::new(a * t.cos(), b * t.sin())
            })
            .collect();
        canvas.polyline(&curve, "#999999", r#"stroke-dasharray="3 3""#);
        let s = state_on_ellipse(h, a, 0.3).map_err(|e| e.to_string())?;
        let mut e = to_ellipse_coords(&s);
        let mut pts = Vec::with_capacity(iterations);
        for _ in 0..iterations {
            pts.push(Vec2::new(e.w, e.d));
            e = step_ellipse(&e);
        }
        canvas.dots(&pts, PALETTE[i % PALETTE.len()], 1.6);
    }
    canvas.text(Vec2::new(-reach, reach), &format!("h = {h:.3}   horizontal: w   vertical: d"));
    Ok(canvas.finish())
}

/// Rotation number against the semi-axis `a` at height `h`, with its limits.
pub fn rotation_figure(h: f64, samples: usize) -> Result<String, String> {
    if !(h > 0.0 && h.is_finite()) {
        return Err("height must be positive".into());
    }
    let n = samples.clamp(2, 2000);
    let curve: Vec<Vec2> = (1..n)
        .map(|i| {
            let a = i as f64 / n as f64;
            Vec2::new(a, rotation_number(a, b_of(a, h)).phi)
        })
        .collect();
    let top = rho(h);
    let mut canvas = Canvas::new(Vec2::new(0.0, PI - 0.1), Vec2::new(1.0, 2.0 * PI + 0.1), 560.0);
    for level in [PI, 1.5 * PI, 2.0 * PI] {
        canvas.polyline(&[Vec2::new(0.0, level), Vec2::new(1.0, level)], "#dddddd", "");
    }
    canvas.polyline(&[Vec2::new(0.0, top), Vec2::new(1.0, top)], "#d62728", r#"stroke-dasharray="6 4""#);
    canvas.polyline(&curve, "#1f77b4", r#"stroke-width="2""#);
    canvas.text(Vec2::new(0.55, top + 0.12), &format!("ρ(h) = {top:.5}"));
    canvas.text(Vec2::new(0.02, 2.0 * PI + 0.02), "φ against a (a from 0 to 1)");
    canvas.text(Vec2::new(0.02, 1.5 * PI + 0.03), "3π/2");
    canvas.text(Vec2::new(0.02, PI + 0.03), "π");
    Ok(canvas.finish())
}

fn js<T>(r: Result<T, String>) -> Result<T, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn orbit_svg(kind: &str, param: f64, x: f64, y: f64, offset: f64, steps: usize) -> Result<String, JsValue> {
    js(orbit_figure(kind, param, x, y, offset, steps))
}

#[wasm_bindgen]
pub fn ellipses_svg(h: f64, count: usize, iterations: usize) -> Result<String, JsValue> {
    js(ellipse_figure(h, count, iterations))
}

#[wasm_bindgen]
pub fn rotation_svg(h: f64, samples: usize) -> Result<String, JsValue> {
    js(rotation_figure(h, samples))
}
