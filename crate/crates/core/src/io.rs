//! Scenario files, orbit CSV, SVG figures and the parameter sweep runner.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, SearchLoop};
use crate::dynamics::{self, OrbitOptions, OrbitRecord, PhasePoint, SegmentState, Termination};
use crate::geometry::{Angle, Shape, Vec2};
use crate::segment_theory;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_MAX_CELLS: usize = 100_000;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Validation(String),
}

/// Shape parameters as written in scenario files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeSpec {
    Segment,
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    Disc {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    Parabola {
        height: f64,
    },
}

impl ShapeSpec {
    pub fn to_shape(&self) -> crate::Result<Shape> {
        match self {
            ShapeSpec::Segment => Ok(Shape::segment()),
            ShapeSpec::Polygon { vertices } => {
                Shape::polygon(vertices.iter().map(|&[x, y]| Vec2::new(x, y)).collect())
            }
            ShapeSpec::Disc { center, radius } => {
                Shape::disc(Vec2::new(center[0], center[1]), *radius)
            }
            ShapeSpec::Ellipse { a, b } => Shape::ellipse(*a, *b),
            ShapeSpec::Parabola { height } => Shape::parabola(*height),
        }
    }
}

/// An initial condition, either in segment coordinates (`theta`) or as an absolute
/// position and direction (`angle`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialSpec {
    Segment(SegmentInit),
    Phase(PhaseInit),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentInit {
    pub x: f64,
    pub h: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseInit {
    pub x: f64,
    pub y: f64,
    pub angle: f64,
}

impl InitialSpec {
    pub fn to_phase_point(&self) -> PhasePoint {
        match *self {
            InitialSpec::Segment(s) => SegmentState {
                x: s.x,
                h: s.h,
                theta: s.theta,
            }
            .to_phase_point(),
            InitialSpec::Phase(p) => PhasePoint::new(Vec2::new(p.x, p.y), Angle::new(p.angle)),
        }
    }

    pub fn from_phase_point(pp: &PhasePoint) -> Self {
        InitialSpec::Phase(PhaseInit {
            x: pp.p.x,
            y: pp.p.y,
            angle: pp.v.radians(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisOptions {
    #[serde(default)]
    pub lyapunov: bool,
    #[serde(default)]
    pub periodic: bool,
    #[serde(default)]
    pub jacobian: bool,
    #[serde(default = "default_max_period")]
    pub max_period: usize,
    #[serde(default = "default_periodic_tol")]
    pub tol: f64,
}

fn default_max_period() -> usize {
    16
}

fn default_periodic_tol() -> f64 {
    1e-8
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            lyapunov: false,
            periodic: false,
            jacobian: false,
            max_period: default_max_period(),
            tol: default_periodic_tol(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub svg: Option<String>,
    #[serde(default)]
    pub report: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default = "default_id")]
    pub id: String,
    pub shape: ShapeSpec,
    pub initial: Vec<InitialSpec>,
    pub steps: usize,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub restart_on_degenerate: bool,
    #[serde(default)]
    pub analysis: AnalysisOptions,
    #[serde(default)]
    pub output: OutputPaths,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

fn default_id() -> String {
    "scenario".into()
}

fn default_record_every() -> usize {
    1
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::Schema {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

/// Parses and validates a scenario; every default is filled in on the result.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let cfg: ScenarioConfig = from_json(text)?;
    cfg.validate()?;
    Ok(cfg)
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Validation(m));
        if self.version != SCHEMA_VERSION {
            return invalid(format!("unsupported version {}", self.version));
        }
        let shape = self.shape().map_err(|e| ConfigError::Validation(e.to_string()))?;
        if self.initial.is_empty() {
            return invalid("at least one initial condition is required".into());
        }
        if self.record_every == 0 {
            return invalid("record_every must be at least 1".into());
        }
        if self.analysis.max_period == 0 || !(self.analysis.tol > 0.0) {
            return invalid("analysis.max_period and analysis.tol must be positive".into());
        }
        for (i, init) in self.initial.iter().enumerate() {
            if let InitialSpec::Segment(s) = init {
                if shape != Shape::Segment {
                    return invalid(format!("initial[{i}]: theta coordinates need the segment"));
                }
                let state = SegmentState {
                    x: s.x,
                    h: s.h,
                    theta: s.theta,
                };
                state.validate().map_err(|e| ConfigError::Validation(format!("initial[{i}]: {e}")))?;
            }
            let pp = init.to_phase_point();
            if !(pp.p.is_finite() && pp.v.radians().is_finite()) {
                return invalid(format!("initial[{i}]: non-finite value"));
            }
            if shape.contains(pp.p) {
                return invalid(format!("initial[{i}]: point lies in the shape"));
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> crate::Result<Shape> {
        self.shape.to_shape()
    }

    pub fn initial_points(&self) -> Vec<PhasePoint> {
        self.initial.iter().map(InitialSpec::to_phase_point).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Periodic orbit found from one initial condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicSummary {
    pub period: usize,
    pub closure_error: f64,
    pub determinant: f64,
    /// `[re, im]` pairs sorted by modulus.
    pub eigenvalues: [[f64; 2]; 3],
    pub unit_eigenvalue_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitReport {
    pub index: usize,
    pub termination: String,
    pub records: usize,
    pub steps_completed: usize,
    pub max_radius: f64,
    pub height_drift: Option<f64>,
    pub invariant_drift: Option<f64>,
    pub measured_rotation: Option<f64>,
    pub lyapunov: Option<f64>,
    pub restarts: usize,
    pub jacobian_det: Option<f64>,
    pub periodic: Option<PeriodicSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub id: String,
    pub shape: Shape,
    pub records: Vec<OrbitRecord>,
    pub reports: Vec<OrbitReport>,
}

impl ScenarioRun {
    pub fn report_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            id: &'a str,
            orbits: &'a [OrbitReport],
        }
        serde_json::to_string_pretty(&Doc {
            id: &self.id,
            orbits: &self.reports,
        })
        .expect("report serializes")
    }
}

/// Runs every initial condition of a validated scenario, in parallel, in input order.
pub fn run_scenario(cfg: &ScenarioConfig) -> crate::Result<ScenarioRun> {
    let shape = cfg.shape()?;
    let options = OrbitOptions {
        restart_on_degenerate: cfg.restart_on_degenerate,
    };
    let results: Vec<(OrbitRecord, OrbitReport)> = cfg
        .initial_points()
        .par_iter()
        .enumerate()
        .map(|(i, pp)| {
            let mut rec = dynamics::orbit(&shape, pp, cfg.steps, cfg.record_every, options);
            rec.scenario_id = cfg.id.clone();
            if cfg.analysis.lyapunov {
                rec.summary.lyapunov =
                    Some(analysis::lyapunov_exponent(&shape, pp, cfg.steps).exponent);
            }
            let jacobian_det = cfg
                .analysis
                .jacobian
                .then(|| analysis::finite_diff_jacobian(&shape, pp, analysis::FD_EPS).ok())
                .flatten()
                .map(|m| m.det());
            let periodic = cfg
                .analysis
                .periodic
                .then(|| {
                    analysis::detect_periodic(&shape, pp, cfg.analysis.max_period, cfg.analysis.tol)
                })
                .flatten()
                .map(|r| PeriodicSummary {
                    period: r.period,
                    closure_error: r.closure_error,
                    determinant: r.monodromy.det(),
                    eigenvalues: r.eigenvalues.map(|l| [l.re, l.im]),
                    unit_eigenvalue_gap: r.unit_eigenvalue_gap(),
                });
            let s = &rec.summary;
            let report = OrbitReport {
                index: i,
                termination: rec.termination.label(),
                records: rec.samples.len(),
                steps_completed: s.steps_completed,
                max_radius: s.max_radius,
                height_drift: s.height_drift,
                invariant_drift: s.invariant_drift,
                measured_rotation: s.measured_rotation,
                lyapunov: s.lyapunov,
                restarts: s.restarts,
                jacobian_det,
                periodic,
            };
            (rec, report)
        })
        .collect();
    let (records, reports) = results.into_iter().unzip();
    Ok(ScenarioRun {
        id: cfg.id.clone(),
        shape,
        records,
        reports,
    })
}

pub const CSV_HEADER: &str = "step,px,py,angle,wx,wy";

/// Fixed scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row per recorded iterate; the bounce columns are empty when the next ray
/// misses or hits a corner.
pub fn export_orbit_csv(rec: &OrbitRecord) -> String {
    let mut out = String::with_capacity(64 * (rec.samples.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &rec.samples {
        let (wx, wy) = match s.bounce {
            Some(w) => (fmt_f64(w.x), fmt_f64(w.y)),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.step,
            fmt_f64(s.point.p.x),
            fmt_f64(s.point.p.y),
            fmt_f64(s.point.v.radians()),
            wx,
            wy
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub step: usize,
    pub p: Vec2,
    pub angle: f64,
    pub bounce: Option<Vec2>,
}

/// Reads back the output of [`export_orbit_csv`].
pub fn parse_orbit_csv(text: &str) -> Result<Vec<CsvRow>, ConfigError> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(ConfigError::Validation("missing CSV header".into()));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = |what: &str| ConfigError::Validation(format!("row {}: bad {what}", i + 1));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad("column count"));
            }
            let num = |s: &str, what: &str| s.parse::<f64>().map_err(|_| bad(what));
            let bounce = if f[4].is_empty() && f[5].is_empty() {
                None
            } else {
                Some(Vec2::new(num(f[4], "wx")?, num(f[5], "wy")?))
            };
            Ok(CsvRow {
                step: f[0].parse().map_err(|_| bad("step"))?,
                p: Vec2::new(num(f[1], "px")?, num(f[2], "py")?),
                angle: num(f[3], "angle")?,
                bounce,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub width: f64,
    pub dot_radius: f64,
    pub outline_samples: usize,
    pub palette: Vec<String>,
    /// Plot the recorded bounce points instead of the phase-point positions.
    pub plot_bounces: bool,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            width: 600.0,
            dot_radius: 1.2,
            outline_samples: 256,
            palette: ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"]
                .map(String::from)
                .to_vec(),
            plot_bounces: false,
        }
    }
}

fn record_points<'a>(rec: &'a OrbitRecord, style: &SvgStyle) -> impl Iterator<Item = Vec2> + 'a {
    let bounces = style.plot_bounces;
    rec.samples
        .iter()
        .filter_map(move |s| if bounces { s.bounce } else { Some(s.point.p) })
        .filter(|p| p.is_finite())
}

/// Standalone SVG of the shape outline and the orbit point clouds, one colour per record.
pub fn render_svg(shape: &Shape, records: &[OrbitRecord], style: &SvgStyle) -> String {
    let outline = shape.outline(style.outline_samples.max(2));
    let (mut lo, mut hi) = (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    let all = outline
        .iter()
        .copied()
        .chain(records.iter().flat_map(|r| record_points(r, style)));
    for p in all {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let mut span = Vec2::new(hi.x - lo.x, hi.y - lo.y);
    // keep flat shapes (the segment) visible
    let min_span = 1e-3 * span.x.max(span.y).max(1.0);
    for (l, s) in [(&mut lo.x, &mut span.x), (&mut lo.y, &mut span.y)] {
        if *s < min_span {
            *l -= 0.5 * (min_span - *s);
            *s = min_span;
        }
    }
    let margin = 0.05 * span.x.max(span.y);
    lo = Vec2::new(lo.x - margin, lo.y - margin);
    span = Vec2::new(span.x + 2.0 * margin, span.y + 2.0 * margin);
    let scale = style.width / span.x;
    let height = span.y * scale;
    let map = |p: Vec2| ((p.x - lo.x) * scale, (lo.y + span.y - p.y) * scale);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.2}" height="{:.2}" viewBox="0 0 {:.2} {:.2}">"#,
        style.width, height, style.width, height
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let mut path = String::new();
    for (i, &p) in outline.iter().enumerate() {
        let (x, y) = map(p);
        let _ = write!(path, "{}{x:.3},{y:.3} ", if i == 0 { "M" } else { "L" });
    }
    if matches!(shape, Shape::Polygon { .. } | Shape::Disc { .. } | Shape::Ellipse { .. }) {
        path.push('Z');
    }
    let _ = writeln!(
        out,
        r##"<path d="{}" fill="#eeeeee" stroke="black" stroke-width="1.5"/>"##,
        path.trim_end()
    );
    for (i, rec) in records.iter().enumerate() {
        let colour = style
            .palette
            .get(i % style.palette.len().max(1))
            .map(String::as_str)
            .unwrap_or("black");
        let _ = writeln!(out, r#"<g fill="{colour}">"#);
        for p in record_points(rec, style) {
            let (x, y) = map(p);
            let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.2}"/>"#, style.dot_radius);
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Height,
    InvariantA,
    LaunchAngle,
    LoopRadius,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Height => "height",
            SweepParam::InvariantA => "invariant_a",
            SweepParam::LaunchAngle => "launch_angle",
            SweepParam::LoopRadius => "loop_radius",
        }
    }
}

/// What each grid cell computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTask {
    /// Orbit of the base scenario's first initial condition, with summary fields.
    Orbit,
    /// Predicted and measured rotation number on the segment's invariant ellipse.
    Rotation,
    /// Fixed points on a circle around the shape.
    FixedPoints,
    /// Residuals of the symmetric period-4 orbits against their loci.
    Period4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: ScenarioConfig,
    pub task: SweepTask,
    pub axes: Vec<SweepAxis>,
    #[serde(default = "default_max_cells")]
    pub max_cells: usize,
    #[serde(default)]
    pub fixed_point_samples: Option<usize>,
}

fn default_max_cells() -> usize {
    DEFAULT_MAX_CELLS
}

pub fn parse_sweep(text: &str) -> Result<SweepConfig, ConfigError> {
    let cfg: SweepConfig = from_json(text)?;
    cfg.validate()?;
    Ok(cfg)
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.base.validate()?;
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(ConfigError::Validation("a sweep has one or two axes".into()));
        }
        if self.axes.iter().any(|a| a.values.is_empty()) {
            return Err(ConfigError::Validation("every axis needs at least one value".into()));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(ConfigError::Validation("the two axes must differ".into()));
        }
        let cells: usize = self.axes.iter().map(|a| a.values.len()).product();
        if cells > self.max_cells {
            return Err(ConfigError::Validation(format!(
                "{cells} cells exceed the maximum of {}",
                self.max_cells
            )));
        }
        Ok(())
    }

    /// Parameter assignments of every cell, first axis slowest.
    pub fn cells(&self) -> Vec<Vec<(SweepParam, f64)>> {
        let mut cells = vec![Vec::new()];
        for axis in &self.axes {
            cells = cells
                .into_iter()
                .flat_map(|c| {
                    axis.values.iter().map(move |&v| {
                        let mut c = c.clone();
                        c.push((axis.param, v));
                        c
                    })
                })
                .collect();
        }
        cells
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub cell: usize,
    pub params: BTreeMap<String, f64>,
    pub fields: BTreeMap<String, f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub task: SweepTask,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn column(&self, field: &str) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.fields.get(field).copied()).collect()
    }

    pub fn to_csv(&self) -> String {
        let params: Vec<String> = self
            .rows
            .first()
            .map(|r| r.params.keys().cloned().collect())
            .unwrap_or_default();
        let mut fields: Vec<String> = Vec::new();
        for r in &self.rows {
            for k in r.fields.keys() {
                if !fields.contains(k) {
                    fields.push(k.clone());
                }
            }
        }
        fields.sort();
        let mut out = String::from("cell");
        for name in params.iter().chain(&fields) {
            out.push(',');
            out.push_str(name);
        }
        out.push_str(",error\n");
        for r in &self.rows {
            out.push_str(&r.cell.to_string());
            for v in params.iter().map(|k| r.params.get(k)).chain(fields.iter().map(|k| r.fields.get(k))) {
                out.push(',');
                if let Some(v) = v {
                    out.push_str(&fmt_f64(*v));
                }
            }
            out.push(',');
            if let Some(e) = &r.error {
                out.push('"');
                out.push_str(&e.replace('"', "'"));
                out.push('"');
            }
            out.push('\n');
        }
        out
    }
}

fn param(cell: &[(SweepParam, f64)], p: SweepParam) -> Option<f64> {
    cell.iter().find(|(q, _)| *q == p).map(|&(_, v)| v)
}

fn run_cell(cfg: &SweepConfig, shape: &Shape, cell: &[(SweepParam, f64)]) -> Result<BTreeMap<String, f64>, String> {
    let mut fields = BTreeMap::new();
    let base = &cfg.base;
    let height = param(cell, SweepParam::Height);
    let inv_a = param(cell, SweepParam::InvariantA);
    let launch = param(cell, SweepParam::LaunchAngle);
    match cfg.task {
        SweepTask::Orbit => {
            let start = sweep_start(base, shape, height, inv_a, launch)?;
            let rec = dynamics::orbit(
                shape,
                &start,
                base.steps,
                base.record_every,
                OrbitOptions {
                    restart_on_degenerate: base.restart_on_degenerate,
                },
            );
            let s = rec.summary;
            fields.insert("steps_completed".into(), s.steps_completed as f64);
            fields.insert("max_radius".into(), s.max_radius);
            let terminated = !matches!(rec.termination, Termination::Completed);
            fields.insert("terminated".into(), if terminated { 1.0 } else { 0.0 });
            for (k, v) in [
                ("height_drift", s.height_drift),
                ("invariant_drift", s.invariant_drift),
                ("measured_rotation", s.measured_rotation),
            ] {
                if let Some(v) = v {
                    fields.insert(k.into(), v);
                }
            }
            if base.analysis.lyapunov {
                let l = analysis::lyapunov_exponent(shape, &start, base.steps);
                fields.insert("lyapunov".into(), l.exponent);
            }
        }
        SweepTask::Rotation => {
            let h = height.unwrap_or(1.0);
            let a = inv_a.ok_or("rotation sweep needs invariant_a")?;
            if !(a > 0.0 && a < 1.0 && h > 0.0) {
                return Err(format!("no invariant ellipse for a={a}, h={h}"));
            }
            let b = segment_theory::b_of(a, h);
            let predicted = segment_theory::rotation_number(a, b);
            fields.insert("b".into(), b);
            fields.insert("phi".into(), predicted.phi);
            fields.insert("phi_prime".into(), predicted.phi_prime);
            if base.steps > 0 {
                let s = segment_theory::state_on_ellipse(h, a, 0.0).map_err(|e| e.to_string())?;
                let e = segment_theory::to_ellipse_coords(&s);
                let measured =
                    segment_theory::measured_rotation(&e, base.steps).map_err(|e| e.to_string())?;
                fields.insert("measured".into(), measured);
                fields.insert("rotation_error".into(), (measured - predicted.phi).abs());
            }
        }
        SweepTask::FixedPoints => {
            let r = param(cell, SweepParam::LoopRadius).ok_or("fixed_points sweep needs loop_radius")?;
            let lp = SearchLoop::around(shape, r);
            let n = cfg.fixed_point_samples.unwrap_or(analysis::DEFAULT_LOOP_SAMPLES);
            let fps = analysis::find_fixed_points(shape, &lp, n);
            let residual = fps
                .iter()
                .map(|z| dynamics::apply(shape, z).map(|o| o.distance(z)).unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max);
            fields.insert("count".into(), fps.len() as f64);
            fields.insert("max_residual".into(), residual);
        }
        SweepTask::Period4 => {
            let h = height.ok_or("period4 sweep needs height")?;
            let loci = period4_loci(h).map_err(|e| e.to_string())?;
            fields.insert("a".into(), loci.a);
            fields.insert("m_circle_residual".into(), loci.m_residual);
            fields.insert("w_ellipse_residual".into(), loci.w_residual);
            fields.insert("closure_error".into(), loci.closure_error);
        }
    }
    Ok(fields)
}

/// Start point of an orbit cell: the base initial condition with swept values applied.
fn sweep_start(
    base: &ScenarioConfig,
    shape: &Shape,
    height: Option<f64>,
    inv_a: Option<f64>,
    launch: Option<f64>,
) -> Result<PhasePoint, String> {
    if let Some(a) = inv_a {
        let h = height.unwrap_or(1.0);
        let s = segment_theory::state_on_ellipse(h, a, launch.unwrap_or(0.0)).map_err(|e| e.to_string())?;
        return Ok(s.to_phase_point());
    }
    let mut start = base.initial[0].to_phase_point();
    match (*shape == Shape::Segment, base.initial[0]) {
        (true, InitialSpec::Segment(mut s)) => {
            if let Some(h) = height {
                s.h = h;
            }
            if let Some(t) = launch {
                s.theta = t;
            }
            let st = SegmentState::new(s.x, s.h, s.theta).map_err(|e| e.to_string())?;
            start = st.to_phase_point();
        }
        _ => {
            if let Some(h) = height {
                start.p.y = h;
            }
            if let Some(t) = launch {
                start.v = Angle::new(t);
            }
        }
    }
    Ok(start)
}

/// Both symmetric period-4 orbits at height `h` (`a = b = sqrt(1 - h²)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Period4Loci {
    pub a: f64,
    /// Largest `|x² + h² - 1|` over the extreme points of the M orbit.
    pub m_residual: f64,
    /// Largest `|x²/2 + h² - 1|` over the extreme points of the W orbit.
    pub w_residual: f64,
    pub closure_error: f64,
    pub m_points: [Vec2; 4],
    pub w_points: [Vec2; 4],
}

pub fn period4_loci(h: f64) -> crate::Result<Period4Loci> {
    if !(h > 0.0 && h < 1.0) {
        return Err(crate::Error::ParameterOutOfDomain(h));
    }
    let a = (1.0 - h * h).sqrt();
    let mut closure: f64 = 0.0;
    let mut run = |phase: f64| -> crate::Result<[Vec2; 4]> {
        let start = segment_theory::state_on_ellipse(h, a, phase)?;
        let mut s = start;
        let mut pts = [Vec2::ZERO; 4];
        for p in pts.iter_mut() {
            *p = Vec2::new(s.x, s.h);
            s = dynamics::step_segment(&s)?;
        }
        closure = closure.max((s.x - start.x).abs() + (s.theta - start.theta).abs());
        Ok(pts)
    };
    let m_points = run(0.0)?;
    let w_points = run(-FRAC_PI_2 / 2.0)?;
    let m_residual = extremes(&m_points).map(|p| (p.norm_sq() - 1.0).abs()).fold(0.0, f64::max);
    let w_residual = extremes(&w_points)
        .map(|p| (p.x * p.x / 2.0 + p.y * p.y - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(Period4Loci {
        a,
        m_residual,
        w_residual,
        closure_error: closure,
        m_points,
        w_points,
    })
}

/// Orbit points with the largest `|x|`.
fn extremes(points: &[Vec2; 4]) -> impl Iterator<Item = Vec2> + '_ {
    let reach = points.iter().map(|p| p.x.abs()).fold(0.0, f64::max);
    points.iter().copied().filter(move |p| p.x.abs() >= reach - 1e-6)
}

/// Evaluates every cell on a pool of `threads` workers (0 = rayon's default). Rows come
/// back in cell order whatever the execution order.
pub fn run_sweep(cfg: &SweepConfig, threads: usize) -> crate::Result<SweepReport> {
    cfg.validate().map_err(|e| crate::Error::InvalidShape(e.to_string()))?;
    let shape = cfg.base.shape()?;
    let cells = cfg.cells();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| crate::Error::InvalidShape(e.to_string()))?;
    let rows = pool.install(|| {
        cells
            .par_iter()
            .enumerate()
            .map(|(i, cell)| {
                let params = cell.iter().map(|&(p, v)| (p.name().to_string(), v)).collect();
                match run_cell(cfg, &shape, cell) {
                    Ok(fields) => SweepRow {
                        cell: i,
                        params,
                        fields,
                        error: None,
                    },
                    Err(e) => SweepRow {
                        cell: i,
                        params,
                        fields: BTreeMap::new(),
                        error: Some(e),
                    },
                }
            })
            .collect()
    });
    Ok(SweepReport {
        task: cfg.task,
        rows,
    })
}
