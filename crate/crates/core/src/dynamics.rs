//! The bouncing outer billiard map and orbit iteration.
//!
//! One step of the map takes a phase point `(p, v)` through three moves:
//!
//! 1. the ray from `p` along `v` bounces specularly off the boundary at `w`;
//! 2. `p'` is placed on the reflected ray with `|p' - w| = |p - w|`;
//! 3. the direction `u` from `p'` back to `w` is mirrored across the bisector of the
//!    visual cone at `p'`, giving the new direction `v'`.
//!
//! On the segment `[-1, 1] x {0}` the map has the closed form implemented by
//! [`step_segment`], in coordinates `(x, h, θ)` with `θ = arg(v) + π/2`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::geometry::{Angle, BounceData, Shape, Vec2, VisualCone, TOL_CORNER};
use crate::segment_theory;

/// Angular nudge applied when restarting after a degenerate bounce.
pub const RESTART_NUDGE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub p: Vec2,
    pub v: Angle,
}

impl PhasePoint {
    pub fn new(p: Vec2, v: Angle) -> Self {
        Self { p, v }
    }

    /// Position distance plus wrapped angular distance.
    pub fn distance(&self, other: &PhasePoint) -> f64 {
        self.p.distance(other.p) + self.v.diff(other.v).abs()
    }
}

/// Coordinates of a phase point above the segment: position `(x, h)` and
/// `θ = arg(v) + π/2`, so `θ = 0` points straight down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentState {
    pub x: f64,
    pub h: f64,
    pub theta: f64,
}

impl SegmentState {
    pub fn new(x: f64, h: f64, theta: f64) -> Result<Self> {
        let s = Self { x, h, theta };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidSegmentState(format!("height must be positive, got {}", self.h)));
        }
        if !(self.theta.abs() < FRAC_PI_2) || !self.x.is_finite() {
            return Err(Error::InvalidSegmentState(format!(
                "theta must lie in (-pi/2, pi/2), got {}",
                self.theta
            )));
        }
        let w = self.bounce_x();
        if w.abs() > 1.0 {
            return Err(Error::BounceOffSegment(w.abs()));
        }
        Ok(())
    }

    /// `x` coordinate of the bounce point, `x + h tan θ`.
    pub fn bounce_x(&self) -> f64 {
        self.x + self.h * self.theta.tan()
    }

    pub fn to_phase_point(&self) -> PhasePoint {
        PhasePoint::new(Vec2::new(self.x, self.h), Angle::new(self.theta - FRAC_PI_2))
    }

    /// Converts a phase point off the segment's line. Points below the line are mirrored
    /// to the upper half-plane first (the dynamics commute with `y -> -y`).
    pub fn from_phase_point(pp: &PhasePoint) -> Result<Self> {
        let (y, v) = if pp.p.y < 0.0 {
            (-pp.p.y, -pp.v.radians())
        } else {
            (pp.p.y, pp.v.radians())
        };
        let theta = Angle::new(v + FRAC_PI_2).radians();
        SegmentState::new(pp.p.x, y, theta)
    }
}

/// Every intermediate quantity of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepTrace {
    pub input: PhasePoint,
    pub bounce: BounceData,
    pub reflected_dir: Angle,
    pub p_prime: Vec2,
    /// Direction from `p_prime` back to the bounce point.
    pub u: Angle,
    pub cone: VisualCone,
    pub output: PhasePoint,
}

pub fn in_visibility_domain(shape: &Shape, pp: &PhasePoint) -> bool {
    !shape.contains(pp.p) && matches!(shape.ray_intersect(pp.p, pp.v), Ok(Some(_)))
}

/// One application of the billiard map.
pub fn step(shape: &Shape, pp: &PhasePoint) -> Result<StepTrace> {
    if shape.contains(pp.p) {
        return Err(Error::NotVisible);
    }
    let bounce = shape.ray_intersect(pp.p, pp.v)?.ok_or(Error::NotVisible)?;
    let d = Vec2::from_angle(pp.v);
    let t = Vec2::from_angle(bounce.tangent_dir);
    let r = t * (2.0 * d.dot(t)) - d;
    let p_prime = bounce.point + r * pp.p.distance(bounce.point);
    if shape.contains(p_prime) {
        return Err(Error::LeftVisibility { point: p_prime });
    }
    let cone = shape
        .visual_cone(p_prime)
        .map_err(|_| Error::LeftVisibility { point: p_prime })?;
    let reflected_dir = r.angle();
    let u = reflected_dir.opposite();
    let v_out = Angle::new(2.0 * cone.bisector.radians() - u.radians());
    Ok(StepTrace {
        input: *pp,
        bounce,
        reflected_dir,
        p_prime,
        u,
        cone,
        output: PhasePoint::new(p_prime, v_out),
    })
}

/// Output phase point only.
pub fn apply(shape: &Shape, pp: &PhasePoint) -> Result<PhasePoint> {
    step(shape, pp).map(|t| t.output)
}

/// Closed-form map on the segment:
/// `x' = x + 2h tan θ`, `θ' = θ + atan((1 - x')/h) + atan((-1 - x')/h)`.
pub fn step_segment(s: &SegmentState) -> Result<SegmentState> {
    let w = s.bounce_x();
    if w.abs() > 1.0 {
        return Err(Error::BounceOffSegment(w.abs()));
    }
    let h = s.h;
    let x1 = s.x + 2.0 * h * s.theta.tan();
    let theta1 = s.theta + ((1.0 - x1) / h).atan() + ((-1.0 - x1) / h).atan();
    Ok(SegmentState { x: x1, h, theta: theta1 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSample {
    pub step: usize,
    pub point: PhasePoint,
    /// Where the ray of `point` next hits the boundary.
    pub bounce: Option<Vec2>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Completed,
    DegenerateBounce { step: usize },
    LeftDomain { step: usize },
}

impl Termination {
    pub fn label(&self) -> String {
        match self {
            Termination::Completed => "completed".into(),
            Termination::DegenerateBounce { step } => format!("degenerate_bounce({step})"),
            Termination::LeftDomain { step } => format!("left_domain({step})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OrbitSummary {
    pub steps_completed: usize,
    /// Largest `|p|` seen along the orbit (all iterates, not just recorded ones).
    pub max_radius: f64,
    /// Segment only: largest `|y - y0|`.
    pub height_drift: Option<f64>,
    /// Segment only: largest relative change of the invariant `a²`.
    pub invariant_drift: Option<f64>,
    /// Segment only: mean rotation per step on the invariant ellipse.
    pub measured_rotation: Option<f64>,
    pub lyapunov: Option<f64>,
    /// Number of non-canonical restarts after degenerate bounces.
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord {
    pub scenario_id: String,
    pub samples: Vec<OrbitSample>,
    pub termination: Termination,
    pub summary: OrbitSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OrbitOptions {
    /// Nudge the direction by [`RESTART_NUDGE`] and continue after a degenerate bounce.
    /// Off by default: the nudged orbit is not the true orbit.
    pub restart_on_degenerate: bool,
}

/// Iterates the map `n_steps` times (or until an error), keeping every
/// `record_every`-th phase point.
pub fn orbit(
    shape: &Shape,
    start: &PhasePoint,
    n_steps: usize,
    record_every: usize,
    options: OrbitOptions,
) -> OrbitRecord {
    let record_every = record_every.max(1);
    let mut samples = Vec::with_capacity(n_steps / record_every + 1);
    let mut summary = OrbitSummary {
        max_radius: start.p.norm(),
        ..Default::default()
    };
    let segment_start = match shape {
        Shape::Segment => SegmentState::from_phase_point(start).ok(),
        _ => None,
    };
    let start_invariant = segment_start
        .map(|s| segment_theory::to_ellipse_coords(&s))
        .and_then(|e| segment_theory::invariants(&e).ok());
    let mut rotation = segment_start
        .zip(start_invariant)
        .map(|(s, inv)| RotationTracker::new(&s, inv));
    let mut height_drift: f64 = 0.0;
    let mut invariant_drift: f64 = 0.0;

    // On the segment the closed form is iterated, so heights are conserved exactly;
    // starts below the line are mirrored in and out.
    let mirrored = start.p.y < 0.0;
    let mut seg = segment_start;
    let mut current = *start;
    let mut termination = Termination::Completed;
    let mut step_idx = 0;
    while step_idx < n_steps {
        let result = match seg.as_mut() {
            Some(s) => segment_advance(s, mirrored),
            None => step(shape, &current).map(|t| (t.bounce.point, t.output)),
        };
        let (bounce, output) = match result {
            Ok(t) => t,
            Err(Error::DegenerateBounce { .. }) if options.restart_on_degenerate => {
                summary.restarts += 1;
                current.v = current.v + RESTART_NUDGE;
                if let Some(s) = seg.as_mut() {
                    s.theta += if mirrored { -RESTART_NUDGE } else { RESTART_NUDGE };
                }
                if summary.restarts > 1000 {
                    termination = Termination::DegenerateBounce { step: step_idx };
                    break;
                }
                continue;
            }
            Err(Error::DegenerateBounce { .. }) => {
                termination = Termination::DegenerateBounce { step: step_idx };
                break;
            }
            Err(_) => {
                termination = Termination::LeftDomain { step: step_idx };
                break;
            }
        };
        if step_idx % record_every == 0 {
            samples.push(OrbitSample {
                step: step_idx,
                point: current,
                bounce: Some(bounce),
            });
        }
        current = output;
        step_idx += 1;
        summary.max_radius = summary.max_radius.max(current.p.norm());
        if let Some(s0) = segment_start {
            height_drift = height_drift.max((current.p.y.abs() - s0.h).abs());
            if let (Some(inv0), Some(s)) = (start_invariant, seg) {
                let e = segment_theory::to_ellipse_coords(&s);
                let a_sq = segment_theory::a_squared(&e);
                invariant_drift = invariant_drift.max(((a_sq - inv0.a_sq) / inv0.a_sq).abs());
                if let Some(tr) = rotation.as_mut() {
                    tr.push(&e);
                }
            }
        }
    }
    if termination == Termination::Completed && step_idx % record_every == 0 {
        let bounce = match seg {
            Some(s) => Some(Vec2::new(s.bounce_x(), 0.0)).filter(|w| w.x.abs() < 1.0 - TOL_CORNER),
            None => shape.ray_intersect(current.p, current.v).ok().flatten().map(|b| b.point),
        };
        samples.push(OrbitSample {
            step: step_idx,
            point: current,
            bounce,
        });
    }
    summary.steps_completed = step_idx;
    if segment_start.is_some() {
        summary.height_drift = Some(height_drift);
        if start_invariant.is_some() {
            summary.invariant_drift = Some(invariant_drift);
        }
        summary.measured_rotation = rotation.and_then(|r| r.mean());
    }
    OrbitRecord {
        scenario_id: String::new(),
        samples,
        termination,
        summary,
    }
}

/// One closed-form segment step; returns the bounce and the new phase point.
fn segment_advance(s: &mut SegmentState, mirrored: bool) -> Result<(Vec2, PhasePoint)> {
    let w = s.bounce_x();
    if w.abs() > 1.0 + TOL_CORNER {
        return Err(Error::BounceOffSegment(w.abs()));
    }
    if w.abs() >= 1.0 - TOL_CORNER {
        return Err(Error::DegenerateBounce { point: Vec2::new(w, 0.0) });
    }
    *s = step_segment(s)?;
    let mut pp = s.to_phase_point();
    if mirrored {
        pp = PhasePoint::new(Vec2::new(pp.p.x, -pp.p.y), Angle::new(-pp.v.radians()));
    }
    Ok((Vec2::new(w, 0.0), pp))
}

/// Accumulates phase increments on the invariant ellipse.
struct RotationTracker {
    inv: segment_theory::Invariants,
    last: f64,
    total: f64,
    count: usize,
}

impl RotationTracker {
    fn new(s: &SegmentState, inv: segment_theory::Invariants) -> Self {
        let e = segment_theory::to_ellipse_coords(s);
        Self {
            inv,
            last: segment_theory::ellipse_phase(&e, &inv),
            total: 0.0,
            count: 0,
        }
    }

    fn push(&mut self, e: &segment_theory::EllipseCoords) {
        let phase = segment_theory::ellipse_phase(e, &self.inv);
        self.total += (phase - self.last).rem_euclid(2.0 * PI);
        self.last = phase;
        self.count += 1;
    }

    fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.total / self.count as f64)
    }
}
