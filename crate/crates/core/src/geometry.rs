//! Shapes and the geometric primitives the billiard map is built from:
//! ray/boundary intersection, visual cones and boundary tangent/curvature data.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Relative tolerance for "on the boundary" decisions.
pub const TOL_BOUNDARY: f64 = 1e-12;
/// Distance from a polygon vertex or arc endpoint below which a bounce is degenerate.
pub const TOL_CORNER: f64 = 1e-9;
/// Relative slack on the tangency discriminant; grazing rays within it count as hits.
pub const TOL_TANGENCY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector pointing along `angle`.
    pub fn from_angle(angle: Angle) -> Self {
        let (s, c) = angle.radians().sin_cos();
        Self::new(c, s)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn normalized(self) -> Vec2 {
        self * (1.0 / self.norm())
    }

    pub fn angle(self) -> Angle {
        Angle::new(self.y.atan2(self.x))
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A direction in the plane, always stored in (-π, π].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Angle(f64);

impl Angle {
    pub fn new(radians: f64) -> Self {
        Angle(normalize_angle(radians))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Signed difference `self - other`, wrapped into (-π, π].
    pub fn diff(self, other: Angle) -> f64 {
        normalize_angle(self.0 - other.0)
    }

    pub fn opposite(self) -> Angle {
        Angle::new(self.0 + PI)
    }
}

impl Add<f64> for Angle {
    type Output = Angle;
    fn add(self, rhs: f64) -> Angle {
        Angle::new(self.0 + rhs)
    }
}

impl Sub<f64> for Angle {
    type Output = Angle;
    fn sub(self, rhs: f64) -> Angle {
        Angle::new(self.0 - rhs)
    }
}

/// Wraps an angle into (-π, π].
pub fn normalize_angle(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// The convex bodies (and the one non-convex arc) the billiard runs on.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// The segment [-1, 1] x {0}.
    Segment,
    /// Strictly convex polygon, vertices counterclockwise.
    Polygon { vertices: Vec<Vec2> },
    Disc { center: Vec2, radius: f64 },
    /// Axis-aligned ellipse centred at the origin with semi-axes `a >= b`.
    Ellipse { a: f64, b: f64 },
    /// Graph of `height * (1 - x^2)` over [-1, 1].
    ParabolaArc { height: f64 },
}

/// Data attached to a point of the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BounceData {
    pub point: Vec2,
    pub tangent_dir: Angle,
    pub curvature: f64,
    pub boundary_param: f64,
}

/// Closed cone of directions from an apex to the shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisualCone {
    /// Clockwise-most boundary ray.
    pub ray_h: Angle,
    /// Counterclockwise-most boundary ray.
    pub ray_k: Angle,
    pub bisector: Angle,
}

impl VisualCone {
    pub fn width(&self) -> f64 {
        self.ray_k.diff(self.ray_h).rem_euclid(TAU)
    }

    /// Whether `dir` lies inside the closed cone, with slack `tol` radians.
    pub fn contains(&self, dir: Angle, tol: f64) -> bool {
        dir.diff(self.bisector).abs() <= 0.5 * self.width() + tol
    }

    /// Builds the cone spanned by two boundary directions; `reference` must point into it.
    fn from_extremes(reference: Vec2, d1: Vec2, d2: Vec2, apex: Vec2) -> Result<Self> {
        let rel = |d: Vec2| reference.cross(d).atan2(reference.dot(d));
        let (mut lo, mut hi) = (rel(d1), rel(d2));
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
        if hi - lo <= 0.0 || !(hi - lo).is_finite() {
            return Err(Error::EmptyCone { point: apex });
        }
        let base = reference.y.atan2(reference.x);
        Ok(VisualCone {
            ray_h: Angle::new(base + lo),
            ray_k: Angle::new(base + hi),
            bisector: Angle::new(base + 0.5 * (lo + hi)),
        })
    }
}

impl Shape {
    pub fn segment() -> Self {
        Shape::Segment
    }

    pub fn disc(center: Vec2, radius: f64) -> Result<Self> {
        let s = Shape::Disc { center, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        let s = Shape::Ellipse { a, b };
        s.validate()?;
        Ok(s)
    }

    pub fn parabola(height: f64) -> Result<Self> {
        let s = Shape::ParabolaArc { height };
        s.validate()?;
        Ok(s)
    }

    pub fn polygon(vertices: Vec<Vec2>) -> Result<Self> {
        let s = Shape::Polygon { vertices };
        s.validate()?;
        Ok(s)
    }

    /// The square [-1, 1]^2; each side is a copy of the unit segment.
    pub fn square() -> Self {
        Shape::Polygon {
            vertices: vec![
                Vec2::new(-1.0, -1.0),
                Vec2::new(1.0, -1.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(-1.0, 1.0),
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Shape::Segment => Ok(()),
            Shape::Disc { center, radius } => {
                if !center.is_finite() || !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidShape(format!(
                        "disc radius must be positive and finite, got {radius}"
                    )));
                }
                Ok(())
            }
            Shape::Ellipse { a, b } => {
                if !(a.is_finite() && b.is_finite() && *b > 0.0 && a >= b) {
                    return Err(Error::InvalidShape(format!(
                        "ellipse needs a >= b > 0, got a={a}, b={b}"
                    )));
                }
                Ok(())
            }
            Shape::ParabolaArc { height } => {
                if !(height.is_finite() && *height > 0.0) {
                    return Err(Error::InvalidShape(format!(
                        "parabola height must be positive, got {height}"
                    )));
                }
                Ok(())
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                if n < 3 {
                    return Err(Error::InvalidShape(format!(
                        "polygon needs at least 3 vertices, got {n}"
                    )));
                }
                if vertices.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidShape("non-finite polygon vertex".into()));
                }
                for i in 0..n {
                    let e1 = vertices[(i + 1) % n] - vertices[i];
                    let e2 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
                    let scale = e1.norm() * e2.norm();
                    if e1.cross(e2) <= TOL_BOUNDARY * scale {
                        return Err(Error::InvalidShape(format!(
                            "polygon is not strictly convex and counterclockwise at vertex {}",
                            (i + 1) % n
                        )));
                    }
                }
                // a star polygon passes the local test, so require total turning of 2π
                let turning: f64 = (0..n)
                    .map(|i| {
                        let e1 = vertices[(i + 1) % n] - vertices[i];
                        let e2 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
                        e1.cross(e2).atan2(e1.dot(e2))
                    })
                    .sum();
                if (turning - TAU).abs() > 1e-6 {
                    return Err(Error::InvalidShape("polygon winds more than once".into()));
                }
                Ok(())
            }
        }
    }

    /// A point in the interior (or the middle of the arc/segment).
    pub fn centroid(&self) -> Vec2 {
        match self {
            Shape::Segment | Shape::Ellipse { .. } => Vec2::ZERO,
            Shape::Disc { center, .. } => *center,
            Shape::ParabolaArc { height } => Vec2::new(0.0, 0.5 * height),
            Shape::Polygon { vertices } => {
                let sum = vertices.iter().fold(Vec2::ZERO, |acc, &v| acc + v);
                sum * (1.0 / vertices.len() as f64)
            }
        }
    }

    /// Rough size used to turn relative tolerances into absolute ones.
    pub fn diameter(&self) -> f64 {
        match self {
            Shape::Segment => 2.0,
            Shape::Disc { radius, .. } => 2.0 * radius,
            Shape::Ellipse { a, .. } => 2.0 * a,
            Shape::ParabolaArc { height } => 2.0_f64.hypot(*height),
            Shape::Polygon { vertices } => {
                let mut d: f64 = 0.0;
                for (i, p) in vertices.iter().enumerate() {
                    for q in &vertices[i + 1..] {
                        d = d.max(p.distance(*q));
                    }
                }
                d
            }
        }
    }

    /// Whether `p` lies in the closed region bounded by the shape. For the parabola arc the
    /// region is everything on or below the graph over [-1, 1].
    pub fn contains(&self, p: Vec2) -> bool {
        let tol = TOL_BOUNDARY * self.diameter();
        match self {
            Shape::Segment => p.y.abs() <= tol && p.x.abs() <= 1.0 + tol,
            Shape::Disc { center, radius } => p.distance(*center) <= radius + tol,
            Shape::Ellipse { a, b } => {
                (p.x / a).powi(2) + (p.y / b).powi(2) <= 1.0 + TOL_BOUNDARY
            }
            Shape::ParabolaArc { height } => {
                p.x.abs() <= 1.0 + tol && p.y <= parabola_y(*height, p.x) + tol
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| {
                    let e = vertices[(i + 1) % n] - vertices[i];
                    e.cross(p - vertices[i]) >= -tol * e.norm()
                })
            }
        }
    }

    /// Nearest bounce of the ray `origin + s·dir`, `s > 0`, off the boundary.
    ///
    /// For the parabola arc the origin has to sit strictly above the (infinite) parabola and
    /// the ray's first crossing of that parabola has to land on the arc; otherwise the ray
    /// would reach the arc from underneath and nothing is returned.
    pub fn ray_intersect(&self, origin: Vec2, dir: Angle) -> Result<Option<BounceData>> {
        let d = Vec2::from_angle(dir);
        match self {
            Shape::Segment => segment_hit(origin, d),
            Shape::Polygon { vertices } => polygon_hit(vertices, origin, d),
            Shape::Disc { center, radius } => {
                let m = origin - *center;
                let half_b = m.dot(d);
                let c = m.norm_sq() - radius * radius;
                if c <= 0.0 {
                    return Ok(None);
                }
                let Some(s) = nearest_root(1.0, half_b, c) else {
                    return Ok(None);
                };
                let w = origin + d * s;
                let t = (w - *center).angle();
                Ok(Some(BounceData {
                    point: w,
                    tangent_dir: t + 0.5 * PI,
                    curvature: 1.0 / radius,
                    boundary_param: t.radians(),
                }))
            }
            Shape::Ellipse { a, b } => {
                let o = Vec2::new(origin.x / a, origin.y / b);
                let dd = Vec2::new(d.x / a, d.y / b);
                let c = o.norm_sq() - 1.0;
                if c <= 0.0 {
                    return Ok(None);
                }
                let Some(s) = nearest_root(dd.norm_sq(), o.dot(dd), c) else {
                    return Ok(None);
                };
                let w = origin + d * s;
                let t = (w.y / b).atan2(w.x / a);
                let mut data = ellipse_data(*a, *b, t);
                data.point = w;
                Ok(Some(data))
            }
            Shape::ParabolaArc { height } => {
                let h = *height;
                let c = origin.y - parabola_y(h, origin.x);
                if c <= 0.0 {
                    return Ok(None);
                }
                let qa = h * d.x * d.x;
                let half_b = 0.5 * (d.y + 2.0 * h * origin.x * d.x);
                let Some(s) = nearest_root(qa, half_b, c) else {
                    return Ok(None);
                };
                let w = origin + d * s;
                if w.x.abs() > 1.0 + TOL_CORNER {
                    return Ok(None);
                }
                if w.x.abs() >= 1.0 - TOL_CORNER {
                    return Err(Error::DegenerateBounce { point: w });
                }
                let mut data = parabola_data(h, w.x);
                data.point = w;
                Ok(Some(data))
            }
        }
    }

    /// Cone of directions from `apex` to the shape.
    pub fn visual_cone(&self, apex: Vec2) -> Result<VisualCone> {
        if self.contains(apex) {
            return Err(Error::InsideShape { point: apex });
        }
        match self {
            Shape::Segment => {
                let (l, r) = (Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0));
                VisualCone::from_extremes(-apex, r - apex, l - apex, apex)
            }
            Shape::Polygon { vertices } => {
                let reference = self.centroid() - apex;
                let rel = |v: Vec2| {
                    let d = v - apex;
                    reference.cross(d).atan2(reference.dot(d))
                };
                let mut lo = (f64::INFINITY, Vec2::ZERO);
                let mut hi = (f64::NEG_INFINITY, Vec2::ZERO);
                for &v in vertices {
                    let r = rel(v);
                    if r < lo.0 {
                        lo = (r, v - apex);
                    }
                    if r > hi.0 {
                        hi = (r, v - apex);
                    }
                }
                VisualCone::from_extremes(reference, lo.1, hi.1, apex)
            }
            Shape::Disc { center, radius } => {
                let to_center = *center - apex;
                let half = (radius / to_center.norm()).asin();
                let base = to_center.angle();
                Ok(VisualCone {
                    ray_h: base - half,
                    ray_k: base + half,
                    bisector: base,
                })
            }
            Shape::Ellipse { a, b } => {
                let (t1, t2) = ellipse_tangent_dirs(*a, *b, apex);
                VisualCone::from_extremes(-apex, t1, t2, apex)
            }
            Shape::ParabolaArc { height } => {
                let h = *height;
                if apex.y <= parabola_y(h, apex.x) {
                    return Err(Error::InsideShape { point: apex });
                }
                let (lo, hi) = parabola_visible_range(h, apex).ok_or(Error::EmptyCone { point: apex })?;
                let q_lo = Vec2::new(lo, parabola_y(h, lo));
                let q_hi = Vec2::new(hi, parabola_y(h, hi));
                let mid = 0.5 * (lo + hi);
                let reference = Vec2::new(mid, parabola_y(h, mid)) - apex;
                VisualCone::from_extremes(reference, q_lo - apex, q_hi - apex, apex)
            }
        }
    }

    pub fn bisector_direction(&self, p: Vec2) -> Result<Angle> {
        Ok(self.visual_cone(p)?.bisector)
    }

    /// Point, tangent and curvature at a boundary parameter.
    ///
    /// Parameters: polar/eccentric angle for discs and ellipses, `x` for the segment and the
    /// parabola arc, `edge_index + fraction` in `[0, n)` for polygons.
    pub fn boundary_data(&self, param: f64) -> Result<BounceData> {
        if !param.is_finite() {
            return Err(Error::ParameterOutOfDomain(param));
        }
        match self {
            Shape::Segment | Shape::ParabolaArc { .. } => {
                if param.abs() > 1.0 {
                    return Err(Error::ParameterOutOfDomain(param));
                }
                if param.abs() >= 1.0 - TOL_CORNER {
                    return Err(Error::OnCorner(param));
                }
                match self {
                    Shape::ParabolaArc { height } => Ok(parabola_data(*height, param)),
                    _ => Ok(BounceData {
                        point: Vec2::new(param, 0.0),
                        tangent_dir: Angle::new(0.0),
                        curvature: 0.0,
                        boundary_param: param,
                    }),
                }
            }
            Shape::Disc { center, radius } => {
                let (s, c) = param.sin_cos();
                Ok(BounceData {
                    point: *center + Vec2::new(c, s) * *radius,
                    tangent_dir: Angle::new(param + 0.5 * PI),
                    curvature: 1.0 / radius,
                    boundary_param: param,
                })
            }
            Shape::Ellipse { a, b } => Ok(ellipse_data(*a, *b, param)),
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                if param < 0.0 || param >= n as f64 {
                    return Err(Error::ParameterOutOfDomain(param));
                }
                let i = param.floor() as usize;
                let frac = param - i as f64;
                let (p0, p1) = (vertices[i], vertices[(i + 1) % n]);
                let e = p1 - p0;
                let len = e.norm();
                if frac * len < TOL_CORNER || (1.0 - frac) * len < TOL_CORNER {
                    return Err(Error::OnCorner(param));
                }
                Ok(BounceData {
                    point: p0 + e * frac,
                    tangent_dir: e.angle(),
                    curvature: 0.0,
                    boundary_param: param,
                })
            }
        }
    }

    /// Polyline through the boundary, closed for closed shapes. Used for drawing.
    pub fn outline(&self, samples: usize) -> Vec<Vec2> {
        let samples = samples.max(8);
        match self {
            Shape::Segment => vec![Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0)],
            Shape::Polygon { vertices } => {
                let mut v = vertices.clone();
                v.push(vertices[0]);
                v
            }
            Shape::Disc { center, radius } => (0..=samples)
                .map(|i| {
                    let t = TAU * i as f64 / samples as f64;
                    *center + Vec2::new(t.cos(), t.sin()) * *radius
                })
                .collect(),
            Shape::Ellipse { a, b } => (0..=samples)
                .map(|i| {
                    let t = TAU * i as f64 / samples as f64;
                    Vec2::new(a * t.cos(), b * t.sin())
                })
                .collect(),
            Shape::ParabolaArc { height } => (0..=samples)
                .map(|i| {
                    let x = -1.0 + 2.0 * i as f64 / samples as f64;
                    Vec2::new(x, parabola_y(*height, x))
                })
                .collect(),
        }
    }
}

pub(crate) fn parabola_y(height: f64, x: f64) -> f64 {
    height * (1.0 - x * x)
}

fn parabola_data(height: f64, x: f64) -> BounceData {
    let slope = -2.0 * height * x;
    BounceData {
        point: Vec2::new(x, parabola_y(height, x)),
        tangent_dir: Angle::new(slope.atan()),
        curvature: 2.0 * height / (1.0 + slope * slope).powf(1.5),
        boundary_param: x,
    }
}

fn ellipse_data(a: f64, b: f64, t: f64) -> BounceData {
    let (s, c) = t.sin_cos();
    let q = a * a * s * s + b * b * c * c;
    BounceData {
        point: Vec2::new(a * c, b * s),
        tangent_dir: Angle::new((b * c).atan2(-a * s)),
        curvature: a * b / q.powf(1.5),
        boundary_param: t,
    }
}

/// Smallest positive root of `qa s^2 + 2 half_b s + c = 0` for `c > 0`, `qa >= 0`.
/// Grazing rays with a slightly negative discriminant are accepted as tangent hits.
fn nearest_root(qa: f64, half_b: f64, c: f64) -> Option<f64> {
    if half_b >= 0.0 {
        return None;
    }
    let mut disc = half_b * half_b - qa * c;
    if disc < 0.0 {
        if disc < -TOL_TANGENCY * (half_b * half_b + (qa * c).abs()) {
            return None;
        }
        disc = 0.0;
    }
    // c / (-half_b + sqrt(disc)) is the stable form of the smaller root
    let s = c / (-half_b + disc.sqrt());
    (s > 0.0 && s.is_finite()).then_some(s)
}

fn segment_hit(origin: Vec2, d: Vec2) -> Result<Option<BounceData>> {
    if origin.y.abs() <= TOL_BOUNDARY {
        // travelling along the supporting line: the first contact is an endpoint
        if d.y.abs() <= TOL_BOUNDARY && origin.x.abs() > 1.0 && origin.x * d.x < 0.0 {
            let end = Vec2::new(origin.x.signum(), 0.0);
            return Err(Error::DegenerateBounce { point: end });
        }
        return Ok(None);
    }
    if origin.y * d.y >= 0.0 {
        return Ok(None);
    }
    let s = -origin.y / d.y;
    let x = origin.x + s * d.x;
    if x.abs() > 1.0 + TOL_CORNER {
        return Ok(None);
    }
    if x.abs() >= 1.0 - TOL_CORNER {
        return Err(Error::DegenerateBounce { point: Vec2::new(x, 0.0) });
    }
    Ok(Some(BounceData {
        point: Vec2::new(x, 0.0),
        tangent_dir: Angle::new(0.0),
        curvature: 0.0,
        boundary_param: x,
    }))
}

fn polygon_hit(vertices: &[Vec2], origin: Vec2, d: Vec2) -> Result<Option<BounceData>> {
    let n = vertices.len();
    let mut best: Option<(f64, usize, f64)> = None;
    for i in 0..n {
        let p0 = vertices[i];
        let e = vertices[(i + 1) % n] - p0;
        let denom = d.cross(e);
        if denom.abs() <= f64::EPSILON * e.norm() {
            continue;
        }
        let rel = p0 - origin;
        let s = rel.cross(e) / denom;
        let t = rel.cross(d) / denom;
        let slack = TOL_CORNER / e.norm();
        if s > 0.0 && (-slack..=1.0 + slack).contains(&t) && best.is_none_or(|(bs, _, _)| s < bs)
        {
            best = Some((s, i, t));
        }
    }
    let Some((s, i, t)) = best else {
        return Ok(None);
    };
    let w = origin + d * s;
    if vertices.iter().any(|v| v.distance(w) < TOL_CORNER) {
        return Err(Error::DegenerateBounce { point: w });
    }
    let e = vertices[(i + 1) % n] - vertices[i];
    Ok(Some(BounceData {
        point: w,
        tangent_dir: e.angle(),
        curvature: 0.0,
        boundary_param: i as f64 + t.clamp(0.0, 1.0),
    }))
}

/// The two tangent directions from an exterior `p` to the ellipse `x²/a² + y²/b² = 1`.
///
/// A direction `(c, s)` from `p` is tangent iff the quadratic form
/// `α c² + 2β cs + γ s²` vanishes, with `α = (1 - py²/b²)/a²`, `β = px py/(a² b²)`,
/// `γ = (1 - px²/a²)/b²`; for exterior `p` the form is indefinite and its two null lines
/// are the tangents.
fn ellipse_tangent_dirs(a: f64, b: f64, p: Vec2) -> (Vec2, Vec2) {
    let (a2, b2) = (a * a, b * b);
    let alpha = (1.0 - p.y * p.y / b2) / a2;
    let beta = p.x * p.y / (a2 * b2);
    let gamma = (1.0 - p.x * p.x / a2) / b2;
    let mean = 0.5 * (alpha + gamma);
    let rad = (0.5 * (alpha - gamma)).hypot(beta);
    let (l1, l2) = (mean + rad, mean - rad);
    // eigenvector for l1, picking the better-conditioned formula
    let e1 = if alpha >= gamma {
        Vec2::new(l1 - gamma, beta)
    } else {
        Vec2::new(beta, l1 - alpha)
    };
    let e1 = if e1.norm() == 0.0 { Vec2::new(1.0, 0.0) } else { e1.normalized() };
    let e2 = Vec2::new(-e1.y, e1.x);
    let (s1, s2) = ((-l2).max(0.0).sqrt(), l1.max(0.0).sqrt());
    let orient = |n: Vec2| {
        // the tangency parameter must be positive along the ray
        let o = Vec2::new(p.x / a, p.y / b);
        let dn = Vec2::new(n.x / a, n.y / b);
        if o.dot(dn) > 0.0 {
            -n
        } else {
            n
        }
    };
    (
        orient((e1 * s1 + e2 * s2).normalized()),
        orient((e1 * s1 - e2 * s2).normalized()),
    )
}

/// Range of `x` on the arc visible from `p` (which must be above the parabola).
///
/// Points of the parabola visible from `p` are those whose tangent line passes below `p`,
/// `h q² - 2 h px q + (h - py) <= 0`, i.e. `q` between the two tangency abscissas.
fn parabola_visible_range(height: f64, p: Vec2) -> Option<(f64, f64)> {
    let disc = p.x * p.x - (height - p.y) / height;
    if disc <= 0.0 {
        return None;
    }
    let r = disc.sqrt();
    let lo = (p.x - r).max(-1.0);
    let hi = (p.x + r).min(1.0);
    (hi > lo).then_some((lo, hi))
}
